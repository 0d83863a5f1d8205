use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use torbit::fields::{enumerate_totally_real_fields, quadratic_order, Order, TotallyRealField};
use torbit::forms::wide_class_minima;
use torbit::ideals::{
    class_equal, class_representatives, enumerate_integral_ideals, field_minkowski_stat,
    integral_ideals_of_norm, minimal_class_norm, sigma_d, FractionalIdeal, IdealClass,
};
use torbit::linalg::{q, Q, Z};
use torbit::Error;

fn quad(d: i64) -> Arc<Order> {
    Arc::new(quadratic_order(d).unwrap())
}

fn cubic(c: &[i64]) -> Arc<Order> {
    Arc::new(TotallyRealField::from_coeffs(c).unwrap().maximal_order())
}

/// Upper triangular Hermite bases of all index-`m` sublattices of `Z^n`.
fn sublattices(n: usize, m: u64) -> Vec<Vec<Vec<i64>>> {
    fn rec(
        n: usize,
        row: usize,
        m: u64,
        acc: &mut Vec<Vec<i64>>,
        diag: &mut Vec<i64>,
        out: &mut Vec<Vec<Vec<i64>>>,
    ) {
        if row == n {
            if m == 1 {
                // off-diagonal entries of column j range over [0, diag[j])
                let mut cells = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        cells.push((i, j));
                    }
                }
                fill(&cells, 0, acc, diag, out);
            }
            return;
        }
        for a in 1..=m {
            if m % a == 0 {
                let mut r = vec![0; n];
                r[row] = a as i64;
                acc.push(r);
                diag.push(a as i64);
                rec(n, row + 1, m / a, acc, diag, out);
                acc.pop();
                diag.pop();
            }
        }
    }
    fn fill(
        cells: &[(usize, usize)],
        k: usize,
        acc: &mut Vec<Vec<i64>>,
        diag: &[i64],
        out: &mut Vec<Vec<Vec<i64>>>,
    ) {
        if k == cells.len() {
            out.push(acc.clone());
            return;
        }
        let (i, j) = cells[k];
        for v in 0..diag[j] {
            acc[i][j] = v;
            fill(cells, k + 1, acc, diag, out);
        }
        acc[i][j] = 0;
    }
    let mut out = Vec::new();
    rec(n, 0, m, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

fn in_lattice(basis: &[Vec<i64>], x: &[i64]) -> bool {
    let mut x = x.to_vec();
    for (i, r) in basis.iter().enumerate() {
        if x[i] % r[i] != 0 {
            return false;
        }
        let k = x[i] / r[i];
        for (xj, rj) in x.iter_mut().zip(r) {
            *xj -= k * rj;
        }
    }
    true
}

/// Index-`m` sublattices of the order closed under multiplication.
fn ideals_oracle(o: &Order, m: u64) -> Vec<Vec<Vec<i64>>> {
    let n = o.degree();
    let t = o.mult_table();
    sublattices(n, m)
        .into_iter()
        .filter(|b| {
            b.iter().all(|v| {
                (0..n).all(|j| {
                    let w: Vec<i64> = (0..n)
                        .map(|k| (0..n).map(|i| v[i] * t[i][j][k].to_i64().unwrap()).sum())
                        .collect();
                    in_lattice(b, &w)
                })
            })
        })
        .collect()
}

fn check_against_oracle(o: &Arc<Order>, m: u64) {
    let got = integral_ideals_of_norm(o, m);
    let want = ideals_oracle(o, m);
    assert_eq!(got.len(), want.len(), "norm {m}");
    for b in &want {
        let rows: Vec<Vec<Q>> = b
            .iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect();
        let ideal = FractionalIdeal::from_lattice(o, &rows).unwrap();
        assert_eq!(ideal.norm, q(m as i64));
        assert!(got.contains(&ideal));
    }
}

#[test]
fn ideals_of_small_norm_match_sublattice_search() {
    for o in [quad(8), quad(40), quad(5), quad(316)] {
        for m in 1..=30 {
            check_against_oracle(&o, m);
        }
    }
    for o in [cubic(&[-1, -2, 1, 1]), cubic(&[1, -4, 0, 1])] {
        for m in 1..=12 {
            check_against_oracle(&o, m);
        }
    }
}

#[test]
fn norm_one_and_two() {
    let o = quad(8);
    assert_eq!(
        enumerate_integral_ideals(&o, 1),
        vec![FractionalIdeal::unit(&o)]
    );
    let v = integral_ideals_of_norm(&o, 2);
    assert_eq!(v.len(), 1);
    assert_eq!(
        v[0],
        FractionalIdeal::principal(&o, &vec![Q::zero(), Q::one()]).unwrap()
    );

    let o = quad(40);
    let v = integral_ideals_of_norm(&o, 2);
    assert_eq!(v.len(), 1);
    let k = &o.field;
    let sqrt10 = vec![Q::zero(), Q::one()];
    assert_eq!(
        v[0],
        FractionalIdeal::from_generators(&o, &[k.from_int(2), sqrt10]).unwrap()
    );
}

#[test]
fn class_equality_examples() {
    let o = quad(40);
    let k = &o.field;
    let unit = FractionalIdeal::unit(&o);
    let p2 = integral_ideals_of_norm(&o, 2).remove(0);

    let w = class_equal(&p2, &p2).unwrap().unwrap();
    assert_eq!(w, k.one());

    let two = FractionalIdeal::principal(&o, &k.from_int(2)).unwrap();
    let w = class_equal(&unit, &two).unwrap().unwrap();
    assert_eq!(unit.scale(&w).unwrap(), two);
    assert_eq!(k.norm(&w).abs(), q(4));

    assert!(class_equal(&p2, &unit).unwrap().is_none());
}

#[test]
fn class_numbers_and_minimal_norms() {
    for (d, h) in [(5, 1), (40, 2), (8, 1)] {
        assert_eq!(
            class_representatives(&quad(d)).unwrap().len(),
            h,
            "disc {d}"
        );
    }
    let o = quad(40);
    let mut norms: Vec<Z> = class_representatives(&o)
        .unwrap()
        .iter()
        .map(|c| minimal_class_norm(c).unwrap())
        .collect();
    norms.sort();
    assert_eq!(norms, vec![Z::from(1), Z::from(2)]);
    // non-maximal orders are rejected
    let z_sqrt5 = quad(20);
    assert!(matches!(
        class_representatives(&z_sqrt5),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn class_minima_agree_with_reduced_forms() {
    for k in enumerate_totally_real_fields(2, 600).unwrap() {
        let d = k.field_disc.to_i64().unwrap();
        let st = field_minkowski_stat(&Arc::new(k.maximal_order()), 0.0).unwrap();
        let mut got: Vec<i64> = st
            .class_min_norms
            .iter()
            .map(|m| m.to_i64().unwrap())
            .collect();
        got.sort();
        assert_eq!(got, wide_class_minima(d), "disc {d}");
    }
}

#[test]
fn minkowski_statistic_examples() {
    let s5 = 5f64.sqrt();
    let st = field_minkowski_stat(&quad(5), 0.0).unwrap();
    assert_eq!(
        (st.m_k.clone(), st.classes, st.bad_classes),
        (Z::one(), 1, 1)
    );
    assert_eq!(
        field_minkowski_stat(&quad(5), 1.0 / s5 + 1e-12)
            .unwrap()
            .bad_classes,
        0
    );
    assert_eq!(
        field_minkowski_stat(&quad(5), 1.0 / s5 - 1e-6)
            .unwrap()
            .bad_classes,
        1
    );
    assert_eq!(field_minkowski_stat(&quad(5), 0.5).unwrap().bad_classes, 0);

    let st = field_minkowski_stat(&quad(40), 0.0).unwrap();
    assert_eq!(st.m_k, Z::from(2));
    assert_eq!(st.bad_classes, st.classes);
}

fn factorization_count(m: u64, d: usize) -> u64 {
    if d == 1 {
        return 1;
    }
    (1..=m)
        .filter(|k| m % k == 0)
        .map(|k| factorization_count(m / k, d - 1))
        .sum()
}

#[test]
fn ideal_counts_bounded_by_factorizations() {
    for m in 1..=200 {
        assert_eq!(sigma_d(m, 2), factorization_count(m, 2));
        assert_eq!(sigma_d(m, 3), factorization_count(m, 3));
    }
    let orders: Vec<Arc<Order>> = [5, 8, 40, 60, 316]
        .into_iter()
        .map(quad)
        .chain([cubic(&[-1, -2, 1, 1])])
        .collect();
    for o in &orders {
        let n = o.degree();
        for m in 1..=200 {
            assert!(
                integral_ideals_of_norm(o, m).len() as u64 <= sigma_d(m, n),
                "norm {m}"
            );
        }
    }
}

#[test]
fn minkowski_bound_holds() {
    for (deg, bound, c) in [(2usize, 2000u64, 0.5), (3, 1500, 6.0 / 27.0)] {
        for k in enumerate_totally_real_fields(deg, bound).unwrap() {
            let st = field_minkowski_stat(&Arc::new(k.maximal_order()), 0.0).unwrap();
            let cap = c * k.field_disc.to_f64().unwrap().sqrt();
            assert!(st.m_k.to_f64().unwrap() <= cap, "disc {}", k.field_disc);
        }
    }
}

fn sample_orders() -> Vec<Arc<Order>> {
    vec![
        quad(40),
        quad(316),
        quad(229),
        cubic(&[-1, -2, 1, 1]),
        cubic(&[1, -4, 0, 1]),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_multiplicative(which in 0usize..5, i in 0usize..1000, j in 0usize..1000) {
        let o = &sample_orders()[which];
        let ideals = enumerate_integral_ideals(o, 25);
        let (a, b) = (&ideals[i % ideals.len()], &ideals[j % ideals.len()]);
        let ab = a.mul(b).unwrap();
        prop_assert_eq!(ab.norm.clone(), &a.norm * &b.norm);
        prop_assert_eq!(ab, b.mul(a).unwrap());
    }

    #[test]
    fn class_equality_is_an_equivalence(which in 0usize..3, i in 0usize..1000, j in 0usize..1000, l in 0usize..1000) {
        let o = &sample_orders()[which];
        let ideals = enumerate_integral_ideals(o, 30);
        let pick = |t: usize| &ideals[t % ideals.len()];
        let (a, b, c) = (pick(i), pick(j), pick(l));
        prop_assert!(class_equal(a, a).unwrap().is_some());
        let ab = class_equal(a, b).unwrap();
        prop_assert_eq!(ab.is_some(), class_equal(b, a).unwrap().is_some());
        if let Some(x) = &ab {
            prop_assert_eq!(&a.scale(x).unwrap(), b);
        }
        if ab.is_some() && class_equal(b, c).unwrap().is_some() {
            prop_assert!(class_equal(a, c).unwrap().is_some());
        }
    }

    #[test]
    fn minimal_norm_is_a_class_invariant(which in 0usize..3, x in -6i64..6, y in -6i64..6) {
        prop_assume!(x != 0 || y != 0);
        let o = &sample_orders()[which];
        for c in class_representatives(o).unwrap() {
            let g = o.element_i64(&[x, y]);
            let moved = IdealClass { representative: c.representative.scale(&g).unwrap(), min_norm: c.min_norm.clone() };
            prop_assert_eq!(minimal_class_norm(&moved).unwrap(), minimal_class_norm(&c).unwrap());
        }
    }
}
