use std::collections::BTreeSet;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torbit::linalg::{Q, Z};
use torbit::times23::{
    discrepancy, entropy_lower_bound_check, exp_sum_profile, group_order_23, is_prime,
    max_dyadic_discrepancy, orbit_closure_23, partition_entropy, separation_level, sweep,
    EmpiricalMeasure, DYADIC_LEVELS,
};
use torbit::Error;

fn rat(a: i64, b: i64) -> Q {
    Q::new(Z::from(a), Z::from(b))
}

fn measure(q: u64) -> EmpiricalMeasure {
    EmpiricalMeasure::new(orbit_closure_23(q, 1).unwrap())
}

/// `{2^i 3^j mod q}`.
fn subgroup_oracle(q: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut x = 1u64;
    for _ in 0..q {
        let mut y = x;
        for _ in 0..q {
            out.insert(y);
            y = y * 3 % q;
            if y == x {
                break;
            }
        }
        x = x * 2 % q;
        if x == 1 {
            break;
        }
    }
    out
}

fn coprime6(q: u64) -> bool {
    q % 2 != 0 && q % 3 != 0
}

#[test]
fn closure_examples() {
    assert_eq!(orbit_closure_23(5, 1).unwrap().s, vec![1, 2, 3, 4]);
    assert_eq!(orbit_closure_23(7, 1).unwrap().s, vec![1, 2, 3, 4, 5, 6]);
    assert_eq!(
        orbit_closure_23(9, 1).unwrap_err(),
        Error::InvalidModulus(9)
    );
    assert_eq!(
        orbit_closure_23(10, 1).unwrap_err(),
        Error::InvalidModulus(10)
    );
    assert!(orbit_closure_23(25, 5).is_err());
    for q in (5..2000).filter(|&q| coprime6(q)) {
        let g = subgroup_oracle(q);
        let s = orbit_closure_23(q, 1).unwrap();
        assert_eq!(s.s, g.iter().copied().collect::<Vec<_>>(), "q {q}");
        assert_eq!(s.group_order as usize, g.len());
        assert_eq!(group_order_23(q).unwrap() as usize, g.len());
    }
}

#[test]
fn entropy_examples() {
    let m = measure(5);
    assert_relative_eq!(
        partition_entropy(&m, 1).unwrap(),
        2f64.ln(),
        max_relative = 1e-15
    );
    assert_eq!(separation_level(5), 3);
    let c = entropy_lower_bound_check(&m).unwrap();
    assert_relative_eq!(c.h1, 2f64.ln(), max_relative = 1e-15);
    assert_relative_eq!(c.floor, 4f64.ln() / 3.0, max_relative = 1e-15);
    assert!(c.ok);
    assert!(partition_entropy(&m, 0).is_err());

    // the trivial modulus has a single point
    let one = EmpiricalMeasure::new(orbit_closure_23(1, 0).unwrap());
    assert_eq!(one.support.len(), 1);
    for n in 1..10 {
        assert_eq!(partition_entropy(&one, n).unwrap(), 0.0);
    }
    let c = entropy_lower_bound_check(&one).unwrap();
    assert_eq!((c.h1, c.floor, c.ok), (0.0, 0.0, true));
    assert_eq!(one.total_mass(), rat(1, 1));
    assert_relative_eq!(discrepancy(&one, &rat(0, 1), &rat(1, 2)).unwrap(), 0.5);
}

#[test]
fn random_moduli_pass_the_entropy_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut done = 0;
    while done < 60 {
        let q: u64 = rng.gen_range(5..1_000_000);
        if !coprime6(q) {
            continue;
        }
        let m = measure(q);
        assert!(entropy_lower_bound_check(&m).unwrap().ok, "q {q}");
        let h = partition_entropy(&m, separation_level(q)).unwrap();
        assert!((h - (m.support.len() as f64).ln()).abs() < 1e-12);
        assert_eq!(m.total_mass(), rat(1, 1));
        done += 1;
    }
}

#[test]
fn discrepancies() {
    let m = measure(101);
    assert_eq!(m.support.len(), 100);
    for (a, b) in [(0, 1), (1, 4), (2, 3)] {
        let (a, b) = (rat(a, 4), rat(b, 4));
        assert!(discrepancy(&m, &a, &b).unwrap() <= 2.0 / 101.0 + 1e-12);
    }
    assert!(discrepancy(&m, &rat(1, 2), &rat(1, 2)).is_err());
    assert!(discrepancy(&m, &rat(0, 1), &rat(3, 2)).is_err());

    // direct count over every dyadic interval
    for q in [101u64, 1009, 4099, 65537] {
        let m = measure(q);
        let n = m.support.len() as f64;
        let mut worst = 0f64;
        for k in 1..=DYADIC_LEVELS {
            let w = 1u64 << k;
            for j in 0..w {
                let c = m
                    .support
                    .s
                    .iter()
                    .filter(|&&s| s * w >= j * q && s * w < (j + 1) * q)
                    .count();
                worst = worst.max((c as f64 / n - 1.0 / w as f64).abs());
            }
        }
        assert_relative_eq!(
            max_dyadic_discrepancy(&m, DYADIC_LEVELS),
            worst,
            max_relative = 1e-12
        );
    }
}

/// `max_{a != 0} |sum_{x in G} e(a x / q)| / |G|` by summing every `a`.
fn exp_sum_oracle(q: u64) -> f64 {
    let g = subgroup_oracle(q);
    (1..q)
        .map(|a| {
            let (re, im) = g.iter().fold((0.0, 0.0), |(re, im), &x| {
                let t = std::f64::consts::TAU * ((a * x) % q) as f64 / q as f64;
                (re + t.cos(), im + t.sin())
            });
            f64::hypot(re, im)
        })
        .fold(0.0, f64::max)
        / g.len() as f64
}

#[test]
fn exponential_sums() {
    let p = exp_sum_profile(7).unwrap();
    assert_eq!(p.group_order, 6);
    assert_relative_eq!(p.max_normalized_sum, 1.0 / 6.0, max_relative = 1e-12);
    assert!(matches!(exp_sum_profile(25), Err(Error::Unsupported(_))));
    assert_eq!(exp_sum_profile(9).unwrap_err(), Error::InvalidModulus(9));
    for q in (5..600).filter(|&q| coprime6(q) && is_prime(q)) {
        assert_relative_eq!(
            exp_sum_profile(q).unwrap().max_normalized_sum,
            exp_sum_oracle(q),
            epsilon = 1e-10
        );
    }
}

#[test]
fn sweeps() {
    let rows = sweep(1, 200, false).unwrap();
    let qs: Vec<u64> = rows.iter().map(|r| r.q).collect();
    let want: Vec<u64> = (5..=200).filter(|&q| coprime6(q)).collect();
    assert_eq!(qs, want);
    for r in &rows {
        assert_eq!(r.max_norm_exp_sum.is_some(), is_prime(r.q));
        assert!(r.h1 >= r.entropy_floor - 1e-9);
        assert!(r.ratio_log_order_log_q > 0.0 && r.ratio_log_order_log_q <= 1.0);
    }
    let primes = sweep(1000, 1100, true).unwrap();
    assert!(primes.iter().all(|r| is_prime(r.q)));
    assert_eq!(primes.len(), (1000..=1100).filter(|&q| is_prime(q)).count());
    assert!(sweep(300, 200, false).unwrap().is_empty());
}

fn modulus() -> impl Strategy<Value = u64> {
    (5u64..200_000).prop_filter("coprime to 6", |&q| coprime6(q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orbit_sets_are_invariant(q in modulus(), seed in 1u64..1_000_000) {
        prop_assume!(num_integer::gcd(seed % q, q) == 1);
        let s = orbit_closure_23(q, seed).unwrap();
        prop_assert!(s.invariant_under(2) && s.invariant_under(3));
        prop_assert_eq!(s.len() as u64, s.group_order);
        prop_assert!(s.s.iter().all(|&x| num_integer::gcd(x, q) == 1));
        let again = orbit_closure_23(q, s.s[s.len() / 2]).unwrap();
        prop_assert_eq!(again, s);
    }

    #[test]
    fn entropy_is_subadditive(q in modulus(), j in 1u32..12, k in 1u32..12) {
        let m = measure(q);
        let hjk = partition_entropy(&m, j + k).unwrap();
        let sum = partition_entropy(&m, j).unwrap() + partition_entropy(&m, k).unwrap();
        prop_assert!(hjk <= sum + 1e-9);
        let n = separation_level(q);
        prop_assert!((partition_entropy(&m, n).unwrap() - (m.support.len() as f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn doubling_preserves_masses(q in modulus(), k in 1u32..8, j in 0u64..256) {
        let m = measure(q);
        let w = 1u64 << k;
        let j = j % w;
        // [2]^{-1} [j/w, (j+1)/w) = [j/2w, (j+1)/2w) u [(j+w)/2w, (j+w+1)/2w)
        let direct = m.count_in(&rat(j as i64, w as i64), &rat(j as i64 + 1, w as i64));
        let pulled = m.count_in(&rat(j as i64, 2 * w as i64), &rat(j as i64 + 1, 2 * w as i64))
            + m.count_in(&rat((j + w) as i64, 2 * w as i64), &rat((j + w) as i64 + 1, 2 * w as i64));
        prop_assert_eq!(direct, pulled);
    }
}
