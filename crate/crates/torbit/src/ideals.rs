//! Fractional ideals in Hermite normal form, ideal classes, and the
//! minimal-norm quantities `m([J], K)`, `m(K)` and `h_delta(K)`.
//!
//! Principality is decided exactly. For quadratic orders the ideal is
//! turned into its norm form and the reduced cycle is searched for `+-1`.
//! For cubic orders every candidate generator can be moved by a unit into
//! a bounded box, which is covered cell by cell and enumerated; norms are
//! then compared in exact arithmetic.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::fields::{Element, Embeddable, Order, TotallyRealField};
use crate::forms::{self, Form};
use crate::linalg::{det_z, dual_basis, hnf_coords, hnf_q, qz, vec_mul_q, MatQ, MatZ, Q, Z};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct FractionalIdeal {
    pub order: Arc<Order>,
    /// Lower HNF over the order basis.
    pub numerator_basis: MatZ,
    pub denominator: Z,
    /// `|det(numerator_basis)| / denominator^n`.
    pub norm: Q,
}

impl PartialEq for FractionalIdeal {
    fn eq(&self, other: &Self) -> bool {
        self.numerator_basis == other.numerator_basis && self.denominator == other.denominator
    }
}

impl Eq for FractionalIdeal {}

impl FractionalIdeal {
    /// The ideal spanned (as a lattice) by rows given in order coordinates.
    /// The lattice must already be an `O`-module.
    pub fn from_lattice(order: &Arc<Order>, rows: &[Vec<Q>]) -> Result<Self> {
        let n = order.degree();
        let (h, d) = hnf_q(rows, n).ok_or_else(|| Error::InvalidLattice("rank < n".into()))?;
        let norm = Q::new(det_z(&h).abs(), num_traits::pow(d.clone(), n));
        let ideal = FractionalIdeal {
            order: order.clone(),
            numerator_basis: h,
            denominator: d,
            norm,
        };
        if !ideal.is_stable() {
            return Err(Error::InvalidLattice(
                "lattice is not an order module".into(),
            ));
        }
        Ok(ideal)
    }

    /// The `O`-module generated by field elements.
    pub fn from_generators(order: &Arc<Order>, gens: &[Element]) -> Result<Self> {
        let k = &order.field;
        let mut rows = Vec::new();
        for g in gens {
            for w in &order.basis {
                rows.push(order.coords(&k.mul(g, w)));
            }
        }
        Self::from_lattice(order, &rows)
    }

    pub fn unit(order: &Arc<Order>) -> Self {
        let n = order.degree();
        let h: MatZ = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Z::one() } else { Z::zero() })
                    .collect()
            })
            .collect();
        FractionalIdeal {
            order: order.clone(),
            numerator_basis: h,
            denominator: Z::one(),
            norm: Q::one(),
        }
    }

    pub fn principal(order: &Arc<Order>, x: &Element) -> Result<Self> {
        Self::from_generators(order, std::slice::from_ref(x))
    }

    pub fn degree(&self) -> usize {
        self.order.degree()
    }

    pub fn is_integral(&self) -> bool {
        self.denominator.is_one()
    }

    /// Basis rows in order coordinates.
    pub fn basis_coords(&self) -> MatQ {
        self.numerator_basis
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| Q::new(x.clone(), self.denominator.clone()))
                    .collect()
            })
            .collect()
    }

    /// Basis as field elements.
    pub fn basis_elements(&self) -> Vec<Element> {
        self.basis_coords()
            .iter()
            .map(|c| vec_mul_q(c, &self.order.basis))
            .collect()
    }

    fn is_stable(&self) -> bool {
        let n = self.degree();
        let table = self.order.mult_table();
        self.numerator_basis.iter().all(|h| {
            (0..n).all(|j| {
                let v: Vec<Z> = (0..n)
                    .map(|k| (0..n).fold(Z::zero(), |acc, i| acc + &h[i] * &table[i][j][k]))
                    .collect();
                hnf_coords(&self.numerator_basis, &v).is_some()
            })
        })
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        let c = self.order.coords(x);
        let v: Vec<Q> = c.iter().map(|t| t * qz(&self.denominator)).collect();
        if v.iter().any(|t| !t.is_integer()) {
            return false;
        }
        let v: Vec<Z> = v.into_iter().map(|t| t.to_integer()).collect();
        hnf_coords(&self.numerator_basis, &v).is_some()
    }

    pub fn mul(&self, other: &FractionalIdeal) -> Result<FractionalIdeal> {
        let k = &self.order.field;
        let a = self.basis_elements();
        let b = other.basis_elements();
        let rows: Vec<Vec<Q>> = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| (x, y)))
            .map(|(x, y)| self.order.coords(&k.mul(x, y)))
            .collect();
        Self::from_lattice(&self.order, &rows)
    }

    pub fn scale(&self, x: &Element) -> Result<FractionalIdeal> {
        let k = &self.order.field;
        let rows: Vec<Vec<Q>> = self
            .basis_elements()
            .iter()
            .map(|b| self.order.coords(&k.mul(b, x)))
            .collect();
        Self::from_lattice(&self.order, &rows)
    }

    /// `(self : other) = {x : x other in self}`.
    pub fn colon(&self, other: &FractionalIdeal) -> Result<FractionalIdeal> {
        let n = self.degree();
        let k = &self.order.field;
        let a_inv = crate::linalg::inverse_q(&self.basis_coords()).ok_or(Error::Singular)?;
        let basis_o = &self.order.basis;
        // x b in self  <=>  coords(x) . M(b) . A^-1 integral
        let mut cols: MatQ = Vec::new();
        for b in other.basis_elements() {
            let m: MatQ = basis_o
                .iter()
                .map(|w| self.order.coords(&k.mul(&b, w)))
                .collect();
            let na = crate::linalg::mul_q(&m, &a_inv);
            for j in 0..n {
                cols.push((0..n).map(|i| na[i][j].clone()).collect());
            }
        }
        let (h, d) = hnf_q(&cols, n).ok_or(Error::Singular)?;
        let s: MatQ = h
            .iter()
            .map(|r| r.iter().map(|x| Q::new(x.clone(), d.clone())).collect())
            .collect();
        let dual = dual_basis(&s).ok_or(Error::Singular)?;
        Self::from_lattice(&self.order, &dual)
    }

    pub fn inverse(&self) -> Result<FractionalIdeal> {
        FractionalIdeal::unit(&self.order).colon(self)
    }

    fn sort_key(&self) -> (Q, Vec<Z>, Z) {
        (
            self.norm.clone(),
            self.numerator_basis.iter().flatten().cloned().collect(),
            self.denominator.clone(),
        )
    }
}

impl PartialOrd for FractionalIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FractionalIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl Embeddable for FractionalIdeal {
    fn field(&self) -> &Arc<TotallyRealField> {
        &self.order.field
    }
    fn power_basis_rows(&self) -> MatQ {
        self.basis_elements()
    }
}

/// Integral ideals of norm exactly `m`.
pub fn integral_ideals_of_norm(o: &Arc<Order>, m: u64) -> Vec<FractionalIdeal> {
    let n = o.degree();
    let table = o.mult_table();
    let t64: Option<Vec<Vec<Vec<i64>>>> = table
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| c.iter().map(|x| x.to_i64()).collect())
                .collect()
        })
        .collect();
    let t64 = t64.expect("multiplication table fits in i64");
    let mut out = Vec::new();
    for diag in factorizations(m, n) {
        if diag.iter().any(|&d| diag[0] % d != 0) {
            continue;
        }
        let mut h = vec![vec![0i64; n]; n];
        for i in 0..n {
            h[i][i] = diag[i] as i64;
        }
        let slots: Vec<(usize, usize)> = (1..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
        fill(&mut h, &slots, 0, &t64, &mut |h| {
            let hz: MatZ = h
                .iter()
                .map(|r| r.iter().map(|&x| Z::from(x)).collect())
                .collect();
            out.push(FractionalIdeal {
                order: o.clone(),
                numerator_basis: hz,
                denominator: Z::one(),
                norm: Q::from_integer(Z::from(m)),
            });
        });
    }
    out.sort();
    out
}

fn fill(
    h: &mut Vec<Vec<i64>>,
    slots: &[(usize, usize)],
    k: usize,
    t: &[Vec<Vec<i64>>],
    emit: &mut dyn FnMut(&Vec<Vec<i64>>),
) {
    if k == slots.len() {
        if stable_i64(h, t) {
            emit(h);
        }
        return;
    }
    let (i, j) = slots[k];
    for v in 0..h[j][j] {
        h[i][j] = v;
        fill(h, slots, k + 1, t, emit);
    }
    h[i][j] = 0;
}

fn stable_i64(h: &[Vec<i64>], t: &[Vec<Vec<i64>>]) -> bool {
    let n = h.len();
    for row in h {
        for j in 0..n {
            let mut v: Vec<i128> = (0..n)
                .map(|k| (0..n).map(|i| row[i] as i128 * t[i][j][k] as i128).sum())
                .collect();
            for r in (0..n).rev() {
                let p = h[r][r] as i128;
                if v[r] % p != 0 {
                    return false;
                }
                let qt = v[r] / p;
                for c in 0..=r {
                    v[c] -= qt * h[r][c] as i128;
                }
            }
        }
    }
    true
}

/// Ordered factorizations of `m` into `n` positive factors.
fn factorizations(m: u64, n: usize) -> Vec<Vec<u64>> {
    if n == 1 {
        return vec![vec![m]];
    }
    let mut out = Vec::new();
    for d in 1..=m {
        if m % d == 0 {
            for mut rest in factorizations(m / d, n - 1) {
                rest.insert(0, d);
                out.push(rest);
            }
        }
    }
    out
}

/// Every integral ideal of norm at most `bound`, sorted by norm then
/// lexicographically by HNF.
pub fn enumerate_integral_ideals(o: &Arc<Order>, bound: u64) -> Vec<FractionalIdeal> {
    (1..=bound)
        .flat_map(|m| integral_ideals_of_norm(o, m))
        .collect()
}

/// Binary form `N(x b_1 + y b_2) / N(A)` of an ideal of a quadratic order.
pub fn norm_form(a: &FractionalIdeal) -> Result<Form> {
    let k = &a.order.field;
    let b = a.basis_elements();
    let nrm = |x: &Element| k.norm(x) / &a.norm;
    let s: Element = b[0].iter().zip(&b[1]).map(|(x, y)| x + y).collect();
    let (fa, fc, fs) = (nrm(&b[0]), nrm(&b[1]), nrm(&s));
    let fb = &fs - &fa - &fc;
    let to_i = |x: &Q| -> Result<i64> {
        if !x.is_integer() {
            return Err(Error::Unsupported(
                "ideal is not invertible in its order".into(),
            ));
        }
        x.to_integer()
            .to_i64()
            .ok_or_else(|| Error::Unsupported("form coefficient exceeds 64 bits".into()))
    };
    Ok(Form {
        a: to_i(&fa)?,
        b: to_i(&fb)?,
        c: to_i(&fc)?,
    })
}

/// Enumerates, up to units and sign, the elements `x` of a cubic ideal with
/// `|N(x)| <= bound`, returning `(|N(x)|, x)`.
fn cubic_small_norms(a: &FractionalIdeal, bound: &Q) -> Result<Vec<(Q, Element)>> {
    let o = &a.order;
    let units = o.unit_data()?;
    let b = &units.log_lattice;
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let n1 = (2.0 * sup(&b[0])).ceil().max(1.0) as usize;
    let n2 = (2.0 * sup(&b[1])).ceil().max(1.0) as usize;
    let r: Vec<f64> = (0..3)
        .map(|i| b[0][i].abs() / (2.0 * n1 as f64) + b[1][i].abs() / (2.0 * n2 as f64))
        .collect();
    let k = &o.field;
    let elts = a.basis_elements();
    let emb: Vec<Vec<f64>> = elts.iter().map(|e| k.embed(e)).collect();
    let scale = crate::poly::q_to_f64(bound).cbrt() * (1.0 + 1e-9);
    let den3 = num_traits::pow(a.denominator.clone(), 3);
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut out = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            let t1 = -0.5 + (i as f64 + 0.5) / n1 as f64;
            let t2 = -0.5 + (j as f64 + 0.5) / n2 as f64;
            let bounds: Vec<f64> = (0..3)
                .map(|c| scale * (t1 * b[0][c] + t2 * b[1][c] + r[c]).exp())
                .collect();
            for mut z in crate::lattice::enumerate_box(&emb, &bounds, 1e-6) {
                if z.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                    z.iter_mut().for_each(|x| *x = -*x);
                }
                if !seen.insert(z.clone()) {
                    continue;
                }
                // order coordinates of the numerator combination
                let oc: Vec<i64> = (0..3)
                    .map(|c| {
                        (0..3)
                            .map(|i| z[i] as i128 * a.numerator_basis[i][c].to_i128().unwrap())
                            .sum::<i128>() as i64
                    })
                    .collect();
                let nz = Q::new(o.norm_of(&oc).abs(), den3.clone());
                if nz.is_zero() || &nz > bound {
                    continue;
                }
                let zz: Vec<Z> = z.iter().map(|&x| Z::from(x)).collect();
                let x = (0..3).fold(vec![Q::zero(); 3], |acc, i| {
                    acc.iter()
                        .zip(&elts[i])
                        .map(|(s, e)| s + e * qz(&zz[i]))
                        .collect()
                });
                out.push((nz, x));
            }
        }
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(out)
}

/// Covolume of `theta(A)` as an exact square: `disc(O) N(A)^2`.
pub fn covolume_squared(a: &FractionalIdeal) -> Q {
    qz(&a.order.disc) * &a.norm * &a.norm
}

/// `min |N(x)|` over nonzero `x` in the ideal, with a minimizer.
pub fn min_abs_norm(a: &FractionalIdeal) -> Result<(Q, Element)> {
    match a.degree() {
        2 => {
            let f = norm_form(a)?;
            let (m, v) = forms::min_abs_value(f);
            let b = a.basis_elements();
            let x: Element = b[0]
                .iter()
                .zip(&b[1])
                .map(|(p, q)| p * qz(&v[0]) + q * qz(&v[1]))
                .collect();
            Ok((Q::from_integer(Z::from(m)) * &a.norm, x))
        }
        3 => {
            // Minkowski: some x has max |sigma_i(x)| <= covol^(1/3), so |N(x)| <= covol
            let c2 = covolume_squared(a);
            let bound = sqrt_ceil_q(&c2);
            let found = cubic_small_norms(a, &bound)?;
            found.into_iter().next().ok_or_else(|| {
                Error::SearchExhausted("no element below the Minkowski bound".into())
            })
        }
        n => Err(Error::DegreeUnsupported(n)),
    }
}

/// A rational `>= sqrt(x)`.
fn sqrt_ceil_q(x: &Q) -> Q {
    let num = x.numer() * x.denom();
    let r = num_integer::Roots::sqrt(&num) + Z::one();
    Q::new(r, x.denom().clone())
}

/// A generator of `a` if it is principal.
pub fn principal_generator(a: &FractionalIdeal) -> Result<Option<Element>> {
    let cand = match a.degree() {
        2 => {
            let f = norm_form(a)?;
            forms::represents_unit(f).map(|v| {
                let b = a.basis_elements();
                b[0].iter()
                    .zip(&b[1])
                    .map(|(p, q)| p * qz(&v[0]) + q * qz(&v[1]))
                    .collect::<Element>()
            })
        }
        3 => cubic_small_norms(a, &a.norm)?
            .into_iter()
            .find(|(nz, _)| nz == &a.norm)
            .map(|(_, x)| x),
        n => return Err(Error::DegreeUnsupported(n)),
    };
    match cand {
        Some(x) if FractionalIdeal::principal(&a.order, &x)? == *a => Ok(Some(x)),
        _ => Ok(None),
    }
}

/// `Some(x)` with `x i = j` if the ideals are in the same class.
pub fn class_equal(i: &FractionalIdeal, j: &FractionalIdeal) -> Result<Option<Element>> {
    if i == j {
        return Ok(Some(i.order.field.one()));
    }
    let a = j.colon(i)?;
    if a.norm != &j.norm / &i.norm {
        return Ok(None);
    }
    match principal_generator(&a)? {
        Some(x) if i.scale(&x)? == *j => Ok(Some(x)),
        _ => Ok(None),
    }
}

#[derive(Clone, Debug)]
pub struct IdealClass {
    pub representative: FractionalIdeal,
    pub min_norm: Z,
}

/// `floor((n!/n^n) sqrt(disc))`.
pub fn minkowski_bound(o: &Order) -> u64 {
    let d = &o.disc;
    // n = 2: m <= sqrt(d)/2  <=>  4 m^2 <= d;  n = 3: 81 m^2 <= 4 d
    let (num, den) = match o.degree() {
        2 => (Z::one(), Z::from(4)),
        _ => (Z::from(4), Z::from(81)),
    };
    let x = num * d / den;
    num_integer::Roots::sqrt(&x).to_u64().unwrap_or(u64::MAX)
}

fn require_maximal(o: &Order) -> Result<()> {
    if !o.is_maximal() {
        return Err(Error::Unsupported(
            "class computations need the maximal order".into(),
        ));
    }
    Ok(())
}

/// One representative per ideal class, each the smallest-norm integral
/// ideal of its class.
pub fn class_representatives(o: &Arc<Order>) -> Result<Vec<IdealClass>> {
    require_maximal(o)?;
    let mut classes: Vec<(IdealClass, FractionalIdeal)> = Vec::new();
    for ideal in enumerate_integral_ideals(o, minkowski_bound(o)) {
        let mut known = false;
        for (_, inv) in &classes {
            let prod = ideal.mul(inv)?;
            if principal_generator(&prod)?.is_some() {
                known = true;
                break;
            }
        }
        if !known {
            let inv = ideal.inverse()?;
            let min_norm = ideal.norm.to_integer();
            classes.push((
                IdealClass {
                    representative: ideal,
                    min_norm,
                },
                inv,
            ));
        }
    }
    Ok(classes.into_iter().map(|(c, _)| c).collect())
}

/// Least norm of an integral ideal in the class, by ascending search.
pub fn minimal_class_norm(c: &IdealClass) -> Result<Z> {
    let o = &c.representative.order;
    require_maximal(o)?;
    let inv = c.representative.inverse()?;
    for m in 1..=minkowski_bound(o) {
        for ideal in integral_ideals_of_norm(o, m) {
            if principal_generator(&ideal.mul(&inv)?)?.is_some() {
                return Ok(Z::from(m));
            }
        }
    }
    Err(Error::SearchExhausted(
        "no integral ideal below the Minkowski bound".into(),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiStat {
    pub m_k: Z,
    pub classes: usize,
    pub bad_classes: usize,
    pub class_min_norms: Vec<Z>,
}

/// `m(K)`, the class number, and `h_delta(K) = #{[J] : m([J], K) > delta sqrt(disc)}`.
pub fn field_minkowski_stat(o: &Arc<Order>, delta: f64) -> Result<MinkowskiStat> {
    let classes = class_representatives(o)?;
    Ok(stat_from_classes(&classes, &o.disc, delta))
}

pub fn stat_from_classes(classes: &[IdealClass], disc: &Z, delta: f64) -> MinkowskiStat {
    let sq = crate::linalg::z_to_f64(disc).sqrt();
    let mins: Vec<Z> = classes.iter().map(|c| c.min_norm.clone()).collect();
    let bad = mins
        .iter()
        .filter(|m| crate::linalg::z_to_f64(m) > delta * sq)
        .count();
    MinkowskiStat {
        m_k: mins.iter().max().cloned().unwrap_or_else(Z::one),
        classes: classes.len(),
        bad_classes: bad,
        class_min_norms: mins,
    }
}

/// Number of ordered factorizations of `m` into `d` positive factors.
pub fn sigma_d(m: u64, d: usize) -> u64 {
    factorizations(m, d).len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_order(c: &[i64]) -> Arc<Order> {
        Arc::new(TotallyRealField::from_coeffs(c).unwrap().maximal_order())
    }

    #[test]
    fn norm_two_ideals() {
        let o = max_order(&[-2, 0, 1]);
        let v = integral_ideals_of_norm(&o, 2);
        assert_eq!(v.len(), 1);
        let sqrt2 = vec![Q::zero(), Q::one()];
        assert_eq!(v[0], FractionalIdeal::principal(&o, &sqrt2).unwrap());
        let o = max_order(&[-10, 0, 1]);
        let v = integral_ideals_of_norm(&o, 2);
        assert_eq!(v.len(), 1);
        assert!(principal_generator(&v[0]).unwrap().is_none());
    }

    #[test]
    fn class_numbers() {
        assert_eq!(
            class_representatives(&max_order(&[-1, -1, 1]))
                .unwrap()
                .len(),
            1
        );
        assert_eq!(
            class_representatives(&max_order(&[-2, 0, 1]))
                .unwrap()
                .len(),
            1
        );
        let c = class_representatives(&max_order(&[-10, 0, 1])).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].min_norm, Z::from(2));
        assert_eq!(minimal_class_norm(&c[1]).unwrap(), Z::from(2));
    }

    #[test]
    fn inverse_and_product() {
        let o = max_order(&[-10, 0, 1]);
        let p = integral_ideals_of_norm(&o, 3)[0].clone();
        let inv = p.inverse().unwrap();
        assert_eq!(p.mul(&inv).unwrap(), FractionalIdeal::unit(&o));
        assert_eq!(inv.norm, Q::new(Z::one(), Z::from(3)));
    }
}
