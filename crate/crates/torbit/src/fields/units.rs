//! Unit groups of orders.
//!
//! Quadratic orders use the continued fraction of the order's generator.
//! Cubic orders use a box search: every unit whose log vector has sup-norm
//! at most `L = log B` is found by covering that hexagon with small cells
//! and enumerating the order lattice in the matching embedding box, with the
//! norm checked exactly. The found units generate a sublattice of the log
//! unit lattice; once `L` is at least half the sum of the sup-norms of a
//! reduced basis, any missing unit could be reduced into the searched
//! region, so the sublattice is the whole unit lattice.

use std::collections::HashSet;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{quadratic, Element, Order};
use crate::linalg::{hnf_transform, q, qz, Q, Z};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct UnitGroup {
    pub order: Order,
    pub fundamental_units: Vec<Element>,
    /// Rows `(log|sigma_1(u)|, ..., log|sigma_n(u)|)`, shortest first.
    pub log_lattice: Vec<Vec<f64>>,
    pub classical_regulator: f64,
    pub covolume_regulator: f64,
}

/// The order-independent part of a unit group, cached on the order.
#[derive(Clone, Debug)]
pub struct UnitData {
    pub fundamental_units: Vec<Element>,
    /// Rows `(log|sigma_1(u)|, ..., log|sigma_n(u)|)`, shortest first.
    pub log_lattice: Vec<Vec<f64>>,
    /// Absolute value of an `(n-1)`-minor of the log lattice.
    pub classical_regulator: f64,
    /// Covolume of the log lattice inside the sum-zero hyperplane.
    pub covolume_regulator: f64,
}

const START_BOUND: f64 = 10.0;
const MAX_DOUBLINGS: u32 = 20;
const CELL: f64 = 0.5;

pub fn unit_group(o: &Order) -> Result<UnitGroup> {
    let d = o.unit_data()?;
    Ok(UnitGroup {
        order: o.clone(),
        fundamental_units: d.fundamental_units.clone(),
        log_lattice: d.log_lattice.clone(),
        classical_regulator: d.classical_regulator,
        covolume_regulator: d.covolume_regulator,
    })
}

pub(crate) fn compute_unit_data(o: &Order) -> Result<UnitData> {
    match o.degree() {
        2 => quadratic_units(o),
        3 => cubic_units(o, START_BOUND, MAX_DOUBLINGS),
        n => Err(Error::DegreeUnsupported(n)),
    }
}

fn regulators(log_lattice: &[Vec<f64>]) -> (f64, f64) {
    let r = log_lattice.len();
    let minor: Vec<Vec<f64>> = log_lattice.iter().map(|row| row[..r].to_vec()).collect();
    let classical = crate::lattice::det(&minor).abs();
    let gram: Vec<Vec<f64>> = log_lattice
        .iter()
        .map(|a| {
            log_lattice
                .iter()
                .map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum())
                .collect()
        })
        .collect();
    let covolume = crate::lattice::det(&gram).abs().sqrt();
    (classical, covolume)
}

fn quadratic_units(o: &Order) -> Result<UnitData> {
    let k = &o.field;
    let d = o
        .disc
        .to_i64()
        .ok_or_else(|| Error::Unsupported("order discriminant exceeds 64 bits".into()))?;
    let u = quadratic::fundamental_unit(d)?;
    let beta = &o.basis[1];
    let t = k.trace(beta);
    // sqrt D = 2 beta - t
    let half = Q::new(Z::one(), Z::from(2));
    let c0 = (qz(&u.a) - qz(&u.b) * &t) * &half;
    let mut eps = beta.iter().map(|x| x * qz(&u.b)).collect::<Vec<_>>();
    eps[0] += c0;
    let mut sqrt_d: Vec<Q> = beta.iter().map(|x| x * q(2)).collect();
    sqrt_d[0] -= &t;
    let log_row: Vec<f64> = k
        .embed(&sqrt_d)
        .iter()
        .map(|s| if *s > 0.0 { u.log } else { -u.log })
        .collect();
    let log_lattice = vec![log_row];
    let (classical, covolume) = regulators(&log_lattice);
    Ok(UnitData {
        fundamental_units: vec![eps],
        log_lattice,
        classical_regulator: classical,
        covolume_regulator: covolume,
    })
}

#[derive(Clone, Debug)]
struct Unit {
    elt: Element,
    log: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// All units (up to sign) whose log vector has sup-norm at most `l`.
fn search_units(o: &Order, l: f64) -> Vec<Unit> {
    let emb = o.embedding_rows();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut out = Vec::new();
    let steps = (2.0 * l / CELL).ceil() as i64;
    for a in 0..steps {
        for b in 0..steps {
            let c1 = -l + CELL * (a as f64 + 0.5);
            let c2 = -l + CELL * (b as f64 + 0.5);
            let c3 = -c1 - c2;
            if c3.abs() - CELL > l {
                continue;
            }
            let bounds = [
                (c1 + CELL / 2.0).exp(),
                (c2 + CELL / 2.0).exp(),
                (c3 + CELL).exp(),
            ];
            for z in crate::lattice::enumerate_box(&emb, &bounds, 1e-6) {
                let nz = o.norm_of(&z);
                if nz.abs() != Z::one() {
                    continue;
                }
                let mut key = z.clone();
                if key.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                    key.iter_mut().for_each(|x| *x = -*x);
                }
                if !seen.insert(key.clone()) {
                    continue;
                }
                let sig = crate::lattice::combine(&key, &emb);
                let log: Vec<f64> = sig.iter().map(|s| s.abs().ln()).collect();
                if sup(&log) < 1e-9 || sup(&log) > l + 1e-9 {
                    continue;
                }
                out.push(Unit {
                    elt: o.element_i64(&key),
                    log,
                });
            }
        }
    }
    out.sort_by(|x, y| {
        dot(&x.log, &x.log)
            .partial_cmp(&dot(&y.log, &y.log))
            .unwrap()
    });
    out
}

fn unit_product(o: &Order, gens: &[Unit], exps: &[Z]) -> Unit {
    let k = &o.field;
    let mut elt = k.one();
    let mut log = vec![0.0; k.degree];
    for (g, e) in gens.iter().zip(exps) {
        if e.is_zero() {
            continue;
        }
        let e64 = e.to_i64().expect("small exponent");
        elt = k.mul(&elt, &k.pow(&g.elt, e64).expect("units are invertible"));
        for (x, y) in log.iter_mut().zip(&g.log) {
            *x += e64 as f64 * y;
        }
    }
    Unit { elt, log }
}

/// Best rational approximation with denominator at most `max_den`.
fn rational_approx(x: f64, max_den: i64) -> Option<(i64, i64)> {
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let (h2, k2) = (a as i64 * h1 + h0, a as i64 * k1 + k0);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() < 1e-7 {
            return Some((h1, k1));
        }
        let frac = r - a;
        if frac.abs() < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    ((x - h1 as f64 / k1 as f64).abs() < 1e-7).then_some((h1, k1))
}

/// Coordinates of `v` in the span of `basis` (least squares), and the
/// residual norm.
fn solve_in(basis: &[Unit], v: &[f64]) -> (Vec<f64>, f64) {
    let r = basis.len();
    let g: Vec<Vec<f64>> = basis
        .iter()
        .map(|a| basis.iter().map(|b| dot(&a.log, &b.log)).collect())
        .collect();
    let rhs: Vec<f64> = basis.iter().map(|a| dot(&a.log, v)).collect();
    let s = match r {
        1 => vec![rhs[0] / g[0][0]],
        _ => {
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            vec![
                (rhs[0] * g[1][1] - rhs[1] * g[0][1]) / det,
                (rhs[1] * g[0][0] - rhs[0] * g[1][0]) / det,
            ]
        }
    };
    let mut res = v.to_vec();
    for (c, b) in s.iter().zip(basis) {
        for (x, y) in res.iter_mut().zip(&b.log) {
            *x -= c * y;
        }
    }
    (s, dot(&res, &res).sqrt())
}

/// Basis of the lattice generated by the log vectors of `units`, with
/// exact unit representatives.
fn generated_lattice(o: &Order, units: &[Unit], rank: usize) -> Result<Vec<Unit>> {
    let mut basis: Vec<Unit> = Vec::new();
    for g in units {
        if basis.is_empty() {
            basis.push(g.clone());
            continue;
        }
        let (s, res) = solve_in(&basis, &g.log);
        if res > 1e-6 * (1.0 + dot(&g.log, &g.log).sqrt()) {
            if basis.len() < rank {
                basis.push(g.clone());
            }
            continue;
        }
        if s.iter().all(|c| (c - c.round()).abs() < 1e-6) {
            continue;
        }
        let fr: Vec<(i64, i64)> = s
            .iter()
            .map(|&c| rational_approx(c, 1000))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| {
                Error::SearchExhausted("unit log coordinates are not rational".into())
            })?;
        let m = fr
            .iter()
            .fold(1i64, |acc, &(_, d)| num_integer::lcm(acc, d));
        let r = basis.len();
        let mut rows: Vec<Vec<Z>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| Z::from(if i == j { m } else { 0 }))
                    .collect()
            })
            .collect();
        rows.push(fr.iter().map(|&(p, d)| Z::from(p * (m / d))).collect());
        let (_, t) = hnf_transform(&rows, r).expect("full rank");
        let mut gens = basis.clone();
        gens.push(g.clone());
        basis = t.iter().map(|exps| unit_product(o, &gens, exps)).collect();
    }
    Ok(basis)
}

fn gauss_reduce(o: &Order, mut b: Vec<Unit>) -> Vec<Unit> {
    if b.len() < 2 {
        return b;
    }
    loop {
        if dot(&b[1].log, &b[1].log) < dot(&b[0].log, &b[0].log) {
            b.swap(0, 1);
        }
        let mu = dot(&b[0].log, &b[1].log) / dot(&b[0].log, &b[0].log);
        if mu.abs() <= 0.5 + 1e-9 {
            return b;
        }
        let m = mu.round();
        let gens = [b[1].clone(), b[0].clone()];
        b[1] = unit_product(o, &gens, &[Z::one(), Z::from(-(m as i64))]);
    }
}

fn cubic_units(o: &Order, start: f64, max_doublings: u32) -> Result<UnitData> {
    let mut l = start.ln();
    for _ in 0..=max_doublings {
        let found = search_units(o, l);
        let basis = generated_lattice(o, &found, 2)?;
        if basis.len() == 2 {
            let basis = gauss_reduce(o, basis);
            if l >= 0.5 * (sup(&basis[0].log) + sup(&basis[1].log)) + 1e-9 {
                for u in &basis {
                    debug_assert!(o.field.norm(&u.elt).abs().is_one() && o.contains(&u.elt));
                }
                let log_lattice: Vec<Vec<f64>> = basis.iter().map(|u| u.log.clone()).collect();
                let (classical, covolume) = regulators(&log_lattice);
                return Ok(UnitData {
                    fundamental_units: basis.into_iter().map(|u| u.elt).collect(),
                    log_lattice,
                    classical_regulator: classical,
                    covolume_regulator: covolume,
                });
            }
        }
        l += std::f64::consts::LN_2;
    }
    Err(Error::SearchExhausted(format!(
        "no certified unit basis with |sigma_i| <= {:.3e}",
        l.exp()
    )))
}

impl UnitGroup {
    /// Whether `x` is a unit of the order lying in the group generated by
    /// the fundamental units and `-1`.
    pub fn contains(&self, x: &[Q]) -> bool {
        let k = &self.order.field;
        if !k.norm(x).abs().is_one() || !self.order.contains(x) {
            return false;
        }
        let log: Vec<f64> = k.embed(x).iter().map(|s| s.abs().ln()).collect();
        let basis: Vec<Unit> = self
            .fundamental_units
            .iter()
            .zip(&self.log_lattice)
            .map(|(e, l)| Unit {
                elt: e.clone(),
                log: l.clone(),
            })
            .collect();
        let (s, res) = solve_in(&basis, &log);
        res < 1e-6 && s.iter().all(|c| (c - c.round()).abs() < 1e-6)
    }
}
