//! Geometry on `PGL_n(R)` and on the space of lattices.
//!
//! Points of `PGL_n(Z) \ PGL_n(R)` are bases `g` whose rows span the
//! lattice; `Gamma` acts on the left and the diagonal group on the right.
//! The metric is `d(g1, g2) = ||log(g1^-1 g2)||_F` on determinant `+-1`
//! representatives, minimized over the scalar `-1`.

use std::cmp::Ordering;
use std::sync::Arc;

use rayon::prelude::*;

use crate::linalg::Z;
use crate::orbits::TorusOrbit;
use crate::{Error, Result};

pub type Mat = Vec<Vec<f64>>;

/// An `n x n` real basis (rows) of a lattice in `R^n`, up to homothety.
#[derive(Clone, Debug)]
pub struct EmbeddedLattice {
    pub basis: Vec<Vec<f64>>,
    pub covolume: f64,
    pub reduced: bool,
}

impl EmbeddedLattice {
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = basis.len();
        if n == 0 || basis.iter().any(|r| r.len() != n) {
            return Err(Error::Singular);
        }
        let covolume = crate::lattice::det(&basis).abs();
        if !(covolume > 0.0) || !covolume.is_finite() {
            return Err(Error::Singular);
        }
        Ok(EmbeddedLattice {
            basis,
            covolume,
            reduced: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Shortest nonzero vector length (Euclidean).
    pub fn shortest(&self) -> f64 {
        crate::lattice::shortest_vector(&self.basis).1.sqrt()
    }
}

/// LLL-reduced basis of the same lattice.
pub fn reduce(l: &EmbeddedLattice) -> Result<EmbeddedLattice> {
    let (b, _) = crate::lattice::lll(&l.basis);
    let mut out = EmbeddedLattice::new(b)?;
    out.covolume = l.covolume;
    out.reduced = true;
    Ok(out)
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Mat {
    let m = b[0].len();
    a.iter()
        .map(|r| {
            (0..m)
                .map(|j| r.iter().zip(b).map(|(x, row)| x * row[j]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_inv(g: &[Vec<f64>]) -> Option<Mat> {
    let n = g.len();
    let mut a: Mat = g
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            v
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| {
            a[x][c]
                .abs()
                .partial_cmp(&a[y][c].abs())
                .unwrap_or(Ordering::Equal)
        })?;
        if a[p][c] == 0.0 || !a[p][c].is_finite() {
            return None;
        }
        a.swap(p, c);
        let piv = a[c][c];
        a[c].iter_mut().for_each(|v| *v /= piv);
        let row_c = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != c {
                let f = row[c];
                row.iter_mut().zip(&row_c).for_each(|(v, w)| *v -= f * w);
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn sub(a: &[Vec<f64>], b: &[Vec<f64>]) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

fn scale(a: &[Vec<f64>], c: f64) -> Mat {
    a.iter()
        .map(|r| r.iter().map(|x| x * c).collect())
        .collect()
}

pub fn frobenius(a: &[Vec<f64>]) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// `g / |det g|^(1/n)`.
pub fn normalize_det(g: &[Vec<f64>]) -> Option<Mat> {
    let n = g.len();
    let d = crate::lattice::det(g);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some(scale(g, d.abs().powf(-1.0 / n as f64)))
}

fn sqrtm(a: &[Vec<f64>]) -> Option<Mat> {
    let n = a.len();
    let mut y = a.to_vec();
    let mut z = identity(n);
    for _ in 0..60 {
        let yi = mat_inv(&y)?;
        let zi = mat_inv(&z)?;
        let ny: Mat = y
            .iter()
            .zip(&zi)
            .map(|(r, s)| r.iter().zip(s).map(|(p, q)| 0.5 * (p + q)).collect())
            .collect();
        let nz: Mat = z
            .iter()
            .zip(&yi)
            .map(|(r, s)| r.iter().zip(s).map(|(p, q)| 0.5 * (p + q)).collect())
            .collect();
        let delta = frobenius(&sub(&ny, &y));
        y = ny;
        z = nz;
        if delta < 1e-15 * frobenius(&y) {
            break;
        }
    }
    Some(y)
}

/// Principal logarithm of a matrix with `||a - I||_F < 1`.
pub fn logm(a: &[Vec<f64>]) -> Option<Mat> {
    let n = a.len();
    if frobenius(&sub(a, &identity(n))) >= 1.0 {
        return None;
    }
    if n == 2 {
        return logm2(a);
    }
    let mut m = a.to_vec();
    let mut k = 0;
    while frobenius(&sub(&m, &identity(n))) > 0.05 {
        m = sqrtm(&m)?;
        k += 1;
    }
    let x = sub(&m, &identity(n));
    let mut term = x.clone();
    let mut acc = vec![vec![0.0; n]; n];
    for j in 1..40 {
        let c = if j % 2 == 1 { 1.0 } else { -1.0 } / j as f64;
        for (r, s) in acc.iter_mut().zip(&term) {
            r.iter_mut().zip(s).for_each(|(p, q)| *p += c * q);
        }
        term = mat_mul(&term, &x);
        if frobenius(&term) < 1e-18 {
            break;
        }
    }
    Some(scale(&acc, (1u64 << k) as f64))
}

/// Closed form for `2 x 2`: with `A = sqrt(det) B`, `det B = 1`,
/// `log B = (theta / sinh theta) (B - cosh(theta) I)`.
fn logm2(a: &[Vec<f64>]) -> Option<Mat> {
    let d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if d <= 0.0 {
        return None;
    }
    let r = d.sqrt();
    let b = scale(a, 1.0 / r);
    let s = 0.5 * (b[0][0] + b[1][1]);
    if s <= -1.0 {
        return None;
    }
    let f = if (s - 1.0).abs() < 1e-8 {
        // theta / sinh theta near theta = 0, with cosh theta = s
        1.0 - (s - 1.0) / 3.0
    } else if s > 1.0 {
        let th = s.acosh();
        th / th.sinh()
    } else {
        let th = s.acos();
        th / th.sin()
    };
    let half_log_d = 0.5 * d.ln();
    Some(
        (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| {
                        f * (b[i][j] - if i == j { s } else { 0.0 })
                            + if i == j { half_log_d } else { 0.0 }
                    })
                    .collect()
            })
            .collect(),
    )
}

pub fn expm(x: &[Vec<f64>]) -> Mat {
    let n = x.len();
    let nrm = frobenius(x);
    let k = if nrm > 0.5 {
        (nrm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let xs = scale(x, 0.5f64.powi(k));
    let mut acc = identity(n);
    let mut term = identity(n);
    for j in 1..30 {
        term = scale(&mat_mul(&term, &xs), 1.0 / j as f64);
        for (r, s) in acc.iter_mut().zip(&term) {
            r.iter_mut().zip(s).for_each(|(p, q)| *p += q);
        }
    }
    for _ in 0..k {
        acc = mat_mul(&acc, &acc);
    }
    acc
}

/// Candidates `+-a` with determinant `+1` (the scalar `-1` is trivial in
/// `PGL_n`).
fn sign_variants(a: &[Vec<f64>]) -> Vec<Mat> {
    let neg = scale(a, -1.0);
    vec![a.to_vec(), neg]
        .into_iter()
        .filter(|m| crate::lattice::det(m) > 0.0)
        .collect()
}

/// `||log(g1^-1 g2)||_F` on determinant-normalized representatives.
pub fn group_distance(g1: &[Vec<f64>], g2: &[Vec<f64>]) -> Result<f64> {
    let a = normalize_det(g1).ok_or_else(|| Error::Invalid("g1 is not invertible".into()))?;
    let b = normalize_det(g2).ok_or_else(|| Error::Invalid("g2 is not invertible".into()))?;
    let ai = mat_inv(&a).ok_or(Error::Singular)?;
    let m = mat_mul(&ai, &b);
    sign_variants(&m)
        .iter()
        .filter_map(|v| logm(v))
        .map(|l| frobenius(&l))
        .min_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal))
        .ok_or(Error::DistanceUndefined)
}

/// Operator norm of `Ad(g)` on `M_n` with the Frobenius norm,
/// `sigma_max(g) / sigma_min(g)`.
pub fn ad_norm(g: &[Vec<f64>]) -> f64 {
    let gt: Mat = (0..g.len())
        .map(|j| g.iter().map(|r| r[j]).collect())
        .collect();
    let s = mat_mul(&gt, g);
    let ev = sym_eigenvalues(&s);
    let (lo, hi) = ev
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &e| (l.min(e), h.max(e)));
    (hi / lo).sqrt()
}

/// Eigenvalues of a small symmetric matrix (cyclic Jacobi).
fn sym_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m = a.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// A regular or singular element `x` of the diagonal Lie algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowDirection {
    weights: Vec<f64>,
}

impl FlowDirection {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 || weights.iter().sum::<f64>().abs() > 1e-12 {
            return Err(Error::Invalid("flow weights must sum to zero".into()));
        }
        Ok(FlowDirection { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `min_{i != j} |w_i - w_j|`.
    pub fn kappa(&self) -> f64 {
        let w = &self.weights;
        let mut k = f64::INFINITY;
        for i in 0..w.len() {
            for j in 0..w.len() {
                if i != j {
                    k = k.min((w[i] - w[j]).abs());
                }
            }
        }
        k
    }

    pub fn is_regular(&self) -> bool {
        self.kappa() > 0.0
    }
}

fn round_mat(a: &[Vec<f64>]) -> Mat {
    a.iter()
        .map(|r| r.iter().map(|x| x.round()).collect())
        .collect()
}

/// `X = log(base^-1 gamma y)` for the `gamma` in `GL_n(Z)` that brings `y`
/// closest to `base`, if the logarithm is defined.
pub fn relative_log(base: &[Vec<f64>], y: &[Vec<f64>]) -> Option<Mat> {
    let b = normalize_det(base)?;
    let yy = normalize_det(y)?;
    let gamma = round_mat(&mat_mul(&b, &mat_inv(&yy)?));
    let dg = crate::lattice::det(&gamma);
    if (dg.abs() - 1.0).abs() > 1e-9 {
        return None;
    }
    let m = mat_mul(&mat_inv(&b)?, &mat_mul(&gamma, &yy));
    sign_variants(&m)
        .iter()
        .filter_map(|v| logm(v))
        .min_by(|x, y| {
            frobenius(x)
                .partial_cmp(&frobenius(y))
                .unwrap_or(Ordering::Equal)
        })
}

/// Whether `exp(x)` lies in the tube `B^(-t,t)` around the identity for
/// the box `|x_ij| <= radius`.
pub fn in_tube(x: &[Vec<f64>], direction: &FlowDirection, t: f64, radius: f64) -> bool {
    let w = direction.weights();
    let n = w.len();
    (0..n).all(|i| (0..n).all(|j| x[i][j].abs() <= radius * (-t * (w[i] - w[j]).abs()).exp()))
}

/// Weighted fraction of `samples` lying in `base B^(-t,t)`.
pub fn tube_mass(
    samples: &[(EmbeddedLattice, f64)],
    base: &EmbeddedLattice,
    direction: &FlowDirection,
    t: f64,
    radius: f64,
) -> f64 {
    let total: f64 = samples.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let hit: f64 = samples
        .iter()
        .filter(|(y, _)| {
            relative_log(&base.basis, &y.basis).is_some_and(|x| in_tube(&x, direction, t, radius))
        })
        .map(|(_, w)| w)
        .sum();
    hit / total
}

/// Tube masses for a list of times, sharing the relative logarithms.
pub fn tube_mass_profile(
    samples: &[(EmbeddedLattice, f64)],
    base: &EmbeddedLattice,
    direction: &FlowDirection,
    times: &[f64],
    radius: f64,
) -> Vec<f64> {
    let total: f64 = samples.iter().map(|(_, w)| w).sum();
    let logs: Vec<(Mat, f64)> = samples
        .iter()
        .filter_map(|(y, w)| relative_log(&base.basis, &y.basis).map(|x| (x, *w)))
        .filter(|(x, _)| x.iter().flatten().all(|v| v.abs() <= radius))
        .collect();
    times
        .iter()
        .map(|&t| {
            logs.iter()
                .filter(|(x, _)| in_tube(x, direction, t, radius))
                .map(|(_, w)| w)
                .sum::<f64>()
                / total
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SeparationRecord {
    pub min_dist: f64,
    pub pair: (usize, usize),
    pub disc_product: Z,
    /// `min_dist * sqrt(D1 D2)`.
    pub scaled: f64,
}

/// A sampled orbit point: the reduced basis and its flow parameter.
#[derive(Clone, Debug)]
struct Sample {
    s: f64,
    g: Mat,
}

/// Fewest samples taken on any orbit.
const MIN_SAMPLES: usize = 8;

fn gauss_basis(l: &EmbeddedLattice) -> Mat {
    let (b, _) = crate::lattice::lll(&l.basis);
    b
}

/// `Gamma`-invariant coordinates of a planar unimodular lattice: the
/// length and doubled angle of a shortest vector.
fn feature(v: &[f64]) -> [f64; 2] {
    [(v[0] * v[0] + v[1] * v[1]).sqrt(), 2.0 * v[1].atan2(v[0])]
}

/// Features under which a point may be matched: its shortest vector, and
/// the second reduced vector too when the two nearly tie.
fn features(g: &[Vec<f64>], tie: f64) -> Vec<[f64; 2]> {
    let (f0, f1) = (feature(&g[0]), feature(&g[1]));
    if f1[0] <= f0[0] * (1.0 + tie) {
        vec![f0, f1]
    } else {
        vec![f0]
    }
}

fn orbit_samples(orbit: &TorusOrbit, density: usize, window_r: f64) -> Vec<Sample> {
    let lat = orbit.log_lattice();
    let period = lat[0][0].abs();
    let count = ((period * density as f64).ceil() as usize).max(MIN_SAMPLES);
    (0..count)
        .filter_map(|i| {
            let s = period * i as f64 / count as f64;
            let g = gauss_basis(&orbit.point(&[s, -s]));
            (ad_norm(&g) <= window_r).then_some(Sample { s, g })
        })
        .collect()
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * std::f64::consts::PI);
    d.min(2.0 * std::f64::consts::PI - d)
}

/// Distance from `g1` to the orbit `Gamma g2 H`, found by sliding `g2`
/// along `H` until the diagonal part of the relative logarithm vanishes.
fn transversal_distance(g1: &[Vec<f64>], g2: &[Vec<f64>]) -> Option<f64> {
    let n = g1.len();
    let mut cur = g2.to_vec();
    let mut best = f64::INFINITY;
    for _ in 0..6 {
        let x = relative_log(g1, &cur)?;
        best = best.min(frobenius(&x));
        let diag: Mat = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { -x[i][i] } else { 0.0 })
                    .collect()
            })
            .collect();
        cur = mat_mul(&cur, &expm(&diag));
    }
    let x = relative_log(g1, &cur)?;
    Some(best.min(frobenius(&x)))
}

/// Mirror image in the second coordinate (the sign element of `H`).
fn mirror(g: &[Vec<f64>]) -> Mat {
    g.iter().map(|r| vec![r[0], -r[1]]).collect()
}

fn pair_distance(
    a: &TorusOrbit,
    sa: &[Sample],
    sb: &[Sample],
    window_r: f64,
    step: f64,
) -> Option<f64> {
    // index of the second orbit by shortest-vector features, mirrored copies included
    let mut index: Vec<([f64; 2], Mat)> = Vec::new();
    for q in sb {
        let m = mirror(&q.g);
        for f in features(&q.g, 4.0 * step) {
            index.push((f, q.g.clone()));
            index.push(([f[0], -f[1]], m.clone()));
        }
    }
    index.sort_by(|x, y| x.0[0].partial_cmp(&y.0[0]).unwrap_or(Ordering::Equal));
    let keys: Vec<f64> = index.iter().map(|e| e.0[0]).collect();
    if index.is_empty() || sa.is_empty() {
        return None;
    }
    let mut best: Option<(f64, f64, Mat)> = None;
    let mut widen = 1.0;
    // widen until some pair is examined; a match within the final tolerance
    // bounds every unexamined pair's distance from below by that tolerance
    while best.is_none() && widen < 1e3 {
        let (tol_len, tol_ang) = (step * widen, 3.0 * step * widen);
        for p in sa {
            let fp = feature(&p.g[0]);
            let lo = keys.partition_point(|&k| k < fp[0] - tol_len);
            for (fq, qg) in index[lo..].iter().take_while(|e| e.0[0] <= fp[0] + tol_len) {
                if angle_gap(fp[1], fq[1]) > tol_ang {
                    continue;
                }
                if let Some(d) = transversal_distance(&p.g, qg) {
                    if best.as_ref().is_none_or(|b| d < b.0) {
                        best = Some((d, p.s, qg.clone()));
                    }
                }
            }
        }
        widen *= 2.0;
    }
    let (d0, s0, qg) = best?;
    // refine along the first orbit
    let f = |s: f64| -> f64 {
        let p = gauss_basis(&a.point(&[s, -s]));
        if ad_norm(&p) > window_r * 1.5 {
            return f64::INFINITY;
        }
        transversal_distance(&p, &qg).unwrap_or(f64::INFINITY)
    };
    let (mut lo, mut hi) = (s0 - step, s0 + step);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - gr * (hi - lo);
    let mut d = lo + gr * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = f(d);
        }
    }
    Some(d0.min(fc).min(fd))
}

/// Distinct orbits (by canonical key) among `orbits`, as indices.
fn distinct_orbits(orbits: &[TorusOrbit]) -> Result<Vec<usize>> {
    if orbits.iter().any(|o| o.degree() != 2) {
        return Err(Error::Unsupported(
            "separation scans are implemented for n = 2".into(),
        ));
    }
    let keys: Vec<String> = orbits
        .iter()
        .map(|o| o.canonical_key())
        .collect::<Result<_>>()?;
    let mut distinct: Vec<usize> = Vec::new();
    for (i, k) in keys.iter().enumerate() {
        if !distinct.iter().any(|&j| keys[j] == *k) {
            distinct.push(i);
        }
    }
    if distinct.len() < 2 {
        return Err(Error::InsufficientInput(
            "fewer than two distinct orbits".into(),
        ));
    }
    Ok(distinct)
}

fn record(orbits: &[TorusOrbit], i: usize, j: usize, d: f64) -> SeparationRecord {
    let dp = &orbits[i].disc_order_route * &orbits[j].disc_order_route;
    let scaled = d * crate::linalg::z_to_f64(&dp).sqrt();
    SeparationRecord {
        min_dist: d,
        pair: (i, j),
        disc_product: dp,
        scaled,
    }
}

/// Separation of every pair of distinct orbits, in index order. Pairs with
/// no sampled points inside the window on one side are omitted.
pub fn pairwise_separations(
    orbits: &[TorusOrbit],
    window_r: f64,
    density: usize,
) -> Result<Vec<SeparationRecord>> {
    let distinct = distinct_orbits(orbits)?;
    let samples: Vec<Vec<Sample>> = distinct
        .par_iter()
        .map(|&i| orbit_samples(&orbits[i], density.max(1), window_r))
        .collect();
    let step = 1.0 / density.max(1) as f64;
    let mut pairs = Vec::new();
    for a in 0..distinct.len() {
        for b in a + 1..distinct.len() {
            pairs.push((a, b));
        }
    }
    Ok(pairs
        .par_iter()
        .filter_map(|&(a, b)| {
            let oa = &orbits[distinct[a]];
            pair_distance(oa, &samples[a], &samples[b], window_r, step)
                .map(|d| record(orbits, distinct[a], distinct[b], d))
        })
        .collect())
}

/// Minimum distance between points of distinct orbits inside the window
/// `||Ad(g)|| <= window_r`, for quadratic orbits. Each orbit is sampled at
/// `density` points per unit of flow time; near pairs are then refined
/// continuously along both orbits.
pub fn min_orbit_separation(
    orbits: &[TorusOrbit],
    window_r: f64,
    density: usize,
) -> Result<SeparationRecord> {
    pairwise_separations(orbits, window_r, density)?
        .into_iter()
        .min_by(|x, y| {
            x.min_dist
                .partial_cmp(&y.min_dist)
                .unwrap_or(Ordering::Equal)
                .then(x.pair.cmp(&y.pair))
        })
        .ok_or_else(|| Error::InsufficientInput("no sampled points inside the window".into()))
}

/// Separations between the principal orbits of the quadratic orders of
/// the given discriminants, with the least-squares slope of
/// `log min_dist` against `log(D_1 D_2)`.
pub fn quadratic_separation_scan(
    discs: &[i64],
    window_r: f64,
    density: usize,
) -> Result<(Vec<SeparationRecord>, Option<f64>)> {
    let orbits: Vec<TorusOrbit> = discs
        .par_iter()
        .map(|&d| crate::orbits::principal_orbit(&Arc::new(crate::fields::quadratic_order(d)?)))
        .collect::<Result<_>>()?;
    let recs = pairwise_separations(&orbits, window_r, density)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = recs
        .iter()
        .map(|r| {
            (
                crate::linalg::z_to_f64(&r.disc_product).ln(),
                r.min_dist.ln(),
            )
        })
        .unzip();
    let slope = crate::stats::slope(&xs, &ys);
    Ok((recs, slope))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_exp_roundtrip() {
        let x = vec![vec![0.1, -0.2], vec![0.05, -0.1]];
        let l = logm(&expm(&x)).unwrap();
        assert!(frobenius(&sub(&l, &x)) < 1e-12);
    }

    #[test]
    fn closed_form_log_matches_series() {
        for x in [
            vec![vec![0.1, -0.2], vec![0.05, -0.1]],
            vec![vec![0.0, 0.3], vec![-0.3, 0.0]],
            vec![vec![1e-9, 2e-9], vec![0.0, -1e-9]],
        ] {
            let l = logm2(&expm(&x)).unwrap();
            assert!(frobenius(&sub(&l, &x)) < 1e-12, "{l:?}");
        }
    }

    #[test]
    fn ad_norm_of_diagonal() {
        let g = vec![vec![2.0, 0.0], vec![0.0, 0.5]];
        assert!((ad_norm(&g) - 4.0).abs() < 1e-12);
    }
}
