//! The modular surface: closed geodesics of real quadratic orders,
//! continued fractions, badly approximable starting points, the explicit
//! Anosov closing construction and the abundance scan.
//!
//! Group elements are `2 x 2` matrices `M` standing for the lattice `Z^2 M`
//! (rows). The geodesic flow is `h_t = diag(e^{t/2}, e^{-t/2})` acting by
//! `h.M = M h^{-1}`, and `h_T.M = M` means `M h_T^{-1} M^{-1}` is integral.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::dynamics::{frobenius, logm, mat_inv, mat_mul, Mat};
use crate::fields::quadratic::{self, check_disc, isqrt};
use crate::forms::wide_class_minima;
use crate::linalg::{z_to_f64, Q, Z};
use crate::{Error, Result};

/// Largest `d(g, e)` for which `h_N x = g x` counts as an almost return.
pub const RHO_C: f64 = 1e-2;
/// Allowed drift of the closed period away from `N`.
pub const ETA_C: f64 = 10.0 * RHO_C;
/// Resource guard for [`abundance_scan`].
pub const ABUNDANCE_MAX: i64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticOrderGeodesic {
    pub disc: i64,
    /// `(a, b)` with `eps = (a + b sqrt D)/2 > 1`.
    pub fundamental_unit: (Z, Z),
    pub unit_norm: i32,
    /// `2 log eps_+` for the least totally positive unit `eps_+ > 1`.
    pub length: f64,
}

pub fn fundamental_unit_cf(d: i64) -> Result<QuadraticOrderGeodesic> {
    let u = quadratic::fundamental_unit(d)?;
    Ok(QuadraticOrderGeodesic {
        disc: d,
        fundamental_unit: (u.a, u.b),
        unit_norm: u.norm,
        length: length_from_log(u.log, u.norm),
    })
}

fn length_from_log(log_eps: f64, norm: i32) -> f64 {
    if norm == 1 {
        2.0 * log_eps
    } else {
        4.0 * log_eps
    }
}

/// Length of the closed geodesic of discriminant `d`, without forming the
/// unit.
pub fn geodesic_length(d: i64) -> Result<f64> {
    let (log, norm) = quadratic::log_fundamental_unit(d)?;
    Ok(length_from_log(log, norm))
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeCheck {
    pub disc: i64,
    pub length: f64,
    pub lower_bound: f64,
    pub ok: bool,
}

pub fn volume_bound_check(d: i64) -> Result<VolumeCheck> {
    let length = geodesic_length(d)?;
    let lower_bound = (d as f64).ln() - 4.0 * std::f64::consts::LN_2;
    Ok(VolumeCheck {
        disc: d,
        length,
        lower_bound,
        ok: length >= lower_bound,
    })
}

/// Every discriminant `5 <= D <= bound` of a real quadratic order.
pub fn valid_discriminants(bound: i64) -> Vec<i64> {
    (5..=bound).filter(|&d| check_disc(d).is_ok()).collect()
}

/// Valid discriminants near `5, 5r, 5r^2, ...` up to `bound`: each grid
/// point is moved up to the next valid discriminant, duplicates dropped.
pub fn log_spaced_discriminants(bound: i64, ratio: f64) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::new();
    let mut x = 5.0f64;
    while x <= bound as f64 && ratio > 1.0 {
        let mut d = x.round() as i64;
        while check_disc(d).is_err() {
            d += 1;
        }
        if d <= bound && out.last() != Some(&d) {
            out.push(d);
        }
        x *= ratio;
    }
    out
}

/// The quadratic irrational `(p + sqrt d)/q` with `q | d - p^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    pub p: i64,
    pub q: i64,
    pub d: i64,
}

impl QuadSurd {
    /// `(p + sqrt d)/q` for any `q != 0` and non-square `d > 0`, rescaled
    /// so that `q | d - p^2`.
    pub fn new(p: i64, q: i64, d: i64) -> Result<Self> {
        if d <= 0 || quadratic::is_square(d) {
            return Err(Error::Invalid(format!("sqrt({d}) is rational")));
        }
        if q == 0 {
            return Err(Error::Invalid("zero denominator".into()));
        }
        if (d - p * p) % q == 0 {
            return Ok(QuadSurd { p, q, d });
        }
        let k = q.abs();
        Ok(QuadSurd {
            p: p * k,
            q: q * k,
            d: d * k * k,
        })
    }

    pub fn value(&self) -> f64 {
        (self.p as f64 + (self.d as f64).sqrt()) / self.q as f64
    }

    /// `floor((p + sqrt d)/q)`, exactly.
    fn floor(&self) -> i64 {
        let r = isqrt(self.d);
        if self.q > 0 {
            (self.p + r).div_euclid(self.q)
        } else {
            (-self.p - r - 1).div_euclid(-self.q)
        }
    }

    /// `|m x - n|` for this surd `x`, free of cancellation.
    pub fn distance(&self, m: &Z, n: &Z) -> f64 {
        // m x - n = (a + m sqrt d)/q with a = m p - n q
        let a = m * Z::from(self.p) - n * Z::from(self.q);
        let sd = (self.d as f64).sqrt();
        let num = if a.sign() == m.sign() || a.is_zero() || m.is_zero() {
            (z_to_f64(&a) + z_to_f64(m) * sd).abs()
        } else {
            let exact = &a * &a - m * m * Z::from(self.d);
            (z_to_f64(&exact) / (z_to_f64(&a) - z_to_f64(m) * sd)).abs()
        };
        num / (self.q as f64).abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CfValue {
    Rational(Q),
    Surd(QuadSurd),
}

impl CfValue {
    pub fn value(&self) -> f64 {
        match self {
            CfValue::Rational(x) => crate::poly::q_to_f64(x),
            CfValue::Surd(s) => s.value(),
        }
    }

    /// `|m x - n|`.
    pub fn distance(&self, m: &Z, n: &Z) -> f64 {
        match self {
            CfValue::Rational(x) => {
                let num = m * x.numer() - n * x.denom();
                (z_to_f64(&num) / z_to_f64(x.denom())).abs()
            }
            CfValue::Surd(s) => s.distance(m, n),
        }
    }
}

/// Simple continued fraction `[a0; a1, a2, ...]`. For a surd the list holds
/// the preperiod followed by one period; for a rational it is the whole
/// finite expansion and `period` is 0.
#[derive(Clone, Debug, PartialEq)]
pub struct CFExpansion {
    pub value: CfValue,
    pub partial_quotients: Vec<i64>,
    pub preperiod: usize,
    pub period: usize,
}

impl CFExpansion {
    pub fn of_rational(x: &Q) -> Result<Self> {
        let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
        let mut pq = Vec::new();
        while !d.is_zero() {
            let (a, r) = n.div_mod_floor(&d);
            pq.push(
                a.to_i64()
                    .ok_or_else(|| Error::Unsupported("partial quotient exceeds 64 bits".into()))?,
            );
            n = std::mem::replace(&mut d, r);
        }
        Ok(CFExpansion {
            value: CfValue::Rational(x.clone()),
            preperiod: pq.len(),
            partial_quotients: pq,
            period: 0,
        })
    }

    pub fn of_surd(s: QuadSurd) -> Self {
        let mut seen: HashMap<(i64, i64), usize> = HashMap::new();
        let mut cur = s;
        let mut pq = Vec::new();
        loop {
            if let Some(&j) = seen.get(&(cur.p, cur.q)) {
                let period = pq.len() - j;
                return CFExpansion {
                    value: CfValue::Surd(s),
                    partial_quotients: pq,
                    preperiod: j,
                    period,
                };
            }
            seen.insert((cur.p, cur.q), pq.len());
            let a = cur.floor();
            pq.push(a);
            let p2 = a * cur.q - cur.p;
            let q2 = (cur.d - p2 * p2) / cur.q;
            cur = QuadSurd {
                p: p2,
                q: q2,
                d: cur.d,
            };
        }
    }

    /// The `k`-th partial quotient, or `None` past the end of a rational.
    pub fn quotient(&self, k: usize) -> Option<i64> {
        if k < self.partial_quotients.len() {
            return Some(self.partial_quotients[k]);
        }
        if self.period == 0 {
            return None;
        }
        Some(self.partial_quotients[self.preperiod + (k - self.preperiod) % self.period])
    }

    /// Convergents `(p_k, q_k)` for `k = 0..count`, fewer for a rational.
    pub fn convergents(&self, count: usize) -> Vec<(Z, Z)> {
        let (mut p0, mut q0, mut p1, mut q1) = (Z::zero(), Z::one(), Z::one(), Z::zero());
        let mut out = Vec::new();
        for k in 0..count {
            let Some(a) = self.quotient(k) else { break };
            let a = Z::from(a);
            let (p2, q2) = (&a * &p1 + &p0, &a * &q1 + &q0);
            (p0, q0) = (
                std::mem::replace(&mut p1, p2.clone()),
                std::mem::replace(&mut q1, q2.clone()),
            );
            out.push((p2, q2));
        }
        out
    }

    /// Convergents up to and including the first with `q_k > q_max`.
    pub fn convergents_until(&self, q_max: f64) -> Vec<(Z, Z)> {
        let mut out = Vec::new();
        let mut count = 16;
        loop {
            let c = self.convergents(count);
            let done = c.len() < count || c.last().is_some_and(|(_, q)| z_to_f64(q) > q_max);
            if done {
                for (p, q) in c {
                    let stop = z_to_f64(&q) > q_max;
                    out.push((p, q));
                    if stop {
                        break;
                    }
                }
                return out;
            }
            count *= 2;
        }
    }
}

/// Value `x > 1` of the purely periodic expansion `[w0; w1, ..., w0, ...]`.
fn periodic_value(word: &[i64]) -> f64 {
    let (mut a, mut b, mut c, mut d) = (1.0f64, 0.0f64, 0.0f64, 1.0f64);
    for &w in word {
        let w = w as f64;
        (a, b, c, d) = (a * w + b, a, c * w + d, c);
    }
    // x = (a x + b)/(c x + d)
    let s = d - a;
    (-s + (s * s + 4.0 * b * c).sqrt()) / (2.0 * c)
}

/// `u = [0; w0, w1, ...]` with the word repeated forever, exactly.
pub fn periodic_surd(word: &[i64]) -> Result<QuadSurd> {
    if word.is_empty() || word.iter().any(|&w| w < 1) {
        return Err(Error::Invalid(
            "period must be a nonempty word of positive integers".into(),
        ));
    }
    let (mut a, mut b, mut c, mut d) = (1i64, 0i64, 0i64, 1i64);
    for &w in word {
        (a, b, c, d) = (a * w + b, a, c * w + d, c);
    }
    // u = 1/x solves b u^2 + (a - d) u - c = 0, and u > 0
    let disc = (a - d) * (a - d) + 4 * b * c;
    QuadSurd::new(d - a, 2 * b, disc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BadlyApproximable {
    pub u: QuadSurd,
    pub period: Vec<i64>,
    /// `liminf_m m <m u>`, from the two-sided periodic expansion.
    pub liminf: f64,
    /// `1/(max_pq + 2)`, a lower bound for `liminf` valid for every word
    /// with entries at most `max_pq`.
    pub delta_lower: f64,
}

fn is_primitive_word(w: &[i64]) -> bool {
    let k = w.len();
    (1..k)
        .filter(|p| k % p == 0)
        .all(|p| (0..k).any(|i| w[i] != w[i % p]))
}

/// `liminf m <m u>` for `u = [0; w, w, ...]`: the least
/// `1/([w_j; w_{j+1}, ...] + [0; w_{j-1}, w_{j-2}, ...])` over the period.
pub fn periodic_liminf(word: &[i64]) -> f64 {
    let k = word.len();
    (0..k)
        .map(|j| {
            let fwd: Vec<i64> = (0..k).map(|i| word[(j + i) % k]).collect();
            let back: Vec<i64> = (1..=k).map(|i| word[(j + k - i) % k]).collect();
            1.0 / (periodic_value(&fwd) + 1.0 / periodic_value(&back))
        })
        .fold(f64::INFINITY, f64::min)
}

/// The first `count` purely periodic `u = [0; w, w, ...]` with primitive
/// period `w` over `{1, ..., max_pq}`, by period length and then
/// lexicographically.
pub fn badly_approximable(max_pq: i64, count: usize) -> Result<Vec<BadlyApproximable>> {
    if max_pq < 1 {
        return Err(Error::Invalid("max_pq must be at least 1".into()));
    }
    let mut out = Vec::new();
    let mut len = 1;
    while out.len() < count {
        let total = (max_pq as u128)
            .checked_pow(len as u32)
            .filter(|&t| t < 1 << 40);
        let Some(total) = total else {
            return Err(Error::SearchExhausted("period length overflow".into()));
        };
        for idx in 0..total {
            let mut word = Vec::with_capacity(len);
            let mut r = idx;
            for _ in 0..len {
                word.push((r % max_pq as u128) as i64 + 1);
                r /= max_pq as u128;
            }
            word.reverse();
            if !is_primitive_word(&word) {
                continue;
            }
            let u = periodic_surd(&word)?;
            out.push(BadlyApproximable {
                u,
                liminf: periodic_liminf(&word),
                delta_lower: 1.0 / (max_pq + 2) as f64,
                period: word,
            });
            if out.len() == count {
                break;
            }
        }
        len += 1;
    }
    Ok(out)
}

/// Smallest `(sup norm)^2` of a vector of
/// `Z^2 [[1, -u], [0, 1]] diag(e^{-t/2}, e^{t/2})`, over the vectors that
/// can be shorter than 1: those are `(q, p)` for convergents `p/q` of `u`.
pub fn shortest_sup_squared(u: &CfValue, convergents: &[(Z, Z)], t: f64) -> f64 {
    let (a, b) = ((-t / 2.0).exp(), (t / 2.0).exp());
    let mut best = b * b;
    for (p, q) in convergents {
        if q.is_zero() {
            continue;
        }
        let s = (z_to_f64(q) * a).max(u.distance(q, p) * b);
        best = best.min(s * s);
    }
    best
}

/// Whether the forward orbit of `[[1, -u], [0, 1]]` stays in the set of
/// lattices without a vector of squared sup-norm below `delta`, sampled at
/// `t = j t_max / steps`.
pub fn forward_orbit_stays(u: &CfValue, delta: f64, t_max: f64, steps: usize) -> Result<bool> {
    if steps == 0 || t_max < 0.0 {
        return Err(Error::Invalid("need steps > 0 and t_max >= 0".into()));
    }
    let exp = match u {
        CfValue::Rational(x) => CFExpansion::of_rational(x)?,
        CfValue::Surd(s) => CFExpansion::of_surd(*s),
    };
    let conv = exp.convergents_until(2.0 * (t_max / 2.0).exp());
    Ok((0..=steps).all(|j| {
        let t = t_max * j as f64 / steps as f64;
        shortest_sup_squared(u, &conv, t) >= delta
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Closing {
    pub y: Mat,
    pub t: f64,
    /// `y h_T^{-1} y^{-1}`, rounded.
    pub gamma: [[i64; 2]; 2],
    /// Largest entry of `y h_T^{-1} y^{-1} - gamma`.
    pub residual: f64,
    pub iterations: usize,
}

fn diag(a: f64, d: f64) -> Mat {
    vec![vec![a, 0.0], vec![0.0, d]]
}

fn return_matrix(m: &Mat, t: f64) -> Result<Mat> {
    let inv = mat_inv(m).ok_or(Error::Singular)?;
    Ok(mat_mul(
        &mat_mul(m, &diag((-t / 2.0).exp(), (t / 2.0).exp())),
        &inv,
    ))
}

fn nearest_integral(a: &Mat) -> ([[i64; 2]; 2], f64) {
    let g = [
        [a[0][0].round() as i64, a[0][1].round() as i64],
        [a[1][0].round() as i64, a[1][1].round() as i64],
    ];
    let res = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .fold(0.0f64, |m, (i, j)| m.max((a[i][j] - g[i][j] as f64).abs()));
    (g, res)
}

fn closing_step(m: &Mat, n: f64) -> Result<(Mat, f64)> {
    let a = return_matrix(m, n)?;
    let (gamma, _) = nearest_integral(&a);
    if gamma[0][0] * gamma[1][1] - gamma[0][1] * gamma[1][0] != 1 {
        return Err(Error::ClosingFailed(
            "no nearby lattice identification".into(),
        ));
    }
    let gm: Mat = gamma
        .iter()
        .map(|r| r.iter().map(|&x| x as f64).collect())
        .collect();
    let inv = mat_inv(m).ok_or(Error::Singular)?;
    // h_N x = g x
    let g = mat_mul(
        &mat_mul(&diag((n / 2.0).exp(), (-n / 2.0).exp()), &inv),
        &mat_mul(&gm, m),
    );
    let lg = logm(&g)
        .ok_or_else(|| Error::ClosingFailed("return map is not near the identity".into()))?;
    if frobenius(&lg) >= RHO_C {
        return Err(Error::ClosingFailed(format!(
            "return distance {:.3e} exceeds {RHO_C}",
            frobenius(&lg)
        )));
    }
    let (g11, g12, g21, g22) = (g[0][0], g[0][1], g[1][0], g[1][1]);
    let en = (-n).exp();
    // -e^{-N} g12 u^2 + (e^{-N} g11 - g22) u + g21 = 0, root near 0
    let (qa, qb, qc) = (-en * g12, en * g11 - g22, g21);
    let u = if qa.abs() < 1e-300 {
        -qc / qb
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return Err(Error::ClosingFailed(
                "negative discriminant in the lower-left equation".into(),
            ));
        }
        let w = -0.5 * (qb + qb.signum() * disc.sqrt());
        qc / w
    };
    if !u.is_finite() || u.abs() >= RHO_C {
        return Err(Error::ClosingFailed(
            "no small root of the lower-left equation".into(),
        ));
    }
    // x~ = n^-(u).x, return map upper triangular
    let a11 = g11 - u * g12;
    let b = g12;
    let d = g22 + en * u * g12;
    let v = -b / ((1.0 / en) * d - a11);
    if !v.is_finite() || v.abs() >= RHO_C || a11 <= 0.0 {
        return Err(Error::ClosingFailed(
            "upper-right correction is not small".into(),
        ));
    }
    let y = mat_mul(
        &mat_mul(m, &vec![vec![1.0, 0.0], vec![-u, 1.0]]),
        &vec![vec![1.0, -v], vec![0.0, 1.0]],
    );
    Ok((y, n - 2.0 * a11.ln()))
}

/// Closes an almost-periodic point: `x` with `h_N x` close to `x` gives a
/// nearby `y` with `h_T y = y` exactly (to `tol`), `|T - N| <= ETA_C`.
/// The construction is repeated from `y` until the residual is below
/// `tol`.
pub fn anosov_close(x: &Mat, n: f64, tol: f64) -> Result<Closing> {
    if x.len() != 2 || x.iter().any(|r| r.len() != 2) {
        return Err(Error::Invalid("expected a 2 x 2 matrix".into()));
    }
    let (mut y, mut t) = (x.clone(), n);
    for it in 1..=8 {
        (y, t) = closing_step(&y, t)?;
        if (t - n).abs() > ETA_C {
            return Err(Error::ClosingFailed(format!(
                "period moved by {:.3e}",
                t - n
            )));
        }
        let (gamma, residual) = nearest_integral(&return_matrix(&y, t)?);
        if residual <= tol {
            return Ok(Closing {
                y,
                t,
                gamma,
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::ClosingFailed(format!(
        "residual above {tol:e} after 8 rounds"
    )))
}

/// The lattice `D^{-1/4} (Z + Z w)` of the order of discriminant `d`,
/// `w = (d mod 2 + sqrt d)/2`, embedded with the larger root first, and
/// its period `2 log eps_+`.
pub fn periodic_point(d: i64) -> Result<(Mat, f64)> {
    check_disc(d)?;
    let sd = (d as f64).sqrt();
    let p = d.rem_euclid(2) as f64;
    let s = (d as f64).powf(-0.25);
    let m = vec![vec![s * (p + sd) / 2.0, s * (p - sd) / 2.0], vec![s, s]];
    Ok((m, geodesic_length(d)?))
}

/// Length and wide-class cusp data of one discriminant.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscData {
    pub disc: i64,
    pub length: f64,
    /// `min |f|` over each wide class of primitive forms of discriminant
    /// `disc`, sorted.
    pub class_minima: Vec<i64>,
}

impl DiscData {
    pub fn new(d: i64) -> Result<Self> {
        Ok(DiscData {
            disc: d,
            length: geodesic_length(d)?,
            class_minima: wide_class_minima(d),
        })
    }

    /// Orbits lying entirely in `Omega'_delta`: `min |f| >= delta sqrt D`.
    pub fn inside(&self, delta: f64) -> usize {
        let bound = delta * (self.disc as f64).sqrt();
        self.class_minima
            .iter()
            .filter(|&&m| m as f64 >= bound)
            .count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbundanceRow {
    pub big_delta: i64,
    pub delta: f64,
    pub n_orbits_inside: u64,
    pub total_length_inside: f64,
    pub total_length_all: f64,
}

/// Per-discriminant data for every order with `D <= delta_max`, computed
/// once and reusable across `delta`.
#[derive(Clone, Debug)]
pub struct AbundanceTable {
    pub data: Vec<DiscData>,
}

impl AbundanceTable {
    pub fn new(delta_max: i64) -> Result<Self> {
        if delta_max > ABUNDANCE_MAX {
            return Err(Error::Invalid(format!("Delta_max above {ABUNDANCE_MAX}")));
        }
        let data = valid_discriminants(delta_max)
            .par_iter()
            .map(|&d| DiscData::new(d))
            .collect::<Result<Vec<_>>>()?;
        Ok(AbundanceTable { data })
    }

    /// Cumulative rows at each grid value. Sums run in discriminant order so
    /// the result does not depend on scheduling.
    pub fn rows(&self, delta: f64, grid: &[i64]) -> Vec<AbundanceRow> {
        let mut out = Vec::with_capacity(grid.len());
        let (mut n_in, mut len_in, mut len_all) = (0u64, 0.0f64, 0.0f64);
        let mut i = 0;
        for &g in grid {
            while i < self.data.len() && self.data[i].disc <= g {
                let dd = &self.data[i];
                let k = dd.inside(delta);
                n_in += k as u64;
                len_in += k as f64 * dd.length;
                len_all += dd.class_minima.len() as f64 * dd.length;
                i += 1;
            }
            out.push(AbundanceRow {
                big_delta: g,
                delta,
                n_orbits_inside: n_in,
                total_length_inside: len_in,
                total_length_all: len_all,
            });
        }
        out
    }
}

/// `round(10^(k/per_decade))` from 10 up to `delta_max`, which is always
/// the last entry.
pub fn log_grid(delta_max: i64, per_decade: usize) -> Vec<i64> {
    let per = per_decade.max(1) as f64;
    let mut out: Vec<i64> = (per as i64..)
        .map(|k| 10f64.powf(k as f64 / per).round() as i64)
        .take_while(|&g| g < delta_max)
        .collect();
    out.push(delta_max);
    out.dedup();
    out
}

pub fn abundance_scan(delta: f64, delta_max: i64, per_decade: usize) -> Result<Vec<AbundanceRow>> {
    if !(delta > 0.0) {
        return Err(Error::Invalid("delta must be positive".into()));
    }
    let table = AbundanceTable::new(delta_max)?;
    Ok(table.rows(delta, &log_grid(delta_max, per_decade)))
}
