//! Continued fractions of quadratic surds `(P + sqrt D)/Q` and the
//! fundamental units they produce.

use num_traits::One;

use crate::linalg::Z;
use crate::{Error, Result};

pub fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn is_square(n: i64) -> bool {
    n >= 0 && isqrt(n).pow(2) == n
}

/// Checks that `d` is a discriminant of a real quadratic order.
pub fn check_disc(d: i64) -> Result<()> {
    if d <= 0 || is_square(d) || !(d.rem_euclid(4) == 0 || d.rem_euclid(4) == 1) {
        return Err(Error::InvalidDiscriminant(d));
    }
    Ok(())
}

/// One complete quotient `(P + sqrt D)/Q` with `Q | D - P^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Surd {
    pub p: i64,
    pub q: i64,
}

impl Surd {
    pub fn value(&self, d: i64) -> f64 {
        (self.p as f64 + (d as f64).sqrt()) / self.q as f64
    }
}

/// The purely periodic part of the expansion of `((D mod 2) + sqrt D)/2`:
/// the complete quotients and partial quotients over one period.
#[derive(Clone, Debug)]
pub struct Period {
    pub d: i64,
    pub a0: i64,
    pub quotients: Vec<Surd>,
    pub partial_quotients: Vec<i64>,
}

/// Expands a reduced surd with `Q > 0` until it returns to itself.
pub fn period_of(d: i64, start: Surd) -> (Vec<Surd>, Vec<i64>) {
    let s = isqrt(d);
    let mut cur = start;
    let mut quotients = Vec::new();
    let mut pq = Vec::new();
    loop {
        let a = (cur.p + s).div_euclid(cur.q);
        quotients.push(cur);
        pq.push(a);
        let p2 = a * cur.q - cur.p;
        let q2 = (d - p2 * p2) / cur.q;
        cur = Surd { p: p2, q: q2 };
        if cur == start {
            break;
        }
    }
    (quotients, pq)
}

pub fn period(d: i64) -> Result<Period> {
    check_disc(d)?;
    let s = isqrt(d);
    let p0 = d.rem_euclid(2);
    let a0 = (p0 + s).div_euclid(2);
    let p1 = a0 * 2 - p0;
    let q1 = (d - p1 * p1) / 2;
    let (quotients, partial_quotients) = period_of(d, Surd { p: p1, q: q1 });
    Ok(Period {
        d,
        a0,
        quotients,
        partial_quotients,
    })
}

/// Fundamental unit `(a + b sqrt D)/2` of the order of discriminant `D`.
#[derive(Clone, Debug)]
pub struct QuadUnit {
    pub a: Z,
    pub b: Z,
    pub norm: i32,
    /// `log eps` as a sum of logarithms of complete quotients.
    pub log: f64,
    pub period_len: usize,
}

pub fn fundamental_unit(d: i64) -> Result<QuadUnit> {
    let per = period(d)?;
    let (mut m00, mut m01, mut m10, mut m11) = (Z::one(), Z::from(0), Z::from(0), Z::one());
    for &a in &per.partial_quotients {
        let a = Z::from(a);
        let n00 = &m00 * &a + &m01;
        let n10 = &m10 * &a + &m11;
        m01 = std::mem::replace(&mut m00, n00);
        m11 = std::mem::replace(&mut m10, n10);
    }
    let _ = (m00, m01);
    // eps = q' xi_1 + q'' with xi_1 = (P1 + sqrt D)/Q1
    let Surd { p: p1, q: q1 } = per.quotients[0];
    let (q1z, p1z) = (Z::from(q1), Z::from(p1));
    let a = Z::from(2) * (&m10 * &p1z + &m11 * &q1z) / &q1z;
    let b = Z::from(2) * &m10 / &q1z;
    let l = per.partial_quotients.len();
    let norm = if l % 2 == 0 { 1 } else { -1 };
    debug_assert_eq!(&a * &a - Z::from(d) * &b * &b, Z::from(4 * norm));
    let log = per.quotients.iter().map(|s| s.value(d).ln()).sum();
    Ok(QuadUnit {
        a,
        b,
        norm,
        log,
        period_len: l,
    })
}

/// `(log eps, N(eps))` without forming `eps` exactly.
pub fn log_fundamental_unit(d: i64) -> Result<(f64, i32)> {
    let per = period(d)?;
    let l = per.quotients.len();
    let log = per.quotients.iter().map(|s| s.value(d).ln()).sum();
    Ok((log, if l % 2 == 0 { 1 } else { -1 }))
}
