//! Monic integer polynomials of small degree and certified real roots.

use crate::linalg::{qz, Q, Z};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Monic integer polynomial, coefficients in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    pub coeffs: Vec<Z>,
}

impl IntPoly {
    pub fn new(coeffs: Vec<Z>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        IntPoly::new(c.iter().map(|&x| Z::from(x)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn eval_q(&self, x: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * x + qz(c))
    }

    pub fn eval_z(&self, x: &Z) -> Z {
        self.coeffs
            .iter()
            .rev()
            .fold(Z::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + crate::linalg::z_to_f64(c))
    }

    /// Discriminant; closed forms for degree 2 and 3.
    pub fn discriminant(&self) -> Z {
        let c = &self.coeffs;
        match self.degree() {
            1 => Z::one(),
            2 => &c[1] * &c[1] - Z::from(4) * &c[0] * &c[2],
            3 => {
                let (d, cc, b, a) = (&c[0], &c[1], &c[2], &c[3]);
                Z::from(18) * a * b * cc * d - Z::from(4) * b * b * b * d + b * b * cc * cc
                    - Z::from(4) * a * cc * cc * cc
                    - Z::from(27) * a * a * d * d
            }
            _ => unimplemented!("discriminant only for degree <= 3"),
        }
    }

    /// Integer roots of a monic polynomial (these are all its rational roots).
    pub fn integer_roots(&self) -> Vec<Z> {
        let c0 = self.coeffs[0].abs();
        if c0.is_zero() {
            let mut r = vec![Z::zero()];
            let reduced = IntPoly::new(self.coeffs[1..].to_vec());
            if reduced.degree() > 0 {
                r.extend(reduced.integer_roots().into_iter().filter(|x| !x.is_zero()));
            }
            r.sort();
            r.dedup();
            return r;
        }
        let mut divs = Vec::new();
        let mut d = Z::one();
        while &d * &d <= c0 {
            if (&c0 % &d).is_zero() {
                divs.push(d.clone());
                divs.push(&c0 / &d);
            }
            d += 1;
        }
        let mut roots: Vec<Z> = divs
            .into_iter()
            .flat_map(|d| [d.clone(), -d])
            .filter(|x| self.eval_z(x).is_zero())
            .collect();
        roots.sort();
        roots.dedup();
        roots
    }

    /// Irreducibility over Q, valid for degree at most 3.
    pub fn is_irreducible(&self) -> bool {
        assert!(self.degree() <= 3 && self.is_monic());
        self.degree() >= 1 && (self.degree() == 1 || self.integer_roots().is_empty())
    }

    fn to_q(&self) -> Vec<Q> {
        self.coeffs.iter().map(qz).collect()
    }
}

fn trim(p: &mut Vec<Q>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn rem_q(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let f = &r[dr] / &lead;
        for i in 0..=db {
            let t = &f * &b[i];
            r[dr - db + i] -= t;
        }
        r.pop();
        trim(&mut r);
        if r.len() - 1 < db {
            break;
        }
    }
    trim(&mut r);
    r
}

fn eval_sign(p: &[Q], x: &Q) -> i32 {
    let v = p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c);
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

struct Sturm(Vec<Vec<Q>>);

impl Sturm {
    fn new(p: &IntPoly) -> Self {
        let f = p.to_q();
        let df: Vec<Q> = f
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * qz(&Z::from(i)))
            .collect();
        let mut seq = vec![f, df];
        loop {
            let n = seq.len();
            if seq[n - 1].len() == 1 {
                break;
            }
            let r = rem_q(&seq[n - 2], &seq[n - 1]);
            if r.len() == 1 && r[0].is_zero() {
                break;
            }
            seq.push(r.into_iter().map(|c| -c).collect());
        }
        Sturm(seq)
    }

    fn variations(&self, x: &Q) -> usize {
        let signs: Vec<i32> = self
            .0
            .iter()
            .map(|p| eval_sign(p, x))
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in `(a, b]`.
    fn count(&self, a: &Q, b: &Q) -> usize {
        self.variations(a) - self.variations(b)
    }
}

/// Isolating intervals `[lo, hi]` of width at most `2^-bits` for the
/// distinct real roots, in ascending order. Endpoints are exact dyadic
/// rationals and the sign of the polynomial is checked exactly.
pub fn real_root_intervals(p: &IntPoly, bits: u32) -> Vec<(Q, Q)> {
    let lead = p.coeffs.last().unwrap().abs();
    let bound = p.coeffs.iter().map(|c| c.abs()).max().unwrap() / &lead + Z::from(2);
    let sturm = Sturm::new(p);
    let mut stack = vec![(-qz(&bound), qz(&bound))];
    let mut isolated = Vec::new();
    while let Some((a, b)) = stack.pop() {
        match sturm.count(&a, &b) {
            0 => {}
            1 => isolated.push((a, b)),
            _ => {
                let m = (&a + &b) / Q::from_integer(Z::from(2));
                stack.push((a, m.clone()));
                stack.push((m, b));
            }
        }
    }
    let width = Q::new(Z::one(), Z::one() << bits);
    let mut out: Vec<(Q, Q)> = isolated
        .into_iter()
        .map(|(mut a, mut b)| {
            // root lies in (a, b]
            if eval_sign(&sturm.0[0], &b) == 0 {
                return (b.clone(), b);
            }
            let sb = eval_sign(&sturm.0[0], &b);
            while &b - &a > width {
                let m = (&a + &b) / Q::from_integer(Z::from(2));
                let sm = eval_sign(&sturm.0[0], &m);
                if sm == 0 {
                    return (m.clone(), m);
                }
                if sm == sb {
                    b = m;
                } else {
                    a = m;
                }
            }
            (a, b)
        })
        .collect();
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Number of distinct real roots.
pub fn count_real_roots(p: &IntPoly) -> usize {
    let bound = p.coeffs.iter().map(|c| c.abs()).max().unwrap() + Z::from(2);
    Sturm::new(p).count(&-qz(&bound), &qz(&bound))
}

pub fn interval_width_bits(lo: &Q, hi: &Q) -> u32 {
    let w = hi - lo;
    if w.is_zero() {
        return u32::MAX;
    }
    // largest k with w <= 2^-k
    let mut k = 0u32;
    let mut t = w;
    let two = Q::from_integer(Z::from(2));
    while t <= Q::new(Z::one(), Z::from(2)) {
        t *= &two;
        k += 1;
    }
    k
}

pub fn q_to_f64(x: &Q) -> f64 {
    let n = x.numer();
    let d = x.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = nb - db - 60;
    let scaled: Z = if shift >= 0 {
        n.clone() / (d.clone() << shift as usize)
    } else {
        (n.clone() << (-shift) as usize) / d.clone()
    };
    crate::linalg::z_to_f64(&scaled) * 2f64.powi(shift as i32)
}

pub fn gcd_z(a: &Z, b: &Z) -> Z {
    a.gcd(b)
}
