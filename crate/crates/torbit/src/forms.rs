//! Indefinite binary quadratic forms `a x^2 + b x y + c y^2` and their
//! reduction cycles.

use num_traits::{One, Zero};

use crate::fields::quadratic::isqrt;
use crate::linalg::Z;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        num_integer::gcd(num_integer::gcd(self.a, self.b), self.c) == 1
    }

    /// `|sqrt D - 2|a|| < b < sqrt D`.
    pub fn is_reduced(&self) -> bool {
        let d = self.disc();
        let (b, two_a) = (self.b, 2 * self.a.abs());
        b > 0 && b * b < d && (two_a - b <= 0 || (two_a - b).pow(2) < d) && (two_a + b).pow(2) > d
    }

    pub fn negate(&self) -> Form {
        Form {
            a: -self.a,
            b: self.b,
            c: -self.c,
        }
    }

    /// One step of the reduction operator; returns the new form and the
    /// parameter `k` of the substitution `(x, y) -> (-y, x + k y)`.
    pub fn rho(&self) -> (Form, i64) {
        let d = self.disc();
        let r = isqrt(d);
        let c = self.c;
        let ac = c.abs();
        let target_lo = if ac > r { -ac } else { r - 2 * ac };
        // b' = -b + 2 c k with b' in (target_lo, target_lo + 2|c|]
        let m = 2 * ac;
        let base = -self.b;
        let lo = target_lo + 1;
        let bp = lo + (base - lo).rem_euclid(m);
        let k = (bp - base) / (2 * c);
        let cp = (bp * bp - d) / (4 * c);
        (Form { a: c, b: bp, c: cp }, k)
    }
}

/// Result of reducing a form: the reduced form and the accumulated
/// transform `t` with `reduced(v) = f(t v)`.
pub struct Reduction {
    pub form: Form,
    pub t: [[Z; 2]; 2],
}

fn compose(t: &mut [[Z; 2]; 2], k: i64) {
    // t <- t * [[0, -1], [1, k]]
    let k = Z::from(k);
    for row in t.iter_mut() {
        let (x, y) = (row[0].clone(), row[1].clone());
        row[0] = y.clone();
        row[1] = -x + &y * &k;
    }
}

fn identity() -> [[Z; 2]; 2] {
    [[Z::one(), Z::zero()], [Z::zero(), Z::one()]]
}

pub fn reduce(f: Form) -> Reduction {
    let mut cur = f;
    let mut t = identity();
    let mut guard = 0;
    while !cur.is_reduced() {
        let (next, k) = cur.rho();
        compose(&mut t, k);
        cur = next;
        guard += 1;
        assert!(guard < 10_000, "form reduction did not terminate");
    }
    Reduction { form: cur, t }
}

/// Walks the cycle of the reduced form `f` (which must be reduced) and
/// returns every form in it, in order.
pub fn cycle(f: Form) -> Vec<Form> {
    let mut out = vec![f];
    let mut cur = f.rho().0;
    while cur != f {
        out.push(cur);
        cur = cur.rho().0;
    }
    out
}

/// Smallest `|f(v)|` over nonzero integer `v`, with a vector attaining it.
/// For indefinite forms this is the least `|a|` along the reduced cycle.
pub fn min_abs_value(f: Form) -> (i64, [Z; 2]) {
    let red = reduce(f);
    let start = red.form;
    let mut t = red.t;
    let mut cur = start;
    let mut best = (cur.a.abs(), [t[0][0].clone(), t[1][0].clone()]);
    loop {
        let (next, k) = cur.rho();
        compose(&mut t, k);
        cur = next;
        if cur == start {
            break;
        }
        if cur.a.abs() < best.0 {
            best = (cur.a.abs(), [t[0][0].clone(), t[1][0].clone()]);
        }
    }
    best
}

/// A vector `v` with `f(v) = +-1`, if one exists.
pub fn represents_unit(f: Form) -> Option<[Z; 2]> {
    let (m, v) = min_abs_value(f);
    (m == 1).then_some(v)
}

/// Every reduced form of discriminant `d`, primitive or not, sorted.
pub fn reduced_forms(d: i64) -> Vec<Form> {
    let r = isqrt(d);
    let mut out = Vec::new();
    for b in (1..=r).filter(|b| (b - d).rem_euclid(2) == 0) {
        let m = (d - b * b) / 4;
        if m == 0 {
            continue;
        }
        let lo = ((r - b) / 2).max(1);
        let hi = ((r + b) / 2 + 1).min(m);
        for a in lo..=hi {
            if m % a != 0 {
                continue;
            }
            for f in [Form { a, b, c: -m / a }, Form { a: -a, b, c: m / a }] {
                if f.is_reduced() {
                    out.push(f);
                }
            }
        }
    }
    out.sort();
    out
}

/// For each class of primitive forms of discriminant `d` under
/// `f ~ g(M v)`, `M` in `GL_2(Z)`, and `f ~ -f` (the wide classes of
/// invertible ideals of the order), the least `|f(v)|` over nonzero `v`.
/// Sorted.
pub fn wide_class_minima(d: i64) -> Vec<i64> {
    let forms: Vec<Form> = reduced_forms(d)
        .into_iter()
        .filter(|f| f.is_primitive())
        .collect();
    let mut seen = vec![false; forms.len()];
    let index = |f: &Form| {
        forms
            .binary_search(f)
            .expect("reduced forms are closed under rho")
    };
    let mut out = Vec::new();
    for i in 0..forms.len() {
        if seen[i] {
            continue;
        }
        let mut min = i64::MAX;
        for start in [forms[i], forms[i].negate()] {
            if seen[index(&start)] && start != forms[i] {
                continue;
            }
            for f in cycle(start) {
                seen[index(&f)] = true;
                min = min.min(f.a.abs());
            }
        }
        out.push(min);
    }
    out.sort();
    out
}
