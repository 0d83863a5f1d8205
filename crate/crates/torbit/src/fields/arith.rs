use num_traits::{One, Zero};

use crate::linalg::{det_q, inverse_q, qz, MatQ, Q};
use crate::poly::IntPoly;

/// Arithmetic in `Q[x]/(f)` on power-basis coordinates.
#[derive(Clone, Debug)]
pub(crate) struct PolyArith {
    n: usize,
    f: Vec<Q>,
    /// `Tr(a^k)` for `k < 2n - 1`.
    power_sums: Vec<Q>,
}

impl PolyArith {
    pub fn new(poly: &IntPoly) -> Self {
        let n = poly.degree();
        let f: Vec<Q> = poly.coeffs.iter().map(qz).collect();
        let mut pa = PolyArith {
            n,
            f,
            power_sums: Vec::new(),
        };
        let mut x = vec![Q::zero(); n];
        x[0] = Q::one();
        let mut a = vec![Q::zero(); n];
        a[1] = Q::one();
        let mut sums = Vec::new();
        for _ in 0..2 * n - 1 {
            let m = pa.mult_matrix(&x);
            sums.push((0..n).fold(Q::zero(), |acc, i| acc + &m[i][i]));
            x = pa.mul(&x, &a);
        }
        pa.power_sums = sums;
        pa
    }

    pub fn power_basis_len(&self) -> usize {
        self.n
    }

    pub fn mul(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let n = self.n;
        let mut prod = vec![Q::zero(); 2 * n - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for k in (n..2 * n - 1).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.is_zero() {
                continue;
            }
            for j in 0..n {
                prod[k - n + j] -= &c * &self.f[j];
            }
        }
        prod.truncate(n);
        prod
    }

    /// Row `j` holds the coordinates of `x a^j`.
    pub fn mult_matrix(&self, x: &[Q]) -> MatQ {
        let n = self.n;
        let mut rows = Vec::with_capacity(n);
        let mut cur = x.to_vec();
        for _ in 0..n {
            rows.push(cur.clone());
            // multiply by a: shift up and reduce
            let top = cur[n - 1].clone();
            let mut next = vec![Q::zero(); n];
            for j in 1..n {
                next[j] = cur[j - 1].clone();
            }
            if !top.is_zero() {
                for j in 0..n {
                    next[j] -= &top * &self.f[j];
                }
            }
            cur = next;
        }
        rows
    }

    pub fn trace(&self, x: &[Q]) -> Q {
        x.iter()
            .zip(&self.power_sums)
            .fold(Q::zero(), |acc, (c, p)| acc + c * p)
    }

    pub fn norm(&self, x: &[Q]) -> Q {
        det_q(&self.mult_matrix(x))
    }

    pub fn inverse(&self, x: &[Q]) -> Option<Vec<Q>> {
        let inv = inverse_q(&self.mult_matrix(x))?;
        Some(inv[0].clone())
    }

    /// Coefficients `c_1..c_n` of the characteristic polynomial
    /// `x^n - c_1 x^(n-1) + c_2 x^(n-2) - ...` (elementary symmetric values).
    pub fn char_invariants(&self, x: &[Q]) -> Vec<Q> {
        let m = self.mult_matrix(x);
        let n = self.n;
        let tr = |a: &MatQ| (0..n).fold(Q::zero(), |acc, i| acc + &a[i][i]);
        let m2 = crate::linalg::mul_q(&m, &m);
        let t1 = tr(&m);
        let e2 = (&t1 * &t1 - tr(&m2)) / Q::from_integer(2.into());
        match n {
            2 => vec![t1, det_q(&m)],
            _ => vec![t1, e2, det_q(&m)],
        }
    }

    pub fn is_integral(&self, x: &[Q]) -> bool {
        self.char_invariants(x).iter().all(|c| c.is_integer())
    }

    pub fn gram(&self, basis: &[Vec<Q>]) -> MatQ {
        basis
            .iter()
            .map(|a| basis.iter().map(|b| self.trace(&self.mul(a, b))).collect())
            .collect()
    }

    pub fn gram_det(&self, basis: &[Vec<Q>]) -> Q {
        det_q(&self.gram(basis))
    }
}
