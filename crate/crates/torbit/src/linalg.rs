//! Exact linear algebra over `Z` and `Q` for the small matrices that occur
//! here (at most 9 columns).
//!
//! Lattices are stored as row bases. Hermite normal forms are lower
//! triangular: row `i` is zero past column `i`, the pivot `h[i][i]` is
//! positive and every entry left of a pivot lies in `[0, pivot)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Z = BigInt;
pub type Q = BigRational;
pub type MatZ = Vec<Vec<Z>>;
pub type MatQ = Vec<Vec<Q>>;

pub fn q(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

pub fn qz(n: &Z) -> Q {
    Q::from_integer(n.clone())
}

pub fn identity_q(n: usize) -> MatQ {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Q::one() } else { Q::zero() })
                .collect()
        })
        .collect()
}

pub fn to_q(m: &[Vec<Z>]) -> MatQ {
    m.iter().map(|r| r.iter().map(qz).collect()).collect()
}

pub fn mul_q(a: &[Vec<Q>], b: &[Vec<Q>]) -> MatQ {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter()
                        .zip(b.iter())
                        .fold(Q::zero(), |acc, (x, br)| acc + x * &br[j])
                })
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Row vector times matrix.
pub fn vec_mul_q(v: &[Q], m: &[Vec<Q>]) -> Vec<Q> {
    let n = m.first().map_or(0, |r| r.len());
    (0..n)
        .map(|j| {
            v.iter()
                .zip(m)
                .fold(Q::zero(), |acc, (x, r)| acc + x * &r[j])
        })
        .collect()
}

pub fn det_q(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a: MatQ = m.to_vec();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

pub fn det_z(m: &[Vec<Z>]) -> Z {
    det_q(&to_q(m)).to_integer()
}

pub fn inverse_q(m: &[Vec<Q>]) -> Option<MatQ> {
    let n = m.len();
    let mut a: MatQ = m.to_vec();
    let mut inv = identity_q(n);
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        inv.swap(p, c);
        let piv = a[c][c].clone();
        for k in 0..n {
            a[c][k] = &a[c][k] / &piv;
            inv[c][k] = &inv[c][k] / &piv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for k in 0..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
                let t = &f * &inv[c][k];
                inv[r][k] -= t;
            }
        }
    }
    Some(inv)
}

/// Basis of the right nullspace `{x : m x = 0}`.
pub fn nullspace_q(m: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut a: MatQ = m.to_vec();
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let piv = a[r][c].clone();
        for k in 0..ncols {
            a[r][k] = &a[r][k] / &piv;
        }
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for k in 0..ncols {
                let t = &f * &a[r][k];
                a[i][k] -= t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[i][f].clone();
            }
            v
        })
        .collect()
}

/// Lower Hermite normal form of the lattice spanned by `rows` in `Z^n`.
/// Returns `None` when the rows do not have rank `n`.
pub fn hnf(rows: &[Vec<Z>], n: usize) -> Option<MatZ> {
    let mut pool: Vec<Vec<Z>> = rows
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let mut h: MatZ = vec![Vec::new(); n];
    for j in (0..n).rev() {
        loop {
            let mut best: Option<usize> = None;
            for (i, r) in pool.iter().enumerate() {
                if !r[j].is_zero() && best.is_none_or(|b| r[j].abs() < pool[b][j].abs()) {
                    best = Some(i);
                }
            }
            let b = best?;
            let piv = pool[b].clone();
            let mut done = true;
            for (i, r) in pool.iter_mut().enumerate() {
                if i == b || r[j].is_zero() {
                    continue;
                }
                let f = r[j].div_floor(&piv[j]);
                for k in 0..=j {
                    let t = &f * &piv[k];
                    r[k] -= t;
                }
                if !r[j].is_zero() {
                    done = false;
                }
            }
            if done {
                let mut p = pool.swap_remove(b);
                if p[j].is_negative() {
                    for x in p.iter_mut() {
                        *x = -x.clone();
                    }
                }
                h[j] = p;
                pool.retain(|r| r.iter().any(|x| !x.is_zero()));
                break;
            }
        }
    }
    for i in 0..n {
        for j in (0..i).rev() {
            let f = h[i][j].div_floor(&h[j][j]);
            if f.is_zero() {
                continue;
            }
            let hj = h[j].clone();
            for k in 0..=j {
                let t = &f * &hj[k];
                h[i][k] -= t;
            }
        }
    }
    Some(h)
}

/// Lower HNF together with a transform: returns `(h, t)` with `h = t * rows`
/// (rows of `t` index the input rows).
pub fn hnf_transform(rows: &[Vec<Z>], n: usize) -> Option<(MatZ, MatZ)> {
    let m = rows.len();
    let mut pool: Vec<(Vec<Z>, Vec<Z>)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let t = (0..m)
                .map(|k| if k == i { Z::one() } else { Z::zero() })
                .collect();
            (r.clone(), t)
        })
        .collect();
    let mut h: Vec<(Vec<Z>, Vec<Z>)> = vec![(Vec::new(), Vec::new()); n];
    for j in (0..n).rev() {
        pool.retain(|(r, _)| r.iter().any(|x| !x.is_zero()));
        loop {
            let mut best: Option<usize> = None;
            for (i, (r, _)) in pool.iter().enumerate() {
                if !r[j].is_zero() && best.is_none_or(|b| r[j].abs() < pool[b].0[j].abs()) {
                    best = Some(i);
                }
            }
            let b = best?;
            let (pr, pt) = pool[b].clone();
            let mut done = true;
            for (i, (r, t)) in pool.iter_mut().enumerate() {
                if i == b || r[j].is_zero() {
                    continue;
                }
                let f = r[j].div_floor(&pr[j]);
                for (x, y) in r.iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
                for (x, y) in t.iter_mut().zip(&pt) {
                    *x -= &f * y;
                }
                if !r[j].is_zero() {
                    done = false;
                }
            }
            if done {
                let (mut r, mut t) = pool.swap_remove(b);
                if r[j].is_negative() {
                    r.iter_mut().for_each(|x| *x = -x.clone());
                    t.iter_mut().for_each(|x| *x = -x.clone());
                }
                h[j] = (r, t);
                break;
            }
        }
    }
    for i in 0..n {
        for j in (0..i).rev() {
            let f = h[i].0[j].div_floor(&h[j].0[j]);
            if f.is_zero() {
                continue;
            }
            let (hr, ht) = h[j].clone();
            for (x, y) in h[i].0.iter_mut().zip(&hr) {
                *x -= &f * y;
            }
            for (x, y) in h[i].1.iter_mut().zip(&ht) {
                *x -= &f * y;
            }
        }
    }
    Some(h.into_iter().unzip())
}

/// Canonical `(numerator HNF, denominator)` of a full-rank rational lattice.
pub fn hnf_q(rows: &[Vec<Q>], n: usize) -> Option<(MatZ, Z)> {
    let den = rows
        .iter()
        .flatten()
        .fold(Z::one(), |acc, x| acc.lcm(x.denom()));
    let zr: MatZ = rows
        .iter()
        .map(|r| r.iter().map(|x| (x * qz(&den)).to_integer()).collect())
        .collect();
    let h = hnf(&zr, n)?;
    let g = h.iter().flatten().fold(den.clone(), |acc, x| acc.gcd(x));
    let h = h
        .into_iter()
        .map(|r| r.into_iter().map(|x| x / &g).collect())
        .collect();
    Some((h, den / g))
}

/// Coefficients `c` with `v = c * h` for a lower HNF `h`, if integral.
pub fn hnf_coords(h: &[Vec<Z>], v: &[Z]) -> Option<Vec<Z>> {
    let n = h.len();
    let mut r: Vec<Z> = v.to_vec();
    let mut c = vec![Z::zero(); n];
    for i in (0..n).rev() {
        let (qt, rem) = r[i].div_rem(&h[i][i]);
        if !rem.is_zero() {
            return None;
        }
        for k in 0..=i {
            let t = &qt * &h[i][k];
            r[k] -= t;
        }
        c[i] = qt;
    }
    Some(c)
}

/// Z-basis of the saturated lattice `{z in Z^m : a z = 0}`.
pub fn integer_kernel(a: &[Vec<Z>], m: usize) -> MatZ {
    let mut a: MatZ = a.to_vec();
    let mut u: MatZ = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { Z::one() } else { Z::zero() })
                .collect()
        })
        .collect();
    let col_sub = |a: &mut MatZ, u: &mut MatZ, dst: usize, src: usize, f: &Z| {
        for row in a.iter_mut() {
            let t = f * &row[src];
            row[dst] -= t;
        }
        for row in u.iter_mut() {
            let t = f * &row[src];
            row[dst] -= t;
        }
    };
    let col_swap = |a: &mut MatZ, u: &mut MatZ, x: usize, y: usize| {
        for row in a.iter_mut() {
            row.swap(x, y);
        }
        for row in u.iter_mut() {
            row.swap(x, y);
        }
    };
    let mut p = 0;
    for r in 0..a.len() {
        loop {
            let mut best: Option<usize> = None;
            for c in p..m {
                if !a[r][c].is_zero() && best.is_none_or(|b| a[r][c].abs() < a[r][b].abs()) {
                    best = Some(c);
                }
            }
            let Some(b) = best else { break };
            let mut done = true;
            for c in p..m {
                if c == b || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].div_floor(&a[r][b]);
                col_sub(&mut a, &mut u, c, b, &f);
                if !a[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                col_swap(&mut a, &mut u, b, p);
                p += 1;
                break;
            }
        }
    }
    (p..m)
        .map(|c| u.iter().map(|row| row[c].clone()).collect())
        .collect()
}

/// Basis of the dual lattice `{x : x . b in Z for all rows b}` of a
/// full-rank lattice given by a square basis.
pub fn dual_basis(b: &[Vec<Q>]) -> Option<MatQ> {
    let inv = inverse_q(b)?;
    Some(transpose(&inv))
}

/// Intersection of two full-rank rational lattices given by square bases.
pub fn intersect(a: &[Vec<Q>], b: &[Vec<Q>]) -> Option<MatQ> {
    let n = a.len();
    let mut rows = dual_basis(a)?;
    rows.extend(dual_basis(b)?);
    let (h, d) = hnf_q(&rows, n)?;
    let sum: MatQ = h
        .iter()
        .map(|r| r.iter().map(|x| Q::new(x.clone(), d.clone())).collect())
        .collect();
    dual_basis(&sum)
}

pub fn z_to_f64(x: &Z) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a Z>) -> Z {
    xs.into_iter().fold(Z::zero(), |acc, x| acc.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(rows: &[&[i64]]) -> MatZ {
        rows.iter()
            .map(|r| r.iter().map(|&x| Z::from(x)).collect())
            .collect()
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hnf(&z(&[&[2, 0], &[1, 3], &[0, 6]]), 2).unwrap();
        let b = hnf(&z(&[&[1, 3], &[2, 0]]), 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, z(&[&[2, 0], &[1, 3]]));
    }

    #[test]
    fn kernel_is_saturated() {
        let k = integer_kernel(&z(&[&[2, 4, 6]]), 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: Z = v[0].clone() * 2 + v[1].clone() * 4 + v[2].clone() * 6;
            assert!(s.is_zero());
        }
        // the kernel lattice has index 1 in its rational span: a 2x2 minor is +-1
        let h = hnf(&k, 3);
        assert!(h.is_none());
        let minors = [
            &k[0][0] * &k[1][1] - &k[0][1] * &k[1][0],
            &k[0][0] * &k[1][2] - &k[0][2] * &k[1][0],
            &k[0][1] * &k[1][2] - &k[0][2] * &k[1][1],
        ];
        assert_eq!(gcd_all(minors.iter()), Z::one());
    }

    #[test]
    fn intersection_of_scaled_lattices() {
        let a = to_q(&z(&[&[2, 0], &[0, 1]]));
        let b = to_q(&z(&[&[1, 0], &[0, 3]]));
        let c = intersect(&a, &b).unwrap();
        assert_eq!(det_q(&c).abs(), q(6));
    }
}
