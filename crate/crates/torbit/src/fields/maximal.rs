//! Maximal orders by p-local enlargement.
//!
//! Starting from `Z[a]`, for every prime `p` whose square divides the
//! discriminant we look for an integral element in `(1/p) O` outside `O`.
//! Candidates are restricted to the kernel mod `p` of the cubic trace form
//! `c -> Tr(c w_i w_j)`, which every such element must satisfy. When one
//! is found `O` is replaced by `O[beta]` and the search repeats.

use num_traits::{Signed, ToPrimitive, Zero};

use super::PolyArith;
use crate::linalg::{hnf_q, identity_q, q, MatQ, Q, Z};
use crate::{Error, Result};

pub(crate) fn maximal_basis(ar: &PolyArith) -> Result<MatQ> {
    let n = ar.power_basis_len();
    let mut basis = identity_q(n);
    let d0 = ar.gram_det(&basis).to_integer().abs();
    let d0 = d0
        .to_u128()
        .ok_or_else(|| Error::Unsupported("polynomial discriminant too large to factor".into()))?;
    for (p, e) in factor(d0) {
        if e < 2 {
            continue;
        }
        let pz = Z::from(p);
        while (ar.gram_det(&basis).to_integer() % (&pz * &pz)).is_zero() {
            match enlarge(ar, &basis, p) {
                Some(b) => basis = b,
                None => break,
            }
        }
    }
    Ok(basis)
}

fn enlarge(ar: &PolyArith, basis: &MatQ, p: u64) -> Option<MatQ> {
    let n = basis.len();
    let pi = p as i128;
    // constraint rows: for each (i, j), the map c -> sum_k c_k Tr(w_k w_i w_j) mod p
    let mut rows: Vec<Vec<i128>> = Vec::new();
    for i in 0..n {
        for j in i..n {
            let wij = ar.mul(&basis[i], &basis[j]);
            let row: Vec<i128> = (0..n)
                .map(|k| {
                    let t = ar.trace(&ar.mul(&basis[k], &wij)).to_integer();
                    let r = t % Z::from(p);
                    r.to_i128().unwrap().rem_euclid(pi)
                })
                .collect();
            rows.push(row);
        }
    }
    let kernel = kernel_mod_p(&rows, n, pi);
    if kernel.is_empty() {
        return None;
    }
    let k = kernel.len();
    let pq = q(p as i64);
    // projective enumeration of nonzero combinations
    let mut coef = vec![0i128; k];
    loop {
        // advance coef as a base-p counter
        let mut idx = 0;
        loop {
            if idx == k {
                return None;
            }
            coef[idx] += 1;
            if coef[idx] < pi {
                break;
            }
            coef[idx] = 0;
            idx += 1;
        }
        let lead = coef.iter().rev().find(|&&c| c != 0).copied().unwrap_or(0);
        if lead != 1 {
            continue;
        }
        let c: Vec<i128> = (0..n)
            .map(|t| {
                (0..k)
                    .map(|s| coef[s] * kernel[s][t])
                    .sum::<i128>()
                    .rem_euclid(pi)
            })
            .collect();
        let beta: Vec<Q> = (0..n)
            .map(|t| (0..n).fold(Q::zero(), |acc, s| acc + &basis[s][t] * q(c[s] as i64)) / &pq)
            .collect();
        if ar.is_integral(&beta) {
            let mut gens = basis.clone();
            let mut pow = beta.clone();
            for _ in 1..n {
                for b in basis {
                    gens.push(ar.mul(b, &pow));
                }
                pow = ar.mul(&pow, &beta);
            }
            let (h, d) = hnf_q(&gens, n)?;
            return Some(
                h.iter()
                    .map(|r| r.iter().map(|x| Q::new(x.clone(), d.clone())).collect())
                    .collect(),
            );
        }
    }
}

/// Basis of `{c in F_p^n : rows . c = 0}`.
fn kernel_mod_p(rows: &[Vec<i128>], n: usize, p: i128) -> Vec<Vec<i128>> {
    let mut a: Vec<Vec<i128>> = rows.to_vec();
    let inv = |x: i128| -> i128 {
        // Fermat: p is prime
        let mut r = 1i128;
        let mut b = x.rem_euclid(p);
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(pr) = (r..a.len()).find(|&i| a[i][c] % p != 0) else {
            continue;
        };
        a.swap(r, pr);
        let iv = inv(a[r][c]);
        for x in a[r].iter_mut() {
            *x = (*x * iv).rem_euclid(p);
        }
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..n {
                    a[i][j] = (a[i][j] - f * a[r][j]).rem_euclid(p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0i128; n];
            v[fc] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = (-a[ri][fc]).rem_euclid(p);
            }
            v
        })
        .collect()
}

/// Prime factorization by trial division.
pub(crate) fn factor(mut m: u128) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p: u128 = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m as u64, 1));
    }
    out
}
