//! Enumeration of totally real quadratic and cubic fields by discriminant.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::{maximal, PolyArith, TotallyRealField};
use crate::linalg::{q, Q, Z};
use crate::poly::{q_to_f64, real_root_intervals, IntPoly};
use crate::{Error, Result};

pub fn enumerate_totally_real_fields(
    degree: usize,
    disc_bound: u64,
) -> Result<Vec<Arc<TotallyRealField>>> {
    match degree {
        2 => quadratic_fields(disc_bound),
        3 => cubic_fields(disc_bound),
        n => Err(Error::DegreeUnsupported(n)),
    }
}

fn squarefree(mut m: u64) -> bool {
    let mut p = 2;
    while p * p <= m {
        if m % (p * p) == 0 {
            return false;
        }
        if m % p == 0 {
            m /= p;
        }
        p += 1;
    }
    true
}

pub fn is_fundamental(d: u64) -> bool {
    match d % 4 {
        1 => d > 1 && squarefree(d),
        0 => matches!((d / 4) % 4, 2 | 3) && squarefree(d / 4),
        _ => false,
    }
}

/// Defining polynomial of `Q(sqrt d)` for a fundamental discriminant whose
/// root generates the maximal order.
pub fn quadratic_poly(d: u64) -> IntPoly {
    let d = d as i64;
    if d % 4 == 1 {
        IntPoly::from_i64(&[-(d - 1) / 4, -1, 1])
    } else {
        IntPoly::from_i64(&[-d / 4, 0, 1])
    }
}

fn quadratic_fields(bound: u64) -> Result<Vec<Arc<TotallyRealField>>> {
    let ds: Vec<u64> = (5..=bound).filter(|&d| is_fundamental(d)).collect();
    ds.par_iter()
        .map(|&d| TotallyRealField::new(quadratic_poly(d)))
        .collect()
}

struct Candidate {
    coeffs: [i64; 4],
    poly_disc: Z,
}

/// Monic cubics `x^3 - s1 x^2 + s2 x - s3` whose roots satisfy the
/// Hunter bound `T2 <= s1^2/3 + 2 sqrt(X)/3` with `s1` in `{0, 1}`. Every
/// totally real cubic field of discriminant at most `X` has a generator
/// with such a polynomial.
fn hunter_candidates(bound: u64) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for s1 in 0i64..=1 {
        let t2max = (s1 * s1) as f64 / 3.0 + 2.0 * (bound as f64).sqrt() / 3.0;
        let s2min = ((s1 * s1) as f64 - t2max) / 2.0;
        let s2min = s2min.ceil() as i64;
        let s2max = (s1 * s1).div_euclid(3);
        for s2 in s2min..=s2max {
            let t2 = (s1 * s1 - 2 * s2) as f64;
            let s3max = (t2 / 3.0).powf(1.5).floor() as i64;
            for s3 in -s3max..=s3max {
                out.push([-s3, s2, -s1, 1]);
            }
        }
    }
    out
}

/// Irreducible monic cubics `x^3 + a x^2 + b x + c` with `a` in `{0, 1}`,
/// `-b_max <= b <= 0` and polynomial discriminant in `(0, disc_bound]`,
/// sorted by `(disc, a, b, c)`. Their equation orders are the totally real
/// monogenic cubic orders of discriminant at most `disc_bound`, each possibly
/// several times; raising `b_max` only adds equivalent generators once the
/// set of discriminants has saturated.
pub fn monogenic_cubics(disc_bound: u64, b_max: i64) -> Vec<IntPoly> {
    let x = disc_bound as f64;
    let mut out: Vec<(i64, [i64; 4])> = (0i64..=1)
        .flat_map(|a| (-b_max..=0).map(move |b| (a, b)))
        .par_bridge()
        .flat_map_iter(|(a, b)| {
            // disc(c) = -27 c^2 + beta c + gamma
            let beta = (18 * a * b - 4 * a * a * a) as f64;
            let gamma = (a * a * b * b - 4 * b * b * b) as f64;
            let roots = |v: f64| {
                let d = beta * beta + 108.0 * (gamma - v);
                (d >= 0.0).then(|| {
                    let s = d.sqrt();
                    ((beta - s) / 54.0, (beta + s) / 54.0)
                })
            };
            let windows = match (roots(0.0), roots(x)) {
                (None, _) => vec![],
                (Some(w), None) => vec![w],
                (Some((lo0, hi0)), Some((lox, hix))) => vec![(lo0, lox), (hix, hi0)],
            };
            let mut found = Vec::new();
            for (lo, hi) in windows {
                for c in lo.floor() as i64 - 1..=hi.ceil() as i64 + 1 {
                    let d = a * a * b * b - 4 * b * b * b - 4 * a * a * a * c - 27 * c * c
                        + 18 * a * b * c;
                    if d > 0 && d as u64 <= disc_bound {
                        found.push((d, [c, b, a, 1]));
                    }
                }
            }
            found
        })
        .collect();
    out.sort();
    out.dedup();
    out.into_iter()
        .map(|(_, c)| IntPoly::from_i64(&c))
        .filter(|p| p.is_irreducible())
        .collect()
}

fn cubic_fields(bound: u64) -> Result<Vec<Arc<TotallyRealField>>> {
    let found: Vec<(Z, Candidate)> = hunter_candidates(bound)
        .into_par_iter()
        .filter_map(|c| {
            let poly = IntPoly::from_i64(&c);
            let pd = poly.discriminant();
            if !pd.is_positive() || !poly.is_irreducible() {
                return None;
            }
            let ar = PolyArith::new(&poly);
            let basis = maximal::maximal_basis(&ar).ok()?;
            let dk = ar.gram_det(&basis).to_integer();
            (dk <= Z::from(bound)).then_some((
                dk,
                Candidate {
                    coeffs: c,
                    poly_disc: pd,
                },
            ))
        })
        .collect();
    let mut groups: BTreeMap<Z, Vec<Candidate>> = BTreeMap::new();
    for (dk, c) in found {
        groups.entry(dk).or_default().push(c);
    }
    let per_disc: Vec<Vec<Arc<TotallyRealField>>> = groups
        .into_par_iter()
        .map(|(_, mut cands)| {
            cands.sort_by_key(|c| {
                let t2 = c.coeffs[2] * c.coeffs[2] - 2 * c.coeffs[1];
                let mag = c.coeffs.map(|x| x.abs());
                (c.poly_disc.clone(), t2, mag, c.coeffs)
            });
            let mut reps: Vec<Arc<TotallyRealField>> = Vec::new();
            for c in cands {
                let poly = IntPoly::from_i64(&c.coeffs);
                let roots: Vec<f64> = real_root_intervals(&poly, 56)
                    .iter()
                    .map(|(a, b)| q_to_f64(&((a + b) / q(2))))
                    .collect();
                if reps.iter().any(|k| has_root_in(&poly, &roots, k)) {
                    continue;
                }
                reps.push(TotallyRealField::new(poly)?);
            }
            Ok(reps)
        })
        .collect::<Result<_>>()?;
    let mut all: Vec<Arc<TotallyRealField>> = per_disc.into_iter().flatten().collect();
    all.sort_by(|a, b| {
        (&a.field_disc, &a.min_poly.coeffs).cmp(&(&b.field_disc, &b.min_poly.coeffs))
    });
    Ok(all)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    match n {
        2 => vec![vec![0, 1], vec![1, 0]],
        _ => vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ],
    }
}

fn solve_f64(e: &[Vec<f64>], v: &[f64]) -> Option<Vec<f64>> {
    // c . e = v, i.e. e^T c = v
    let n = v.len();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut r: Vec<f64> = (0..n).map(|i| e[i][j]).collect();
            r.push(v[j]);
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap())?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(p, c);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// Whether `poly` (with approximate `roots`) has a root in `k`, checked
/// exactly on a rounded candidate from the maximal order of `k`.
fn has_root_in(poly: &IntPoly, roots: &[f64], k: &Arc<TotallyRealField>) -> bool {
    if poly.degree() != k.degree {
        return false;
    }
    let o = k.maximal_order();
    let e = o.embedding_rows();
    for perm in permutations(k.degree) {
        let v: Vec<f64> = perm.iter().map(|&i| roots[i]).collect();
        let Some(c) = solve_f64(&e, &v) else { continue };
        if c.iter()
            .any(|x| (x - x.round()).abs() > 1e-4 || !x.is_finite())
        {
            continue;
        }
        let z: Vec<i64> = c.iter().map(|x| x.round() as i64).collect();
        let beta = o.element_i64(&z);
        let val = poly
            .coeffs
            .iter()
            .rev()
            .fold(vec![Q::zero(); k.degree], |acc, cf| {
                let mut t = k.mul(&acc, &beta);
                t[0] += Q::from_integer(cf.clone());
                t
            });
        if val.iter().all(|x| x.is_zero()) {
            return true;
        }
    }
    false
}

/// Exact isomorphism test between two fields of equal degree.
pub fn is_isomorphic(a: &Arc<TotallyRealField>, b: &Arc<TotallyRealField>) -> bool {
    a.degree == b.degree && a.field_disc == b.field_disc && has_root_in(&a.min_poly, &a.roots, b)
}
