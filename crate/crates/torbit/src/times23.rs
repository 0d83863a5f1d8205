//! The `x2, x3` action on `R/Z` restricted to rationals `p/q`.
//!
//! A periodic orbit is the closure of `seed/q` under multiplication by 2
//! and 3 modulo `q`; its size is the order of `<2, 3>` in `(Z/q)^x`, which
//! plays the role of the volume, and `q` that of the discriminant.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::linalg::{q as qi, Q, Z};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultOrbitSet {
    pub q: u64,
    /// Sorted residues.
    pub s: Vec<u64>,
    /// Order of `<2, 3>` in `(Z/q)^x`.
    pub group_order: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

/// `|<2, 3>|` as `ord(2)` times the least `k >= 1` with `3^k` in `<2>`.
pub fn group_order_23(q: u64) -> Result<u64> {
    if q == 0 || gcd(q, 6) != 1 {
        return Err(Error::InvalidModulus(q));
    }
    if q == 1 {
        return Ok(1);
    }
    let mut in_two = vec![false; q as usize];
    let mut x = 1u64;
    let mut ord2 = 0u64;
    loop {
        in_two[x as usize] = true;
        ord2 += 1;
        x = mul_mod(x, 2, q);
        if x == 1 {
            break;
        }
    }
    let mut k = 1u64;
    let mut y = 3 % q;
    while !in_two[y as usize] {
        y = mul_mod(y, 3, q);
        k += 1;
    }
    Ok(ord2 * k)
}

/// Smallest set of residues containing `seed` and closed under `x -> 2x`
/// and `x -> 3x` mod `q`.
pub fn orbit_closure_23(q: u64, seed: u64) -> Result<MultOrbitSet> {
    let group_order = group_order_23(q)?;
    let seed = seed % q;
    if q > 1 && gcd(seed, q) != 1 {
        return Err(Error::Invalid(format!("seed {seed} is not a unit mod {q}")));
    }
    let mut seen = vec![false; q as usize];
    let mut stack = vec![seed];
    seen[seed as usize] = true;
    while let Some(x) = stack.pop() {
        for m in [2, 3] {
            let y = mul_mod(x, m, q);
            if !seen[y as usize] {
                seen[y as usize] = true;
                stack.push(y);
            }
        }
    }
    let s = (0..q).filter(|&x| seen[x as usize]).collect();
    Ok(MultOrbitSet { q, s, group_order })
}

impl MultOrbitSet {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.s.binary_search(&(x % self.q)).is_ok()
    }

    /// Whether `m S = S` mod `q`.
    pub fn invariant_under(&self, m: u64) -> bool {
        let mut image: Vec<u64> = self.s.iter().map(|&x| mul_mod(x, m, self.q)).collect();
        image.sort_unstable();
        image == self.s
    }
}

/// The uniform probability measure on `{s/q : s in S}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalMeasure {
    pub support: MultOrbitSet,
}

impl EmpiricalMeasure {
    pub fn new(support: MultOrbitSet) -> Self {
        EmpiricalMeasure { support }
    }

    pub fn weight(&self) -> Q {
        Q::new(Z::one(), Z::from(self.support.len()))
    }

    pub fn total_mass(&self) -> Q {
        self.weight() * Z::from(self.support.len())
    }

    /// Number of support points `s/q` in `[a, b)`.
    pub fn count_in(&self, a: &Q, b: &Q) -> usize {
        let qz = Z::from(self.support.q);
        // a <= s/q < b  <=>  ceil(a q) <= s < ceil(b q)
        let lo = (a * &qz).ceil().to_integer();
        let hi = (b * &qz).ceil().to_integer();
        let lo = self.support.s.partition_point(|&s| Z::from(s) < lo);
        let hi = self.support.s.partition_point(|&s| Z::from(s) < hi);
        hi.saturating_sub(lo)
    }

    pub fn mass(&self, a: &Q, b: &Q) -> Q {
        self.weight() * Z::from(self.count_in(a, b))
    }

    /// Masses of the atoms of `P^(n)`, the partition into
    /// `[j/2^n, (j+1)/2^n)`, that carry positive mass.
    pub fn atom_counts(&self, n: u32) -> Vec<u64> {
        let q = self.support.q as u128;
        let mut out = Vec::new();
        let mut last = None;
        for &s in &self.support.s {
            let key = ((s as u128) << n) / q;
            if last == Some(key) {
                *out.last_mut().unwrap() += 1;
            } else {
                out.push(1);
                last = Some(key);
            }
        }
        out
    }
}

/// `H(P^(n))` for `P = {[0, 1/2), [1/2, 1)}` and
/// `P^(n) = P v [2]^{-1} P v ... v [2]^{-(n-1)} P`.
pub fn partition_entropy(m: &EmpiricalMeasure, n: u32) -> Result<f64> {
    if n == 0 || n > 64 {
        return Err(Error::Invalid("refinement level must be in 1..=64".into()));
    }
    let total = m.support.len() as f64;
    let sum: f64 = m
        .atom_counts(n)
        .iter()
        .filter(|&&c| c > 1)
        .map(|&c| c as f64 * (c as f64).ln())
        .sum();
    Ok(total.ln() - sum / total)
}

/// Least `n` with `2^n > q`.
pub fn separation_level(q: u64) -> u32 {
    64 - q.leading_zeros()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyCheck {
    pub h1: f64,
    pub floor: f64,
    pub ok: bool,
}

pub fn entropy_lower_bound_check(m: &EmpiricalMeasure) -> Result<EntropyCheck> {
    let h1 = partition_entropy(m, 1)?;
    let floor = (m.support.len() as f64).ln() / separation_level(m.support.q) as f64;
    Ok(EntropyCheck {
        h1,
        floor,
        ok: h1 >= floor - 1e-9,
    })
}

/// `| |S/q in [a, b)| / |S| - (b - a) |`.
pub fn discrepancy(m: &EmpiricalMeasure, a: &Q, b: &Q) -> Result<f64> {
    if !(Q::zero() <= *a && a < b && *b <= qi(1)) {
        return Err(Error::Invalid("need 0 <= a < b <= 1".into()));
    }
    let d = m.mass(a, b) - (b - a);
    Ok(crate::poly::q_to_f64(&d).abs())
}

/// Largest [`discrepancy`] over the dyadic intervals `[j/2^k, (j+1)/2^k)`
/// with `1 <= k <= levels`.
pub fn max_dyadic_discrepancy(m: &EmpiricalMeasure, levels: u32) -> f64 {
    let q = m.support.q as u128;
    let n = m.support.len() as f64;
    let mut counts = vec![0u64; 1 << levels];
    for &s in &m.support.s {
        counts[(((s as u128) << levels) / q) as usize] += 1;
    }
    let mut worst = 0f64;
    for k in (1..=levels).rev() {
        let len = 1.0 / (1u64 << k) as f64;
        for &c in &counts {
            worst = worst.max((c as f64 / n - len).abs());
        }
        counts = counts.chunks(2).map(|p| p[0] + p[1]).collect();
    }
    worst
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpSumProfile {
    pub group_order: u64,
    /// `max_{a != 0} |sum_{x in G} e(a x/q)| / |G|`.
    pub max_normalized_sum: f64,
}

/// The sum only depends on the coset `aG`, so one representative per coset
/// is evaluated.
pub fn exp_sum_profile(q: u64) -> Result<ExpSumProfile> {
    if gcd(q, 6) != 1 || q == 1 {
        return Err(Error::InvalidModulus(q));
    }
    if !is_prime(q) {
        return Err(Error::Unsupported(format!("composite modulus {q}")));
    }
    let g = orbit_closure_23(q, 1)?;
    let table: Vec<(f64, f64)> = (0..q)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / q as f64;
            (t.cos(), t.sin())
        })
        .collect();
    let mut covered = vec![false; q as usize];
    let mut best = 0f64;
    for a in 1..q {
        if covered[a as usize] {
            continue;
        }
        let (mut re, mut im) = (0f64, 0f64);
        for &x in &g.s {
            let k = mul_mod(a, x, q);
            covered[k as usize] = true;
            re += table[k as usize].0;
            im += table[k as usize].1;
        }
        best = best.max(re.hypot(im));
    }
    Ok(ExpSumProfile {
        group_order: g.group_order,
        max_normalized_sum: best / g.len() as f64,
    })
}

/// Dyadic levels used by [`sweep_row`].
pub const DYADIC_LEVELS: u32 = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub q: u64,
    pub group_order: u64,
    pub ratio_log_order_log_q: f64,
    pub h1: f64,
    pub entropy_floor: f64,
    pub max_discrepancy: f64,
    /// Only for prime `q`.
    pub max_norm_exp_sum: Option<f64>,
}

pub fn sweep_row(q: u64) -> Result<SweepRow> {
    let m = EmpiricalMeasure::new(orbit_closure_23(q, 1)?);
    let check = entropy_lower_bound_check(&m)?;
    let exp = if is_prime(q) {
        Some(exp_sum_profile(q)?.max_normalized_sum)
    } else {
        None
    };
    let g = m.support.group_order;
    Ok(SweepRow {
        q,
        group_order: g,
        ratio_log_order_log_q: (g as f64).ln() / (q as f64).ln(),
        h1: check.h1,
        entropy_floor: check.floor,
        max_discrepancy: max_dyadic_discrepancy(&m, DYADIC_LEVELS),
        max_norm_exp_sum: exp,
    })
}

/// Rows for every `q` in `[q_min, q_max]` coprime to 6, in order.
pub fn sweep(q_min: u64, q_max: u64, primes_only: bool) -> Result<Vec<SweepRow>> {
    let qs: Vec<u64> = (q_min.max(5)..=q_max)
        .filter(|&q| gcd(q, 6) == 1 && (!primes_only || is_prime(q)))
        .collect();
    qs.par_iter().map(|&q| sweep_row(q)).collect()
}
