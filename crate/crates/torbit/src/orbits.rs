//! Periodic orbits of the diagonal group attached to triples `(K, [L], theta)`.
//!
//! The discriminant is computed twice: from the multiplier ring of `L`, and
//! from the Lie algebra of the torus, as the Gram determinant of the
//! reduced trace form `n tr(XY) - tr(X) tr(Y)` on an integral basis of
//! `t` intersected with the image of `M_n(Z)`.
//!
//! Orbit points for `n = 2` are produced from the reduced cycle of the norm
//! form, carrying `log|sigma_i|` of the first basis vector additively, so
//! sampled bases stay well conditioned however large the regulator is.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dynamics::{mat_inv, mat_mul, EmbeddedLattice};
use crate::fields::{Element, Order, TotallyRealField};
use crate::forms::{self, Form};
use crate::ideals::{self, FractionalIdeal};
use crate::linalg::{
    det_z, gcd_all, integer_kernel, intersect, inverse_q, nullspace_q, vec_mul_q, MatQ, MatZ, Q, Z,
};
use crate::{Error, Result};

/// The Lie algebra of the torus, inside `M_n(Q)/Q` and intersected with
/// the image of `M_n(Z)`.
#[derive(Clone, Debug)]
pub struct LieTorusData {
    /// Integral representatives `n X - tr(X) I` of a basis of `t ∩ g_Z`.
    pub t_basis: Vec<MatZ>,
    pub wedge_gram: Z,
}

#[derive(Clone, Debug)]
pub struct TorusOrbit {
    pub field: Arc<TotallyRealField>,
    /// The lattice, as an ideal of its multiplier ring.
    pub lattice: FractionalIdeal,
    pub theta: Vec<usize>,
    pub class_index: usize,
    pub disc_order_route: Z,
    pub disc_wedge_route: Z,
    pub volume: f64,
    pub classical_regulator: f64,
    /// `min |N(x)| / N(L)`; the cusp excursion is this divided by
    /// `sqrt(disc_order_route)`.
    pub cusp_excursion: Q,
    /// Rows `(sigma_theta(0)(b_i), ..., sigma_theta(n-1)(b_i))`.
    pub embedded: EmbeddedLattice,
    cycle: Option<Arc<QuadCycle>>,
}

fn n_from_len(m: usize) -> usize {
    (1..=3).find(|k| k * k == m).expect("square matrix")
}

fn trace_z(x: &[Z], n: usize) -> Z {
    (0..n).fold(Z::zero(), |acc, i| acc + &x[i * n + i])
}

fn trace_prod(x: &[Z], y: &[Z], n: usize) -> Z {
    let mut s = Z::zero();
    for i in 0..n {
        for j in 0..n {
            s += &x[i * n + j] * &y[j * n + i];
        }
    }
    s
}

/// Gram matrix of `n tr(XY) - tr X tr Y` on flattened matrices.
fn reduced_trace_gram(mats: &[Vec<Z>]) -> MatZ {
    let n = n_from_len(mats[0].len());
    let nz = Z::from(n);
    mats.iter()
        .map(|x| {
            mats.iter()
                .map(|y| &nz * trace_prod(x, y, n) - trace_z(x, n) * trace_z(y, n))
                .collect()
        })
        .collect()
}

/// Gcd of the maximal minors of a `r x m` integer matrix (`r <= 2`).
fn minors_gcd(rows: &[Vec<Z>]) -> Z {
    match rows.len() {
        1 => gcd_all(rows[0].iter()),
        2 => {
            let m = rows[0].len();
            let mut ms = Vec::new();
            for i in 0..m {
                for j in i + 1..m {
                    ms.push(&rows[0][i] * &rows[1][j] - &rows[0][j] * &rows[1][i]);
                }
            }
            gcd_all(ms.iter())
        }
        _ => unreachable!("rank of the torus is at most 2"),
    }
}

/// Multiplication matrices of `1, a, ..., a^{n-1}` on the basis of `l`,
/// with row `i` holding the coordinates of `a^j b_i`.
fn torus_matrices(l: &FractionalIdeal) -> Result<Vec<MatQ>> {
    let k = &l.order.field;
    let n = k.degree;
    let b = l.basis_elements();
    let binv = inverse_q(&b).ok_or(Error::Singular)?;
    let mut gen = vec![Q::zero(); n];
    gen[1] = Q::one();
    let mut out = Vec::new();
    let mut p = k.one();
    for _ in 0..n {
        out.push(
            b.iter()
                .map(|bi| vec_mul_q(&k.mul(&p, bi), &binv))
                .collect(),
        );
        p = k.mul(&p, &gen);
    }
    Ok(out)
}

pub fn lie_torus_data(l: &FractionalIdeal) -> Result<LieTorusData> {
    let n = l.degree();
    let mats = torus_matrices(l)?;
    let span: MatQ = mats
        .iter()
        .map(|m| m.iter().flatten().cloned().collect())
        .collect();
    // X in the span  <=>  c . X = 0 for c in the orthogonal complement
    let perp = nullspace_q(&span, n * n);
    let mut cons: MatZ = perp
        .iter()
        .map(|c| {
            let den = c
                .iter()
                .fold(Z::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
            c.iter()
                .map(|x| (x * Q::from_integer(den.clone())).to_integer())
                .collect()
        })
        .collect();
    let mut e_nn = vec![Z::zero(); n * n];
    e_nn[n * n - 1] = Z::one();
    cons.push(e_nn);
    let ker = integer_kernel(&cons, n * n);
    if ker.len() != n - 1 {
        return Err(Error::InvalidLattice("torus has the wrong rank".into()));
    }
    let gram = reduced_trace_gram(&ker);
    let wedge_gram = det_z(&gram);
    // w = e_1 ^ ... ^ e_r is primitive in the exterior power of g_Z
    let content = minors_gcd(&ker);
    debug_assert!(content.is_one());
    if !content.is_one() {
        return Err(Error::InvalidLattice("torus basis is not primitive".into()));
    }
    let nz = Z::from(n);
    let t_basis = ker
        .iter()
        .map(|x| {
            let tr = trace_z(x, n);
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let v = &nz * &x[i * n + j];
                            if i == j {
                                v - &tr
                            } else {
                                v
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(LieTorusData {
        t_basis,
        wedge_gram,
    })
}

/// `{x : x L ⊂ L}`.
pub fn multiplier_ring(l: &FractionalIdeal) -> Result<Order> {
    let k = &l.order.field;
    let b = l.basis_elements();
    let mut acc: Option<MatQ> = None;
    for bi in &b {
        let inv = k.inv(bi).ok_or(Error::Singular)?;
        let rows: MatQ = b.iter().map(|bj| k.mul(&inv, bj)).collect();
        acc = Some(match acc {
            None => rows,
            Some(a) => intersect(&a, &rows).ok_or(Error::Singular)?,
        });
    }
    Order::from_rows(k, &acc.expect("nonempty basis"))
}

/// `l` re-expressed as an ideal of its multiplier ring.
fn over_multiplier_ring(l: &FractionalIdeal) -> Result<FractionalIdeal> {
    let ring = multiplier_ring(l)?;
    if ring == *l.order {
        return Ok(l.clone());
    }
    let ring = Arc::new(ring);
    let rows: MatQ = l.basis_elements().iter().map(|x| ring.coords(x)).collect();
    FractionalIdeal::from_lattice(&ring, &rows)
}

fn check_theta(theta: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if theta.len() != n {
        return Err(Error::Invalid(format!("theta must permute {n} embeddings")));
    }
    for &t in theta {
        if t >= n || seen[t] {
            return Err(Error::Invalid("theta is not a permutation".into()));
        }
        seen[t] = true;
    }
    Ok(())
}

pub fn orbit_from_triple(
    k: &Arc<TotallyRealField>,
    l: &FractionalIdeal,
    theta: &[usize],
) -> Result<TorusOrbit> {
    if !Arc::ptr_eq(k, &l.order.field) && k.min_poly != l.order.field.min_poly {
        return Err(Error::Invalid("lattice lies in a different field".into()));
    }
    let n = k.degree;
    check_theta(theta, n)?;
    let lattice = over_multiplier_ring(l)?;
    let ring = lattice.order.clone();
    let lie = lie_torus_data(&lattice)?;
    let units = ring.unit_data()?;
    let (m, _) = ideals::min_abs_norm(&lattice)?;
    let cusp_excursion = m / &lattice.norm;
    let embedded = EmbeddedLattice::new(permute_rows(
        &lattice
            .basis_elements()
            .iter()
            .map(|b| k.embed(b))
            .collect::<Vec<_>>(),
        theta,
    ))
    .map_err(|_| Error::InvalidLattice("rank < n".into()))?;
    let cycle = if n == 2 {
        Some(Arc::new(QuadCycle::new(&lattice)?))
    } else {
        None
    };
    Ok(TorusOrbit {
        field: k.clone(),
        disc_order_route: ring.disc.clone(),
        disc_wedge_route: lie.wedge_gram,
        volume: units.covolume_regulator,
        classical_regulator: units.classical_regulator,
        cusp_excursion,
        lattice,
        theta: theta.to_vec(),
        class_index: 0,
        embedded,
        cycle,
    })
}

fn permute_rows(rows: &[Vec<f64>], theta: &[usize]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| theta.iter().map(|&t| r[t]).collect())
        .collect()
}

pub fn discriminant_order_route(orbit: &TorusOrbit) -> Z {
    orbit.disc_order_route.clone()
}

pub fn discriminant_wedge_route(orbit: &TorusOrbit) -> Z {
    orbit.disc_wedge_route.clone()
}

pub fn cusp_excursion(orbit: &TorusOrbit) -> Q {
    orbit.cusp_excursion.clone()
}

pub fn orbit_volume(orbit: &TorusOrbit) -> f64 {
    orbit.volume
}

impl TorusOrbit {
    pub fn degree(&self) -> usize {
        self.field.degree
    }

    /// `delta* = min |N(x)| / covol(theta(L))` as a float.
    pub fn cusp_excursion_value(&self) -> f64 {
        crate::poly::q_to_f64(&self.cusp_excursion)
            / crate::linalg::z_to_f64(&self.disc_order_route).sqrt()
    }

    /// Canonical key of the orbit under the normalizer of the torus: the
    /// field, the multiplier ring and the class of `L` up to conjugation.
    /// Theta does not enter, since permutations of the embeddings lie in
    /// the normalizer.
    pub fn canonical_key(&self) -> Result<String> {
        let ring = &self.lattice.order;
        let basis: Vec<String> = ring.basis.iter().flatten().map(|x| x.to_string()).collect();
        let coeffs: Vec<String> = self
            .field
            .min_poly
            .coeffs
            .iter()
            .map(|x| x.to_string())
            .collect();
        let head = format!("{}|{}", coeffs.join(","), basis.join(","));
        match self.degree() {
            2 => {
                let f = ideals::norm_form(&self.lattice)?;
                let flip = Form {
                    a: f.a,
                    b: -f.b,
                    c: f.c,
                };
                let best = [f, f.negate(), flip, flip.negate()]
                    .into_iter()
                    .flat_map(|g| forms::cycle(forms::reduce(g).form))
                    .min()
                    .expect("nonempty cycle");
                Ok(format!("{head}|{},{},{}", best.a, best.b, best.c))
            }
            _ => {
                let rep = smallest_integral_in_class(&self.lattice)?;
                let h: Vec<String> = rep
                    .numerator_basis
                    .iter()
                    .flatten()
                    .map(|x| x.to_string())
                    .collect();
                Ok(format!("{head}|{}/{}", h.join(","), rep.denominator))
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let c = &self.cusp_excursion;
        let num = c.numer().clone();
        let den = c.denom().clone();
        // delta*^2 = num^2 / (den^2 disc)
        let rec = OrbitRecord {
            field: FieldRecord {
                min_poly: self
                    .field
                    .min_poly
                    .coeffs
                    .iter()
                    .map(|x| x.to_string())
                    .collect(),
                disc: self.field.field_disc.to_string(),
            },
            class_index: self.class_index,
            theta: self.theta.clone(),
            disc: self.disc_order_route.to_string(),
            disc_wedge: self.disc_wedge_route.to_string(),
            volume: self.volume,
            classical_regulator: self.classical_regulator,
            cusp_excursion_num: num.to_string(),
            cusp_excursion_den_sq: (&den * &den * &self.disc_order_route).to_string(),
        };
        serde_json::to_value(rec).expect("plain record")
    }

    /// The orbit point `theta(L) exp(x)` for `x` in the sum-zero hyperplane,
    /// normalized to covolume 1.
    pub fn point(&self, x: &[f64]) -> EmbeddedLattice {
        let n = self.degree();
        // x in theta order: column j carries embedding theta[j]
        let mut xn = vec![0.0; n];
        for (j, &t) in self.theta.iter().enumerate() {
            xn[t] = x[j];
        }
        let natural = match &self.cycle {
            Some(c) => c.point(xn[0]),
            None => self.direct_point(&xn),
        };
        let rows = permute_rows(&natural, &self.theta);
        normalized(rows)
    }

    fn direct_point(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let k = &self.field;
        let units = self
            .lattice
            .order
            .unit_data()
            .expect("computed at construction");
        let b = &units.log_lattice;
        // move x into the centred fundamental domain; the lattice point is unchanged
        let coords = solve_sym(b, x);
        let mut xr = x.to_vec();
        for (c, row) in coords.iter().zip(b) {
            let r = c.round();
            for (v, w) in xr.iter_mut().zip(row) {
                *v -= r * w;
            }
        }
        let rows: Vec<Vec<f64>> = self
            .lattice
            .basis_elements()
            .iter()
            .map(|e| k.embed(e))
            .collect();
        let (red, _) = crate::lattice::lll(&rows);
        red.iter()
            .map(|r| r.iter().zip(&xr).map(|(v, s)| v * s.exp()).collect())
            .collect()
    }

    /// Log-unit lattice rows in theta order.
    pub fn log_lattice(&self) -> Vec<Vec<f64>> {
        let units = self
            .lattice
            .order
            .unit_data()
            .expect("computed at construction");
        units
            .log_lattice
            .iter()
            .map(|r| self.theta.iter().map(|&t| r[t]).collect())
            .collect()
    }
}

fn normalized(rows: Vec<Vec<f64>>) -> EmbeddedLattice {
    let n = rows.len();
    let c = crate::lattice::det(&rows).abs();
    let s = c.powf(-1.0 / n as f64);
    let rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|v| v * s).collect())
        .collect();
    EmbeddedLattice::new(rows).expect("nondegenerate orbit point")
}

/// Least-squares coordinates of `x` in the span of `rows`.
fn solve_sym(rows: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let g: Vec<Vec<f64>> = rows
        .iter()
        .map(|a| rows.iter().map(|b| dot(a, b)).collect())
        .collect();
    let rhs: Vec<f64> = rows.iter().map(|a| dot(a, x)).collect();
    match rows.len() {
        1 => vec![rhs[0] / g[0][0]],
        _ => {
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            vec![
                (rhs[0] * g[1][1] - rhs[1] * g[0][1]) / det,
                (rhs[1] * g[0][0] - rhs[0] * g[1][0]) / det,
            ]
        }
    }
}

fn smallest_integral_in_class(l: &FractionalIdeal) -> Result<FractionalIdeal> {
    let o = &l.order;
    for m in 1..=ideals::minkowski_bound(o).max(1) {
        for j in ideals::integral_ideals_of_norm(o, m) {
            if ideals::class_equal(l, &j)?.is_some() {
                return Ok(j);
            }
        }
    }
    Err(Error::SearchExhausted(
        "no integral ideal in the class below the Minkowski bound".into(),
    ))
}

/// The reduced cycle of an ideal of a quadratic order, with the embeddings
/// of each cycle basis tracked in logarithmic form.
#[derive(Debug)]
struct QuadCycle {
    /// Flow parameter at which the first basis vector is balanced.
    pos: Vec<f64>,
    log_alpha: Vec<[f64; 2]>,
    sign_alpha: Vec<[f64; 2]>,
    tau: Vec<[f64; 2]>,
    period: f64,
}

impl QuadCycle {
    fn new(l: &FractionalIdeal) -> Result<Self> {
        let k = &l.order.field;
        let b = l.basis_elements();
        let e0 = k.embed(&b[0]);
        let e1 = k.embed(&b[1]);
        let orient = (e0[0] * e1[1] - e0[1] * e1[0]).signum();
        let f = ideals::norm_form(l)?;
        let d = f.disc();
        let sd = (d as f64).sqrt();
        // sigma_i(beta / alpha) are the roots (b +- sqrt D) / 2a of a t^2 - b t + c
        let tau_of = |g: &Form| -> [f64; 2] {
            let (a, bb, c) = (g.a as f64, g.b as f64, g.c as f64);
            let (rp, rm) = if bb >= 0.0 {
                ((bb + sd) / (2.0 * a), 2.0 * c / (bb + sd))
            } else {
                (-2.0 * c / (sd - bb), (bb - sd) / (2.0 * a))
            };
            if orient > 0.0 {
                [rm, rp]
            } else {
                [rp, rm]
            }
        };
        let mut la = [e0[0].abs().ln(), e0[1].abs().ln()];
        let mut sa = [e0[0].signum(), e0[1].signum()];
        let step = |g: &Form, la: &mut [f64; 2], sa: &mut [f64; 2]| {
            let t = tau_of(g);
            for i in 0..2 {
                la[i] += t[i].abs().ln();
                sa[i] *= t[i].signum();
            }
        };
        let mut cur = f;
        let mut guard = 0;
        while !cur.is_reduced() {
            step(&cur, &mut la, &mut sa);
            cur = cur.rho().0;
            guard += 1;
            if guard > 10_000 {
                return Err(Error::Unsupported(
                    "form reduction did not terminate".into(),
                ));
            }
        }
        let start = cur;
        let mut c = QuadCycle {
            pos: vec![],
            log_alpha: vec![],
            sign_alpha: vec![],
            tau: vec![],
            period: 0.0,
        };
        loop {
            c.pos.push(0.5 * (la[1] - la[0]));
            c.log_alpha.push(la);
            c.sign_alpha.push(sa);
            c.tau.push(tau_of(&cur));
            step(&cur, &mut la, &mut sa);
            cur = cur.rho().0;
            if cur == start {
                break;
            }
        }
        c.period = 0.5 * (la[1] - la[0]) - c.pos[0];
        Ok(c)
    }

    /// Rows of `theta(L) diag(e^s, e^-s)` in the natural embedding order.
    fn point(&self, s: f64) -> Vec<Vec<f64>> {
        let p = self.period.abs();
        let wrap = |d: f64| d - p * (d / p).round();
        let (k, d) = self
            .pos
            .iter()
            .enumerate()
            .map(|(k, &pk)| (k, wrap(s - pk)))
            .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .expect("nonempty cycle");
        let sp = self.pos[k] + d;
        let la = self.log_alpha[k];
        let sa = self.sign_alpha[k];
        let alpha = [sa[0] * (la[0] + sp).exp(), sa[1] * (la[1] - sp).exp()];
        let beta = [alpha[0] * self.tau[k][0], alpha[1] * self.tau[k][1]];
        vec![alpha.to_vec(), beta.to_vec()]
    }
}

/// `delta* >= delta`.
pub fn in_omega_prime(orbit: &TorusOrbit, delta: f64) -> bool {
    orbit.cusp_excursion_value() >= delta
}

/// `1 / min_v ||Ad(g^-1) v||` over nonzero `v` in `g_Z`: the least `R` with
/// `g` in `Omega(R)`. The norm is `sqrt(n/(n-1)) ||X - tr(X)/n I||_F`,
/// for which the shortest vector of `g_Z` has length 1.
pub fn omega_threshold(g: &[Vec<f64>]) -> Result<f64> {
    let n = g.len();
    let det = crate::lattice::det(g);
    if det == 0.0 || !det.is_finite() || g.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("group element is not invertible".into()));
    }
    let s = det.abs().powf(-1.0 / n as f64);
    let g: Vec<Vec<f64>> = g
        .iter()
        .map(|r| r.iter().map(|v| v * s).collect())
        .collect();
    let gi = mat_inv(&g).ok_or_else(|| Error::Invalid("group element is not invertible".into()))?;
    let scale = (n as f64 / (n as f64 - 1.0)).sqrt();
    let mut basis = Vec::with_capacity(n * n - 1);
    for i in 0..n {
        for j in 0..n {
            if i == n - 1 && j == n - 1 {
                continue;
            }
            let mut e = vec![vec![0.0; n]; n];
            e[i][j] = 1.0;
            let y = mat_mul(&mat_mul(&gi, &e), &g);
            let tr: f64 = (0..n).map(|k| y[k][k]).sum::<f64>() / n as f64;
            let mut v = Vec::with_capacity(n * n);
            for (a, row) in y.iter().enumerate() {
                for (b, x) in row.iter().enumerate() {
                    v.push(scale * (if a == b { x - tr } else { *x }));
                }
            }
            basis.push(v);
        }
    }
    let (_, r2) = crate::lattice::shortest_vector(&basis);
    Ok(1.0 / r2.sqrt())
}

pub fn omega_r_membership(g: &[Vec<f64>], r: f64) -> Result<bool> {
    if !(r > 0.0) {
        return Err(Error::Invalid("R must be positive".into()));
    }
    Ok(omega_threshold(g)? <= r * (1.0 + 1e-12))
}

/// Grid points `x = sum_k t_k u_k`, `t_k = j_k / grid`, over the log-unit
/// lattice, in theta order.
pub fn sample_weights(orbit: &TorusOrbit, grid: usize) -> Vec<Vec<f64>> {
    let b = orbit.log_lattice();
    let n = orbit.degree();
    let r = b.len();
    let total = grid.pow(r as u32);
    (0..total)
        .map(|mut idx| {
            let mut x = vec![0.0; n];
            for row in &b {
                let t = (idx % grid) as f64 / grid as f64;
                idx /= grid;
                for (v, w) in x.iter_mut().zip(row) {
                    *v += t * w;
                }
            }
            x
        })
        .collect()
}

pub fn sample_orbit(orbit: &TorusOrbit, grid: usize) -> Vec<EmbeddedLattice> {
    sample_weights(orbit, grid.max(1))
        .iter()
        .map(|x| orbit.point(x))
        .collect()
}

pub fn escaped_mass_fraction(orbit: &TorusOrbit, delta: f64, grid: usize) -> f64 {
    let n = orbit.degree() as i32;
    let pts = sample_orbit(orbit, grid);
    let out = pts
        .iter()
        .filter(|p| crate::lattice::shortest_sup_norm(&p.basis).powi(n) < delta)
        .count();
    out as f64 / pts.len() as f64
}

/// `sum_{i != j} max(0, w_i - w_j)`.
pub fn haar_entropy(weights: &[f64]) -> Result<f64> {
    let s: f64 = weights.iter().sum();
    if s.abs() > 1e-12 {
        return Err(Error::Invalid("weights must sum to zero".into()));
    }
    let mut h = 0.0;
    for (i, a) in weights.iter().enumerate() {
        for (j, b) in weights.iter().enumerate() {
            if i != j {
                h += (a - b).max(0.0);
            }
        }
    }
    Ok(h)
}

/// The class of `[J]` corresponds to the orbit of `J^-1`.
pub fn orbit_of_class(j: &FractionalIdeal, theta: &[usize]) -> Result<TorusOrbit> {
    let inv = j.inverse()?;
    orbit_from_triple(&j.order.field, &inv, theta)
}

/// All orbits of a maximal order, one per ideal class, identity theta.
pub fn class_orbits(o: &Arc<Order>) -> Result<Vec<TorusOrbit>> {
    let n = o.degree();
    let id: Vec<usize> = (0..n).collect();
    ideals::class_representatives(o)?
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut orb = orbit_of_class(&c.representative, &id)?;
            orb.class_index = i;
            Ok(orb)
        })
        .collect()
}

/// The principal orbit of an order.
pub fn principal_orbit(o: &Arc<Order>) -> Result<TorusOrbit> {
    let n = o.degree();
    let id: Vec<usize> = (0..n).collect();
    orbit_from_triple(&o.field, &FractionalIdeal::unit(o), &id)
}

/// `x` with `|N(x)| / N(L)` equal to the cusp excursion numerator.
pub fn excursion_witness(orbit: &TorusOrbit) -> Result<Element> {
    Ok(ideals::min_abs_norm(&orbit.lattice)?.1)
}

#[derive(Serialize)]
struct FieldRecord {
    min_poly: Vec<String>,
    disc: String,
}

#[derive(Serialize)]
struct OrbitRecord {
    field: FieldRecord,
    class_index: usize,
    theta: Vec<usize>,
    disc: String,
    disc_wedge: String,
    volume: f64,
    classical_regulator: f64,
    cusp_excursion_num: String,
    cusp_excursion_den_sq: String,
}

/// Exact check of `m([J])^2 = delta*^2 disc` for the orbit of `J^-1`.
pub fn minkowski_identity_holds(class_min_norm: &Z, orbit: &TorusOrbit) -> bool {
    // delta*^2 disc is the square of the stored numerator
    let c = &orbit.cusp_excursion;
    let m = Q::from_integer(class_min_norm.clone());
    c.is_positive() && &m * &m == c * c
}
