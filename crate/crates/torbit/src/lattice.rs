//! Floating-point lattice reduction and enumeration.
//!
//! Bases are row vectors. Every routine tracks the integer transform back
//! to the input basis so callers can rebuild exact lattice elements and
//! verify them in exact arithmetic.

pub type Basis = Vec<Vec<f64>>;

pub const LOVASZ: f64 = 0.99;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Gso {
    mu: Vec<Vec<f64>>,
    bnorm: Vec<f64>,
}

fn gso(b: &[Vec<f64>]) -> Gso {
    let k = b.len();
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut mu = vec![vec![0.0; k]; k];
    let mut bnorm = vec![0.0; k];
    for i in 0..k {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = if bnorm[j] > 0.0 {
                dot(&b[i], &bstar[j]) / bnorm[j]
            } else {
                0.0
            };
            for (x, y) in v.iter_mut().zip(&bstar[j]) {
                *x -= mu[i][j] * y;
            }
        }
        bnorm[i] = dot(&v, &v);
        bstar.push(v);
    }
    Gso { mu, bnorm }
}

/// LLL reduction with parameter [`LOVASZ`]. Returns the reduced basis and
/// the unimodular `u` with `reduced = u * input`.
pub fn lll(basis: &[Vec<f64>]) -> (Basis, Vec<Vec<i64>>) {
    let k = basis.len();
    let mut b: Basis = basis.to_vec();
    let mut u: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
        .collect();
    if k == 0 {
        return (b, u);
    }
    let mut i = 1;
    let mut guard = 0usize;
    while i < k {
        guard += 1;
        if guard > 100_000 {
            break;
        }
        for j in (0..i).rev() {
            let g = gso(&b);
            let r = g.mu[i][j].round();
            if r != 0.0 {
                let bj = b[j].clone();
                for (x, y) in b[i].iter_mut().zip(&bj) {
                    *x -= r * y;
                }
                let uj = u[j].clone();
                for (x, y) in u[i].iter_mut().zip(&uj) {
                    *x -= (r as i64) * y;
                }
            }
        }
        let g = gso(&b);
        if g.bnorm[i] >= (LOVASZ - g.mu[i][i - 1] * g.mu[i][i - 1]) * g.bnorm[i - 1] {
            i += 1;
        } else {
            b.swap(i, i - 1);
            u.swap(i, i - 1);
            i = i.max(2) - 1;
        }
    }
    (b, u)
}

/// All nonzero integer vectors `z` (coordinates in the given basis) with
/// `|z * b|^2 <= r2`.
pub fn fincke_pohst(b: &[Vec<f64>], r2: f64) -> Vec<Vec<i64>> {
    let k = b.len();
    let g = gso(b);
    let mut out = Vec::new();
    let mut z = vec![0i64; k];
    enumerate_level(&g, r2, k, &mut z, 0.0, &mut out);
    out
}

fn enumerate_level(
    g: &Gso,
    r2: f64,
    level: usize,
    z: &mut Vec<i64>,
    acc: f64,
    out: &mut Vec<Vec<i64>>,
) {
    if level == 0 {
        if z.iter().any(|&x| x != 0) {
            out.push(z.clone());
        }
        return;
    }
    let i = level - 1;
    let k = z.len();
    let c: f64 = -(i + 1..k).map(|j| z[j] as f64 * g.mu[j][i]).sum::<f64>();
    let bi = g.bnorm[i];
    if bi <= 0.0 {
        return;
    }
    let rem = r2 - acc;
    if rem < 0.0 {
        return;
    }
    let w = (rem / bi).sqrt();
    let lo = (c - w).ceil() as i64;
    let hi = (c + w).floor() as i64;
    for x in lo..=hi {
        let d = x as f64 - c;
        let a = acc + d * d * bi;
        if a <= r2 {
            z[i] = x;
            enumerate_level(g, r2, level - 1, z, a, out);
        }
    }
    z[i] = 0;
}

pub fn combine(z: &[i64], b: &[Vec<f64>]) -> Vec<f64> {
    let m = b[0].len();
    (0..m)
        .map(|j| z.iter().zip(b).map(|(&c, row)| c as f64 * row[j]).sum())
        .collect()
}

fn apply_transform(z: &[i64], u: &[Vec<i64>]) -> Vec<i64> {
    let k = u[0].len();
    (0..k)
        .map(|j| z.iter().zip(u).map(|(&c, row)| c * row[j]).sum())
        .collect()
}

/// Shortest nonzero vector: returns its coordinates in the input basis and
/// its squared Euclidean length.
pub fn shortest_vector(basis: &[Vec<f64>]) -> (Vec<i64>, f64) {
    let (b, u) = lll(basis);
    let mut best = b[0].clone();
    let mut best_z: Vec<i64> = (0..b.len()).map(|i| i64::from(i == 0)).collect();
    let mut r2 = dot(&best, &best);
    for z in fincke_pohst(&b, r2 * (1.0 + 1e-12)) {
        let v = combine(&z, &b);
        let n2 = dot(&v, &v);
        if n2 < r2 && n2 > 0.0 {
            r2 = n2;
            best = v;
            best_z = z;
        }
    }
    let _ = best;
    (apply_transform(&best_z, &u), r2)
}

/// All lattice vectors inside the box `|(z * basis)_j| <= bounds_j`,
/// returned as coordinates in the input basis. The box is slightly
/// enlarged (relative `slack`) so boundary points are never lost; callers
/// filter exactly.
pub fn enumerate_box(basis: &[Vec<f64>], bounds: &[f64], slack: f64) -> Vec<Vec<i64>> {
    let n = bounds.len();
    let scaled: Basis = basis
        .iter()
        .map(|r| r.iter().zip(bounds).map(|(x, b)| x / b).collect())
        .collect();
    let (b, u) = lll(&scaled);
    let lim = 1.0 + slack;
    fincke_pohst(&b, n as f64 * lim * lim)
        .into_iter()
        .filter(|z| combine(z, &b).iter().all(|x| x.abs() <= lim))
        .map(|z| apply_transform(&z, &u))
        .collect()
}

/// Smallest sup-norm of a nonzero lattice vector.
pub fn shortest_sup_norm(basis: &[Vec<f64>]) -> f64 {
    let (b, _) = lll(basis);
    let n = b[0].len() as f64;
    let mut best = b
        .iter()
        .map(|r| r.iter().fold(0.0f64, |m, x| m.max(x.abs())))
        .fold(f64::INFINITY, f64::min);
    // a vector of sup-norm s has Euclidean length at most s sqrt(n)
    for z in fincke_pohst(&b, best * best * n * (1.0 + 1e-12)) {
        let v = combine(&z, &b);
        let s = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if s < best {
            best = s;
        }
    }
    best
}

pub fn det(b: &[Vec<f64>]) -> f64 {
    let n = b.len();
    let mut a = b.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap())
            .unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    d
}
