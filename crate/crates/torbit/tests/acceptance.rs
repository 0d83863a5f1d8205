use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use torbit::dynamics::{expm, frobenius, group_distance, mat_mul, quadratic_separation_scan};
use torbit::fields::{
    enumerate_totally_real_fields, monogenic_cubics, quadratic_order, simplest_cubic,
    TotallyRealField,
};
use torbit::ideals::{class_representatives, minimal_class_norm, FractionalIdeal};
use torbit::linalg::{z_to_f64, Z};
use torbit::modular2::{
    anosov_close, geodesic_length, log_grid, log_spaced_discriminants, periodic_point,
    valid_discriminants, volume_bound_check, AbundanceTable, ETA_C,
};
use torbit::orbits::{
    escaped_mass_fraction, haar_entropy, lie_torus_data, minkowski_identity_holds, multiplier_ring,
    orbit_of_class, principal_orbit,
};
use torbit::stats::fitted_exponent;
use torbit::times23::{
    entropy_lower_bound_check, orbit_closure_23, partition_entropy, separation_level, sweep,
    EmpiricalMeasure, DYADIC_LEVELS,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let mut o = f();
    let el = t.elapsed();
    if let Some(l) = limit {
        if el > l {
            o.pass = false;
            o.detail
                .push_str(&format!("; over the {}s budget", l.as_secs()));
        }
    }
    let tag = if o.pass { "PASS" } else { "FAIL" };
    println!(
        "{tag} {id:>2} {name}: {} [{:.1}s]",
        o.detail,
        el.as_secs_f64()
    );
    o.pass
}

fn two_routes() -> Outcome {
    let mut fails = 0usize;
    let quads = valid_discriminants(2000);
    for &d in &quads {
        let o = Arc::new(quadratic_order(d).unwrap());
        let l = FractionalIdeal::unit(&o);
        if lie_torus_data(&l).unwrap().wedge_gram != multiplier_ring(&l).unwrap().disc {
            fails += 1;
        }
    }
    let polys = monogenic_cubics(5000, 1000);
    let cubic_fails = polys
        .par_iter()
        .filter(|p| {
            let k = TotallyRealField::new((*p).clone()).unwrap();
            let o = Arc::new(k.equation_order());
            let l = FractionalIdeal::unit(&o);
            lie_torus_data(&l).unwrap().wedge_gram != multiplier_ring(&l).unwrap().disc * 3
        })
        .count();
    fails += cubic_fails;
    let discs: BTreeSet<Z> = polys.iter().map(|p| p.discriminant()).collect();
    Outcome {
        pass: fails == 0,
        detail: format!(
            "{} quadratic orders, {} cubic polynomials ({} discriminants), {fails} failures",
            quads.len(),
            polys.len(),
            discs.len()
        ),
    }
}

fn maximal_orders(bound: u64) -> Vec<Arc<torbit::fields::Order>> {
    let mut fields = enumerate_totally_real_fields(2, bound).unwrap();
    fields.extend(enumerate_totally_real_fields(3, bound).unwrap());
    fields
        .par_iter()
        .map(|k| Arc::new(k.maximal_order()))
        .collect()
}

fn minkowski_identity(orders: &[Arc<torbit::fields::Order>]) -> Outcome {
    let (classes, fails) = orders
        .par_iter()
        .map(|o| {
            let id: Vec<usize> = (0..o.degree()).collect();
            let mut fails = 0;
            let cs = class_representatives(o).unwrap();
            for c in &cs {
                let m = minimal_class_norm(c).unwrap();
                let orb = orbit_of_class(&c.representative, &id).unwrap();
                let ce = &orb.cusp_excursion;
                let exact = ce.numer() * ce.numer() == &m * &m * ce.denom() * ce.denom();
                if !(exact && minkowski_identity_holds(&m, &orb)) {
                    fails += 1;
                }
            }
            (cs.len(), fails)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Outcome {
        pass: fails == 0,
        detail: format!(
            "{} maximal orders, {classes} classes, {fails} failures",
            orders.len()
        ),
    }
}

fn minkowski_bound(orders: &[Arc<torbit::fields::Order>]) -> Outcome {
    let (fails, worst) = orders
        .par_iter()
        .map(|o| {
            let d = o.degree() as u64;
            let m = class_representatives(o)
                .unwrap()
                .iter()
                .map(|c| minimal_class_norm(c).unwrap())
                .max()
                .unwrap();
            // m^2 d^(2d) <= (d!)^2 disc
            let fact: u64 = (1..=d).product();
            let lhs = &m * &m * Z::from(d).pow(2 * d as u32);
            let rhs = Z::from(fact * fact) * &o.disc;
            let ratio =
                z_to_f64(&m) / z_to_f64(&o.disc).sqrt() * (d as f64).powi(d as i32) / fact as f64;
            (usize::from(lhs > rhs), ratio)
        })
        .reduce(|| (0, 0.0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    Outcome {
        pass: fails == 0,
        detail: format!(
            "{} maximal orders, {fails} failures, max m/bound {worst:.4}",
            orders.len()
        ),
    }
}

fn volume_bound() -> Outcome {
    let ds = valid_discriminants(100_000);
    let (fails, margin) = ds
        .par_iter()
        .map(|&d| {
            let c = volume_bound_check(d).unwrap();
            (usize::from(!c.ok), c.length - c.lower_bound)
        })
        .reduce(|| (0, f64::INFINITY), |a, b| (a.0 + b.0, a.1.min(b.1)));
    Outcome {
        pass: fails == 0,
        detail: format!(
            "{} discriminants, {fails} failures, min margin {margin:.4}",
            ds.len()
        ),
    }
}

fn entropy_floor() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut qs = vec![];
    while qs.len() < 500 {
        let q: u64 = rng.gen_range(5..=1_000_000);
        if q % 2 != 0 && q % 3 != 0 {
            qs.push(q);
        }
    }
    let (fails, err) = qs
        .par_iter()
        .map(|&q| {
            let m = EmpiricalMeasure::new(orbit_closure_23(q, 1).unwrap());
            let c = entropy_lower_bound_check(&m).unwrap();
            let hn = partition_entropy(&m, separation_level(q)).unwrap();
            let e = (hn - (m.support.len() as f64).ln()).abs();
            (usize::from(c.h1 < c.floor - 1e-9 || e > 1e-12), e)
        })
        .reduce(|| (0, 0.0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    Outcome {
        pass: fails == 0,
        detail: format!("500 moduli, {fails} failures, max |H_n - log|S|| {err:.1e}"),
    }
}

fn equidistribution() -> Outcome {
    let rows = sweep(10_000, 100_000, true).unwrap();
    let sel: Vec<_> = rows
        .iter()
        .filter(|r| r.group_order as f64 >= (r.q as f64).powf(0.9))
        .collect();
    let disc = sel.iter().map(|r| r.max_discrepancy).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = sel
        .iter()
        .map(|r| (r.q as f64, r.max_norm_exp_sum.unwrap()))
        .collect();
    let delta = fitted_exponent(&pts).map(|s| -s).unwrap_or(f64::NAN);
    let floor = 0.377;
    Outcome {
        pass: disc <= 0.05 && delta > 0.0 && delta >= floor,
        detail: format!(
            "{} primes (levels {DYADIC_LEVELS}), max discrepancy {disc:.5} <= 0.05, fitted delta {delta:.3} >= {floor}",
            sel.len()
        ),
    }
}

fn separation() -> Outcome {
    let discs = log_spaced_discriminants(10_000, 1.4);
    let (recs, slope) = quadratic_separation_scan(&discs, 4.0, 20).unwrap();
    let slope = slope.unwrap_or(f64::NAN);
    let min_scaled = recs.iter().map(|r| r.scaled).fold(f64::INFINITY, f64::min);
    let floor = 0.7038;
    Outcome {
        pass: slope >= -0.6 && min_scaled >= floor,
        detail: format!(
            "{} orbits, {} pairs, slope {slope:.3} >= -0.6, min scaled {min_scaled:.4} >= {floor}",
            discs.len(),
            recs.len()
        ),
    }
}

fn escape_of_mass() -> Outcome {
    let delta0 = 0.05;
    let rows: Vec<(f64, f64, f64)> = (-1..=30i64)
        .into_par_iter()
        .map(|a| {
            let k = simplest_cubic(a).unwrap();
            let orb = principal_orbit(&Arc::new(k.maximal_order())).unwrap();
            let disc = z_to_f64(&orb.disc_order_route);
            let c = orb.classical_regulator / disc.ln().powi(2);
            (disc, c, escaped_mass_fraction(&orb, delta0, 20))
        })
        .collect();
    let cmin = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let cmax = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let big: Vec<f64> = rows.iter().filter(|r| r.0 >= 1e4).map(|r| r.2).collect();
    let fmin = big.iter().copied().fold(f64::INFINITY, f64::min);
    let tail = &big[big.len() * 2 / 3..];
    let tail_mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let floor = 0.106;
    Outcome {
        pass: cmax / cmin <= 3.0 && fmin >= floor && tail_mean >= floor,
        detail: format!(
            "C in [{cmin:.4}, {cmax:.4}] ratio {:.2} <= 3, escaped fraction at delta {delta0} (disc >= 1e4) min {fmin:.4}, last-third mean {tail_mean:.4} >= {floor}",
            cmax / cmin
        ),
    }
}

fn closing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ds: Vec<i64> = valid_discriminants(200)
        .into_iter()
        .filter(|&d| geodesic_length(d).unwrap() <= 4.0)
        .collect();
    let eps = 1e-4;
    let (mut res, mut ratio, mut dt, mut fails) = (0f64, 0f64, 0f64, 0);
    for i in 0..100 {
        let d = ds[i % ds.len()];
        let (m0, t) = periodic_point(d).unwrap();
        let s: f64 = rng.gen_range(0.0..t);
        let x0 = mat_mul(
            &m0,
            &[vec![(-s / 2.0).exp(), 0.0], vec![0.0, (s / 2.0).exp()]],
        );
        let a = rng.gen_range(-1.0..1.0);
        let e = vec![
            vec![a, rng.gen_range(-1.0..1.0)],
            vec![rng.gen_range(-1.0..1.0), -a],
        ];
        let nrm = frobenius(&e);
        let e: Vec<Vec<f64>> = e
            .iter()
            .map(|r| r.iter().map(|v| v * eps / nrm).collect())
            .collect();
        let x = mat_mul(&x0, &expm(&e));
        match anosov_close(&x, t, 1e-8) {
            Ok(c) => {
                let r = group_distance(&x, &c.y).unwrap() / eps;
                if c.residual > 1e-8 || r > 10.0 || (c.t - t).abs() > ETA_C {
                    fails += 1;
                }
                res = res.max(c.residual);
                ratio = ratio.max(r);
                dt = dt.max((c.t - t).abs());
            }
            Err(_) => fails += 1,
        }
    }
    Outcome {
        pass: fails == 0,
        detail: format!(
            "100 perturbations over {} discriminants, {fails} failures, max residual {res:.1e}, max d/eps {ratio:.3}, max |T-N| {dt:.1e}",
            ds.len()
        ),
    }
}

fn haar() -> Outcome {
    let mut fails = 0;
    let mut vals = vec![];
    for n in 2..=6u64 {
        let w: Vec<f64> = (0..n).map(|i| (n as f64 - 1.0) / 2.0 - i as f64).collect();
        let h = haar_entropy(&w).unwrap();
        let want = ((n + 1) * n * (n - 1) / 6) as f64;
        if h != want {
            fails += 1;
        }
        vals.push(format!("{h}"));
    }
    Outcome {
        pass: fails == 0,
        detail: format!("n = 2..6 give {}", vals.join(", ")),
    }
}

fn abundance() -> Outcome {
    let table = AbundanceTable::new(100_000).unwrap();
    let grid = log_grid(100_000, 4);
    let deltas = [0.001, 0.01, 0.05, 0.1, 0.3];
    let all: Vec<_> = deltas.iter().map(|&d| table.rows(d, &grid)).collect();
    let mut monotone = true;
    for rows in &all {
        monotone &= rows.windows(2).all(|w| {
            w[0].total_length_inside <= w[1].total_length_inside
                && w[0].total_length_all <= w[1].total_length_all
        });
    }
    for pair in all.windows(2) {
        monotone &= pair[0]
            .iter()
            .zip(&pair[1])
            .all(|(a, b)| b.total_length_inside <= a.total_length_inside);
    }
    let rows = &all[1];
    let fit = |f: &dyn Fn(&torbit::modular2::AbundanceRow) -> f64| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.big_delta >= 1000)
            .map(|r| (r.big_delta as f64, f(r)))
            .collect();
        fitted_exponent(&pts).unwrap_or(f64::NAN)
    };
    let inside = fit(&|r| r.total_length_inside);
    let total = fit(&|r| r.total_length_all);
    Outcome {
        pass: monotone && inside >= 0.5 && (1.3..=1.7).contains(&total),
        detail: format!(
            "delta 0.01 inside exponent {inside:.3} >= 0.5, unrestricted exponent {total:.3} in [1.3, 1.7], monotone {monotone}"
        ),
    }
}

fn main() {
    let mins = |m: u64| Some(Duration::from_secs(60 * m));
    let mut ok = true;
    ok &= run(1, "two-route discriminant identity", mins(2), two_routes);
    let t = Instant::now();
    let orders = maximal_orders(3000);
    let build = t.elapsed();
    ok &= run(
        2,
        "Minkowski identity",
        mins(5).map(|l| l.saturating_sub(build)),
        || minkowski_identity(&orders),
    );
    ok &= run(3, "Minkowski bound", None, || minkowski_bound(&orders));
    ok &= run(4, "volume lower bound", mins(3), volume_bound);
    ok &= run(5, "x2x3 entropy floor", mins(2), entropy_floor);
    ok &= run(6, "x2x3 equidistribution", None, equidistribution);
    ok &= run(7, "separation scaling", mins(10), separation);
    ok &= run(8, "escape of mass", None, escape_of_mass);
    ok &= run(9, "Anosov closing", None, closing);
    ok &= run(10, "Haar entropy", None, haar);
    ok &= run(11, "abundance", None, abundance);
    println!(
        "{}",
        if ok {
            "all criteria pass"
        } else {
            "some criteria fail"
        }
    );
}
