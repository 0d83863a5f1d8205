//! `torbit`: batch experiments over periodic torus orbits.
//!
//! Every command writes one CSV (or JSON) file to `--out`, or to standard
//! output. CSV files open with `#` comment lines carrying the tool version,
//! the experiment name and the full configuration as JSON; then a header
//! row. Floats carry 12 significant digits.

use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use torbit::fields::{enumerate_totally_real_fields, simplest_cubic, unit_group, TotallyRealField};
use torbit::ideals::{class_representatives, field_minkowski_stat};
use torbit::{dynamics, modular2, orbits, times23, Error};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Serialize)]
#[command(name = "torbit", version, about = "Periodic torus orbit experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize)]
struct Common {
    /// Seed for commands that sample.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Bits of certified root precision for field embeddings.
    #[arg(long, global = true, default_value_t = torbit::fields::DEFAULT_PRECISION_BITS)]
    precision_bits: u32,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Totally real fields with their regulators.
    Fields {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        disc_bound: u64,
    },
    /// Minimal class norms per field and the weighted count of bad classes.
    MinkowskiScan {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        disc_bound: u64,
        #[arg(long)]
        delta: f64,
    },
    /// The orbit record of one ideal class.
    Orbit {
        /// Coefficients of the monic defining polynomial, constant first.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        poly: Vec<i64>,
        #[arg(long, default_value_t = 0)]
        class_index: usize,
        /// Embedding order, comma separated; identity when absent.
        #[arg(long, value_delimiter = ',')]
        theta: Vec<usize>,
    },
    /// Total length of closed geodesics staying in the thick part.
    Abundance {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        delta_max: i64,
        #[arg(long, default_value_t = 4)]
        grid_decades: usize,
    },
    /// Escaped mass along the simplest cubic fields.
    Escape {
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        a_min: i64,
        #[arg(long, default_value_t = 30)]
        a_max: i64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 20)]
        grid: usize,
    },
    /// Pairwise distances between quadratic orbits in a compact window.
    Separation {
        #[arg(long)]
        disc_bound: i64,
        #[arg(long, default_value_t = 4.0)]
        window_r: f64,
        /// Samples per unit flow time.
        #[arg(long, default_value_t = 20)]
        grid: usize,
        /// Ratio between consecutive discriminants.
        #[arg(long, default_value_t = 1.4)]
        ratio: f64,
    },
    /// Orbit closures of x2, x3 modulo q.
    Times23 {
        #[arg(long)]
        q_min: u64,
        #[arg(long)]
        q_max: u64,
        #[arg(long)]
        primes_only: bool,
        /// Draw this many moduli at random instead of taking all.
        #[arg(long)]
        sample: Option<usize>,
    },
}

impl Command {
    fn experiment(&self) -> &'static str {
        match self {
            Command::Fields { .. } => "fields",
            Command::MinkowskiScan { .. } => "minkowski-scan",
            Command::Orbit { .. } => "orbit",
            Command::Abundance { .. } => "abundance",
            Command::Escape { .. } => "escape",
            Command::Separation { .. } => "separation",
            Command::Times23 { .. } => "times23",
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DegreeUnsupported(_)
            | Error::Invalid(_)
            | Error::InvalidDiscriminant(_)
            | Error::InvalidModulus(_)
            | Error::ReducibleInput
            | Error::NotTotallyReal => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Out<T> = std::result::Result<T, Failure>;

/// 12 significant digits, shortest form.
fn fmt_f(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{r}")
}

fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            let r: f64 = fmt_f(x).parse().unwrap_or(x);
            json!(r)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn poly_string(p: &torbit::poly::IntPoly) -> String {
    p.coeffs
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

struct Report<'a> {
    cli: &'a Cli,
}

impl Report<'_> {
    fn meta(&self) -> Value {
        json!({
            "tool": format!("torbit {VERSION}"),
            "experiment": self.cli.command.experiment(),
            "config": serde_json::to_value(self.cli).expect("config serializes"),
        })
    }

    fn sink(&self, path: Option<&str>) -> Out<Box<dyn Write>> {
        Ok(match path {
            Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
            None => Box::new(std::io::stdout().lock()),
        })
    }

    fn csv(&self, header: &[&str], rows: &[Vec<String>]) -> Out<()> {
        let mut w = self.sink(self.cli.common.out.as_deref())?;
        let meta = self.meta();
        writeln!(w, "# tool: {}", meta["tool"].as_str().unwrap())?;
        writeln!(w, "# experiment: {}", meta["experiment"].as_str().unwrap())?;
        writeln!(w, "# config: {}", meta["config"])?;
        writeln!(w, "{}", header.join(","))?;
        for r in rows {
            writeln!(w, "{}", r.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    fn json(&self, body: Value, path: Option<&str>) -> Out<()> {
        let mut doc = round_json(body);
        doc["meta"] = self.meta();
        let mut w = self.sink(path)?;
        writeln!(
            w,
            "{}",
            serde_json::to_string_pretty(&doc).expect("json serializes")
        )?;
        w.flush()?;
        Ok(())
    }

    /// Summaries go next to the CSV, or to standard error.
    fn summary(&self, body: Value) -> Out<()> {
        match &self.cli.common.out {
            Some(p) => self.json(body, Some(&format!("{p}.summary.json"))),
            None => {
                let mut doc = round_json(body);
                doc["meta"] = self.meta();
                eprintln!(
                    "{}",
                    serde_json::to_string_pretty(&doc).expect("json serializes")
                );
                Ok(())
            }
        }
    }
}

fn with_precision(k: &Arc<TotallyRealField>, bits: u32) -> Out<Arc<TotallyRealField>> {
    if bits == k.precision_bits {
        return Ok(k.clone());
    }
    Ok(TotallyRealField::with_precision(k.min_poly.clone(), bits)?)
}

fn cmd_fields(rep: &Report, degree: usize, disc_bound: u64) -> Out<()> {
    let bits = rep.cli.common.precision_bits;
    let fields = enumerate_totally_real_fields(degree, disc_bound)?;
    let rows = fields
        .par_iter()
        .map(|k| {
            let k = with_precision(k, bits)?;
            let u = unit_group(&k.maximal_order())?;
            Ok(vec![
                k.field_disc.to_string(),
                poly_string(&k.min_poly),
                fmt_f(u.classical_regulator),
                fmt_f(u.covolume_regulator),
            ])
        })
        .collect::<Out<Vec<_>>>()?;
    rep.csv(
        &["disc", "min_poly_coeffs", "regulator", "covolume_regulator"],
        &rows,
    )
}

fn cmd_minkowski_scan(rep: &Report, degree: usize, disc_bound: u64, delta: f64) -> Out<()> {
    if !(delta >= 0.0) {
        return Err(Failure::Usage("delta must be nonnegative".into()));
    }
    let fields: Vec<_> = enumerate_totally_real_fields(degree, disc_bound)?
        .into_iter()
        .filter(|k| k.field_disc < disc_bound.into())
        .collect();
    let stats = fields
        .par_iter()
        .map(|k| {
            let o = Arc::new(k.maximal_order());
            let st = field_minkowski_stat(&o, delta)?;
            let reg = unit_group(&o)?.classical_regulator;
            Ok((k.clone(), st, reg))
        })
        .collect::<Out<Vec<_>>>()?;
    let mut total = 0.0;
    let mut rows = Vec::new();
    for (k, st, reg) in &stats {
        total += reg * st.bad_classes as f64;
        let m = torbit::linalg::z_to_f64(&st.m_k);
        rows.push(vec![
            k.field_disc.to_string(),
            st.classes.to_string(),
            st.m_k.to_string(),
            fmt_f(m / torbit::linalg::z_to_f64(&k.field_disc).sqrt()),
            fmt_f(*reg),
            st.bad_classes.to_string(),
            poly_string(&k.min_poly),
        ]);
    }
    rep.csv(
        &[
            "disc",
            "n_classes",
            "m_K",
            "m_K/sqrt_disc",
            "regulator",
            "h_delta",
            "min_poly_coeffs",
        ],
        &rows,
    )?;
    rep.summary(json!({ "fields": stats.len(), "sum_regulator_h_delta": total }))
}

fn cmd_orbit(rep: &Report, poly: &[i64], class_index: usize, theta: &[usize]) -> Out<()> {
    let k = TotallyRealField::with_precision(
        torbit::poly::IntPoly::from_i64(poly),
        rep.cli.common.precision_bits,
    )?;
    let theta: Vec<usize> = if theta.is_empty() {
        (0..k.degree).collect()
    } else {
        theta.to_vec()
    };
    let o = Arc::new(k.maximal_order());
    let classes = class_representatives(&o)?;
    let class = classes.get(class_index).ok_or_else(|| {
        Failure::Usage(format!(
            "class index {class_index} out of range: {} classes",
            classes.len()
        ))
    })?;
    let mut orbit = orbits::orbit_of_class(&class.representative, &theta)?;
    orbit.class_index = class_index;
    let mut body = orbit.to_json();
    body["canonical_key"] = json!(orbit.canonical_key()?);
    rep.json(body, rep.cli.common.out.as_deref())
}

fn cmd_abundance(rep: &Report, delta: f64, delta_max: i64, per_decade: usize) -> Out<()> {
    let rows = modular2::abundance_scan(delta, delta_max, per_decade)?;
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.big_delta.to_string(),
                fmt_f(r.delta),
                r.n_orbits_inside.to_string(),
                fmt_f(r.total_length_inside),
                fmt_f(r.total_length_all),
            ]
        })
        .collect();
    rep.csv(
        &[
            "Delta",
            "delta",
            "n_orbits_inside",
            "total_length_inside",
            "total_length_all",
        ],
        &rows,
    )
}

fn cmd_escape(rep: &Report, a_min: i64, a_max: i64, delta: f64, grid: usize) -> Out<()> {
    if !(delta > 0.0 && delta <= 1.0) || grid < 10 {
        return Err(Failure::Usage("need 0 < delta <= 1 and grid >= 10".into()));
    }
    let bits = rep.cli.common.precision_bits;
    let rows = (a_min..=a_max)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&a| {
            let k = with_precision(&simplest_cubic(a)?, bits)?;
            let orbit = orbits::principal_orbit(&Arc::new(k.maximal_order()))?;
            let ld = torbit::linalg::z_to_f64(&orbit.disc_order_route).ln();
            Ok(vec![
                a.to_string(),
                orbit.disc_order_route.to_string(),
                fmt_f(orbit.classical_regulator),
                fmt_f(orbit.classical_regulator / (ld * ld)),
                fmt_f(orbit.cusp_excursion_value()),
                fmt_f(orbits::escaped_mass_fraction(&orbit, delta, grid)),
            ])
        })
        .collect::<Out<Vec<_>>>()?;
    rep.csv(
        &[
            "a",
            "disc",
            "classical_regulator",
            "regulator_over_log_disc_sq",
            "cusp_excursion",
            "escaped_mass_fraction",
        ],
        &rows,
    )
}

fn cmd_separation(
    rep: &Report,
    disc_bound: i64,
    window_r: f64,
    grid: usize,
    ratio: f64,
) -> Out<()> {
    if !(ratio > 1.0) || !(window_r >= 1.0) || grid == 0 {
        return Err(Failure::Usage(
            "need ratio > 1, window-r >= 1 and grid > 0".into(),
        ));
    }
    let discs = modular2::log_spaced_discriminants(disc_bound, ratio);
    let (recs, slope) = dynamics::quadratic_separation_scan(&discs, window_r, grid)?;
    let rows: Vec<Vec<String>> = recs
        .iter()
        .map(|r| {
            vec![
                discs[r.pair.0].to_string(),
                discs[r.pair.1].to_string(),
                fmt_f(window_r),
                grid.to_string(),
                fmt_f(r.min_dist),
                fmt_f(r.scaled),
            ]
        })
        .collect();
    rep.csv(
        &["D1", "D2", "window_R", "grid", "min_dist", "scaled_stat"],
        &rows,
    )?;
    let min_scaled = recs.iter().map(|r| r.scaled).fold(f64::INFINITY, f64::min);
    rep.summary(json!({
        "orbits": discs.len(),
        "pairs": recs.len(),
        "slope_log_dist_vs_log_disc_product": slope,
        "min_scaled": min_scaled,
    }))
}

fn cmd_times23(
    rep: &Report,
    q_min: u64,
    q_max: u64,
    primes_only: bool,
    sample: Option<usize>,
) -> Out<()> {
    let qs: Vec<u64> = (q_min.max(5)..=q_max)
        .filter(|&q| q % 2 != 0 && q % 3 != 0 && (!primes_only || times23::is_prime(q)))
        .collect();
    let qs = match sample {
        Some(n) if !qs.is_empty() => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rep.cli.common.seed);
            let mut pick: Vec<u64> = (0..n).map(|_| qs[rng.gen_range(0..qs.len())]).collect();
            pick.sort_unstable();
            pick
        }
        _ => qs,
    };
    let rows = qs
        .par_iter()
        .map(|&q| {
            let r = times23::sweep_row(q)?;
            Ok(vec![
                r.q.to_string(),
                r.group_order.to_string(),
                fmt_f(r.ratio_log_order_log_q),
                fmt_f(r.h1),
                fmt_f(r.entropy_floor),
                fmt_f(r.max_discrepancy),
                r.max_norm_exp_sum.map(fmt_f).unwrap_or_default(),
            ])
        })
        .collect::<Out<Vec<_>>>()?;
    rep.csv(
        &[
            "q",
            "group_order",
            "ratio_log_order_log_q",
            "H1",
            "entropy_floor",
            "max_discrepancy",
            "max_norm_exp_sum",
        ],
        &rows,
    )
}

fn run(cli: &Cli) -> Out<()> {
    let rep = Report { cli };
    match &cli.command {
        Command::Fields { degree, disc_bound } => cmd_fields(&rep, *degree, *disc_bound),
        Command::MinkowskiScan {
            degree,
            disc_bound,
            delta,
        } => cmd_minkowski_scan(&rep, *degree, *disc_bound, *delta),
        Command::Orbit {
            poly,
            class_index,
            theta,
        } => cmd_orbit(&rep, poly, *class_index, theta),
        Command::Abundance {
            delta,
            delta_max,
            grid_decades,
        } => cmd_abundance(&rep, *delta, *delta_max, *grid_decades),
        Command::Escape {
            a_min,
            a_max,
            delta,
            grid,
        } => cmd_escape(&rep, *a_min, *a_max, *delta, *grid),
        Command::Separation {
            disc_bound,
            window_r,
            grid,
            ratio,
        } => cmd_separation(&rep, *disc_bound, *window_r, *grid, *ratio),
        Command::Times23 {
            q_min,
            q_max,
            primes_only,
            sample,
        } => cmd_times23(&rep, *q_min, *q_max, *primes_only, *sample),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("TORBIT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
