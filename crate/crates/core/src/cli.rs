//! The `dsm` command line. Single-result commands print one JSON value on
//! stdout; grid commands write CSV or PPM files and print a JSON summary.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain error (the JSON then
//! carries a machine-readable `status`).

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::cycles::{classify, TongueClassification};
use crate::error::{DsmError, Result};
use crate::linearize::{invert_uniformization, superattracting_parameters, trace_internal_ray, uniformize_full};
use crate::map::Parameter;
use crate::scan::{render_ppm, scan_tongues, ScanConfig};
use crate::thermo::{bowen_dimension, dimension_field, smoothness_diagnostic, write_dimension_csv, DimensionRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dsm", version, about = "Double standard map laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Point {
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
}

#[derive(Debug, Args)]
struct Seed {
    #[arg(long = "seed-a", default_value_t = 0.5, allow_negative_numbers = true)]
    seed_a: f64,
    #[arg(long = "seed-b", default_value_t = 0.75, allow_negative_numbers = true)]
    seed_b: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tongue scan of a parameter window, written as a PPM image.
    Scan {
        #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
        amin: f64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        amax: f64,
        #[arg(long, default_value_t = 0.0)]
        bmin: f64,
        #[arg(long, default_value_t = 1.0)]
        bmax: f64,
        #[arg(long, default_value_t = 600)]
        width: usize,
        #[arg(long, default_value_t = 400)]
        height: usize,
        #[arg(long, default_value_t = 10)]
        qmax: usize,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Period, type, multiplier and (when available) critical angle.
    Classify {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = 12)]
        qmax: usize,
    },
    /// The uniformizing value Xi = lambda e^(2 i nu).
    Uniformize {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = 12)]
        qmax: usize,
    },
    /// Parameter in the seed's tongue with a prescribed Xi.
    Invert {
        #[command(flatten)]
        seed: Seed,
        #[arg(long = "xi-re", allow_negative_numbers = true)]
        xi_re: f64,
        #[arg(long = "xi-im", allow_negative_numbers = true)]
        xi_im: f64,
    },
    /// Parameters along an internal ray.
    Ray {
        #[command(flatten)]
        seed: Seed,
        #[arg(long)]
        nu: f64,
        /// Comma-separated multipliers, in the order they are visited.
        #[arg(long, value_delimiter = ',', required = true)]
        lambdas: Vec<f64>,
    },
    /// Ceiling parameters (b = 1) where 1/2 has exact period q.
    Superattracting {
        #[arg(long)]
        q: usize,
    },
    /// Hausdorff dimension of the chaotic set from the Bowen root.
    Dimension {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
    /// Dimension table over a grid (or segment) inside one tongue.
    DimensionField {
        #[command(flatten)]
        seed: Seed,
        #[arg(long, allow_negative_numbers = true)]
        amin: f64,
        #[arg(long, allow_negative_numbers = true)]
        amax: f64,
        #[arg(long, default_value_t = 1)]
        na: usize,
        #[arg(long)]
        bmin: f64,
        #[arg(long)]
        bmax: f64,
        #[arg(long, default_value_t = 8)]
        nb: usize,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Polynomial-fit smoothness check of a dimension table along a path.
    Smoothness {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Common JSON shape of the single-result commands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub a: f64,
    pub b: f64,
    pub period: Option<usize>,
    pub type_k: Option<u64>,
    pub lambda: Option<f64>,
    pub nu: Option<f64>,
    pub xi_re: Option<f64>,
    pub xi_im: Option<f64>,
    pub t_lower: Option<f64>,
    pub t_star: Option<f64>,
    pub t_upper: Option<f64>,
    pub status: String,
}

impl Record {
    fn new(a: f64, b: f64) -> Record {
        Record {
            a,
            b,
            period: None,
            type_k: None,
            lambda: None,
            nu: None,
            xi_re: None,
            xi_im: None,
            t_lower: None,
            t_star: None,
            t_upper: None,
            status: "ok".into(),
        }
    }

    fn failed(a: f64, b: f64, e: &DsmError) -> Record {
        Record {
            status: e.status().into(),
            ..Record::new(a, b)
        }
    }
}

#[derive(Debug, Serialize)]
struct CeilingEntry {
    a: f64,
    type_k: u64,
}

/// Classification plus uniformization where it is defined.
pub fn classify_record(p: &Parameter, q_max: usize) -> Result<Record> {
    let mut rec = Record::new(p.a(), p.b());
    match classify(p, q_max)? {
        TongueClassification::NoAttractingCycleFound => rec.status = "no_attracting_cycle".into(),
        TongueClassification::InTongue { cycle, orbit_type } => {
            rec.period = Some(cycle.period);
            rec.type_k = Some(orbit_type.k);
            rec.lambda = Some(cycle.lambda);
            if let Ok(u) = uniformize_full(p, q_max) {
                rec.nu = Some(u.value.nu);
                rec.xi_re = Some(u.value.xi.re);
                rec.xi_im = Some(u.value.xi.im);
            }
        }
    }
    Ok(rec)
}

pub fn uniformize_record(p: &Parameter, q_max: usize) -> Result<Record> {
    let u = uniformize_full(p, q_max)?;
    Ok(Record {
        period: Some(u.cycle.period),
        type_k: Some(u.orbit_type.k),
        lambda: Some(u.value.lambda),
        nu: Some(u.value.nu),
        xi_re: Some(u.value.xi.re),
        xi_im: Some(u.value.xi.im),
        ..Record::new(p.a(), p.b())
    })
}

enum Failure {
    Usage(String),
    Domain(Box<Record>, DsmError),
}

fn domain(a: f64, b: f64) -> impl Fn(DsmError) -> Failure {
    move |e| Failure::Domain(Box::new(Record::failed(a, b, &e)), e)
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

fn parameter(a: f64, b: f64) -> std::result::Result<Parameter, Failure> {
    Parameter::new(a, b).map_err(domain(a, b))
}

fn execute(command: Command) -> std::result::Result<String, Failure> {
    match command {
        Command::Scan {
            amin,
            amax,
            bmin,
            bmax,
            width,
            height,
            qmax,
            workers,
            out,
        } => {
            let cfg = ScanConfig {
                a_min: amin,
                a_max: amax,
                b_min: bmin,
                b_max: bmax,
                width,
                height,
                q_max: qmax,
                workers,
            };
            let result = scan_tongues(&cfg).map_err(domain(amin, bmin))?;
            render_ppm(&result, &out).map_err(domain(amin, bmin))?;
            Ok(json(&serde_json::json!({
                "out": out.display().to_string(),
                "width": width,
                "height": height,
                "hyperbolic_pixels": result.hyperbolic_count(),
                "hash": result.hash,
                "status": "ok",
            })))
        }
        Command::Classify { point, qmax } => {
            let p = parameter(point.a, point.b)?;
            classify_record(&p, qmax)
                .map(|r| json(&r))
                .map_err(domain(point.a, point.b))
        }
        Command::Uniformize { point, qmax } => {
            let p = parameter(point.a, point.b)?;
            uniformize_record(&p, qmax)
                .map(|r| json(&r))
                .map_err(domain(point.a, point.b))
        }
        Command::Invert { seed, xi_re, xi_im } => {
            let s = parameter(seed.seed_a, seed.seed_b)?;
            let fail = domain(seed.seed_a, seed.seed_b);
            let p = invert_uniformization(&s, Complex64::new(xi_re, xi_im)).map_err(&fail)?;
            uniformize_record(&p, crate::linearize::DEFAULT_Q_MAX)
                .map(|r| json(&r))
                .map_err(fail)
        }
        Command::Ray { seed, nu, lambdas } => {
            let s = parameter(seed.seed_a, seed.seed_b)?;
            let fail = domain(seed.seed_a, seed.seed_b);
            let ray = trace_internal_ray(&s, nu, &lambdas).map_err(&fail)?;
            let records = ray
                .iter()
                .map(|p| uniformize_record(p, crate::linearize::DEFAULT_Q_MAX))
                .collect::<Result<Vec<_>>>()
                .map_err(fail)?;
            Ok(json(&records))
        }
        Command::Superattracting { q } => {
            if q == 0 || q > 20 {
                return Err(Failure::Usage(format!("--q {q} must lie in 1..=20")));
            }
            let list: Vec<CeilingEntry> = superattracting_parameters(q)
                .into_iter()
                .map(|s| CeilingEntry {
                    a: s.a,
                    type_k: s.orbit_type.k,
                })
                .collect();
            Ok(json(&list))
        }
        Command::Dimension { point, tol } => {
            let p = parameter(point.a, point.b)?;
            let fail = domain(point.a, point.b);
            let mut rec = classify_record(&p, crate::linearize::DEFAULT_Q_MAX).map_err(&fail)?;
            let d = bowen_dimension(&p, tol).map_err(fail)?;
            rec.t_lower = Some(d.t_lower);
            rec.t_star = Some(d.t_star);
            rec.t_upper = Some(d.t_upper);
            if !d.certified {
                rec.status = "rank_cap".into();
            }
            Ok(json(&rec))
        }
        Command::DimensionField {
            seed,
            amin,
            amax,
            na,
            bmin,
            bmax,
            nb,
            tol,
            workers,
            out,
        } => {
            if na == 0 || nb == 0 {
                return Err(Failure::Usage("--na and --nb must be positive".into()));
            }
            let s = parameter(seed.seed_a, seed.seed_b)?;
            let fail = domain(seed.seed_a, seed.seed_b);
            let grid = segment_grid(amin, amax, na, bmin, bmax, nb).map_err(&fail)?;
            let rows = with_workers(workers, || dimension_field(&s, &grid, tol)).map_err(&fail)?;
            write_dimension_csv(&out, &rows).map_err(fail)?;
            Ok(json(&serde_json::json!({
                "out": out.display().to_string(),
                "rows": rows.len(),
                "ok_rows": rows.iter().filter(|r| r.is_ok()).count(),
                "status": "ok",
            })))
        }
        Command::Smoothness { input } => {
            let rows = read_dimension_csv(&input).map_err(domain(f64::NAN, f64::NAN))?;
            let report = smoothness_diagnostic(&rows).map_err(domain(f64::NAN, f64::NAN))?;
            Ok(json(&serde_json::json!({
                "samples": report.samples,
                "median_width": report.median_width,
                "threshold": report.threshold,
                "residuals": report.residuals,
                "best_degree": report.best_degree,
                "verdict": report.verdict(),
                "status": "ok",
            })))
        }
    }
}

/// `na x nb` grid, `a` varying fastest; a single count pins that coordinate
/// to the lower end.
pub fn segment_grid(amin: f64, amax: f64, na: usize, bmin: f64, bmax: f64, nb: usize) -> Result<Vec<Parameter>> {
    let lerp = |lo: f64, hi: f64, n: usize, i: usize| {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let mut grid = Vec::with_capacity(na * nb);
    for j in 0..nb {
        for i in 0..na {
            grid.push(Parameter::new(lerp(amin, amax, na, i), lerp(bmin, bmax, nb, j))?);
        }
    }
    Ok(grid)
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if workers == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| DsmError::InvalidParameter(format!("worker pool: {e}")))?
        .install(f)
}

pub fn read_dimension_csv(path: &std::path::Path) -> Result<Vec<DimensionRow>> {
    let io = |e: csv::Error| DsmError::Io {
        context: path.display().to_string(),
        message: e.to_string(),
    };
    let mut reader = csv::Reader::from_path(path).map_err(io)?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(io)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_subcommand<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command) {
        Ok(text) => {
            let _ = writeln!(out, "{text}");
            EXIT_OK
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Domain(record, e)) => {
            let _ = writeln!(out, "{}", json(&record));
            let _ = writeln!(err, "error: {e}");
            EXIT_DOMAIN
        }
    }
}
