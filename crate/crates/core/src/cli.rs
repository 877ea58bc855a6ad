//! Command-line front end. Every command prints one JSON report on stdout.

use crate::config::{Config, Tolerances};
use crate::critical::{CriticalError, Method, SmoothPoint, SmoothPointReport};
use crate::io::{parse_input, InputError};
use crate::kuramoto::{count_equilibria, real_equilibria, KuramotoError};
use crate::polar_defl::DeflationError;
use crate::poly::{parse_polynomial, ParseError, Polynomial, PolySystem, C64};
use crate::realdim::{real_dimension, smooth_sample, RealDimError, RealDimOptions};
use crate::reduce::{embed_bounded, lift_inequalities, ReduceError, SemiAlgebraicInput};
use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_DEFLATION_CAP: i32 = 3;
pub const EXIT_PARSE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "realsmooth", version, about = "Real smooth points and real dimension by homotopy continuation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smooth real points on the top-dimensional part of the input set
    SmoothPoints(SmoothArgs),
    /// Real dimension of the input set
    RealDim(RealDimArgs),
    /// Count real equilibria of the Kuramoto model for sampled frequencies
    Kuramoto(KuramotoArgs),
}

#[derive(Debug, Args)]
pub struct TolArgs {
    #[arg(long, default_value_t = 1e-6)]
    pub real_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub g_zero_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rank_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub dedup_tol: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub t_min: f64,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// system file, text or JSON
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// intersect with a sphere: `delta`, or `q1,..,qn,delta`; the flag alone uses delta = 16 at the origin
    #[arg(long, num_args = 0..=1, default_missing_value = "16", value_name = "Q,DELTA")]
    pub bound: Option<String>,
    /// write the report here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Args)]
pub struct SmoothArgs {
    #[command(flatten)]
    pub common: InputArgs,
    /// objective; built from Jacobian minors when omitted
    #[arg(long)]
    pub g: Option<String>,
    /// follow critical points of the perturbed varieties to the limit
    #[arg(long)]
    pub perturbed: bool,
    /// repeat the perturbed run with a second direction and compare point sets
    #[arg(long)]
    pub xi_crosscheck: bool,
    /// CSV file of the real points (and a curve sampling for two variables)
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RealDimArgs {
    #[command(flatten)]
    pub common: InputArgs,
    /// objective for every level instead of the automatic minors
    #[arg(long)]
    pub g: Option<String>,
    /// run every level from n down
    #[arg(long)]
    pub full_loop: bool,
    #[arg(long, default_value_t = 100_000)]
    pub max_paths: usize,
}

#[derive(Debug, Args)]
pub struct KuramotoArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// seed for the homotopy gamma; defaults to `--seed`
    #[arg(long)]
    pub gamma_seed: Option<u64>,
    /// count for this frequency vector only, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("objective: {0}")]
    Objective(ParseError),
    #[error("invalid --{flag}: {msg}")]
    Flag { flag: &'static str, msg: String },
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    RealDim(#[from] RealDimError),
    #[error(transparent)]
    Kuramoto(#[from] KuramotoError),
    #[error("cannot write {path}: {msg}")]
    Write { path: String, msg: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Objective(_) | CliError::Flag { .. } => EXIT_PARSE,
            CliError::RealDim(RealDimError::Critical(CriticalError::DegenerateObjective { .. })) => EXIT_DEGENERATE,
            CliError::RealDim(RealDimError::Deflation(DeflationError::Cap(_))) => EXIT_DEFLATION_CAP,
            _ => EXIT_FAILURE,
        }
    }
}

impl TolArgs {
    fn config(&self) -> Result<Config, CliError> {
        let tol = Tolerances {
            real_tol: self.real_tol,
            g_zero_tol: self.g_zero_tol,
            rank_tol: self.rank_tol,
            dedup_tol: self.dedup_tol,
            t_min: self.t_min,
            ..Tolerances::default()
        };
        for (flag, v) in [
            ("real-tol", tol.real_tol),
            ("g-zero-tol", tol.g_zero_tol),
            ("rank-tol", tol.rank_tol),
            ("dedup-tol", tol.dedup_tol),
            ("t-min", tol.t_min),
        ] {
            if !(v > 0.0) {
                return Err(CliError::Flag { flag: "tolerance", msg: format!("{flag} must be positive, got {v}") });
            }
        }
        Ok(Config::default().with_tolerances(tol))
    }
}

fn parse_floats(s: &str, flag: &'static str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| CliError::Flag { flag, msg: format!("`{t}`: {e}") }))
        .collect()
}

/// The input as a system of equations. The user's variables come first.
pub struct Prepared {
    pub input: SemiAlgebraicInput,
    pub system: PolySystem,
    pub user_vars: usize,
    pub bound: Option<(Vec<f64>, f64)>,
}

pub fn prepare(input: SemiAlgebraicInput, bound: Option<&str>) -> Result<Prepared, CliError> {
    let user_vars = input.vars.len();
    let mut system = lift_inequalities(&input)?;
    let mut used = None;
    if let Some(b) = bound {
        // the sphere would also constrain the lifted inequality variables
        if !input.inequalities.is_empty() {
            return Err(CliError::Flag { flag: "bound", msg: "cannot be combined with inequalities".into() });
        }
        let vals = parse_floats(b, "bound")?;
        let (q, delta) = match vals.len() {
            1 => (vec![0.0; user_vars], vals[0]),
            k if k == user_vars + 1 => (vals[..user_vars].to_vec(), vals[user_vars]),
            k => {
                return Err(CliError::Flag {
                    flag: "bound",
                    msg: format!("expected delta or {} centre coordinates and delta, got {k} numbers", user_vars),
                })
            }
        };
        system = embed_bounded(&system, &q, delta)?;
        used = Some((q, delta));
    }
    Ok(Prepared { input, system, user_vars, bound: used })
}

fn objective(expr: &str, prep: &Prepared) -> Result<Polynomial, CliError> {
    let g = parse_polynomial(expr, &prep.input.vars).map_err(CliError::Objective)?;
    Ok(g.embed(prep.system.vars()).expect("user variables are a prefix of the system variables"))
}

/// Drops lifted and bounding coordinates, merging points that then coincide.
fn project(points: &mut Vec<SmoothPoint>, k: usize, tol: f64) {
    let mut kept: Vec<SmoothPoint> = Vec::with_capacity(points.len());
    for mut p in points.drain(..) {
        p.x.truncate(k);
        let size = 1.0 + p.x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let seen = kept.iter().any(|q| q.x.iter().zip(&p.x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() <= tol * size);
        if !seen {
            kept.push(p);
        }
    }
    *points = kept;
}

fn point_json(p: &SmoothPoint) -> Value {
    json!({ "x": p.x, "g_value": p.g_value, "rank": p.rank, "residual": p.residual, "component": p.component_hint })
}

fn emit(report: &Value, output: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("report is plain JSON");
    match output {
        Some(p) => std::fs::write(p, text + "\n")
            .map_err(|e| CliError::Write { path: p.display().to_string(), msg: e.to_string() }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn same_sets(a: &[SmoothPoint], b: &[SmoothPoint], tol: f64) -> (bool, f64) {
    let dist = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
    let one_way = |a: &[SmoothPoint], b: &[SmoothPoint]| {
        a.iter().map(|p| b.iter().map(|q| dist(&p.x, &q.x)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        return (true, 0.0);
    }
    let d = one_way(a, b).max(one_way(b, a));
    (d <= tol, d)
}

pub fn cmd_smooth_points(args: &SmoothArgs) -> Result<Value, CliError> {
    let cfg = args.common.tol.config()?;
    let prep = prepare(parse_input(&args.common.input)?, args.common.bound.as_deref())?;
    let g = args.g.as_deref().map(|e| objective(e, &prep)).transpose()?;
    let method = if args.perturbed || args.xi_crosscheck { Method::Perturbed } else { Method::Unperturbed };
    let seed = args.common.seed;
    let mut rep: SmoothPointReport = smooth_sample(&prep.system, g.as_ref(), method, seed, &cfg)?;
    project(&mut rep.points, prep.user_vars, cfg.tol.dedup_tol);
    let mut out = json!({
        "points": rep.points.iter().map(point_json).collect::<Vec<_>>(),
        "seed": seed,
        "xi": rep.xi,
        "gamma": rep.gamma,
        "method": rep.method,
        "perturbation": rep.perturbation_trace,
        "paths": rep.paths,
        "candidates": rep.candidates,
        "warnings": rep.warnings,
        "tolerances": cfg.tol,
        "bound": prep.bound,
        "variables": prep.input.vars.names(),
    });
    if args.xi_crosscheck {
        let second_seed = seed.wrapping_add(0x9e37_79b9);
        let mut other = smooth_sample(&prep.system, g.as_ref(), method, second_seed, &cfg)?;
        project(&mut other.points, prep.user_vars, cfg.tol.dedup_tol);
        let (agree, distance) = same_sets(&rep.points, &other.points, 1e-6);
        if !agree {
            out["warnings"].as_array_mut().expect("array").push(json!(format!(
                "point sets differ between the two perturbation directions (distance {distance:.3e})"
            )));
        }
        out["xi_crosscheck"] = json!({
            "seed": second_seed,
            "xi": other.xi,
            "gamma": other.gamma,
            "agree": agree,
            "distance": if distance.is_finite() { json!(distance) } else { Value::Null },
            "points": other.points.iter().map(point_json).collect::<Vec<_>>(),
        });
    }
    if let Some(path) = &args.plot {
        write_plot(path, &prep.input, &rep.points)?;
    }
    Ok(out)
}

pub fn cmd_real_dim(args: &RealDimArgs) -> Result<Value, CliError> {
    let cfg = args.common.tol.config()?;
    let prep = prepare(parse_input(&args.common.input)?, args.common.bound.as_deref())?;
    let g = args.g.as_deref().map(|e| objective(e, &prep)).transpose()?;
    let opts = RealDimOptions { full_loop: args.full_loop, max_paths: args.max_paths };
    let mut run = real_dimension(&prep.system, g.as_ref(), args.common.seed, &cfg, &opts)?;
    project(&mut run.witnesses, prep.user_vars, cfg.tol.dedup_tol);
    Ok(json!({
        "dimension": run.dimension,
        "trace": run.trace,
        "witnesses": run.witnesses.iter().map(point_json).collect::<Vec<_>>(),
        "seed": run.seed,
        "xi": run.xi,
        "gamma": "drawn per solve from the seed",
        "rotation": run.a,
        "complex_dimension": match run.complex_dimension {
            Some(usize::MAX) => json!("empty"),
            other => json!(other),
        },
        "grouping": run.grouping,
        "objective": args.g.as_deref().unwrap_or("automatic"),
        "warnings": run.warnings,
        "tolerances": cfg.tol,
        "bound": prep.bound,
        "variables": prep.input.vars.names(),
    }))
}

pub fn cmd_kuramoto(args: &KuramotoArgs) -> Result<Value, CliError> {
    let cfg = args.tol.config()?;
    let gamma_seed = args.gamma_seed.unwrap_or(args.seed);
    if let Some(w) = &args.omega {
        let omega = parse_floats(w, "omega")?;
        let sols = real_equilibria(args.n, &omega, gamma_seed, &cfg)?;
        return Ok(json!({
            "n": args.n,
            "omega": omega,
            "count": sols.len(),
            "equilibria": sols,
            "seed": args.seed,
            "gamma_seed": gamma_seed,
            "tolerances": cfg.tol,
        }));
    }
    let count = count_equilibria(args.n, args.samples, args.seed, gamma_seed, &cfg)?;
    let mut v = serde_json::to_value(&count).expect("plain data");
    v["tolerances"] = serde_json::to_value(&cfg.tol).expect("plain data");
    Ok(v)
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (result, output) = match &cli.command {
        Command::SmoothPoints(a) => (cmd_smooth_points(a), a.common.output.as_deref()),
        Command::RealDim(a) => (cmd_real_dim(a), a.common.output.as_deref()),
        Command::Kuramoto(a) => (cmd_kuramoto(a), a.output.as_deref()),
    };
    match result.and_then(|v| emit(&v, output)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Real roots of a univariate polynomial given by ascending coefficients.
fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().is_some_and(|v| v.abs() <= 1e-12 * scale) {
        c.pop();
    }
    let d = c.len() - 1;
    if d == 0 {
        return vec![];
    }
    let lead = c[d];
    let comp = DMatrix::from_fn(d, d, |i, j| if i == 0 { -c[d - 1 - j] / lead } else if i == j + 1 { 1.0 } else { 0.0 });
    comp.complex_eigenvalues().iter().filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.re.abs())).map(|z| z.re).collect()
}

/// Points of `V(equations)` on vertical and horizontal grid lines of the box.
fn curve_samples(input: &SemiAlgebraicInput, half_width: f64, steps: usize) -> Vec<[f64; 2]> {
    let Some(first) = input.equations.first() else { return vec![] };
    let mut out = Vec::new();
    for axis in 0..2 {
        let free = 1 - axis;
        for k in 0..=steps {
            let v = -half_width + 2.0 * half_width * k as f64 / steps as f64;
            let sliced = first.bind(axis, C64::new(v, 0.0));
            let deg = sliced.degree_in(&[free]) as usize;
            let mut coeffs = vec![0.0; deg + 1];
            for (m, c) in sliced.terms() {
                coeffs[m.exponents()[free] as usize] += c.re;
            }
            if coeffs.iter().all(|c| *c == 0.0) {
                continue;
            }
            for r in real_roots(&coeffs) {
                if r.abs() > half_width {
                    continue;
                }
                let mut p = [0.0; 2];
                p[axis] = v;
                p[free] = r;
                let ok = input.equations.iter().chain(&input.inequalities).enumerate().all(|(j, f)| {
                    let val = f.eval_real(&p).map(|z| z.re).unwrap_or(f64::NAN);
                    if j < input.equations.len() {
                        val.abs() <= 1e-6 * (1.0 + f.max_abs_coeff())
                    } else {
                        val > 0.0
                    }
                });
                if ok {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn write_plot(path: &Path, input: &SemiAlgebraicInput, points: &[SmoothPoint]) -> Result<(), CliError> {
    let names = input.vars.names();
    let mut text = format!("kind,{}\n", names.join(","));
    let fmt = |x: &[f64]| x.iter().map(|v| format!("{v:.12e}")).collect::<Vec<_>>().join(",");
    for p in points {
        text.push_str(&format!("point,{}\n", fmt(&p.x)));
    }
    if names.len() == 2 && input.equations.iter().all(|f| f.has_real_coefficients()) {
        let extent = points.iter().flat_map(|p| p.x.iter()).fold(1.0f64, |m, v| m.max(v.abs()));
        for p in curve_samples(input, 1.5 * extent, 400) {
            text.push_str(&format!("curve,{}\n", fmt(&p)));
        }
    }
    std::fs::write(path, text).map_err(|e| CliError::Write { path: path.display().to_string(), msg: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_roots() {
        // (y - 1)(y + 2)(y^2 + 1)
        let mut r = real_roots(&[-2.0, 1.0, -1.0, 1.0, 1.0]);
        r.sort_by(f64::total_cmp);
        assert_eq!(r.len(), 2);
        assert!((r[0] + 2.0).abs() < 1e-10 && (r[1] - 1.0).abs() < 1e-10);
        assert!(real_roots(&[3.0]).is_empty());
    }

    #[test]
    fn circle_curve_sampling() {
        let input = crate::io::parse_input_str("vars x y\neq: x^2+y^2-1").unwrap();
        let pts = curve_samples(&input, 1.5, 60);
        assert!(pts.len() > 40);
        assert!(pts.iter().all(|p| (p[0].hypot(p[1]) - 1.0).abs() < 1e-8));
    }

    #[test]
    fn bound_forms() {
        let input = crate::io::parse_input_str("vars x y\neq: x^2+y^2-1").unwrap();
        let p = prepare(input.clone(), Some("16")).unwrap();
        assert_eq!(p.system.nvars(), 3);
        assert_eq!(p.bound, Some((vec![0.0, 0.0], 16.0)));
        let p = prepare(input.clone(), Some("1,2,4")).unwrap();
        assert_eq!(p.bound, Some((vec![1.0, 2.0], 4.0)));
        assert!(matches!(prepare(input.clone(), Some("1,2")), Err(CliError::Flag { .. })));
        assert!(matches!(prepare(input, Some("-1")), Err(CliError::Reduce(_))));
    }

    #[test]
    fn exit_codes() {
        let e = CliError::RealDim(RealDimError::Critical(CriticalError::DegenerateObjective { near: vec![] }));
        assert_eq!(e.exit_code(), EXIT_DEGENERATE);
        let e = CliError::RealDim(RealDimError::Deflation(DeflationError::Cap(10)));
        assert_eq!(e.exit_code(), EXIT_DEFLATION_CAP);
        assert_eq!(run(["realsmooth", "real-dim"]), EXIT_PARSE);
    }
}
