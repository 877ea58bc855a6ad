//! Real dimension of a compact real algebraic set by searching, level by
//! level, for smooth real limit points of polar varieties of a sum of squares.

use crate::config::Config;
use crate::critical::{
    certify, critical_points_perturbed, critical_points_unperturbed, lagrange_limits, CriticalError, Method,
    SmoothPoint, SmoothPointReport,
};
use crate::linalg::norm;
use crate::polar_defl::{
    group_by_signature, minor_g, multiplicity_one_refine, polar_system, DeflationConfig, DeflationError,
};
use crate::poly::{sum_of_squares_pullback, CompiledSystem, PolyError, Polynomial, PolySystem, C64};
use crate::solve::{
    limit_points, newton_refine_compiled, random_complex, random_unit, rng_from_seed, solve_square, Homotopy, PathStatus, SolveError,
};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealDimError {
    #[error("need at least two variables, got {0}")]
    TooFewVariables(usize),
    #[error("no equations given")]
    NoEquations,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Critical(#[from] CriticalError),
    #[error(transparent)]
    Deflation(#[from] DeflationError),
}

#[derive(Debug, Clone)]
pub struct RealDimOptions {
    /// run every level from `n` down instead of starting above the complex dimension
    pub full_loop: bool,
    /// skip objective groups whose Lagrange start system would exceed this many paths
    pub max_paths: usize,
}

impl Default for RealDimOptions {
    fn default() -> Self {
        RealDimOptions { full_loop: false, max_paths: 100_000 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelTrace {
    pub i: usize,
    /// total degree of each objective tried at this level
    pub g_degrees: Vec<u64>,
    pub limit_points: usize,
    pub smooth_points: usize,
    pub elapsed_ms: u128,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RealDimRun {
    pub dimension: i64,
    pub seed: u64,
    pub a: Vec<Vec<f64>>,
    pub xi: [f64; 2],
    pub complex_dimension: Option<usize>,
    pub trace: Vec<LevelTrace>,
    /// smooth points at the answering level, in the input coordinates
    pub witnesses: Vec<SmoothPoint>,
    pub warnings: Vec<String>,
    /// how limit points were matched to components
    pub grouping: &'static str,
}

/// Orthogonal factor of the QR decomposition of a Gaussian matrix.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

fn random_slices<R: Rng>(vars: &crate::poly::Vars, n: usize, k: usize, rng: &mut R) -> Vec<Polynomial> {
    (0..k)
        .map(|_| {
            let mut l = Polynomial::constant(vars, random_complex(rng));
            for j in 0..n {
                l = &l + &Polynomial::var(vars, j).scale(random_complex(rng));
            }
            l
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComplexDimension {
    Empty,
    Dim(usize),
}

/// Top dimension of `V(system)` over the complex numbers: the largest `k`
/// for which `k` generic hyperplanes meet the variety, tested on a random
/// square-up of the equations.
pub fn complex_dimension(system: &PolySystem, seed: u64, cfg: &Config) -> Result<ComplexDimension, RealDimError> {
    let n = system.nvars();
    let s = system.len();
    if s == 0 {
        return Ok(ComplexDimension::Dim(n));
    }
    let mut rng = rng_from_seed(seed ^ 0xd1_3e57);
    let lowest = n.saturating_sub(s);
    let vars = system.vars();
    let cs_full = CompiledSystem::new(system.polys(), n);
    let scale = system.polys().iter().map(|p| p.max_abs_coeff()).fold(0.0, f64::max);
    let deg = system.degrees().into_iter().max().unwrap_or(1) as i32;
    for k in (lowest..n).rev() {
        let c = n - k;
        let mut polys: Vec<Polynomial> = (0..c)
            .map(|_| {
                system.polys().iter().fold(Polynomial::zero(vars), |acc, f| &acc + &f.scale(random_complex(&mut rng)))
            })
            .collect();
        polys.extend(random_slices(vars, n, k, &mut rng));
        let sq = PolySystem::new(vars, polys)?;
        if sq.degrees().contains(&0) {
            continue;
        }
        let out = solve_square(&sq, rng.random(), &cfg.solver)?;
        let hit = out.roots.iter().any(|r| {
            let v = cs_full.eval_vec(&r.point);
            norm(&v) <= 1e-6 * scale * (1.0 + norm(&r.point).powi(deg))
        });
        if hit {
            return Ok(ComplexDimension::Dim(k));
        }
    }
    Ok(ComplexDimension::Empty)
}

/// Number of start paths of the bihomogeneous Lagrange start system for
/// `base` (over x and trailing params) and objective `g`.
fn lagrange_path_count(base: &PolySystem, g: &Polynomial) -> usize {
    let np = base.params().len();
    let n = base.nvars() - np;
    let k = base.len();
    let xs: Vec<usize> = (0..n).collect();
    let gd = g.degree_in(&xs).saturating_sub(1);
    let row_deg = base.polys().iter().map(|f| f.degree_in(&xs).saturating_sub(1)).max().unwrap_or(0).max(gd) as usize;
    let base_prod: usize = base.polys().iter().map(|f| f.degree_in(&xs) as usize).product();
    // choose which n - k Lagrange rows take x factors
    let binom = (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
    base_prod.saturating_mul(binom).saturating_mul(row_deg.saturating_pow((n - k) as u32))
}

struct Level {
    points: Vec<SmoothPoint>,
    trace: LevelTrace,
}

/// Limits whose imaginary part is below this are refined onto the real
/// variety before the strict realness and smoothness tests.
const NEAR_REAL: f64 = 1e-3;

/// Real parts of near-real limits, with whether they already pass `real_tol`.
fn real_candidates(limits: &[Vec<C64>], real_tol: f64) -> Vec<(Vec<f64>, bool)> {
    limits
        .iter()
        .filter_map(|p| {
            let im = p.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            let x: Vec<f64> = p.iter().map(|z| z.re).collect();
            if im <= real_tol {
                Some((x, true))
            } else if im <= NEAR_REAL * (1.0 + norm(p)) {
                Some((x, false))
            } else {
                None
            }
        })
        .collect()
}

/// Moves an inaccurate limit onto `V(system)` by Gauss-Newton on a
/// deflation built with a loose rank tolerance. Endgame limits of high
/// cycle number are only accurate to about 1e-5.
fn sharpen(system: &PolySystem, x: &[f64], dim: usize, cfg: &Config) -> Option<Vec<f64>> {
    let z: Vec<C64> = x.iter().map(|&r| C64::new(r, 0.0)).collect();
    let loose = DeflationConfig { rank_tol: 1e-3, ..cfg.deflation.clone() };
    let refined = multiplicity_one_refine(system, &z, dim, &loose).ok()?;
    let cs = CompiledSystem::new(refined.system.polys(), system.nvars());
    let out = newton_refine_compiled(&cs, &z, 30, cfg.tol.rank_tol);
    let moved: f64 = out.point.iter().zip(&z).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    if !(moved <= NEAR_REAL * (1.0 + norm(&z))) {
        return None;
    }
    if out.point.iter().any(|v| v.im.abs() > cfg.tol.real_tol) {
        return None;
    }
    Some(out.point.iter().map(|v| v.re).collect())
}

/// Certifies near-real candidates against the rotated input system.
fn certified(
    cands: &[(Vec<f64>, bool)],
    rotated: &PolySystem,
    g: Option<&Polynomial>,
    member: Option<&PolySystem>,
    dim: usize,
    cfg: &Config,
    hint: Option<usize>,
) -> Vec<SmoothPoint> {
    let mut out: Vec<SmoothPoint> = Vec::new();
    let near = |a: &[f64], b: &[f64], tol: f64| {
        let d: f64 = a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        d <= tol * (1.0 + b.iter().map(|v| v * v).sum::<f64>().sqrt())
    };
    for (x, exact) in cands {
        if out.iter().any(|p| near(x, &p.x, NEAR_REAL)) {
            continue;
        }
        let mut cert = None;
        if *exact {
            let c = certify(rotated, x, dim, cfg);
            if c.passed {
                cert = Some(c);
            }
        }
        if cert.is_none() {
            if let Some(y) = sharpen(rotated, x, dim, cfg) {
                let c = certify(rotated, &y, dim, cfg);
                if c.passed {
                    cert = Some(c);
                }
            }
        }
        let Some(cert) = cert else { continue };
        if let Some(w) = member {
            let z: Vec<C64> = cert.point.iter().map(|&r| C64::new(r, 0.0)).collect();
            let scale: f64 = w.polys().iter().map(|p| p.max_abs_coeff()).fold(1.0, f64::max);
            if w.residual(&z).unwrap_or(f64::INFINITY) > 1e-6 * scale * (1.0 + norm(&z)) {
                continue;
            }
        }
        let gv = match g {
            Some(g) => {
                let v = g.eval_real(&cert.point).map(|v| v.re).unwrap_or(0.0);
                if !(v.abs() > cfg.tol.g_zero_tol * (1.0 + g.max_abs_coeff())) {
                    continue;
                }
                v
            }
            None => 1.0,
        };
        if !out.iter().any(|p| near(&cert.point, &p.x, cfg.tol.dedup_tol)) {
            out.push(SmoothPoint { x: cert.point, g_value: gv, rank: cert.rank, residual: cert.residual, component_hint: hint });
        }
    }
    out
}

/// Limit points of the polar family cut by `i - 1` generic slices.
fn polar_witness_limits(
    family: &PolySystem,
    n: usize,
    i: usize,
    seed: u64,
    cfg: &Config,
) -> Result<(Vec<Vec<C64>>, Vec<String>), RealDimError> {
    let mut rng = rng_from_seed(seed ^ 0x511ce);
    let vars = family.vars();
    let mut polys = family.polys().to_vec();
    polys.extend(random_slices(vars, n, i - 1, &mut rng));
    let fam = PolySystem::new(vars, polys)?.with_params(vec![n]);
    // solve at t = 1, then follow to t = 0
    let h = Homotopy::parameter(fam.clone()).map_err(SolveError::from)?;
    let at_one = h.at(1.0);
    let solved = solve_square(&at_one, seed, &cfg.solver)?;
    let starts: Vec<Vec<C64>> = solved
        .roots
        .iter()
        .filter(|r| r.multiplicity == 1 && r.residual <= 1e-10 * (1.0 + norm(&r.point)))
        .map(|r| r.point.clone())
        .collect();
    let mut notes = Vec::new();
    if starts.len() < solved.roots.len() {
        notes.push(format!("{} repeated or inaccurate slice points at t = 1 skipped", solved.roots.len() - starts.len()));
    }
    let (paths, limits) = limit_points(&h, &starts, n, &cfg.solver)?;
    let failed = paths.iter().filter(|p| p.status == PathStatus::PathFailure).count();
    if failed > 0 {
        notes.push(format!("{failed} witness paths failed"));
    }
    Ok((limits.into_iter().map(|r| r.point).collect(), notes))
}

fn run_level(
    i: usize,
    f: &Polynomial,
    rotated: &PolySystem,
    user_g: Option<&Polynomial>,
    xi: C64,
    seed: u64,
    cfg: &Config,
    opts: &RealDimOptions,
) -> Result<Level, RealDimError> {
    let start = Instant::now();
    let n = f.nvars();
    let d = i - 1;
    let family = polar_system(f, i, Some(xi))?;
    let level_seed = seed.wrapping_add(1000 * i as u64);
    let mut trace = LevelTrace { i, g_degrees: vec![], limit_points: 0, smooth_points: 0, elapsed_ms: 0, notes: vec![] };
    let mut points = Vec::new();

    if i == 1 {
        // the limit variety is finite; every limit point is a candidate and g = 1
        let (limits, notes) = polar_witness_limits(&family, n, 1, level_seed, cfg)?;
        trace.notes.extend(notes);
        trace.limit_points = limits.len();
        trace.g_degrees.push(0);
        points = certified(&real_candidates(&limits, cfg.tol.real_tol), rotated, None, None, 0, cfg, None);
    } else if let Some(g) = user_g {
        trace.g_degrees.push(g.total_degree());
        let count = lagrange_path_count(&family, g);
        if count > opts.max_paths {
            trace.notes.push(format!("skipped: {count} paths exceed the budget of {}", opts.max_paths));
        } else {
            let (limits, _, _, notes) = lagrange_limits(&family, g, level_seed, cfg)?;
            trace.notes.extend(notes);
            trace.limit_points = limits.len();
            let lim: Vec<Vec<C64>> = limits.into_iter().map(|r| r.point).collect();
            points = certified(&real_candidates(&lim, cfg.tol.real_tol), rotated, Some(g), None, d, cfg, None);
        }
    } else {
        // a generic linear objective is cheap and often already reaches a
        // smooth point; anything it returns is certified like the rest
        let mut rng = rng_from_seed(level_seed ^ 0x11ea);
        let mut lin = Polynomial::zero(family.vars());
        for k in 0..n {
            let c: f64 = rng.sample(StandardNormal);
            lin = &lin + &Polynomial::var(family.vars(), k).scale(C64::new(c, 0.0));
        }
        trace.g_degrees.push(1);
        let (limits, _, _, notes) = lagrange_limits(&family, &lin, level_seed, cfg)?;
        trace.notes.extend(notes);
        trace.limit_points = limits.len();
        let lim: Vec<Vec<C64>> = limits.into_iter().map(|r| r.point).collect();
        points = certified(&real_candidates(&lim, cfg.tol.real_tol), rotated, None, None, d, cfg, None);
        if !points.is_empty() {
            trace.notes.push("linear objective reached smooth points".into());
            trace.smooth_points = points.len();
            trace.elapsed_ms = start.elapsed().as_millis();
            return Ok(Level { points, trace });
        }
        let (wpoints, notes) = polar_witness_limits(&family, n, i, level_seed, cfg)?;
        trace.notes.extend(notes);
        let (groups, failures) = group_by_signature(&wpoints, &family, d, &cfg.deflation);
        if !failures.is_empty() {
            trace.notes.push(format!("{} witness points failed to deflate: {}", failures.len(), failures[0].1));
        }
        for (gi, group) in groups.iter().enumerate() {
            let Some(g) = &group.objective else {
                trace.notes.push(format!("group {gi}: no nonvanishing minor"));
                continue;
            };
            if g.is_constant() {
                trace.notes.push(format!("group {gi}: constant minor, no critical structure"));
                continue;
            }
            trace.g_degrees.push(g.total_degree());
            let count = lagrange_path_count(&family, g);
            if count > opts.max_paths {
                trace.notes.push(format!("group {gi}: {count} paths exceed the budget of {}", opts.max_paths));
                continue;
            }
            let (limits, _, _, notes) = lagrange_limits(&family, g, level_seed.wrapping_add(gi as u64), cfg)?;
            trace.notes.extend(notes);
            trace.limit_points += limits.len();
            let lim: Vec<Vec<C64>> = limits.into_iter().map(|r| r.point).collect();
            let found = certified(
                &real_candidates(&lim, cfg.tol.real_tol),
                rotated,
                Some(g),
                Some(&group.witness),
                d,
                cfg,
                Some(gi),
            );
            points.extend(found);
        }
    }
    trace.smooth_points = points.len();
    trace.elapsed_ms = start.elapsed().as_millis();
    Ok(Level { points, trace })
}

/// Real dimension of `V(system) ∩ R^n`, assumed compact. `g`, when given,
/// is used as the objective at every level above the point level instead
/// of the automatically constructed minor objectives.
pub fn real_dimension(
    system: &PolySystem,
    g: Option<&Polynomial>,
    seed: u64,
    cfg: &Config,
    opts: &RealDimOptions,
) -> Result<RealDimRun, RealDimError> {
    let n = system.nvars();
    if n < 2 {
        return Err(RealDimError::TooFewVariables(n));
    }
    if system.is_empty() {
        return Err(RealDimError::NoEquations);
    }
    let mut rng = rng_from_seed(seed);
    let a = random_orthogonal(n, &mut rng);
    let xi = random_unit(&mut rng);
    let f = sum_of_squares_pullback(system, &a)?;
    let f = f.scale(1.0 / f.max_abs_coeff());
    let rotated_polys: Vec<Polynomial> =
        system.polys().iter().map(|p| p.compose_linear(&a)).collect::<Result<_, _>>()?;
    let rotated = PolySystem::new(system.vars(), rotated_polys)?;
    let g_rot = match g {
        Some(g) => Some(g.embed(system.vars())?.compose_linear(&a)?),
        None => None,
    };
    let mut warnings = Vec::new();
    let cdim = if opts.full_loop { None } else { Some(complex_dimension(system, seed, cfg)?) };
    let top = match &cdim {
        Some(ComplexDimension::Empty) => 0,
        Some(ComplexDimension::Dim(k)) => (*k + 1).min(n),
        None => n,
    };
    let mut trace = Vec::new();
    let mut result = -1;
    let mut witnesses = Vec::new();
    for i in (1..=top).rev() {
        let level = run_level(i, &f, &rotated, g_rot.as_ref(), xi, seed, cfg, opts)?;
        trace.push(level.trace);
        if !level.points.is_empty() {
            result = i as i64 - 1;
            witnesses = level
                .points
                .into_iter()
                .map(|mut p| {
                    let y = &a * nalgebra::DVector::from_vec(p.x.clone());
                    p.x = y.iter().copied().collect();
                    p
                })
                .collect();
            break;
        }
    }
    if result == -1 && matches!(cdim, Some(ComplexDimension::Dim(_))) {
        warnings.push("no smooth real point found at any level; the real set is empty or not compact".into());
    }
    Ok(RealDimRun {
        dimension: result,
        seed,
        a: a.row_iter().map(|r| r.iter().copied().collect()).collect(),
        xi: [xi.re, xi.im],
        complex_dimension: cdim.map(|c| match c {
            ComplexDimension::Empty => usize::MAX,
            ComplexDimension::Dim(k) => k,
        }),
        trace,
        witnesses,
        warnings,
        grouping: "deflation rank signature with witness-system residual membership (heuristic)",
    })
}

/// Smooth real points of `V(system)` at its top dimension. Without `g`, one
/// minor objective is built per deflation-signature group of witness points.
pub fn smooth_sample(
    system: &PolySystem,
    g: Option<&Polynomial>,
    method: Method,
    seed: u64,
    cfg: &Config,
) -> Result<SmoothPointReport, RealDimError> {
    let n = system.nvars();
    let run = |base: &PolySystem, g: &Polynomial, seed: u64| -> Result<SmoothPointReport, CriticalError> {
        match method {
            Method::Unperturbed => critical_points_unperturbed(base, g, seed, cfg),
            Method::Perturbed => critical_points_perturbed(base, g, None, seed, cfg),
        }
    };
    if let Some(g) = g {
        return Ok(run(system, &g.embed(system.vars())?, seed)?);
    }
    let d = match complex_dimension(system, seed, cfg)? {
        ComplexDimension::Empty => {
            return Ok(SmoothPointReport {
                points: vec![],
                seed,
                method,
                xi: None,
                gamma: [1.0, 0.0],
                perturbation_trace: "none".into(),
                paths: 0,
                candidates: 0,
                warnings: vec!["variety is empty".into()],
            })
        }
        ComplexDimension::Dim(k) => k,
    };
    let codim = n - d;
    let mut rng = rng_from_seed(seed ^ 0xba5e);
    let vars = system.vars();
    // a complete intersection containing V, cut down to witness points
    let base = if system.len() == codim {
        system.clone()
    } else {
        let polys = (0..codim)
            .map(|_| {
                system.polys().iter().fold(Polynomial::zero(vars), |acc, f| {
                    &acc + &f.scale(rng.sample::<f64, _>(StandardNormal))
                })
            })
            .collect();
        PolySystem::new(vars, polys)?
    };
    let mut polys = base.polys().to_vec();
    polys.extend(random_slices(vars, n, d, &mut rng));
    let sq = PolySystem::new(vars, polys)?;
    let solved = solve_square(&sq, seed, &cfg.solver)?;
    let on_v: Vec<Vec<C64>> = solved
        .roots
        .iter()
        .filter(|r| system.residual(&r.point).map(|v| v <= 1e-8 * (1.0 + norm(&r.point))).unwrap_or(false))
        .map(|r| r.point.clone())
        .collect();
    let mut objectives: Vec<(Vec<usize>, Polynomial)> = Vec::new();
    let mut warnings = Vec::new();
    for p in &on_v {
        match multiplicity_one_refine(system, p, d, &cfg.deflation) {
            Ok(refined) => {
                if objectives.iter().any(|(sig, _)| *sig == refined.ranks) {
                    continue;
                }
                match minor_g(&refined.system, p, codim) {
                    Ok(g) if !g.is_constant() => objectives.push((refined.ranks, g)),
                    Ok(_) => warnings.push("constant minor objective skipped".into()),
                    Err(e) => warnings.push(e.to_string()),
                }
            }
            Err(e) => warnings.push(e.to_string()),
        }
    }
    let mut merged: Option<SmoothPointReport> = None;
    for (k, (_, g)) in objectives.iter().enumerate() {
        let mut rep = run(&base, g, seed.wrapping_add(k as u64))?;
        // certify against the input, not the squared-up base
        rep.points.retain(|p| certify(system, &p.x, d, cfg).passed);
        for p in rep.points.iter_mut() {
            p.component_hint = Some(k);
        }
        match merged.as_mut() {
            None => merged = Some(rep),
            Some(m) => {
                m.points.extend(rep.points);
                m.paths += rep.paths;
                m.candidates += rep.candidates;
                m.warnings.extend(rep.warnings);
            }
        }
    }
    let mut rep = merged.unwrap_or(SmoothPointReport {
        points: vec![],
        seed,
        method,
        xi: None,
        gamma: [solved.gamma.re, solved.gamma.im],
        perturbation_trace: "none".into(),
        paths: solved.paths.len(),
        candidates: 0,
        warnings: vec![],
    });
    rep.warnings.extend(warnings);
    rep.warnings.push("objective built from Jacobian minors per deflation-signature group (heuristic grouping)".into());
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, Vars};

    fn sys(vars: &[&str], eqs: &[&str]) -> PolySystem {
        let v = Vars::new(vars.iter().copied());
        PolySystem::new(&v, eqs.iter().map(|e| parse_polynomial(e, &v).unwrap()).collect()).unwrap()
    }

    #[test]
    fn probe_dimensions() {
        let cfg = Config::default();
        let s = sys(&["x", "y", "z", "w"], &["x^2 - y^2*z", "x^2 + y^2 + z^2 + w^2 - 4"]);
        assert_eq!(complex_dimension(&s, 1, &cfg).unwrap(), ComplexDimension::Dim(2));
        let s = sys(&["x", "y"], &["x^2 + y^2", "x"]);
        assert_eq!(complex_dimension(&s, 1, &cfg).unwrap(), ComplexDimension::Dim(0));
        let s = sys(&["x", "y"], &["x^2 + 1", "x - 2"]);
        assert_eq!(complex_dimension(&s, 1, &cfg).unwrap(), ComplexDimension::Empty);
    }

    #[test]
    fn circle_dimension() {
        let s = sys(&["x", "y"], &["x^2 + y^2 - 1"]);
        let run = real_dimension(&s, None, 3, &Config::default(), &RealDimOptions::default()).unwrap();
        assert_eq!(run.dimension, 1, "{run:?}");
    }

    #[test]
    fn isolated_origin() {
        let s = sys(&["x", "y"], &["x^2 + y^2"]);
        let run = real_dimension(&s, None, 4, &Config::default(), &RealDimOptions::default()).unwrap();
        assert_eq!(run.dimension, 0, "{run:?}");
    }

    #[test]
    fn empty_real_set() {
        let s = sys(&["x", "y"], &["x^2 + 1", "y"]);
        let run = real_dimension(&s, None, 5, &Config::default(), &RealDimOptions::default()).unwrap();
        assert_eq!(run.dimension, -1, "{run:?}");
    }
}
