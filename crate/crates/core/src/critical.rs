//! Lagrange systems for the critical points of an objective `g` on a
//! variety, and extraction of certified real smooth points from them.

use crate::config::Config;
use crate::linalg::{dist, min_norm_solve, norm, null_space, numerical_rank_floor};
use crate::polar_defl::{coefficient_scale, jacobian_at, multiplicity_one_refine, PARAM_T};
use crate::poly::{CompiledSystem, PolyError, Polynomial, PolySystem, C64};
use crate::solve::{
    limit_points, newton_refine_compiled, random_unit, rng_from_seed, solve_square_with, Homotopy, Root, SolveError,
    StartKind,
};
use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

pub const MULTIPLIER_PREFIX: &str = "_l";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriticalError {
    #[error("objective is constant; it has no critical structure")]
    ConstantObjective,
    #[error("{equations} equations over {unknowns} unknowns leave no room for a positive-dimensional set")]
    TooManyEquations { equations: usize, unknowns: usize },
    #[error("the Lagrange system has a positive-dimensional solution set near {near:?}; choose a different objective")]
    DegenerateObjective { near: Vec<f64> },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// `{dg/dx_i + sum_j l_j df_j/dx_i : i = 1..n} ∪ base`.
#[derive(Debug, Clone)]
pub struct LagrangeSystem {
    pub base: PolySystem,
    pub objective: Polynomial,
    /// number of x-variables
    pub n: usize,
    pub multipliers: usize,
    /// over `(x, l, params)`; parameters keep their trailing position
    pub combined: PolySystem,
}

impl LagrangeSystem {
    /// Variable groups `[x, l]` for a linear-product start.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        vec![(0..self.n).collect(), (self.n..self.n + self.multipliers).collect()]
    }
}

/// Builds the Lagrange system of `g` on `base`. Parameters of `base` must
/// be its trailing registry variables; `g` is matched to `base` by name.
pub fn build_lagrange(base: &PolySystem, g: &Polynomial) -> Result<LagrangeSystem, CriticalError> {
    let np = base.params().len();
    let n = base.nvars() - np;
    debug_assert!(base.params().iter().all(|&p| p >= n));
    let k = base.len();
    if k > n {
        return Err(CriticalError::TooManyEquations { equations: k, unknowns: n });
    }
    let names = base.vars().names();
    let mut all: Vec<String> = names[..n].to_vec();
    all.extend((1..=k).map(|j| format!("{MULTIPLIER_PREFIX}{j}")));
    all.extend(names[n..].iter().cloned());
    let vars = crate::poly::Vars::new(all);
    let ge = g.embed(&vars)?;
    if (0..n).all(|i| ge.diff(i).is_zero()) {
        return Err(CriticalError::ConstantObjective);
    }
    let base_e: Vec<Polynomial> = base.polys().iter().map(|p| p.embed(&vars)).collect::<Result<_, _>>()?;
    let mut polys = Vec::with_capacity(n + k);
    for i in 0..n {
        let mut eq = ge.diff(i);
        for (j, f) in base_e.iter().enumerate() {
            let d = f.diff(i);
            if !d.is_zero() {
                eq = &eq + &(&Polynomial::var(&vars, n + j) * &d);
            }
        }
        polys.push(eq);
    }
    polys.extend(base_e);
    let params = (0..np).map(|p| n + k + p).collect();
    let combined = PolySystem::new(&vars, polys)?.with_params(params);
    Ok(LagrangeSystem { base: base.clone(), objective: g.clone(), n, multipliers: k, combined })
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothPoint {
    pub x: Vec<f64>,
    pub g_value: f64,
    pub rank: usize,
    pub residual: f64,
    pub component_hint: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Unperturbed,
    Perturbed,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothPointReport {
    pub points: Vec<SmoothPoint>,
    pub seed: u64,
    pub method: Method,
    /// `[re, im]` of the perturbation direction, when used
    pub xi: Option<[f64; 2]>,
    pub gamma: [f64; 2],
    pub perturbation_trace: String,
    pub paths: usize,
    pub candidates: usize,
    pub warnings: Vec<String>,
}

/// Outcome of the smoothness certificate at a real point.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub point: Vec<f64>,
    pub residual: f64,
    pub rank: usize,
    pub expected_rank: usize,
    pub passed: bool,
    /// multiplicity-one system the rank was measured on
    pub system: Option<PolySystem>,
}

/// Checks that `p` is a smooth point of local dimension `dim` of `V(system)`:
/// deflate to a multiplicity-one system, polish, and require base residual
/// at most `residual_tol` and Jacobian rank `n - dim`.
pub fn certify(system: &PolySystem, p: &[f64], dim: usize, cfg: &Config) -> Certificate {
    let n = system.nvars();
    let expected_rank = n - dim;
    let z: Vec<C64> = p.iter().map(|&r| C64::new(r, 0.0)).collect();
    let fail = |point: Vec<f64>, residual: f64, rank: usize| Certificate {
        point,
        residual,
        rank,
        expected_rank,
        passed: false,
        system: None,
    };
    let base_res = system.residual(&z).unwrap_or(f64::INFINITY);
    if !(base_res <= 1e-4 * (1.0 + norm(&z))) {
        return fail(p.to_vec(), base_res, 0);
    }
    let refined = match multiplicity_one_refine(system, &z, dim, &cfg.deflation) {
        Ok(r) => r.system,
        Err(_) => {
            let r = numerical_rank_floor(&jacobian_at(system, &z), cfg.deflation.rank_tol, coefficient_scale(system));
            return fail(p.to_vec(), base_res, r);
        }
    };
    let cs = CompiledSystem::new(refined.polys(), n);
    let polished = newton_refine_compiled(&cs, &z, 12, cfg.tol.rank_tol);
    let moved = dist(&polished.point, &z);
    let q: Vec<C64> = if moved <= 1e-5 * (1.0 + norm(&z)) { polished.point } else { z };
    let point: Vec<f64> = q.iter().map(|v| v.re).collect();
    let residual = system.residual(&q).unwrap_or(f64::INFINITY);
    let rank = numerical_rank_floor(&jacobian_at(&refined, &q), cfg.tol.rank_tol, coefficient_scale(&refined));
    let passed = residual <= cfg.tol.residual_tol * (1.0 + norm(&q)) && rank == expected_rank;
    Certificate { point, residual, rank, expected_rank, passed, system: Some(refined) }
}

fn g_threshold(g: &Polynomial, cfg: &Config) -> f64 {
    cfg.tol.g_zero_tol * (1.0 + g.max_abs_coeff())
}

/// Whether a singular root lies on a curve of solutions: step along a
/// Jacobian null direction and pull back with minimum-norm Newton.
fn on_continuum(cs: &CompiledSystem, root: &[C64]) -> bool {
    let m = cs.len();
    let n = cs.nvars();
    let mut vals = vec![C64::default(); m];
    let mut jac = nalgebra::DMatrix::zeros(m, n);
    cs.eval_jac(root, &mut vals, &mut jac);
    let ns = null_space(&jac, 1e-6);
    if ns.ncols() == 0 {
        return false;
    }
    let h = 1e-3 * (1.0 + norm(root));
    let mut x: Vec<C64> = root.iter().enumerate().map(|(i, r)| r + ns[(i, 0)] * h).collect();
    for _ in 0..30 {
        cs.eval_jac(&x, &mut vals, &mut jac);
        if norm(&vals) <= 1e-12 * (1.0 + norm(&x)) {
            break;
        }
        let rhs = DVector::from_iterator(m, vals.iter().map(|v| -v));
        let Some(dx) = min_norm_solve(&jac, &rhs) else { return false };
        for (a, d) in x.iter_mut().zip(dx.iter()) {
            *a += d;
        }
    }
    let res = norm(&cs.eval_vec(&x));
    res <= 1e-10 * (1.0 + norm(&x)) && dist(&x, root) > 0.1 * h
}

/// Real, nonvanishing, certified points among candidate x-vectors.
fn extract_points(
    candidates: &[Vec<C64>],
    base: &PolySystem,
    g: &Polynomial,
    dim: usize,
    cfg: &Config,
) -> (Vec<SmoothPoint>, usize) {
    let gtol = g_threshold(g, cfg);
    let mut out: Vec<SmoothPoint> = Vec::new();
    let mut real = 0;
    for c in candidates {
        if c.iter().any(|z| z.im.abs() > cfg.tol.real_tol) {
            continue;
        }
        real += 1;
        let x: Vec<f64> = c.iter().map(|z| z.re).collect();
        let cert = certify(base, &x, dim, cfg);
        if !cert.passed {
            continue;
        }
        let gv = g.eval_real(&cert.point).map(|v| v.re).unwrap_or(0.0);
        if !(gv.abs() > gtol) {
            continue;
        }
        let dup = out.iter().any(|p| {
            let d: f64 = p.x.iter().zip(&cert.point).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            d <= cfg.tol.dedup_tol * (1.0 + cert.point.iter().map(|v| v * v).sum::<f64>().sqrt())
        });
        if !dup {
            out.push(SmoothPoint { x: cert.point, g_value: gv, rank: cert.rank, residual: cert.residual, component_hint: None });
        }
    }
    out.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap_or(std::cmp::Ordering::Equal));
    (out, real)
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Critical points of `g` on `V(base)` by solving the Lagrange system directly.
pub fn critical_points_unperturbed(
    base: &PolySystem,
    g: &Polynomial,
    seed: u64,
    cfg: &Config,
) -> Result<SmoothPointReport, CriticalError> {
    let lag = build_lagrange(base, g)?;
    let n = lag.n;
    let dim = n - lag.multipliers;
    let solved = solve_square_with(&lag.combined, &StartKind::LinearProduct(lag.groups()), seed, &cfg.solver)?;
    let cs = CompiledSystem::new(lag.combined.polys(), lag.combined.nvars());
    if let Some(r) = solved.roots.iter().find(|r| r.singular && on_continuum(&cs, &r.point)) {
        return Err(CriticalError::DegenerateObjective { near: r.point[..n].iter().map(|z| z.re).collect() });
    }
    let candidates: Vec<Vec<C64>> = solved.roots.iter().map(|r| r.point[..n].to_vec()).collect();
    let (points, real) = extract_points(&candidates, base, g, dim, cfg);
    let mut warnings = Vec::new();
    let failed = solved.paths.iter().filter(|p| p.status == crate::solve::PathStatus::PathFailure).count();
    if failed > 0 {
        warnings.push(format!("{failed} of {} paths failed", solved.paths.len()));
    }
    if real > 0 && points.is_empty() {
        warnings.push(format!("{real} real critical points rejected by the smoothness or g filter"));
    }
    Ok(SmoothPointReport {
        points,
        seed,
        method: Method::Unperturbed,
        xi: None,
        gamma: pair(solved.gamma),
        perturbation_trace: "none".into(),
        paths: solved.paths.len(),
        candidates: solved.roots.len(),
        warnings,
    })
}

/// Perturbed base `{f_j - t xi a_j}` over `(x, t)`.
pub fn perturb(base: &PolySystem, a: &[f64], xi: C64) -> Result<PolySystem, PolyError> {
    let n = base.nvars();
    let vars = base.vars().extended([PARAM_T]);
    let t = Polynomial::var(&vars, n);
    let polys = base
        .polys()
        .iter()
        .zip(a)
        .map(|(f, &aj)| Ok(&f.embed(&vars)? - &t.scale(xi * aj)))
        .collect::<Result<Vec<_>, PolyError>>()?;
    Ok(PolySystem::new(&vars, polys)?.with_params(vec![n]))
}

/// Critical points of `g` on `V(f - t xi a)` for `t > 0`, followed to `t -> 0`.
/// `family` must carry `t` as its last registry variable.
pub(crate) fn lagrange_limits(
    family: &PolySystem,
    g: &Polynomial,
    seed: u64,
    cfg: &Config,
) -> Result<(Vec<Root>, C64, usize, Vec<String>), CriticalError> {
    let lag = build_lagrange(family, g)?;
    let n = lag.n;
    let tot = lag.combined.nvars();
    let at_one = {
        let bound = lag.combined.bind(tot - 1, C64::new(1.0, 0.0));
        let vars = lag.combined.vars().prefix(tot - 1);
        let polys = bound.polys().iter().map(|p| p.truncate_vars(&vars)).collect::<Result<Vec<_>, _>>()?;
        PolySystem::new(&vars, polys)?
    };
    let solved = solve_square_with(&at_one, &StartKind::LinearProduct(lag.groups()), seed, &cfg.solver)?;
    let mut warnings = Vec::new();
    let starts: Vec<Vec<C64>> = solved
        .roots
        .iter()
        .filter(|r| r.multiplicity == 1 && r.residual <= 1e-10 * (1.0 + norm(&r.point)))
        .map(|r| r.point.clone())
        .collect();
    let skipped = solved.roots.len() - starts.len();
    if skipped > 0 {
        warnings.push(format!("{skipped} repeated or inaccurate roots at t = 1 were not followed"));
    }
    let h = Homotopy::parameter(lag.combined.clone()).map_err(SolveError::from)?;
    let (paths, limits) = limit_points(&h, &starts, n, &cfg.solver)?;
    let failed = paths.iter().filter(|p| p.status == crate::solve::PathStatus::PathFailure).count();
    if failed > 0 {
        warnings.push(format!("{failed} of {} limit paths failed", paths.len()));
    }
    Ok((limits, solved.gamma, solved.paths.len(), warnings))
}

/// Limit critical points of `g` on the perturbed varieties `V(f - t xi a)`.
/// `a` defaults to a random unit vector drawn from `seed`.
pub fn critical_points_perturbed(
    base: &PolySystem,
    g: &Polynomial,
    a: Option<&[f64]>,
    seed: u64,
    cfg: &Config,
) -> Result<SmoothPointReport, CriticalError> {
    let n = base.nvars();
    let k = base.len();
    if k > n {
        return Err(CriticalError::TooManyEquations { equations: k, unknowns: n });
    }
    let mut rng = rng_from_seed(seed ^ 0x5eed_0001);
    let xi = random_unit(&mut rng);
    let a: Vec<f64> = match a {
        Some(a) => a.to_vec(),
        None => {
            let v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
            let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter().map(|x| x / s).collect()
        }
    };
    let family = perturb(base, &a, xi)?;
    let (limits, gamma, paths, warnings) = lagrange_limits(&family, g, seed, cfg)?;
    let candidates: Vec<Vec<C64>> = limits.iter().map(|r| r.point.clone()).collect();
    let (points, _) = extract_points(&candidates, base, g, n - k, cfg);
    Ok(SmoothPointReport {
        points,
        seed,
        method: Method::Perturbed,
        xi: Some(pair(xi)),
        gamma: pair(gamma),
        perturbation_trace: format!("e = t*xi, a = {a:?}"),
        paths,
        candidates: limits.len(),
        warnings,
    })
}
