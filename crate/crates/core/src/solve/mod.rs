//! Homotopy continuation: start systems, path tracking, endgame limits,
//! Newton refinement.

mod homotopy;
mod newton;
mod start;
mod tracker;

pub use homotopy::{Homotopy, HomotopyError, StartEval};
pub use newton::{newton_refine, NewtonOutcome};
pub(crate) use newton::newton_refine_compiled;
pub use start::{linear_product_start, random_complex, total_degree_start, Affine, ProductSystem};
pub use tracker::{track, track_to_limit, TrackError};

pub use crate::linalg::numerical_rank;
use crate::linalg::{dist, norm};
use crate::poly::{CompiledSystem, PolyError, PolySystem, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("system is not square: {equations} equations in {unknowns} unknowns")]
    NotSquare { equations: usize, unknowns: usize },
    #[error("equation {0} is constant")]
    ConstantEquation(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error(transparent)]
    Track(#[from] TrackError),
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverConfig {
    pub step_init: f64,
    pub step_min: f64,
    pub step_max: f64,
    /// consecutive successful steps before the step size doubles
    pub growth_after: usize,
    pub corrector_iters: usize,
    pub corrector_tol: f64,
    pub start_tol: f64,
    pub divergence_bound: f64,
    pub max_steps: usize,
    /// endgame begins here
    pub t_min: f64,
    /// extrapolation window; also the number of samples when `endgame_tol` is 0
    pub endgame_samples: usize,
    /// sampling continues until two successive windows agree to this
    pub endgame_tol: f64,
    pub endgame_max_samples: usize,
    pub max_cycle: usize,
    pub dedup_tol: f64,
    pub rank_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step_init: 0.05,
            step_min: 1e-14,
            step_max: 0.25,
            growth_after: 3,
            corrector_iters: 4,
            corrector_tol: 1e-6,
            start_tol: 1e-10,
            divergence_bound: 1e8,
            max_steps: 20_000,
            t_min: 1e-4,
            endgame_samples: 5,
            endgame_tol: 1e-10,
            endgame_max_samples: 24,
            max_cycle: 8,
            dedup_tol: 1e-6,
            rank_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStatus {
    Converged,
    Diverged,
    PathFailure,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathResult {
    #[serde(serialize_with = "crate::io::ser_cvec")]
    pub endpoint: Vec<C64>,
    pub status: PathStatus,
    pub final_t: f64,
    pub residual: f64,
    pub cond_estimate: f64,
    /// estimated cycle number of the path at its endpoint
    pub winding_hint: usize,
    /// predictor-corrector steps attempted
    pub steps: usize,
}

/// A deduplicated endpoint.
#[derive(Debug, Clone, Serialize)]
pub struct Root {
    #[serde(serialize_with = "crate::io::ser_cvec")]
    pub point: Vec<C64>,
    pub multiplicity: usize,
    pub residual: f64,
    pub singular: bool,
}

impl Root {
    pub fn max_imag(&self) -> f64 {
        self.point.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.point.iter().map(|z| z.re).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SquareSolve {
    pub gamma: C64,
    pub start_count: usize,
    pub paths: Vec<PathResult>,
    pub roots: Vec<Root>,
}

/// How the start system of a blend homotopy is built.
#[derive(Debug, Clone)]
pub enum StartKind {
    TotalDegree,
    /// linear-product start over the given partition of the variables
    LinearProduct(Vec<Vec<usize>>),
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
}

/// Solves a square system by a total-degree homotopy with `gamma` drawn from `seed`.
pub fn solve_square(target: &PolySystem, seed: u64, cfg: &SolverConfig) -> Result<SquareSolve, SolveError> {
    solve_square_with(target, &StartKind::TotalDegree, seed, cfg)
}

pub fn solve_square_with(
    target: &PolySystem,
    kind: &StartKind,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<SquareSolve, SolveError> {
    let mut rng = rng_from_seed(seed);
    let gamma = random_unit(&mut rng);
    let (h, roots) = match kind {
        StartKind::TotalDegree => {
            let (start, roots) = total_degree_start(target)?;
            (Homotopy::blend(start, target.clone(), gamma)?, roots)
        }
        StartKind::LinearProduct(groups) => {
            let (start, factored, roots) = start::linear_product_parts(target, groups, &mut rng)?;
            (Homotopy::blend_product(start, factored, target.clone(), gamma)?, roots)
        }
    };
    let n = target.nvars();
    let paths = roots
        .par_iter()
        .map(|x0| track_or_fail(&h, x0, n, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let compiled = CompiledSystem::new(target.polys(), n);
    let finished: Vec<(Vec<C64>, f64, bool)> = paths
        .par_iter()
        .filter(|p| p.status == PathStatus::Converged)
        .map(|p| {
            let out = newton_refine_compiled(&compiled, &p.endpoint, 8, cfg.rank_tol);
            (out.point, out.residual, out.singular || p.winding_hint > 1)
        })
        .collect();
    let roots = cluster(finished, n, cfg.dedup_tol);
    Ok(SquareSolve { gamma, start_count: paths.len(), paths, roots })
}

/// Tracks one path; an inaccurate start counts as a failed path rather
/// than aborting the whole batch.
fn track_or_fail(h: &Homotopy, x0: &[C64], proj: usize, cfg: &SolverConfig) -> Result<PathResult, SolveError> {
    match track_to_limit(h, x0, proj, cfg) {
        Err(TrackError::BadStart(residual)) => Ok(PathResult {
            endpoint: x0.to_vec(),
            status: PathStatus::PathFailure,
            final_t: 1.0,
            residual,
            cond_estimate: 0.0,
            winding_hint: 1,
            steps: 0,
        }),
        r => Ok(r?),
    }
}

/// Groups points whose first `proj` coordinates agree within `tol (1 + |a|)`.
/// Each cluster is represented by the coordinate mean of its members.
pub(crate) fn cluster(points: Vec<(Vec<C64>, f64, bool)>, proj: usize, tol: f64) -> Vec<Root> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..points.len() {
        let a = &points[i].0[..proj];
        let hit = groups.iter().position(|g| {
            g.iter().any(|&j| dist(a, &points[j].0[..proj]) <= tol * (1.0 + norm(a)))
        });
        match hit {
            Some(k) => groups[k].push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let m = g.len();
            let dim = points[g[0]].0.len();
            let mut mean = vec![C64::default(); dim];
            for &j in &g {
                for (acc, v) in mean.iter_mut().zip(&points[j].0) {
                    *acc += v / m as f64;
                }
            }
            Root {
                point: mean,
                multiplicity: m,
                residual: g.iter().map(|&j| points[j].1).fold(0.0, f64::max),
                singular: m > 1 || g.iter().any(|&j| points[j].2),
            }
        })
        .collect()
}

/// Limits as `t -> 0` of the paths of a parameter homotopy through `starts`
/// (roots at `t = 1`), deduplicated on the first `proj` coordinates.
/// Diverging paths are dropped.
pub fn limit_points(
    h: &Homotopy,
    starts: &[Vec<C64>],
    proj: usize,
    cfg: &SolverConfig,
) -> Result<(Vec<PathResult>, Vec<Root>), SolveError> {
    let paths = starts
        .par_iter()
        .map(|x0| track_or_fail(h, x0, proj, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let finished = paths
        .iter()
        .filter(|p| p.status == PathStatus::Converged)
        .map(|p| (p.endpoint.clone(), p.residual, p.winding_hint > 1))
        .collect();
    let limits = cluster(finished, proj, cfg.dedup_tol)
        .into_iter()
        .map(|mut r| {
            r.point.truncate(proj);
            r
        })
        .collect();
    Ok((paths, limits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, Vars};

    fn sys(vars: &[&str], eqs: &[&str]) -> PolySystem {
        let v = Vars::new(vars.iter().copied());
        PolySystem::new(&v, eqs.iter().map(|e| parse_polynomial(e, &v).unwrap()).collect()).unwrap()
    }

    fn c(r: f64) -> C64 {
        C64::new(r, 0.0)
    }

    fn has_point(roots: &[Root], p: &[C64], tol: f64) -> bool {
        roots.iter().any(|r| dist(&r.point, p) < tol)
    }

    #[test]
    fn parabola_line() {
        let s = sys(&["x", "y"], &["x^2 - 1", "y - x"]);
        let out = solve_square(&s, 7, &SolverConfig::default()).unwrap();
        assert_eq!(out.roots.len(), 2);
        assert!(has_point(&out.roots, &[c(1.0), c(1.0)], 1e-12));
        assert!(has_point(&out.roots, &[c(-1.0), c(-1.0)], 1e-12));
    }

    #[test]
    fn imaginary_roots() {
        let s = sys(&["x"], &["x^2 + 1"]);
        let out = solve_square(&s, 3, &SolverConfig::default()).unwrap();
        assert_eq!(out.roots.len(), 2);
        assert!(has_point(&out.roots, &[C64::new(0.0, 1.0)], 1e-12));
        assert!(has_point(&out.roots, &[C64::new(0.0, -1.0)], 1e-12));
    }

    #[test]
    fn circle_lagrange() {
        let s = sys(&["x", "y", "l"], &["1 + 2*l*x", "2*l*y", "x^2 + y^2 - 1"]);
        let out = solve_square(&s, 11, &SolverConfig::default()).unwrap();
        assert_eq!(out.roots.len(), 2);
        assert!(has_point(&out.roots, &[c(1.0), c(0.0), c(-0.5)], 1e-10));
        assert!(has_point(&out.roots, &[c(-1.0), c(0.0), c(0.5)], 1e-10));
    }

    #[test]
    fn blend_path_one_to_two() {
        let v = Vars::new(["x"]);
        let start = sys(&["x"], &["x^2 - 1"]);
        let target = sys(&["x"], &["x^2 - 4"]);
        let h = Homotopy::blend(start, target, C64::from_polar(1.0, 0.7)).unwrap();
        let r = track(&h, &[c(1.0)], 0.0, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, PathStatus::Converged);
        assert!((r.endpoint[0] - c(2.0)).norm() < 1e-10);
        let _ = v;
    }

    #[test]
    fn bad_start_rejected() {
        let start = sys(&["x"], &["x^2 - 1"]);
        let target = sys(&["x"], &["x^2 - 4"]);
        let h = Homotopy::blend(start, target, c(1.0)).unwrap();
        assert!(matches!(track(&h, &[c(0.0)], 0.0, &SolverConfig::default()), Err(TrackError::BadStart(_))));
    }

    #[test]
    fn double_root_limit() {
        let xi = C64::from_polar(1.0, 1.3);
        let v = Vars::new(["x", "t"]);
        let f = &parse_polynomial("x^2", &v).unwrap() - &parse_polynomial("t", &v).unwrap().scale(xi);
        let h = Homotopy::parameter(PolySystem::new(&v, vec![f]).unwrap()).unwrap();
        let s = xi.sqrt();
        let (paths, limits) = limit_points(&h, &[vec![s], vec![-s]], 1, &SolverConfig::default()).unwrap();
        assert!(paths.iter().all(|p| p.status == PathStatus::Converged && p.winding_hint == 2));
        assert_eq!(limits.len(), 1);
        assert_eq!(limits[0].multiplicity, 2);
        assert!(limits[0].point[0].norm() < 1e-8);
    }

    #[test]
    fn example_point_limit() {
        // x1 x2 - t xi, x1 x2 - x1: single path (t xi, 1)
        let xi = C64::from_polar(1.0, 0.4);
        let v = Vars::new(["x1", "x2", "t"]);
        let a = &parse_polynomial("x1*x2", &v).unwrap() - &parse_polynomial("t", &v).unwrap().scale(xi);
        let b = parse_polynomial("x1*x2 - x1", &v).unwrap();
        let h = Homotopy::parameter(PolySystem::new(&v, vec![a, b]).unwrap()).unwrap();
        let (_, limits) = limit_points(&h, &[vec![xi, c(1.0)]], 2, &SolverConfig::default()).unwrap();
        assert_eq!(limits.len(), 1);
        assert!(dist(&limits[0].point, &[c(0.0), c(1.0)]) < 1e-10);
    }

    #[test]
    fn no_real_limits() {
        let xi = C64::from_polar(1.0, 2.1);
        let v = Vars::new(["x", "t"]);
        let f = &parse_polynomial("x^2 + 1", &v).unwrap() - &parse_polynomial("t", &v).unwrap().scale(xi);
        let h = Homotopy::parameter(PolySystem::new(&v, vec![f]).unwrap()).unwrap();
        let r = (xi - c(1.0)).sqrt();
        let (_, limits) = limit_points(&h, &[vec![r], vec![-r]], 1, &SolverConfig::default()).unwrap();
        assert_eq!(limits.len(), 2);
        assert!(limits.iter().all(|l| l.point[0].im.abs() > 0.99));
    }
}
