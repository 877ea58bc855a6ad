use super::homotopy::Homotopy;
use super::{PathResult, PathStatus, SolverConfig};
use crate::linalg::{dist, inverse_condition, norm, solve};
use crate::poly::C64;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackError {
    #[error("start point has residual {0:e}, not a root of H(., 1)")]
    BadStart(f64),
    #[error("start point has {got} coordinates, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("t_end = {0} is outside [0, 1)")]
    BadTarget(f64),
}

struct Workspace {
    h: Vec<C64>,
    hx: DMatrix<C64>,
    ht: Vec<C64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace { h: vec![C64::default(); n], hx: DMatrix::zeros(n, n), ht: vec![C64::default(); n] }
    }
}

enum Segment {
    Reached,
    Diverged,
    Failed,
}

/// Moving state of one path: point, parameter, current step.
struct PathState {
    x: Vec<C64>,
    t: f64,
    step: f64,
    successes: usize,
    steps_taken: usize,
}

/// Newton correction at `t`. On success returns the path tangent `dx/dt`
/// at the predicted point, which the next Euler prediction reuses.
fn newton_correct(h: &Homotopy, ws: &mut Workspace, x: &mut [C64], t: f64, cfg: &SolverConfig) -> Option<DVector<C64>> {
    let n = x.len();
    h.evaluate(x, t, &mut ws.h, &mut ws.hx, &mut ws.ht);
    let lu = ws.hx.clone().lu();
    let tangent = lu.solve(&DVector::from_iterator(n, ws.ht.iter().map(|v| -v)))?;
    if !tangent.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return None;
    }
    let mut prev = f64::INFINITY;
    let mut lu = Some(lu);
    for k in 0..cfg.corrector_iters {
        if k > 0 {
            h.evaluate(x, t, &mut ws.h, &mut ws.hx, &mut ws.ht);
            lu = Some(ws.hx.clone().lu());
        }
        let rhs = DVector::from_iterator(n, ws.h.iter().map(|v| -v));
        let dx = lu.as_ref().unwrap().solve(&rhs)?;
        let dn = dx.norm();
        if !dn.is_finite() || dn > 0.5 * prev {
            return None;
        }
        for (xi, d) in x.iter_mut().zip(dx.iter()) {
            *xi += d;
        }
        if dn <= cfg.corrector_tol * (1.0 + norm(x)) {
            return Some(tangent);
        }
        prev = dn;
    }
    None
}

/// Tangent `dx/dt` at the current point.
fn tangent_at(h: &Homotopy, ws: &mut Workspace, x: &[C64], t: f64) -> Option<DVector<C64>> {
    h.evaluate(x, t, &mut ws.h, &mut ws.hx, &mut ws.ht);
    let rhs = DVector::from_iterator(x.len(), ws.ht.iter().map(|v| -v));
    let v = solve(&ws.hx, &rhs)?;
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(v)
}

/// Advances `st` to `t_to < st.t` with Euler prediction and Newton correction.
fn advance(h: &Homotopy, ws: &mut Workspace, st: &mut PathState, t_to: f64, cfg: &SolverConfig) -> Segment {
    let mut tangent: Option<DVector<C64>> = None;
    while st.t > t_to {
        if st.steps_taken >= cfg.max_steps {
            return Segment::Failed;
        }
        st.steps_taken += 1;
        let dt = st.step.min(st.t - t_to);
        let t_new = if dt >= st.t - t_to { t_to } else { st.t - dt };
        if tangent.is_none() {
            tangent = tangent_at(h, ws, &st.x, st.t);
        }
        let corrected = tangent.as_ref().and_then(|v| {
            let mut xp: Vec<C64> = st.x.iter().zip(v.iter()).map(|(x, d)| x + d * (t_new - st.t)).collect();
            newton_correct(h, ws, &mut xp, t_new, cfg).map(|next| (xp, next))
        });
        match corrected {
            Some((xp, next)) => {
                st.x = xp;
                st.t = t_new;
                tangent = Some(next);
                st.successes += 1;
                if st.successes >= cfg.growth_after {
                    st.step = (st.step * 2.0).min(cfg.step_max);
                    st.successes = 0;
                }
                if norm(&st.x) > cfg.divergence_bound {
                    return Segment::Diverged;
                }
            }
            None => {
                st.successes = 0;
                st.step /= 2.0;
                if st.step < cfg.step_min {
                    return Segment::Failed;
                }
            }
        }
    }
    Segment::Reached
}

fn polish(h: &Homotopy, ws: &mut Workspace, x: &mut [C64], t: f64) -> f64 {
    let mut best = h.residual(x, t);
    for _ in 0..4 {
        if best <= 1e-14 * (1.0 + norm(x)) {
            break;
        }
        h.evaluate(x, t, &mut ws.h, &mut ws.hx, &mut ws.ht);
        let rhs = DVector::from_iterator(x.len(), ws.h.iter().map(|v| -v));
        let Some(dx) = solve(&ws.hx, &rhs) else { break };
        let trial: Vec<C64> = x.iter().zip(dx.iter()).map(|(a, d)| a + d).collect();
        let r = h.residual(&trial, t);
        if r < best {
            x.copy_from_slice(&trial);
            best = r;
        } else {
            break;
        }
    }
    best
}

fn check_start(h: &Homotopy, x0: &[C64], cfg: &SolverConfig) -> Result<(), TrackError> {
    if x0.len() != h.dim() {
        return Err(TrackError::Dimension { expected: h.dim(), got: x0.len() });
    }
    let r = h.residual(x0, 1.0);
    // rounding in expanded products grows like |x|^deg
    let d = h.max_degree().max(1) as i32;
    if !(r <= cfg.start_tol * (1.0 + norm(x0)).powi(d)) {
        return Err(TrackError::BadStart(r));
    }
    Ok(())
}

fn finish(h: &Homotopy, ws: &mut Workspace, st: PathState, seg: Segment, winding: usize) -> PathResult {
    let mut x = st.x;
    let status = match seg {
        Segment::Reached => PathStatus::Converged,
        Segment::Diverged => PathStatus::Diverged,
        Segment::Failed => PathStatus::PathFailure,
    };
    let residual = if status == PathStatus::Converged { polish(h, ws, &mut x, st.t) } else { h.residual(&x, st.t) };
    h.evaluate(&x, st.t, &mut ws.h, &mut ws.hx, &mut ws.ht);
    let ic = inverse_condition(&ws.hx);
    PathResult {
        endpoint: x,
        status,
        final_t: st.t,
        residual,
        cond_estimate: if ic > 0.0 { 1.0 / ic } else { f64::INFINITY },
        winding_hint: winding,
        steps: st.steps_taken,
    }
}

/// Follows the path through `x0` from `t = 1` down to `t_end`.
pub fn track(h: &Homotopy, x0: &[C64], t_end: f64, cfg: &SolverConfig) -> Result<PathResult, TrackError> {
    if !(0.0..1.0).contains(&t_end) {
        return Err(TrackError::BadTarget(t_end));
    }
    check_start(h, x0, cfg)?;
    let mut ws = Workspace::new(h.dim());
    let mut st = PathState { x: x0.to_vec(), t: 1.0, step: cfg.step_init, successes: 0, steps_taken: 0 };
    let seg = advance(h, &mut ws, &mut st, t_end, cfg);
    Ok(finish(h, &mut ws, st, seg, 1))
}

/// Outcome of analysing the geometric samples `x(t_min 2^-k)`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Extrapolation {
    Limit { point: Vec<C64>, cycle: usize },
    Diverging,
}

/// Richardson extrapolation of samples taken at `t_0, t_0/2, t_0/4, ...`,
/// estimating the cycle number from the ratio of successive differences.
pub(crate) fn extrapolate(samples: &[Vec<C64>], max_cycle: usize) -> Extrapolation {
    let m = samples.len();
    assert!(m >= 2);
    let last = &samples[m - 1];
    let scale = 1.0 + norm(last);
    let diffs: Vec<f64> = samples.windows(2).map(|w| crate::linalg::dist(&w[0], &w[1])).collect();
    let dl = diffs[diffs.len() - 1];
    if dl <= 1e-13 * scale {
        return Extrapolation::Limit { point: last.clone(), cycle: 1 };
    }
    let cycle = if diffs.len() >= 2 {
        let rho = diffs[diffs.len() - 2] / dl;
        if rho <= 1.0 {
            // differences not shrinking: the path leaves every bounded set
            if norm(&samples[m - 1]) > norm(&samples[0]) || dl > 1e-6 * scale {
                return Extrapolation::Diverging;
            }
            1
        } else {
            let c = (1.0 / rho.log2()).round();
            (c.max(1.0) as usize).min(max_cycle)
        }
    } else {
        1
    };
    let r = 2f64.powf(1.0 / cycle as f64);
    let mut table: Vec<Vec<C64>> = samples.to_vec();
    for order in 1..m {
        let f = r.powi(order as i32);
        for k in 0..(m - order) {
            let next: Vec<C64> =
                table[k].iter().zip(&table[k + 1]).map(|(a, b)| (b * f - a) / (f - 1.0)).collect();
            table[k] = next;
        }
    }
    Extrapolation::Limit { point: table[0].clone(), cycle }
}

/// Tracks to `t_min`, samples the path at `t_min 2^-k`, and extrapolates
/// the first `proj` coordinates to `t = 0`. Remaining coordinates (for
/// example Lagrange multipliers, which may blow up) keep their value at
/// the last sample.
pub fn track_to_limit(h: &Homotopy, x0: &[C64], proj: usize, cfg: &SolverConfig) -> Result<PathResult, TrackError> {
    check_start(h, x0, cfg)?;
    let mut ws = Workspace::new(h.dim());
    let mut st = PathState { x: x0.to_vec(), t: 1.0, step: cfg.step_init, successes: 0, steps_taken: 0 };
    let seg = advance(h, &mut ws, &mut st, cfg.t_min, cfg);
    if !matches!(seg, Segment::Reached) {
        return Ok(finish(h, &mut ws, st, seg, 1));
    }
    let mut samples = vec![st.x.clone()];
    let mut t = cfg.t_min;
    let m = cfg.endgame_samples;
    let mut previous: Option<Vec<C64>> = None;
    while samples.len() < cfg.endgame_max_samples {
        t /= 2.0;
        st.step = st.step.min(t);
        let seg = advance(h, &mut ws, &mut st, t, cfg);
        if !matches!(seg, Segment::Reached) {
            return Ok(finish(h, &mut ws, st, seg, 1));
        }
        polish(h, &mut ws, &mut st.x, st.t);
        samples.push(st.x.clone());
        // growing differences already mark the path as diverging
        if samples.len() == 3 {
            let ps: Vec<Vec<C64>> = samples.iter().map(|s| s[..proj].to_vec()).collect();
            if extrapolate(&ps, cfg.max_cycle) == Extrapolation::Diverging {
                break;
            }
        }
        if samples.len() < m {
            continue;
        }
        // keep halving t while successive windows disagree
        let window: Vec<Vec<C64>> = samples[samples.len() - m..].iter().map(|s| s[..proj].to_vec()).collect();
        match extrapolate(&window, cfg.max_cycle) {
            Extrapolation::Diverging => break,
            Extrapolation::Limit { point, .. } => {
                let settled = previous.as_ref().is_some_and(|q| dist(q, &point) <= cfg.endgame_tol * (1.0 + norm(&point)));
                if cfg.endgame_tol <= 0.0 || settled {
                    break;
                }
                previous = Some(point);
            }
        }
    }
    let samples = if samples.len() > m { samples.split_off(samples.len() - m) } else { samples };
    let proj_samples: Vec<Vec<C64>> = samples.iter().map(|s| s[..proj].to_vec()).collect();
    let last = samples.last().unwrap().clone();
    let residual = h.residual(&last, st.t);
    h.evaluate(&last, st.t, &mut ws.h, &mut ws.hx, &mut ws.ht);
    let ic = inverse_condition(&ws.hx);
    let cond_estimate = if ic > 0.0 { 1.0 / ic } else { f64::INFINITY };
    match extrapolate(&proj_samples, cfg.max_cycle) {
        Extrapolation::Diverging => Ok(PathResult {
            endpoint: last,
            status: PathStatus::Diverged,
            final_t: st.t,
            residual,
            cond_estimate,
            winding_hint: 1,
            steps: st.steps_taken,
        }),
        Extrapolation::Limit { point, cycle } => {
            let mut endpoint = last;
            endpoint[..proj].copy_from_slice(&point);
            Ok(PathResult {
                endpoint,
                status: PathStatus::Converged,
                final_t: 0.0,
                residual,
                cond_estimate,
                winding_hint: cycle,
                steps: st.steps_taken,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(r: f64) -> C64 {
        C64::new(r, 0.0)
    }

    #[test]
    fn richardson_recovers_puiseux_limit() {
        // x(t) = 1 + 3 t^(1/2) - t + 0.5 t^(3/2)
        let f = |t: f64| c(1.0 + 3.0 * t.sqrt() - t + 0.5 * t.powf(1.5));
        let samples: Vec<Vec<C64>> = (0..5).map(|k| vec![f(1e-4 / 2f64.powi(k))]).collect();
        match extrapolate(&samples, 8) {
            Extrapolation::Limit { point, cycle } => {
                assert_eq!(cycle, 2);
                assert!((point[0] - c(1.0)).norm() < 1e-10);
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn growing_samples_diverge() {
        let samples: Vec<Vec<C64>> = (0..5).map(|k| vec![c(1.0 / (1e-4 / 2f64.powi(k)).sqrt())]).collect();
        assert_eq!(extrapolate(&samples, 8), Extrapolation::Diverging);
    }
}
