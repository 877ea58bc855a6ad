use crate::linalg::{min_norm_solve, norm, numerical_rank, solve};
use crate::poly::{CompiledSystem, PolySystem, C64};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub point: Vec<C64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Jacobian numerically rank deficient or linear (not quadratic) convergence.
    pub singular: bool,
}

/// Newton's method; least-squares (minimum-norm) steps for non-square or
/// rank-deficient Jacobians. Stops once the residual is at most
/// `1e-13 (1 + |x|)` or after `max_iter` steps.
pub fn newton_refine(system: &PolySystem, x: &[C64], max_iter: usize) -> NewtonOutcome {
    let compiled = CompiledSystem::new(system.polys(), system.nvars());
    newton_refine_compiled(&compiled, x, max_iter, 1e-8)
}

pub(crate) fn newton_refine_compiled(cs: &CompiledSystem, x0: &[C64], max_iter: usize, rank_tol: f64) -> NewtonOutcome {
    let m = cs.len();
    let n = cs.nvars();
    let mut x = x0.to_vec();
    let mut vals = vec![C64::default(); m];
    let mut jac = DMatrix::zeros(m, n);
    let mut steps: Vec<f64> = Vec::new();
    let target = |x: &[C64]| 1e-13 * (1.0 + norm(x));
    cs.eval_jac(&x, &mut vals, &mut jac);
    let mut residual = norm(&vals);
    let mut iterations = 0;
    let full = m.min(n);
    let mut rank = numerical_rank(&jac, rank_tol);
    while residual > target(&x) && iterations < max_iter {
        iterations += 1;
        let rhs = DVector::from_iterator(m, vals.iter().map(|v| -v));
        let dx = if m == n && rank == full { solve(&jac, &rhs) } else { min_norm_solve(&jac, &rhs) };
        let Some(dx) = dx else { break };
        let trial: Vec<C64> = x.iter().zip(dx.iter()).map(|(a, d)| a + d).collect();
        let tv = cs.eval_vec(&trial);
        let tr = norm(&tv);
        if !(tr < residual) {
            break;
        }
        steps.push(dx.norm());
        x = trial;
        cs.eval_jac(&x, &mut vals, &mut jac);
        residual = tr;
        rank = numerical_rank(&jac, rank_tol);
    }
    let converged = residual <= target(&x) || residual <= 1e-12 * (1.0 + norm(&x));
    // steps at rounding level say nothing about the convergence rate
    let floor = 1e-10 * (1.0 + norm(&x));
    let steps: Vec<f64> = steps.into_iter().filter(|&s| s > floor).collect();
    let linear = steps.len() >= 3 && {
        let k = steps.len();
        steps[k - 1] > 0.2 * steps[k - 2] && steps[k - 2] > 0.2 * steps[k - 3]
    };
    let singular = rank < full || linear || !converged;
    NewtonOutcome { point: x, residual, iterations, converged, singular }
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
    fn sqrt_two() {
        let s = sys(&["x"], &["x^2 - 2"]);
        let out = newton_refine(&s, &[C64::new(1.4, 0.0)], 20);
        assert!((out.point[0].re - 2f64.sqrt()).abs() < 1e-11);
        assert!(out.converged && !out.singular);
    }

    #[test]
    fn circle_and_line() {
        let s = sys(&["x", "y"], &["x^2 + y^2 - 1", "x - y"]);
        let out = newton_refine(&s, &[C64::new(0.7, 0.0), C64::new(0.7, 0.0)], 20);
        let h = 0.5f64.sqrt();
        assert!((out.point[0].re - h).abs() < 1e-12 && (out.point[1].re - h).abs() < 1e-12);
    }

    #[test]
    fn double_root_flagged() {
        let s = sys(&["x"], &["x^2"]);
        let out = newton_refine(&s, &[C64::new(1e-3, 0.0)], 20);
        assert!(out.singular);
    }
}
