//! Steady states of the Kuramoto model with `n` oscillators, written in
//! sine/cosine variables with the last angle fixed at zero.

use crate::config::Config;
use crate::linalg::numerical_rank;
use crate::poly::{jacobian, PolyError, Polynomial, PolySystem, Vars, C64};
use crate::solve::{newton_refine, rng_from_seed, solve_square, SolveError};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

/// Natural frequencies are sampled with every `|omega_i| <= OMEGA_BOX`,
/// including the implied last one. Outside this box there are no real
/// equilibria for `n = 4`.
pub const OMEGA_BOX: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KuramotoError {
    #[error("only n = 3 and n = 4 are supported, got {0}")]
    UnsupportedN(usize),
    #[error("expected {expected} frequencies, got {got}")]
    OmegaLength { expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// `{omega_i - (1/n) sum_j (s_i c_j - s_j c_i), s_i^2 + c_i^2 - 1}` for
/// `i < n` over `(s_1.., c_1..)`, with `s_n = 0`, `c_n = 1`.
pub fn kuramoto_system(n: usize, omega: &[f64]) -> Result<PolySystem, KuramotoError> {
    if !(n == 3 || n == 4) {
        return Err(KuramotoError::UnsupportedN(n));
    }
    let m = n - 1;
    if omega.len() != m {
        return Err(KuramotoError::OmegaLength { expected: m, got: omega.len() });
    }
    let names: Vec<String> = (1..=m).map(|i| format!("s{i}")).chain((1..=m).map(|i| format!("c{i}"))).collect();
    let vars = Vars::new(names);
    let s = |i: usize| if i < m { Polynomial::var(&vars, i) } else { Polynomial::zero(&vars) };
    let c = |i: usize| if i < m { Polynomial::var(&vars, m + i) } else { Polynomial::constant(&vars, 1.0) };
    let mut polys = Vec::with_capacity(2 * m);
    for i in 0..m {
        let mut sum = Polynomial::zero(&vars);
        for j in 0..n {
            sum = &sum + &(&(&s(i) * &c(j)) - &(&s(j) * &c(i)));
        }
        polys.push(&Polynomial::constant(&vars, omega[i]) - &sum.scale(C64::new(1.0 / n as f64, 0.0)));
    }
    for i in 0..m {
        polys.push(&(&s(i) * &s(i)) + &(&(&c(i) * &c(i)) - &Polynomial::constant(&vars, 1.0)));
    }
    Ok(PolySystem::new(&vars, polys)?)
}

/// Real nonsingular solutions of the steady-state system, found by a
/// total-degree homotopy whose `gamma` comes from `seed`.
pub fn real_equilibria(n: usize, omega: &[f64], seed: u64, cfg: &Config) -> Result<Vec<Vec<f64>>, KuramotoError> {
    let sys = kuramoto_system(n, omega)?;
    let out = solve_square(&sys, seed, &cfg.solver)?;
    let full = sys.nvars();
    let mut found: Vec<Vec<f64>> = Vec::new();
    for r in &out.roots {
        if r.multiplicity > 1 || r.max_imag() > cfg.tol.real_tol {
            continue;
        }
        let x: Vec<C64> = r.point.iter().map(|z| C64::new(z.re, 0.0)).collect();
        let refined = newton_refine(&sys, &x, 10);
        if !(refined.residual <= 1e-12) {
            continue;
        }
        if numerical_rank(&jacobian(&sys, &refined.point)?, cfg.tol.rank_tol) < full {
            continue;
        }
        let p: Vec<f64> = refined.point.iter().map(|z| z.re).collect();
        let dup = found.iter().any(|q| q.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() <= 1e-8);
        if !dup {
            found.push(p);
        }
    }
    Ok(found)
}

/// Frequencies `omega_1..omega_{n-1}` uniform in the box, resampled until the
/// implied `omega_n = -sum omega_i` also lies in it.
pub fn sample_omega<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-OMEGA_BOX..=OMEGA_BOX)).collect();
        if w.iter().sum::<f64>().abs() <= OMEGA_BOX {
            return w;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KuramotoCount {
    pub n: usize,
    pub omegas: Vec<Vec<f64>>,
    pub per_sample_counts: Vec<usize>,
    pub max_observed: usize,
    /// seed for the frequency samples
    pub seed: u64,
    /// seed for the homotopy gamma of each solve
    pub gamma_seed: u64,
    pub paths_per_sample: usize,
}

/// Counts real equilibria for `samples` random frequency vectors.
pub fn count_equilibria(
    n: usize,
    samples: usize,
    seed: u64,
    gamma_seed: u64,
    cfg: &Config,
) -> Result<KuramotoCount, KuramotoError> {
    let mut rng = rng_from_seed(seed);
    let omegas: Vec<Vec<f64>> = (0..samples).map(|_| sample_omega(n, &mut rng)).collect();
    let counts = omegas
        .iter()
        .enumerate()
        .map(|(k, w)| real_equilibria(n, w, gamma_seed.wrapping_add(k as u64), cfg).map(|v| v.len()))
        .collect::<Result<Vec<_>, _>>()?;
    let paths_per_sample = 1 << (2 * (n - 1));
    Ok(KuramotoCount {
        n,
        max_observed: counts.iter().copied().max().unwrap_or(0),
        per_sample_counts: counts,
        omegas,
        seed,
        gamma_seed,
        paths_per_sample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synchronized_state_solves_zero_frequencies() {
        let s = kuramoto_system(4, &[0.0, 0.0, 0.0]).unwrap();
        let p: Vec<C64> = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0].iter().map(|&v| C64::new(v, 0.0)).collect();
        assert!(s.residual(&p).unwrap() < 1e-15);
        assert_eq!(s.degrees(), vec![2; 6]);
        assert_eq!(s.vars().names(), ["s1", "s2", "s3", "c1", "c2", "c3"]);
    }

    #[test]
    fn angles_give_residual_zero() {
        // pick angles, read off the frequencies, check the point solves the system
        let th = [0.3f64, -1.1, 2.0, 0.0];
        let omega: Vec<f64> = (0..3).map(|i| (0..4).map(|j| (th[i] - th[j]).sin()).sum::<f64>() / 4.0).collect();
        let s = kuramoto_system(4, &omega).unwrap();
        let p: Vec<C64> =
            th[..3].iter().map(|t| C64::new(t.sin(), 0.0)).chain(th[..3].iter().map(|t| C64::new(t.cos(), 0.0))).collect();
        assert!(s.residual(&p).unwrap() < 1e-14);
    }

    #[test]
    fn unsupported_sizes() {
        assert_eq!(kuramoto_system(5, &[0.0; 4]), Err(KuramotoError::UnsupportedN(5)));
        assert!(matches!(kuramoto_system(4, &[0.0; 2]), Err(KuramotoError::OmegaLength { .. })));
    }

    #[test]
    fn three_oscillators_at_zero_frequency() {
        // equilibria of sin differences: all angle pairs in {0, pi} plus the splay states
        let sols = real_equilibria(3, &[0.0, 0.0], 7, &Config::default()).unwrap();
        assert_eq!(sols.len(), 6, "{sols:?}");
    }
}
