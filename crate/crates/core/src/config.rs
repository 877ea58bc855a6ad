//! Tolerances and solver settings shared by the high-level operations.

use crate::polar_defl::DeflationConfig;
use crate::solve::SolverConfig;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    /// largest |Im| accepted on a real point
    pub real_tol: f64,
    /// |g| must exceed `g_zero_tol * (1 + max|coeff g|)`
    pub g_zero_tol: f64,
    /// relative singular value threshold for the smoothness certificate
    pub rank_tol: f64,
    /// base residual allowed at a certified point
    pub residual_tol: f64,
    pub dedup_tol: f64,
    pub t_min: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { real_tol: 1e-6, g_zero_tol: 1e-8, rank_tol: 1e-8, residual_tol: 1e-8, dedup_tol: 1e-6, t_min: 1e-4 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    pub tol: Tolerances,
    pub solver: SolverConfig,
    pub deflation: DeflationConfig,
}

impl Config {
    /// Copies the shared tolerances into the solver settings.
    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.solver.dedup_tol = tol.dedup_tol;
        self.solver.t_min = tol.t_min;
        self.tol = tol;
        self
    }
}
