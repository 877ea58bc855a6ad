use super::start::ProductSystem;
use crate::poly::{CompiledSystem, PolyError, PolySystem, C64};
use nalgebra::DMatrix;

/// A square family `H(x, t)` tracked from `t = 1` toward `t = 0`.
#[derive(Clone, Debug)]
pub enum Homotopy {
    /// `gamma * t * start(x) + (1 - t) * target(x)`
    Blend {
        start: PolySystem,
        target: PolySystem,
        gamma: C64,
        cstart: StartEval,
        ctarget: CompiledSystem,
    },
    /// `t` is the last registry variable of `system`.
    Parameter { system: PolySystem, compiled: CompiledSystem },
}

/// How the start system of a blend is evaluated.
#[derive(Clone, Debug)]
pub enum StartEval {
    Compiled(CompiledSystem),
    /// factored products of affine forms; far cheaper than the expansion
    Product(ProductSystem),
}

impl StartEval {
    fn eval(&self, x: &[C64], out: &mut [C64]) {
        match self {
            StartEval::Compiled(c) => c.eval(x, out),
            StartEval::Product(p) => p.eval(x, out),
        }
    }

    fn eval_jac(&self, x: &[C64], out: &mut [C64], jac: &mut DMatrix<C64>) {
        match self {
            StartEval::Compiled(c) => c.eval_jac(x, out, jac),
            StartEval::Product(p) => p.eval_jac(x, out, jac),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum HomotopyError {
    #[error("homotopy is not square: {equations} equations in {unknowns} unknowns")]
    NotSquare { equations: usize, unknowns: usize },
    #[error("start and target systems use different variables")]
    Registry,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl Homotopy {
    pub fn blend(start: PolySystem, target: PolySystem, gamma: C64) -> Result<Self, HomotopyError> {
        if start.vars() != target.vars() || start.len() != target.len() {
            return Err(HomotopyError::Registry);
        }
        if target.len() != target.nvars() {
            return Err(HomotopyError::NotSquare { equations: target.len(), unknowns: target.nvars() });
        }
        let cstart = StartEval::Compiled(CompiledSystem::new(start.polys(), start.nvars()));
        let ctarget = CompiledSystem::new(target.polys(), target.nvars());
        Ok(Homotopy::Blend { start, target, gamma, cstart, ctarget })
    }

    /// Blend whose start system is evaluated from its factored form.
    /// `start` must be the expansion of `factored`.
    pub fn blend_product(
        start: PolySystem,
        factored: ProductSystem,
        target: PolySystem,
        gamma: C64,
    ) -> Result<Self, HomotopyError> {
        let mut h = Self::blend(start, target, gamma)?;
        if let Homotopy::Blend { cstart, .. } = &mut h {
            *cstart = StartEval::Product(factored);
        }
        Ok(h)
    }

    /// Family whose last registry variable is the path parameter `t`.
    pub fn parameter(system: PolySystem) -> Result<Self, HomotopyError> {
        if system.len() + 1 != system.nvars() {
            return Err(HomotopyError::NotSquare { equations: system.len(), unknowns: system.nvars() - 1 });
        }
        let compiled = CompiledSystem::new(system.polys(), system.nvars());
        Ok(Homotopy::Parameter { system, compiled })
    }

    /// Number of unknowns (and equations).
    pub fn dim(&self) -> usize {
        match self {
            Homotopy::Blend { target, .. } => target.len(),
            Homotopy::Parameter { system, .. } => system.len(),
        }
    }

    /// Largest total degree among the equations, in `x` and `t` together.
    pub fn max_degree(&self) -> u64 {
        let sys = match self {
            Homotopy::Blend { start, target, .. } => {
                return start.degrees().into_iter().chain(target.degrees()).max().unwrap_or(1);
            }
            Homotopy::Parameter { system, .. } => system,
        };
        sys.degrees().into_iter().max().unwrap_or(1)
    }

    /// The system at parameter value `t`.
    pub fn at(&self, t: f64) -> PolySystem {
        match self {
            Homotopy::Blend { start, target, gamma, .. } => {
                let polys = start
                    .polys()
                    .iter()
                    .zip(target.polys())
                    .map(|(s, f)| &s.scale(*gamma * t) + &f.scale(1.0 - t))
                    .collect();
                PolySystem::new(target.vars(), polys).expect("same registry")
            }
            Homotopy::Parameter { system, .. } => {
                let n = system.nvars() - 1;
                let bound = system.bind(n, C64::new(t, 0.0));
                let vars = system.vars().prefix(n);
                let polys = bound
                    .polys()
                    .iter()
                    .map(|p| p.truncate_vars(&vars).expect("t was bound"))
                    .collect();
                PolySystem::new(&vars, polys).expect("same registry")
            }
        }
    }

    /// Fills `h = H(x,t)`, `hx = dH/dx`, `ht = dH/dt`.
    pub fn evaluate(&self, x: &[C64], t: f64, h: &mut [C64], hx: &mut DMatrix<C64>, ht: &mut [C64]) {
        match self {
            Homotopy::Blend { gamma, cstart, ctarget, .. } => {
                let n = x.len();
                let mut gs = vec![C64::default(); n];
                let mut js = DMatrix::zeros(n, n);
                cstart.eval_jac(x, &mut gs, &mut js);
                ctarget.eval_jac(x, h, hx);
                let a = gamma * t;
                let b = 1.0 - t;
                for i in 0..n {
                    ht[i] = gamma * gs[i] - h[i];
                    h[i] = a * gs[i] + b * h[i];
                }
                hx.zip_apply(&js, |f, s| *f = a * s + b * *f);
            }
            Homotopy::Parameter { compiled, .. } => {
                let n = x.len();
                let mut xt = Vec::with_capacity(n + 1);
                xt.extend_from_slice(x);
                xt.push(C64::new(t, 0.0));
                let mut full = DMatrix::zeros(n, n + 1);
                compiled.eval_jac(&xt, h, &mut full);
                hx.copy_from(&full.columns(0, n));
                for i in 0..n {
                    ht[i] = full[(i, n)];
                }
            }
        }
    }

    /// Fills `h = H(x,t)` only.
    pub fn values(&self, x: &[C64], t: f64, h: &mut [C64]) {
        match self {
            Homotopy::Blend { gamma, cstart, ctarget, .. } => {
                let mut gs = vec![C64::default(); x.len()];
                cstart.eval(x, &mut gs);
                ctarget.eval(x, h);
                let a = gamma * t;
                let b = 1.0 - t;
                for (hi, si) in h.iter_mut().zip(&gs) {
                    *hi = a * si + b * *hi;
                }
            }
            Homotopy::Parameter { compiled, .. } => {
                let mut xt = Vec::with_capacity(x.len() + 1);
                xt.extend_from_slice(x);
                xt.push(C64::new(t, 0.0));
                compiled.eval(&xt, h);
            }
        }
    }

    /// Residual norm of `H(x, t)`.
    pub fn residual(&self, x: &[C64], t: f64) -> f64 {
        let mut h = vec![C64::default(); self.dim()];
        self.values(x, t, &mut h);
        crate::linalg::norm(&h)
    }
}
