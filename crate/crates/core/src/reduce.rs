//! Reductions of semi-algebraic input to bounded algebraic systems.

use crate::poly::{Polynomial, PolyError, PolySystem, Vars};
use thiserror::Error;

/// Prefix of variables introduced by the library; user names may not start with it.
pub const RESERVED_PREFIX: &str = "_";
pub const BOUND_VAR: &str = "_w";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    #[error("radius parameter delta must be positive, got {0}")]
    NonPositiveDelta(f64),
    #[error("center has {got} coordinates, system has {expected} variables")]
    CenterDimension { expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Equations `f_i = 0` and strict inequalities `q_j > 0` over one registry.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiAlgebraicInput {
    pub vars: Vars,
    pub equations: Vec<Polynomial>,
    pub inequalities: Vec<Polynomial>,
}

impl SemiAlgebraicInput {
    pub fn equations_only(system: &PolySystem) -> Self {
        SemiAlgebraicInput { vars: system.vars().clone(), equations: system.polys().to_vec(), inequalities: Vec::new() }
    }
}

/// Adds a variable `z_j` per inequality and the equation `z_j^2 q_j - 1`.
/// The new variables follow the original ones.
pub fn lift_inequalities(input: &SemiAlgebraicInput) -> Result<PolySystem, ReduceError> {
    let m = input.inequalities.len();
    let vars = input.vars.extended((1..=m).map(|j| format!("{RESERVED_PREFIX}z{j}")));
    let n = input.vars.len();
    let mut polys = Vec::with_capacity(input.equations.len() + m);
    for f in &input.equations {
        polys.push(f.embed(&vars)?);
    }
    for (j, q) in input.inequalities.iter().enumerate() {
        let z = Polynomial::var(&vars, n + j);
        polys.push(&(&(&z * &z) * &q.embed(&vars)?) - &Polynomial::constant(&vars, 1.0));
    }
    Ok(PolySystem::new(&vars, polys)?)
}

/// Appends a fresh last variable `w` and `sum (x_i - q_i)^2 + w^2 - delta`,
/// so the real zero set lies on a sphere around `(q, 0)`.
pub fn embed_bounded(system: &PolySystem, q: &[f64], delta: f64) -> Result<PolySystem, ReduceError> {
    if !(delta > 0.0) {
        return Err(ReduceError::NonPositiveDelta(delta));
    }
    let n = system.nvars();
    if q.len() != n {
        return Err(ReduceError::CenterDimension { expected: n, got: q.len() });
    }
    let vars = system.vars().extended([BOUND_VAR]);
    let mut polys: Vec<Polynomial> = system.polys().iter().map(|p| p.embed(&vars)).collect::<Result<_, _>>()?;
    let w = Polynomial::var(&vars, n);
    let mut s = &(&w * &w) - &Polynomial::constant(&vars, delta);
    for (i, &qi) in q.iter().enumerate() {
        let d = &Polynomial::var(&vars, i) - &Polynomial::constant(&vars, qi);
        s = &s + &(&d * &d);
    }
    polys.push(s);
    Ok(PolySystem::new(&vars, polys)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, C64};

    fn p(v: &Vars, s: &str) -> Polynomial {
        parse_polynomial(s, v).unwrap()
    }

    #[test]
    fn lift_examples() {
        let v = Vars::new(["x"]);
        let input = SemiAlgebraicInput { vars: v.clone(), equations: vec![p(&v, "x - 1")], inequalities: vec![] };
        let s = lift_inequalities(&input).unwrap();
        assert_eq!(s.nvars(), 1);
        assert_eq!(s.polys()[0], p(&v, "x - 1"));

        let input = SemiAlgebraicInput { vars: v.clone(), equations: vec![], inequalities: vec![p(&v, "x")] };
        let s = lift_inequalities(&input).unwrap();
        assert_eq!(s.vars().names(), &["x".to_string(), "_z1".to_string()]);
        assert_eq!(s.polys()[0], p(s.vars(), "_z1^2*x - 1"));

        let v = Vars::new(["x", "y"]);
        let input =
            SemiAlgebraicInput { vars: v.clone(), equations: vec![p(&v, "x^2+y^2-1")], inequalities: vec![p(&v, "y")] };
        let s = lift_inequalities(&input).unwrap();
        // (0, 1, 1) lies on the lifted set; y = -1 would need z^2 = -1
        let pt = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
        assert!(s.residual(&pt).unwrap() < 1e-15);
    }

    #[test]
    fn bound_examples() {
        let v = Vars::new(["x"]);
        let s = PolySystem::new(&v, vec![p(&v, "x")]).unwrap();
        let b = embed_bounded(&s, &[0.0], 4.0).unwrap();
        assert_eq!(b.polys()[1], p(b.vars(), "x^2 + _w^2 - 4"));
        let pt = [C64::new(0.0, 0.0), C64::new(2.0, 0.0)];
        assert!(b.residual(&pt).unwrap() < 1e-15);

        let s = PolySystem::new(&v, vec![]).unwrap();
        let b = embed_bounded(&s, &[0.0], 1.0).unwrap();
        assert_eq!(b.polys()[0], p(b.vars(), "x^2 + _w^2 - 1"));

        let v = Vars::new(["x", "y", "z"]);
        let s = PolySystem::new(&v, vec![p(&v, "x^2 - y^2*z")]).unwrap();
        let b = embed_bounded(&s, &[0.0, 0.0, -1.0], 0.25).unwrap();
        assert_eq!(b.polys()[1], p(b.vars(), "x^2 + y^2 + (z+1)^2 + _w^2 - 1/4"));

        assert_eq!(embed_bounded(&s, &[0.0; 3], 0.0), Err(ReduceError::NonPositiveDelta(0.0)));
        assert!(embed_bounded(&s, &[0.0; 2], 1.0).is_err());
    }
}
