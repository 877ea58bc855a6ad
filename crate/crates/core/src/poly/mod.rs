//! Sparse multivariate polynomials with complex double coefficients.
//!
//! A [`Polynomial`] is a map from exponent vectors to coefficients over a
//! shared variable registry ([`Vars`]). Terms iterate in graded
//! lexicographic order, highest first, so printing and serialization are
//! deterministic.

mod compiled;
mod parse;

pub use compiled::CompiledSystem;
pub use parse::{parse_polynomial, parse_polynomial_at, ParseError};

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;
use thiserror::Error;

pub type C64 = Complex64;

/// Coefficients produced by multiplication below this magnitude are dropped.
const MUL_DROP: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("point has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polynomials live over different variable registries")]
    RegistryMismatch,
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("matrix is singular (scaled |det| = {0:e})")]
    SingularMatrix(f64),
    #[error("matrix shape {rows}x{cols} does not match {nvars} variables")]
    MatrixShape { rows: usize, cols: usize, nvars: usize },
}

/// Ordered variable registry shared by every polynomial of a system.
#[derive(Clone, Debug)]
pub struct Vars(Arc<[String]>);

impl Vars {
    pub fn new<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Self {
        Vars(names.into_iter().map(|s| s.as_ref().to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// Registry with `extra` names appended after the existing ones.
    pub fn extended<S: AsRef<str>>(&self, extra: impl IntoIterator<Item = S>) -> Vars {
        let mut names: Vec<String> = self.0.to_vec();
        names.extend(extra.into_iter().map(|s| s.as_ref().to_string()));
        Vars(names.into())
    }

    /// First `k` variables as a new registry.
    pub fn prefix(&self, k: usize) -> Vars {
        Vars::new(self.0[..k].iter())
    }
}

impl PartialEq for Vars {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Vars {}

/// Exponent vector, one entry per registry variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    vars: Vars,
    terms: BTreeMap<Monomial, C64>,
}

impl Polynomial {
    pub fn zero(vars: &Vars) -> Self {
        Polynomial { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Vars, c: impl Into<C64>) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(Monomial::one(vars.len()), c.into());
        p
    }

    /// The polynomial `x_i`.
    pub fn var(vars: &Vars, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = Self::zero(vars);
        p.add_term(Monomial(e), C64::new(1.0, 0.0));
        p
    }

    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Vec<u32>, C64)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    /// Random dense polynomial of total degree `deg` with coefficients from `coeff`.
    pub fn dense(vars: &Vars, deg: u32, mut coeff: impl FnMut() -> C64) -> Self {
        let mut p = Self::zero(vars);
        for e in exponents_up_to(vars.len(), deg) {
            p.add_term(Monomial(e), coeff());
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == C64::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms from the highest monomial down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C64)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, exponents: &[u32]) -> C64 {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Degree in the variables listed in `group`.
    pub fn degree_in(&self, group: &[usize]) -> u64 {
        self.terms
            .keys()
            .map(|m| group.iter().map(|&i| m.0[i] as u64).sum::<u64>())
            .max()
            .unwrap_or(0)
    }

    /// Whether the polynomial is constant (including zero).
    pub fn is_constant(&self) -> bool {
        self.total_degree() == 0
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    pub fn eval(&self, point: &[C64]) -> Result<C64, PolyError> {
        if point.len() != self.nvars() {
            return Err(PolyError::DimensionMismatch { expected: self.nvars(), got: point.len() });
        }
        let mut acc = C64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = *c;
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= x.powu(e);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Evaluation at a real point.
    pub fn eval_real(&self, point: &[f64]) -> Result<C64, PolyError> {
        let z: Vec<C64> = point.iter().map(|&r| C64::new(r, 0.0)).collect();
        self.eval(&z)
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn diff(&self, var: usize) -> Polynomial {
        assert!(var < self.nvars(), "variable index out of range");
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            out.add_term(m2, *c * e as f64);
        }
        out
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.nvars()).map(|i| self.diff(i)).collect()
    }

    pub fn scale(&self, c: impl Into<C64>) -> Polynomial {
        let c = c.into();
        let mut out = Self::zero(&self.vars);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut result = Polynomial::constant(&self.vars, 1.0);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Substitutes the constant `value` for variable `var`; the registry is unchanged.
    pub fn bind(&self, var: usize, value: C64) -> Polynomial {
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut m2 = m.clone();
            m2.0[var] = 0;
            let factor = if e == 0 { C64::new(1.0, 0.0) } else { value.powu(e) };
            out.add_term(m2, c * factor);
        }
        out
    }

    /// Moves the polynomial into `target`; `map[i]` is the new index of variable `i`.
    pub fn remap(&self, target: &Vars, map: &[usize]) -> Polynomial {
        assert_eq!(map.len(), self.nvars());
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &ex) in m.0.iter().enumerate() {
                e[map[i]] += ex;
            }
            out.add_term(Monomial(e), *c);
        }
        out
    }

    /// Re-expresses the polynomial over `target`, matching variables by name.
    pub fn embed(&self, target: &Vars) -> Result<Polynomial, PolyError> {
        let map = self
            .vars
            .names()
            .iter()
            .map(|n| target.index_of(n).ok_or_else(|| PolyError::UnknownVariable(n.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.remap(target, &map))
    }

    /// Restricts to the first `k` variables. Variables past `k` must not occur.
    pub fn truncate_vars(&self, target: &Vars) -> Result<Polynomial, PolyError> {
        let k = target.len();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            if m.0[k..].iter().any(|&e| e > 0) {
                return Err(PolyError::UnknownVariable(
                    self.vars.name(k + m.0[k..].iter().position(|&e| e > 0).unwrap()).to_string(),
                ));
            }
            out.add_term(Monomial(m.0[..k].to_vec()), *c);
        }
        Ok(out)
    }

    /// `p(A x)`: each variable `x_i` is replaced by `sum_j A[i,j] x_j`.
    pub fn compose_linear(&self, a: &DMatrix<f64>) -> Result<Polynomial, PolyError> {
        let n = self.nvars();
        if a.nrows() != n || a.ncols() != n {
            return Err(PolyError::MatrixShape { rows: a.nrows(), cols: a.ncols(), nvars: n });
        }
        let images: Vec<Polynomial> = (0..n)
            .map(|i| {
                let mut p = Polynomial::zero(&self.vars);
                for j in 0..n {
                    if a[(i, j)] != 0.0 {
                        p = &p + &Polynomial::var(&self.vars, j).scale(a[(i, j)]);
                    }
                }
                p
            })
            .collect();
        // cache powers of each image
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::constant(&self.vars, 1.0), p.clone()])
            .collect();
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(&self.vars, *c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Drops terms with `|c| <= rel * max|c|`.
    pub fn pruned(&self, rel: f64) -> Polynomial {
        let cut = rel * self.max_abs_coeff();
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            if c.norm() > cut {
                out.terms.insert(m.clone(), *c);
            }
        }
        out
    }

    /// Scaled so the leading (highest grlex) coefficient is one.
    pub fn monic(&self) -> Polynomial {
        match self.terms.iter().next_back() {
            Some((_, c)) => self.scale(c.inv()),
            None => self.clone(),
        }
    }

    /// Whether `self` and `other` agree up to a nonzero scalar, coefficientwise within `tol`.
    pub fn proportional_to(&self, other: &Polynomial, tol: f64) -> bool {
        if self.terms.len() != other.terms.len() || self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        let a = self.monic();
        let b = other.monic();
        a.terms.iter().zip(&b.terms).all(|((ma, ca), (mb, cb))| {
            ma == mb && (ca - cb).norm() <= tol * (1.0 + ca.norm())
        })
    }
}

/// All exponent vectors in `n` variables with total degree at most `deg`.
pub fn exponents_up_to(n: usize, deg: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, deg, &mut Vec::with_capacity(n), &mut out);
    out
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert!(self.vars == rhs.vars, "registry mismatch in add");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert!(self.vars == rhs.vars, "registry mismatch in sub");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -*c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert!(self.vars == rhs.vars, "registry mismatch in mul");
        let mut acc: BTreeMap<Monomial, C64> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                *acc.entry(ma.mul(mb)).or_default() += ca * cb;
            }
        }
        acc.retain(|_, c| c.norm() >= MUL_DROP);
        Polynomial { vars: self.vars.clone(), terms: acc }
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

pub(crate) fn fmt_coeff(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}*I", c.im)
    } else {
        format!("({}{}{}*I)", c.re, if c.im < 0.0 { "-" } else { "+" }, c.im.abs())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let (sign, mag) = if c.im == 0.0 && c.re < 0.0 { ("-", C64::new(-c.re, 0.0)) } else { ("+", *c) };
            if k == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            let factors: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.vars.name(i).to_string()
                    } else {
                        format!("{}^{}", self.vars.name(i), e)
                    }
                })
                .collect();
            let one = mag == C64::new(1.0, 0.0);
            match (factors.is_empty(), one) {
                (true, _) => write!(f, "{}", fmt_coeff(mag))?,
                (false, true) => write!(f, "{}", factors.join("*"))?,
                (false, false) => write!(f, "{}*{}", fmt_coeff(mag), factors.join("*"))?,
            }
        }
        Ok(())
    }
}

/// Ordered list of polynomials over one registry. `params` marks registry
/// slots that act as parameters (for example the homotopy parameter `t`)
/// rather than unknowns.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    vars: Vars,
    polys: Vec<Polynomial>,
    params: Vec<usize>,
}

impl PolySystem {
    pub fn new(vars: &Vars, polys: Vec<Polynomial>) -> Result<Self, PolyError> {
        if polys.iter().any(|p| p.vars() != vars) {
            return Err(PolyError::RegistryMismatch);
        }
        Ok(PolySystem { vars: vars.clone(), polys, params: Vec::new() })
    }

    pub fn with_params(mut self, params: Vec<usize>) -> Self {
        self.params = params;
        self
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn into_polys(self) -> Vec<Polynomial> {
        self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn params(&self) -> &[usize] {
        &self.params
    }

    /// Registry indices that are not parameters.
    pub fn unknowns(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|i| !self.params.contains(i)).collect()
    }

    pub fn push(&mut self, p: Polynomial) -> Result<(), PolyError> {
        if p.vars() != &self.vars {
            return Err(PolyError::RegistryMismatch);
        }
        self.polys.push(p);
        Ok(())
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.polys.iter().map(Polynomial::total_degree).collect()
    }

    pub fn eval(&self, point: &[C64]) -> Result<Vec<C64>, PolyError> {
        self.polys.iter().map(|p| p.eval(point)).collect()
    }

    /// Euclidean norm of the residual vector.
    pub fn residual(&self, point: &[C64]) -> Result<f64, PolyError> {
        Ok(self.eval(point)?.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
    }

    pub fn jacobian(&self, point: &[C64]) -> Result<DMatrix<C64>, PolyError> {
        jacobian(self, point)
    }

    /// Symbolic Jacobian, `result[i][j] = d polys[i] / d x_j`.
    pub fn symbolic_jacobian(&self) -> Vec<Vec<Polynomial>> {
        self.polys.iter().map(Polynomial::gradient).collect()
    }

    /// Substitutes a constant for one variable in every polynomial.
    pub fn bind(&self, var: usize, value: C64) -> PolySystem {
        PolySystem {
            vars: self.vars.clone(),
            polys: self.polys.iter().map(|p| p.bind(var, value)).collect(),
            params: self.params.clone(),
        }
    }

    pub fn embed(&self, target: &Vars) -> Result<PolySystem, PolyError> {
        Ok(PolySystem {
            vars: target.clone(),
            polys: self.polys.iter().map(|p| p.embed(target)).collect::<Result<_, _>>()?,
            params: Vec::new(),
        })
    }
}

/// Jacobian over every registry variable: rows are polynomials, columns variables.
pub fn jacobian(system: &PolySystem, point: &[C64]) -> Result<DMatrix<C64>, PolyError> {
    if point.len() != system.nvars() {
        return Err(PolyError::DimensionMismatch { expected: system.nvars(), got: point.len() });
    }
    let compiled = CompiledSystem::new(system.polys(), system.nvars());
    let mut vals = vec![C64::default(); system.len()];
    let mut jac = DMatrix::zeros(system.len(), system.nvars());
    compiled.eval_jac(point, &mut vals, &mut jac);
    Ok(jac)
}

/// `sum_i F_i(A x)^2`, the pullback of the sum of squares through `A`.
pub fn sum_of_squares_pullback(system: &PolySystem, a: &DMatrix<f64>) -> Result<Polynomial, PolyError> {
    let n = system.nvars();
    if a.nrows() != n || a.ncols() != n {
        return Err(PolyError::MatrixShape { rows: a.nrows(), cols: a.ncols(), nvars: n });
    }
    let mut scaled = a.clone();
    for mut row in scaled.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    let det = scaled.determinant().abs();
    if !(det > 1e-10) {
        return Err(PolyError::SingularMatrix(det));
    }
    let mut out = Polynomial::zero(system.vars());
    for p in system.polys() {
        let q = p.compose_linear(a)?;
        out = &out + &(&q * &q);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(r: f64) -> C64 {
        C64::new(r, 0.0)
    }

    fn p(vars: &Vars, s: &str) -> Polynomial {
        parse_polynomial(s, vars).unwrap()
    }

    #[test]
    fn eval_examples() {
        let v = Vars::new(["x", "y"]);
        assert_eq!(p(&v, "x^2 + y^2 - 1").eval(&[c(1.0), c(0.0)]).unwrap(), c(0.0));

        let v = Vars::new(["x", "y", "t"]);
        let q = p(&v, "x*y - t").bind(2, c(0.0));
        assert_eq!(q.eval(&[c(3.0), c(5.0), c(7.0)]).unwrap(), c(15.0));

        let v = Vars::new(["x", "y", "z"]);
        let samosa = p(&v, "2*x*y - x^2 - y^2 - z^2 + 1");
        assert_eq!(samosa.eval(&[c(0.0), c(0.0), c(1.0)]).unwrap(), c(0.0));
    }

    #[test]
    fn eval_dimension_mismatch() {
        let v = Vars::new(["x", "y"]);
        let err = p(&v, "x").eval(&[c(1.0)]).unwrap_err();
        assert_eq!(err, PolyError::DimensionMismatch { expected: 2, got: 1 });
    }

    #[test]
    fn diff_examples() {
        let v = Vars::new(["x", "y", "z"]);
        assert_eq!(p(&v, "x^2 - y^2*z").diff(1), p(&v, "-2*y*z"));
        assert!(p(&v, "7").diff(2).is_zero());

        let v = Vars::new(["x", "y"]);
        let lips = p(&v, "y^2 - (-x^2 + x^3)^2");
        let expected = p(&v, "-2*(x^3 - x^2)*(3*x^2 - 2*x)");
        assert_eq!(lips.diff(0), expected);
    }

    #[test]
    fn grlex_order() {
        let v = Vars::new(["x", "y"]);
        let q = p(&v, "y + x + x*y + y^2 + 1");
        let order: Vec<Vec<u32>> = q.terms().map(|(m, _)| m.exponents().to_vec()).collect();
        assert_eq!(order, vec![vec![1, 1], vec![0, 2], vec![1, 0], vec![0, 1], vec![0, 0]]);
    }

    #[test]
    fn jacobian_examples() {
        let v = Vars::new(["x", "y"]);
        let s = PolySystem::new(&v, vec![p(&v, "x^2 + y^2 - 1")]).unwrap();
        let j = jacobian(&s, &[c(1.0), c(0.0)]).unwrap();
        assert_eq!(j[(0, 0)], c(2.0));
        assert_eq!(j[(0, 1)], c(0.0));

        let v = Vars::new(["x1", "x2", "t", "s"]);
        let s = PolySystem::new(&v, vec![p(&v, "x1^2 - x2 - t"), p(&v, "x2"), p(&v, "s")]).unwrap();
        let j = jacobian(&s, &[c(0.0); 4]).unwrap();
        let expected = [[0.0, -1.0, -1.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
        for (r, row) in expected.iter().enumerate() {
            for (k, &e) in row.iter().enumerate() {
                assert_eq!(j[(r, k)], c(e));
            }
        }
    }

    #[test]
    fn sum_of_squares_examples() {
        let v = Vars::new(["x"]);
        let s = PolySystem::new(&v, vec![p(&v, "x - 1")]).unwrap();
        let f = sum_of_squares_pullback(&s, &DMatrix::identity(1, 1)).unwrap();
        assert_eq!(f, p(&v, "(x-1)^2"));

        let v = Vars::new(["x", "y"]);
        let s = PolySystem::new(&v, vec![p(&v, "x"), p(&v, "y")]).unwrap();
        let f = sum_of_squares_pullback(&s, &DMatrix::identity(2, 2)).unwrap();
        assert_eq!(f, p(&v, "x^2 + y^2"));

        let s = PolySystem::new(&v, vec![p(&v, "x + y")]).unwrap();
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let f = sum_of_squares_pullback(&s, &swap).unwrap();
        assert_eq!(f, p(&v, "(y + x)^2"));
    }

    #[test]
    fn sum_of_squares_rejects_singular() {
        let v = Vars::new(["x", "y"]);
        let s = PolySystem::new(&v, vec![p(&v, "x")]).unwrap();
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(sum_of_squares_pullback(&s, &a), Err(PolyError::SingularMatrix(_))));
    }

    #[test]
    fn display_round_trips() {
        let v = Vars::new(["x", "y"]);
        let q = p(&v, "-2.5*x^3*y + 0.125*y - 4 + x");
        let back = p(&v, &q.to_string());
        assert_eq!(q, back);
    }

    #[test]
    fn compose_linear_matches_substitution() {
        let v = Vars::new(["x", "y"]);
        let q = p(&v, "x^2*y - 3*y + 1");
        let a = DMatrix::from_row_slice(2, 2, &[0.3, -1.2, 0.7, 2.0]);
        let qa = q.compose_linear(&a).unwrap();
        let pt = [c(0.4), c(-1.3)];
        let ax = [c(0.3 * 0.4 - 1.2 * -1.3), c(0.7 * 0.4 + 2.0 * -1.3)];
        assert!((qa.eval(&pt).unwrap() - q.eval(&ax).unwrap()).norm() < 1e-13);
    }
}
