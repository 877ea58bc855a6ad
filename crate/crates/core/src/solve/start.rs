use super::SolveError;
use crate::poly::{Polynomial, PolySystem, C64};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// `{x_i^{d_i} - 1}` and all `prod d_i` of its roots.
pub fn total_degree_start(target: &PolySystem) -> Result<(PolySystem, Vec<Vec<C64>>), SolveError> {
    let n = target.nvars();
    if target.len() != n {
        return Err(SolveError::NotSquare { equations: target.len(), unknowns: n });
    }
    let degrees = target.degrees();
    if let Some(i) = degrees.iter().position(|&d| d == 0) {
        return Err(SolveError::ConstantEquation(i));
    }
    let vars = target.vars();
    let polys = (0..n)
        .map(|i| &Polynomial::var(vars, i).pow(degrees[i] as u32) - &Polynomial::constant(vars, 1.0))
        .collect();
    let start = PolySystem::new(vars, polys)?;
    let mut roots: Vec<Vec<C64>> = vec![Vec::new()];
    for &d in &degrees {
        let unity: Vec<C64> = (0..d).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)).collect();
        roots = roots
            .into_iter()
            .flat_map(|r| {
                unity.iter().map(move |u| {
                    let mut r2 = r.clone();
                    r2.push(*u);
                    r2
                })
            })
            .collect();
    }
    Ok((start, roots))
}

pub fn random_complex<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Multihomogeneous linear-product start system for the variable partition
/// `groups`: equation `i` becomes a product of random affine forms, one per
/// unit of its degree in each group. Only factor choices that give each
/// group as many equations as it has variables yield roots, so the root
/// count is the multihomogeneous Bezout number.
pub fn linear_product_start<R: Rng>(
    target: &PolySystem,
    groups: &[Vec<usize>],
    rng: &mut R,
) -> Result<(PolySystem, Vec<Vec<C64>>), SolveError> {
    let (start, _, roots) = linear_product_parts(target, groups, rng)?;
    Ok((start, roots))
}

/// Affine form `a . x + b` with `a` dense over all unknowns.
#[derive(Clone, Debug)]
pub struct Affine {
    pub a: Vec<C64>,
    pub b: C64,
}

/// Start system kept as products of affine forms, one product per equation.
#[derive(Clone, Debug)]
pub struct ProductSystem {
    rows: Vec<Vec<Affine>>,
}

impl ProductSystem {
    pub fn new(rows: Vec<Vec<Affine>>) -> Self {
        ProductSystem { rows }
    }

    pub fn eval(&self, x: &[C64], out: &mut [C64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().map(|l| l.a.iter().zip(x).map(|(a, v)| a * v).sum::<C64>() + l.b).product();
        }
    }

    /// Values into `out`, Jacobian into `jac`, by the product rule.
    pub fn eval_jac(&self, x: &[C64], out: &mut [C64], jac: &mut DMatrix<C64>) {
        let n = x.len();
        let one = C64::new(1.0, 0.0);
        let mut vals: Vec<C64> = Vec::new();
        let mut suffix: Vec<C64> = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            vals.clear();
            vals.extend(row.iter().map(|l| l.a.iter().zip(x).map(|(a, v)| a * v).sum::<C64>() + l.b));
            let m = vals.len();
            suffix.clear();
            suffix.resize(m + 1, one);
            for k in (0..m).rev() {
                suffix[k] = suffix[k + 1] * vals[k];
            }
            out[i] = suffix[0];
            for j in 0..n {
                jac[(i, j)] = C64::default();
            }
            let mut prefix = one;
            for (k, l) in row.iter().enumerate() {
                let w = prefix * suffix[k + 1];
                for j in 0..n {
                    jac[(i, j)] += l.a[j] * w;
                }
                prefix *= vals[k];
            }
        }
    }
}

pub(crate) fn linear_product_parts<R: Rng>(
    target: &PolySystem,
    groups: &[Vec<usize>],
    rng: &mut R,
) -> Result<(PolySystem, ProductSystem, Vec<Vec<C64>>), SolveError> {
    let n = target.nvars();
    if target.len() != n {
        return Err(SolveError::NotSquare { equations: target.len(), unknowns: n });
    }
    let mut covered = vec![false; n];
    for g in groups {
        for &v in g {
            covered[v] = true;
        }
    }
    assert!(covered.iter().all(|&c| c), "groups must cover every variable");
    let vars = target.vars();
    // factors[i][g] = list of (coefficients over group g, constant)
    let mut factors: Vec<Vec<Vec<(Vec<C64>, C64)>>> = Vec::with_capacity(n);
    let mut polys = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for (i, p) in target.polys().iter().enumerate() {
        let mut row = Vec::new();
        let mut per_group = Vec::new();
        let mut prod = Polynomial::constant(vars, 1.0);
        let mut any = false;
        for g in groups {
            let d = p.degree_in(g);
            let mut fs = Vec::new();
            for _ in 0..d {
                let a: Vec<C64> = g.iter().map(|_| random_complex(rng)).collect();
                let b = random_complex(rng);
                let mut l = Polynomial::constant(vars, b);
                for (k, &v) in g.iter().enumerate() {
                    l = &l + &Polynomial::var(vars, v).scale(a[k]);
                }
                prod = &prod * &l;
                let mut dense = vec![C64::default(); n];
                for (k, &v) in g.iter().enumerate() {
                    dense[v] = a[k];
                }
                row.push(Affine { a: dense, b });
                fs.push((a, b));
                any = true;
            }
            per_group.push(fs);
        }
        if !any {
            return Err(SolveError::ConstantEquation(i));
        }
        factors.push(per_group);
        polys.push(prod);
        rows.push(row);
    }
    let start = PolySystem::new(vars, polys)?;

    let mut roots = Vec::new();
    let mut choice: Vec<(usize, usize)> = Vec::with_capacity(n);
    let mut capacity: Vec<usize> = groups.iter().map(Vec::len).collect();
    enumerate(&factors, groups, &mut choice, &mut capacity, &mut roots, n);
    Ok((start, ProductSystem::new(rows), roots))
}

fn enumerate(
    factors: &[Vec<Vec<(Vec<C64>, C64)>>],
    groups: &[Vec<usize>],
    choice: &mut Vec<(usize, usize)>,
    capacity: &mut [usize],
    roots: &mut Vec<Vec<C64>>,
    n: usize,
) {
    let i = choice.len();
    if i == factors.len() {
        if let Some(r) = solve_choice(factors, groups, choice, n) {
            roots.push(r);
        }
        return;
    }
    for g in 0..groups.len() {
        if capacity[g] == 0 {
            continue;
        }
        capacity[g] -= 1;
        for k in 0..factors[i][g].len() {
            choice.push((g, k));
            enumerate(factors, groups, choice, capacity, roots, n);
            choice.pop();
        }
        capacity[g] += 1;
    }
}

fn solve_choice(
    factors: &[Vec<Vec<(Vec<C64>, C64)>>],
    groups: &[Vec<usize>],
    choice: &[(usize, usize)],
    n: usize,
) -> Option<Vec<C64>> {
    let mut x = vec![C64::default(); n];
    for (gi, g) in groups.iter().enumerate() {
        let rows: Vec<&(Vec<C64>, C64)> =
            choice.iter().enumerate().filter(|(_, c)| c.0 == gi).map(|(i, c)| &factors[i][gi][c.1]).collect();
        let m = g.len();
        let a = DMatrix::from_fn(m, m, |r, c| rows[r].0[c]);
        let b = DVector::from_fn(m, |r, _| -rows[r].1);
        let y = a.lu().solve(&b)?;
        for (k, &v) in g.iter().enumerate() {
            x[v] = y[k];
        }
    }
    Some(x)
}
