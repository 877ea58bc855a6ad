//! Polar systems, isosingular deflation, witness systems for limit points,
//! and objectives built from Jacobian minors.

use crate::linalg::numerical_rank_floor;
use crate::poly::{CompiledSystem, PolyError, Polynomial, PolySystem, Vars, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::HashMap;
use thiserror::Error;

pub const PARAM_T: &str = "_t";
pub const SLACK_S: &str = "_s";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeflationError {
    #[error("deflation did not stabilize within {0} steps")]
    Cap(usize),
    #[error("deflation stalled with null-space dimension {null_dim}, target {target}")]
    Stalled { null_dim: usize, target: usize },
    #[error("no {size}x{size} minor is nonzero at the anchor (largest |det| = {best:e})")]
    NoMinor { size: usize, best: f64 },
    #[error("polar index {i} outside 1..={n}")]
    PolarIndex { i: usize, n: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone)]
pub struct DeflationConfig {
    /// relative singular value threshold for ranks at the anchor
    pub rank_tol: f64,
    pub max_steps: usize,
    /// above this many minors, rows are replaced by random combinations
    pub minor_cap: usize,
    /// terms below this fraction of the largest coefficient are dropped from minors
    pub prune: f64,
    pub seed: u64,
}

impl Default for DeflationConfig {
    fn default() -> Self {
        DeflationConfig { rank_tol: 1e-6, max_steps: 10, minor_cap: 400, prune: 1e-12, seed: 0 }
    }
}

/// `{f - t xi, df/dx_{i+1}, ..., df/dx_n}` (1-based `i`). With `xi` the
/// registry gains the parameter `t` as its last variable.
pub fn polar_system(f: &Polynomial, i: usize, xi: Option<C64>) -> Result<PolySystem, DeflationError> {
    let n = f.nvars();
    if i == 0 || i > n {
        return Err(DeflationError::PolarIndex { i, n });
    }
    match xi {
        None => {
            let mut polys = vec![f.clone()];
            polys.extend((i..n).map(|k| f.diff(k)));
            Ok(PolySystem::new(f.vars(), polys)?)
        }
        Some(xi) => {
            let vars = f.vars().extended([PARAM_T]);
            let fe = f.embed(&vars)?;
            let t = Polynomial::var(&vars, n);
            let mut polys = vec![&fe - &t.scale(xi)];
            polys.extend((i..n).map(|k| fe.diff(k)));
            Ok(PolySystem::new(&vars, polys)?.with_params(vec![n]))
        }
    }
}

/// Largest coefficient modulus in `system`; the floor for rank decisions.
pub fn coefficient_scale(system: &PolySystem) -> f64 {
    system.polys().iter().map(|p| p.max_abs_coeff()).fold(0.0, f64::max)
}

/// Determinant of the Jacobian of `system` restricted to the columns `cols`
/// (one column per equation).
pub fn jacobian_polar_minor(system: &PolySystem, cols: &[usize]) -> Polynomial {
    assert_eq!(cols.len(), system.len(), "need one column per equation");
    let jac = system.symbolic_jacobian();
    let rows: Vec<usize> = (0..system.len()).collect();
    minors_for_rows(&jac, &rows, cols, system.vars())
        .remove(cols)
        .expect("full column set")
}

/// All `rows.len()`-sized minors over column subsets of `cols`, keyed by
/// the (sorted) column subset. Laplace expansion along the last row with
/// memoization over column subsets.
fn minors_for_rows(jac: &[Vec<Polynomial>], rows: &[usize], cols: &[usize], vars: &Vars) -> HashMap<Vec<usize>, Polynomial> {
    let mut level: HashMap<Vec<usize>, Polynomial> = HashMap::new();
    level.insert(Vec::new(), Polynomial::constant(vars, 1.0));
    for (j, &r) in rows.iter().enumerate() {
        let mut next: HashMap<Vec<usize>, Polynomial> = HashMap::new();
        for subset in subsets(cols, j + 1) {
            let mut acc = Polynomial::zero(vars);
            for (p, &c) in subset.iter().enumerate() {
                let mut rest = subset.clone();
                rest.remove(p);
                let Some(sub) = level.get(&rest) else { continue };
                let entry = &jac[r][c];
                if entry.is_zero() || sub.is_zero() {
                    continue;
                }
                let term = entry * sub;
                if (j + p) % 2 == 0 {
                    acc = &acc + &term;
                } else {
                    acc = &acc - &term;
                }
            }
            next.insert(subset, acc);
        }
        level = next;
    }
    level
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Numerical Jacobian of `system` at `q`.
pub fn jacobian_at(system: &PolySystem, q: &[C64]) -> DMatrix<C64> {
    let cs = CompiledSystem::new(system.polys(), system.nvars());
    let mut vals = vec![C64::default(); system.len()];
    let mut jac = DMatrix::zeros(system.len(), system.nvars());
    cs.eval_jac(q, &mut vals, &mut jac);
    jac
}

#[derive(Debug, Clone)]
pub struct DeflationStep {
    pub system: PolySystem,
    /// numerical rank of the input Jacobian at the anchor
    pub rank: usize,
    pub appended: usize,
    /// rows were replaced by random combinations because of the minor cap
    pub randomized: bool,
}

/// One application of the isosingular deflation operator: append every
/// `(r+1) x (r+1)` minor of the symbolic Jacobian, `r` the rank at `q`.
/// Zero minors and minors proportional to existing equations are skipped.
pub fn deflation_step(system: &PolySystem, q: &[C64], cfg: &DeflationConfig) -> DeflationStep {
    let jq = jacobian_at(system, q);
    let r = numerical_rank_floor(&jq, cfg.rank_tol, coefficient_scale(system));
    let (m, n) = (system.len(), system.nvars());
    let k = r + 1;
    if k > m || k > n {
        return DeflationStep { system: system.clone(), rank: r, appended: 0, randomized: false };
    }
    let vars = system.vars();
    let sym = system.symbolic_jacobian();
    let all_cols: Vec<usize> = (0..n).collect();
    let mut minors: Vec<Polynomial> = Vec::new();
    let randomized = binomial(m, k).saturating_mul(binomial(n, k)) > cfg.minor_cap;
    if randomized {
        let mut rng = crate::solve::rng_from_seed(cfg.seed ^ (m as u64) << 8 ^ n as u64);
        let combos: Vec<Vec<Polynomial>> = (0..k)
            .map(|_| {
                let w: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
                (0..n)
                    .map(|c| {
                        (0..m).fold(Polynomial::zero(vars), |acc, row| &acc + &sym[row][c].scale(w[row]))
                    })
                    .collect()
            })
            .collect();
        let rows: Vec<usize> = (0..k).collect();
        let mut out: Vec<_> = minors_for_rows(&combos, &rows, &all_cols, vars).into_iter().collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        minors.extend(out.into_iter().map(|(_, p)| p));
    } else {
        for rows in subsets(&(0..m).collect::<Vec<_>>(), k) {
            let mut out: Vec<_> = minors_for_rows(&sym, &rows, &all_cols, vars).into_iter().collect();
            out.sort_by(|a, b| a.0.cmp(&b.0));
            minors.extend(out.into_iter().map(|(_, p)| p));
        }
    }
    let mut polys = system.polys().to_vec();
    let mut appended = 0;
    for mnr in minors {
        let p = mnr.pruned(cfg.prune);
        if p.is_zero() || polys.iter().any(|e| e.proportional_to(&p, 1e-9)) {
            continue;
        }
        polys.push(p);
        appended += 1;
    }
    let out = PolySystem::new(vars, polys).expect("same registry").with_params(system.params().to_vec());
    DeflationStep { system: out, rank: r, appended, randomized }
}

#[derive(Debug, Clone)]
pub struct DeflationSequence {
    pub systems: Vec<PolySystem>,
    pub anchor: Vec<C64>,
    pub ranks: Vec<usize>,
    pub randomized: bool,
}

/// Iterates the deflation operator from `system` at `q` until it adds
/// nothing or the rank has stayed fixed across two consecutive steps.
pub fn deflation_sequence(system: &PolySystem, q: &[C64], cfg: &DeflationConfig) -> Result<DeflationSequence, DeflationError> {
    let mut systems = vec![system.clone()];
    let mut ranks = Vec::new();
    let mut randomized = false;
    for _ in 0..cfg.max_steps {
        let step = deflation_step(systems.last().unwrap(), q, cfg);
        ranks.push(step.rank);
        randomized |= step.randomized;
        let k = ranks.len();
        let flat = k >= 3 && ranks[k - 1] == ranks[k - 2] && ranks[k - 2] == ranks[k - 3];
        if step.appended == 0 || flat {
            return Ok(DeflationSequence { systems, anchor: q.to_vec(), ranks, randomized });
        }
        systems.push(step.system);
    }
    Err(DeflationError::Cap(cfg.max_steps))
}

#[derive(Debug, Clone)]
pub struct WitnessSystem {
    /// system over the original unknowns
    pub system: PolySystem,
    /// ranks along the deflation of `{H(x,t), s}` at `(p, 0, 0)`
    pub ranks: Vec<usize>,
    pub randomized: bool,
}

/// Deflates `{H(x,t), s}` at `(p, 0, 0)` and restricts the result to
/// `t = s = 0`. `family` carries `t` as its last registry variable.
pub fn witness_system_for_limit(family: &PolySystem, p: &[C64], cfg: &DeflationConfig) -> Result<WitnessSystem, DeflationError> {
    let n = family.nvars() - 1;
    assert_eq!(p.len(), n);
    let vars = family.vars().extended([SLACK_S]);
    let mut polys: Vec<Polynomial> = family.polys().iter().map(|q| q.embed(&vars)).collect::<Result<_, _>>()?;
    polys.push(Polynomial::var(&vars, n + 1));
    let f0 = PolySystem::new(&vars, polys)?;
    let mut q = p.to_vec();
    q.push(C64::default());
    q.push(C64::default());
    let seq = deflation_sequence(&f0, &q, cfg)?;
    let last = seq.systems.last().unwrap();
    let xvars = family.vars().prefix(n);
    let mut out: Vec<Polynomial> = Vec::new();
    for poly in last.polys() {
        let b = poly.bind(n, C64::default()).bind(n + 1, C64::default());
        let b = b.truncate_vars(&xvars)?.pruned(cfg.prune);
        if b.is_zero() || out.iter().any(|e| e.proportional_to(&b, 1e-9)) {
            continue;
        }
        out.push(b);
    }
    Ok(WitnessSystem { system: PolySystem::new(&xvars, out)?, ranks: seq.ranks, randomized: seq.randomized })
}

#[derive(Debug, Clone)]
pub struct RefinedSystem {
    pub system: PolySystem,
    pub ranks: Vec<usize>,
}

/// Deflates `system` at `p` until the Jacobian null space has dimension
/// `target_dim`.
pub fn multiplicity_one_refine(
    system: &PolySystem,
    p: &[C64],
    target_dim: usize,
    cfg: &DeflationConfig,
) -> Result<RefinedSystem, DeflationError> {
    let n = system.nvars();
    let mut current = system.clone();
    let mut ranks = Vec::new();
    for _ in 0..=cfg.max_steps {
        let r = numerical_rank_floor(&jacobian_at(&current, p), cfg.rank_tol, coefficient_scale(&current));
        ranks.push(r);
        let null_dim = n - r;
        if null_dim == target_dim {
            return Ok(RefinedSystem { system: current, ranks });
        }
        if null_dim < target_dim {
            return Err(DeflationError::Stalled { null_dim, target: target_dim });
        }
        let step = deflation_step(&current, p, cfg);
        if step.appended == 0 {
            return Err(DeflationError::Stalled { null_dim, target: target_dim });
        }
        current = step.system;
    }
    Err(DeflationError::Cap(cfg.max_steps))
}

/// `det M(x)` for a `target_rank`-square submatrix `M` of the symbolic
/// Jacobian, chosen by complete pivoting on the numerical Jacobian at `z`.
pub fn minor_g(system: &PolySystem, z: &[C64], target_rank: usize) -> Result<Polynomial, DeflationError> {
    let jz = jacobian_at(system, z);
    let (m, n) = jz.shape();
    if target_rank == 0 {
        return Ok(Polynomial::constant(system.vars(), 1.0));
    }
    if target_rank > m.min(n) {
        return Err(DeflationError::NoMinor { size: target_rank, best: 0.0 });
    }
    let mut a = jz.clone();
    let mut rows: Vec<usize> = Vec::new();
    let mut cols: Vec<usize> = Vec::new();
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for _ in 0..target_rank {
        let mut best = (0, 0, -1.0);
        for i in 0..m {
            if rows.contains(&i) {
                continue;
            }
            for j in 0..n {
                if cols.contains(&j) {
                    continue;
                }
                let v = a[(i, j)].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        let (pi, pj, pv) = best;
        if !(pv > 1e-12 * scale.max(1e-300)) {
            return Err(DeflationError::NoMinor { size: target_rank, best: pv.max(0.0) });
        }
        let piv = a[(pi, pj)];
        for i in 0..m {
            if i == pi || rows.contains(&i) {
                continue;
            }
            let f = a[(i, pj)] / piv;
            for j in 0..n {
                let sub = f * a[(pi, j)];
                a[(i, j)] -= sub;
            }
        }
        rows.push(pi);
        cols.push(pj);
    }
    rows.sort_unstable();
    cols.sort_unstable();
    let sym = system.symbolic_jacobian();
    let g = minors_for_rows(&sym, &rows, &cols, system.vars()).remove(&cols).expect("subset present");
    let gz = g.eval(z)?;
    if !(gz.norm() > 1e-10) {
        return Err(DeflationError::NoMinor { size: target_rank, best: gz.norm() });
    }
    Ok(g)
}

#[derive(Debug, Clone)]
pub struct SignatureGroup {
    pub signature: Vec<usize>,
    /// indices into the input point list
    pub members: Vec<usize>,
    /// multiplicity-one witness system of the representative
    pub witness: PolySystem,
    pub objective: Option<Polynomial>,
}

/// Groups limit points of `family` by their deflation rank signature and
/// builds one minor objective per group at its first member. Points whose
/// deflation fails are reported separately with the error.
pub fn group_by_signature(
    points: &[Vec<C64>],
    family: &PolySystem,
    target_dim: usize,
    cfg: &DeflationConfig,
) -> (Vec<SignatureGroup>, Vec<(usize, DeflationError)>) {
    let mut groups: Vec<SignatureGroup> = Vec::new();
    let mut failures = Vec::new();
    let n = family.nvars() - 1;
    for (idx, p) in points.iter().enumerate() {
        let res = witness_system_for_limit(family, p, cfg).and_then(|w| {
            let refined = multiplicity_one_refine(&w.system, p, target_dim, cfg)?;
            let mut sig = w.ranks.clone();
            sig.push(usize::MAX);
            sig.extend(&refined.ranks);
            Ok((sig, refined.system))
        });
        match res {
            Ok((sig, witness)) => {
                if let Some(g) = groups.iter_mut().find(|g| g.signature == sig) {
                    g.members.push(idx);
                } else {
                    let objective = minor_g(&witness, p, n - target_dim).ok();
                    groups.push(SignatureGroup { signature: sig, members: vec![idx], witness, objective });
                }
            }
            Err(e) => failures.push((idx, e)),
        }
    }
    (groups, failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn sys(vars: &[&str], eqs: &[&str]) -> PolySystem {
        let v = Vars::new(vars.iter().copied());
        PolySystem::new(&v, eqs.iter().map(|e| parse_polynomial(e, &v).unwrap()).collect()).unwrap()
    }

    fn c(r: f64) -> C64 {
        C64::new(r, 0.0)
    }

    fn exact() -> DeflationConfig {
        DeflationConfig { rank_tol: 1e-10, ..Default::default() }
    }

    #[test]
    fn polar_system_shapes() {
        let v = Vars::new(["x", "y"]);
        let f = parse_polynomial("x^2 + y^2 - 1", &v).unwrap();
        let s = polar_system(&f, 1, None).unwrap();
        assert_eq!(s.polys()[1], parse_polynomial("2*y", &v).unwrap());
        let s = polar_system(&f, 2, Some(c(1.0))).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.nvars(), 3);
        assert!(polar_system(&f, 0, None).is_err());
    }

    #[test]
    fn handle_polar_minor() {
        let s = sys(&["x", "y", "z", "w"], &["x^2 - y^2*z", "x^2 + y^2 + (z+1)^2 + w^2 - 1/4"]);
        let m = jacobian_polar_minor(&s, &[1, 2]);
        let expected = parse_polynomial("2*y^3 - 4*y*z^2 - 4*y*z", s.vars()).unwrap();
        assert!(m.proportional_to(&expected, 1e-12));
    }

    #[test]
    fn deflation_isolates_point() {
        let s = sys(&["x1", "x2", "t", "s"], &["x1*x2 - t", "x1*x2 - x1", "s"]);
        let q = [c(0.0), c(1.0), c(0.0), c(0.0)];
        let step = deflation_step(&s, &q, &exact());
        assert_eq!(step.rank, 2);
        let new = &step.system.polys()[3..];
        let x1 = parse_polynomial("x1", s.vars()).unwrap();
        let x2m1 = parse_polynomial("x2 - 1", s.vars()).unwrap();
        assert_eq!(new.len(), 2);
        assert!(new.iter().any(|p| p.proportional_to(&x1, 1e-12)));
        assert!(new.iter().any(|p| p.proportional_to(&x2m1, 1e-12)));
    }

    #[test]
    fn deflation_stationary() {
        let s = sys(&["x1", "x2", "t", "s"], &["x1^2 - x2 - t", "x2", "s"]);
        let step = deflation_step(&s, &[c(0.0); 4], &exact());
        assert_eq!(step.appended, 0);
        assert_eq!(step.system, s);
    }

    #[test]
    fn deflation_of_square() {
        let s = sys(&["x"], &["x^2"]);
        let step = deflation_step(&s, &[c(0.0)], &exact());
        assert_eq!(step.rank, 0);
        assert_eq!(step.system.polys()[1], parse_polynomial("2*x", s.vars()).unwrap());
    }

    #[test]
    fn refine_cube() {
        let s = sys(&["x"], &["x^3"]);
        let r = multiplicity_one_refine(&s, &[c(0.0)], 0, &exact()).unwrap();
        assert_eq!(r.ranks, vec![0, 0, 1]);
        let v = s.vars();
        let expected: Vec<Polynomial> =
            ["x^3", "3*x^2", "6*x"].iter().map(|e| parse_polynomial(e, v).unwrap()).collect();
        assert_eq!(r.system.polys(), &expected[..]);
    }

    #[test]
    fn refine_nonreduced_point() {
        let s = sys(&["x1", "x2"], &["x1^2 - x2", "x2"]);
        let r = multiplicity_one_refine(&s, &[c(0.0), c(0.0)], 0, &exact()).unwrap();
        assert_eq!(r.ranks, vec![1, 2]);
        let added = r.system.polys().last().unwrap();
        assert!(added.proportional_to(&parse_polynomial("x1", s.vars()).unwrap(), 1e-12));
    }

    #[test]
    fn witness_for_point_limit() {
        let fam = sys(&["x1", "x2", "_t"], &["x1*x2 - _t", "x1*x2 - x1"]);
        let w = witness_system_for_limit(&fam, &[c(0.0), c(1.0)], &exact()).unwrap();
        assert_eq!(w.ranks[0], 2);
        let v = w.system.vars();
        assert!(w.system.polys().iter().any(|p| p.proportional_to(&parse_polynomial("x1", v).unwrap(), 1e-12)));
        assert!(w.system.polys().iter().any(|p| p.proportional_to(&parse_polynomial("x2 - 1", v).unwrap(), 1e-12)));
        assert_eq!(crate::linalg::numerical_rank(&jacobian_at(&w.system, &[c(0.0), c(1.0)]), 1e-10), 2);
    }

    #[test]
    fn witness_for_double_point() {
        let fam = sys(&["x1", "x2", "_t"], &["x1^2 - x2 - _t", "x2"]);
        let w = witness_system_for_limit(&fam, &[c(0.0), c(0.0)], &exact()).unwrap();
        let v = w.system.vars();
        let expected: Vec<Polynomial> = ["x1^2 - x2", "x2"].iter().map(|e| parse_polynomial(e, v).unwrap()).collect();
        assert_eq!(w.system.polys(), &expected[..]);
        let r = multiplicity_one_refine(&w.system, &[c(0.0), c(0.0)], 0, &exact()).unwrap();
        assert!(r.system.polys()[2].proportional_to(&parse_polynomial("x1", v).unwrap(), 1e-12));
    }

    #[test]
    fn minor_objectives() {
        let s = sys(&["x", "y"], &["x^2 + y^2 - 1"]);
        let g = minor_g(&s, &[c(1.0), c(0.0)], 1).unwrap();
        assert_eq!(g, parse_polynomial("2*x", s.vars()).unwrap());
        let s = sys(&["x1", "x2"], &["x1", "x2 - 1"]);
        let g = minor_g(&s, &[c(0.0), c(1.0)], 2).unwrap();
        assert!(g.is_constant() && (g.coeff(&[0, 0]).norm() - 1.0).abs() < 1e-14);
        let s = sys(&["x"], &["x^2"]);
        assert!(minor_g(&s, &[c(0.0)], 1).is_err());
    }
}
