//! Dense complex linear algebra used by the solver: numerical rank, square
//! and least-squares solves, null spaces.

use crate::poly::C64;
use nalgebra::{DMatrix, DVector};

/// Singular values, largest first.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Number of singular values above `tol * sigma_max`.
pub fn numerical_rank(m: &DMatrix<C64>, tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        None => 0,
        Some(0.0) => 0,
        Some(&top) => s.iter().filter(|&&v| v > tol * top).count(),
    }
}

/// Like [`numerical_rank`], but singular values are compared against
/// `tol * max(sigma_max, floor)` so an almost-zero matrix has rank zero.
pub fn numerical_rank_floor(m: &DMatrix<C64>, tol: f64, floor: f64) -> usize {
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0).max(floor);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > tol * top).count()
}

/// Ratio of smallest to largest singular value over `min(rows, cols)` values.
pub fn inverse_condition(m: &DMatrix<C64>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&a), Some(&b)) if a > 0.0 => b / a,
        _ => 0.0,
    }
}

/// Solves `m x = b`. Square systems go through LU; others (or LU failures)
/// take the minimum-norm least-squares solution.
pub fn solve(m: &DMatrix<C64>, b: &DVector<C64>) -> Option<DVector<C64>> {
    if m.is_square() {
        if let Some(x) = m.clone().lu().solve(b) {
            if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                return Some(x);
            }
        }
    }
    min_norm_solve(m, b)
}

pub fn min_norm_solve(m: &DMatrix<C64>, b: &DVector<C64>) -> Option<DVector<C64>> {
    let svd = m.clone().svd(true, true);
    let top = svd.singular_values.max();
    let eps = (top * 1e-14).max(f64::MIN_POSITIVE);
    svd.solve(b, eps).ok()
}

/// Orthonormal basis (as columns) of the numerical null space of `m`.
pub fn null_space(m: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    let n = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    // pad to at least n rows so the SVD yields a full right basis
    let padded = if m.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let top = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top == 0.0 || svd.singular_values[i] <= tol * top)
        .collect();
    let mut out = DMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        for j in 0..n {
            out[(j, c)] = v_t[(i, j)].conj();
        }
    }
    out
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(r: f64) -> C64 {
        C64::new(r, 0.0)
    }

    #[test]
    fn rank_of_examples() {
        let m = DMatrix::from_row_slice(2, 3, &[c(1.0), c(2.0), c(3.0), c(2.0), c(4.0), c(6.0)]);
        assert_eq!(numerical_rank(&m, 1e-8), 1);
        assert_eq!(numerical_rank(&DMatrix::<C64>::identity(3, 3), 1e-8), 3);
        assert_eq!(numerical_rank(&DMatrix::<C64>::zeros(2, 2), 1e-8), 0);
        let tiny = DMatrix::from_element(1, 2, C64::new(1e-16, 0.0));
        assert_eq!(numerical_rank(&tiny, 1e-8), 1);
        assert_eq!(numerical_rank_floor(&tiny, 1e-8, 1.0), 0);
    }

    #[test]
    fn null_space_is_annihilated() {
        let m = DMatrix::from_row_slice(2, 3, &[c(1.0), c(2.0), c(3.0), c(0.0), c(1.0), c(-1.0)]);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.ncols(), 1);
        assert!((&m * &ns).norm() < 1e-12);
    }

    #[test]
    fn min_norm_underdetermined() {
        let m = DMatrix::from_row_slice(1, 2, &[c(1.0), c(1.0)]);
        let x = solve(&m, &DVector::from_vec(vec![c(2.0)])).unwrap();
        assert!((x[0] - c(1.0)).norm() < 1e-12 && (x[1] - c(1.0)).norm() < 1e-12);
    }
}
