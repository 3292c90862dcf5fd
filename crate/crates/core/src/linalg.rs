//! Small dense linear algebra used throughout: a Householder least-squares
//! solver for the stacked contact systems, and SVD-based subspace helpers
//! (orthonormal spans, null spaces, principal-angle sines).

use nalgebra::DMatrix;

/// Singular values below `DEFAULT_RANK_TOL * sigma_max` count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Least-squares solve of the row-major `m x n` system `a x = b` (m >= n).
///
/// `a` and `b` are overwritten. Returns `None` when a pivot of the triangular
/// factor is negligible relative to the largest one.
pub(crate) fn least_squares(a: &mut [f64], m: usize, n: usize, b: &mut [f64], x: &mut [f64]) -> Option<()> {
    debug_assert!(m >= n && a.len() == m * n && b.len() == m && x.len() == n);
    let mut pivot_scale = 0.0f64;
    for k in 0..n {
        let mut norm = 0.0;
        for i in k..m {
            norm += a[i * n + k] * a[i * n + k];
        }
        let norm = norm.sqrt();
        pivot_scale = pivot_scale.max(norm);
        if norm == 0.0 {
            return None;
        }
        let alpha = if a[k * n + k] > 0.0 { -norm } else { norm };
        // v = column - alpha e_k, stored in place
        a[k * n + k] -= alpha;
        let mut vnorm2 = 0.0;
        for i in k..m {
            vnorm2 += a[i * n + k] * a[i * n + k];
        }
        if vnorm2 > 0.0 {
            for j in (k + 1)..n {
                let mut dot = 0.0;
                for i in k..m {
                    dot += a[i * n + k] * a[i * n + j];
                }
                let s = 2.0 * dot / vnorm2;
                for i in k..m {
                    a[i * n + j] -= s * a[i * n + k];
                }
            }
            let mut dot = 0.0;
            for i in k..m {
                dot += a[i * n + k] * b[i];
            }
            let s = 2.0 * dot / vnorm2;
            for i in k..m {
                b[i] -= s * a[i * n + k];
            }
        }
        a[k * n + k] = alpha;
    }
    for k in (0..n).rev() {
        let diag = a[k * n + k];
        if diag.abs() <= 1e-13 * pivot_scale {
            return None;
        }
        let mut acc = b[k];
        for j in (k + 1)..n {
            acc -= a[k * n + j] * x[j];
        }
        x[k] = acc / diag;
    }
    Some(())
}

/// Singular values of `m` (any shape, possibly empty).
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rank_tol * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rank_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&v| v > rank_tol * smax).count(),
        _ => 0,
    }
}

/// Orthonormal basis (as columns) of the span of the columns of `m`.
pub fn orthonormal_span(m: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return DMatrix::zeros(rows, 0);
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rank_tol * smax)
        .collect();
    DMatrix::from_fn(rows, keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthonormal basis (as columns) of `{x : m x = 0}`.
///
/// A zero singular value threshold is taken relative to `scale`, falling back
/// to the largest singular value when `scale` is `None`.
pub fn null_space(m: &DMatrix<f64>, rank_tol: f64, scale: Option<f64>) -> DMatrix<f64> {
    let cols = m.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    // Pad to at least square so the thin SVD yields a complete right basis.
    let rows = m.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let reference = scale.unwrap_or(smax);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| reference == 0.0 || svd.singular_values[i] <= rank_tol * reference)
        .collect();
    DMatrix::from_fn(cols, keep.len(), |r, c| vt[(keep[c], r)])
}

/// Largest principal-angle sine of span(`w`) against span(`q`):
/// `|| (I - q q^T) w ||_2` for orthonormal `w` and `q`.
///
/// Zero when `w` is empty; one when `w` is nonempty and `q` is empty.
pub fn inclusion_sine(w: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    if w.ncols() == 0 {
        return 0.0;
    }
    if q.ncols() == 0 {
        return 1.0;
    }
    let residual = w - q * (q.transpose() * w);
    singular_values(&residual).first().copied().unwrap_or(0.0).min(1.0)
}

/// Symmetric subspace discrepancy: 1 when dimensions differ, otherwise the
/// largest principal-angle sine.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    inclusion_sine(a, b).max(inclusion_sine(b, a))
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn columns(cols: &[Vec<f64>], rows: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r])
}
