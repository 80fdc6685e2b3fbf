//! Small dense helpers over nalgebra: complexification, conditioning,
//! orthonormal bases, null spaces and principal angles.

use crate::error::{GkError, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;
pub type RVec = DVector<f64>;
pub type CVec = DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Largest condition number accepted before a Jacobian is declared singular.
pub const COND_MAX: f64 = 1e8;
/// Tolerance for pure linear-algebra identities.
pub const TOL_ALG: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Standard complex structure on R^{2n} with blocks [[0,-1],[1,0]].
pub fn j_std(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k, 2 * k + 1)] = -1.0;
        j[(2 * k + 1, 2 * k)] = 1.0;
    }
    j
}

pub fn complexify(m: &RMat) -> CMat {
    m.map(|x| c(x, 0.0))
}

pub fn re_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn im_part(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

pub fn frob(m: &RMat) -> f64 {
    m.norm()
}

pub fn frob_c(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute entry.
pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// 2-norm condition number; infinite for singular input.
pub fn cond(m: &RMat) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let hi = sv.max();
    let lo = sv.min();
    if lo <= 0.0 || !lo.is_finite() {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Inverse guarded by the conditioning gate.
pub fn inverse_checked(m: &RMat) -> Result<RMat> {
    let k = cond(m);
    if !(k < COND_MAX) {
        return Err(GkError::Conditioning { cond: k });
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| GkError::Singular("matrix inverse".into()))
}

pub fn inverse_checked_c(m: &CMat) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| GkError::Singular("complex matrix inverse".into()))
}

/// Orthonormal basis of the column space, dropping directions whose
/// singular value is below `rel_tol` times max(largest, 1).
pub fn orth(m: &CMat, rel_tol: f64) -> CMat {
    if m.is_empty() {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > rel_tol * smax.max(1.0))
        .collect();
    let mut out = CMat::zeros(m.nrows(), keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        out.set_column(dst, &u.column(src));
    }
    out
}

/// Numerical rank relative to max(largest singular value, 1).
pub fn rank(m: &CMat, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max();
    sv.iter().filter(|&&s| s > rel_tol * smax.max(1.0)).count()
}

/// Number of singular values above an absolute threshold.
pub fn rank_abs(m: &CMat, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    m.clone().svd(false, false).singular_values.iter().filter(|&&s| s > tol).count()
}

/// Orthonormal basis of the null space.
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return CMat::identity(cols, cols);
    }
    // pad to at least square so the SVD returns a full right factor
    let rows = m.nrows().max(cols);
    let mut a = CMat::zeros(rows, cols);
    a.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let sv = &svd.singular_values;
    let smax = sv.max().max(1.0);
    let null: Vec<usize> = (0..sv.len()).filter(|&k| sv[k] <= rel_tol * smax).collect();
    let mut out = CMat::zeros(cols, null.len());
    for (dst, &src) in null.iter().enumerate() {
        let row = vt.row(src).adjoint();
        out.set_column(dst, &row);
    }
    out
}

/// Sines of the principal angles between span(q2) and span(q1), both given
/// with orthonormal columns. Sorted ascending.
fn principal_sines(q1: &CMat, q2: &CMat) -> Vec<f64> {
    let resid = q2 - q1 * (q1.adjoint() * q2);
    let mut s: Vec<f64> = resid.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

/// Largest principal angle between the column spaces of two bases.
/// Computed from sines so it stays accurate near zero.
pub fn largest_principal_angle(a: &CMat, b: &CMat) -> Result<f64> {
    let qa = orth(a, 1e-12);
    let qb = orth(b, 1e-12);
    if qa.ncols() != a.ncols() {
        return Err(GkError::RankDeficient { rank: qa.ncols(), needed: a.ncols() });
    }
    if qb.ncols() != b.ncols() {
        return Err(GkError::RankDeficient { rank: qb.ncols(), needed: b.ncols() });
    }
    if qa.ncols() != qb.ncols() {
        return Err(GkError::Dimension { expected: qa.ncols(), got: qb.ncols() });
    }
    let s = principal_sines(&qa, &qb);
    Ok(s.last().copied().unwrap_or(0.0).min(1.0).asin())
}

/// Smallest principal angle between two subspaces of possibly different
/// dimension. Zero when they intersect nontrivially.
pub fn smallest_principal_angle(a: &CMat, b: &CMat) -> f64 {
    let qa = orth(a, 1e-12);
    let qb = orth(b, 1e-12);
    if qa.ncols() + qb.ncols() > a.nrows() {
        return 0.0;
    }
    let s = principal_sines(&qa, &qb);
    s.first().copied().unwrap_or(1.0).min(1.0).asin()
}

/// Smallest eigenvalue of a real symmetric matrix (symmetrized first).
pub fn min_sym_eigenvalue(m: &RMat) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    s.symmetric_eigen().eigenvalues.min()
}

/// Smallest eigenvalue of a complex Hermitian matrix (Hermitized first).
pub fn min_herm_eigenvalue(m: &CMat) -> f64 {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    h.symmetric_eigen().eigenvalues.min()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_std_squares_to_minus_one() {
        let j = j_std(3);
        assert!(frob(&(&j * &j + RMat::identity(6, 6))) == 0.0);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = CMat::from_row_slice(1, 3, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let n = null_space(&m, 1e-12);
        assert_eq!(n.ncols(), 2);
        assert!(max_abs_c(&(&m * &n)) < 1e-14);
    }

    #[test]
    fn principal_angle_of_lines_in_plane() {
        let a = CMat::from_column_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let theta: f64 = 0.3;
        let b = CMat::from_column_slice(2, 1, &[c(theta.cos(), 0.0), c(theta.sin(), 0.0)]);
        assert!((largest_principal_angle(&a, &b).unwrap() - theta).abs() < 1e-14);
        assert!((smallest_principal_angle(&a, &b) - theta).abs() < 1e-14);
    }

    #[test]
    fn tiny_angles_resolve_below_arccos_floor() {
        let a = CMat::from_column_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let b = CMat::from_column_slice(2, 1, &[c(1.0, 0.0), c(1e-12, 0.0)]);
        let ang = largest_principal_angle(&a, &b).unwrap();
        assert!((ang - 1e-12).abs() < 1e-20);
    }

    #[test]
    fn conditioning_gate_rejects_singular() {
        let m = RMat::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(inverse_checked(&m), Err(GkError::Conditioning { .. })));
    }
}
