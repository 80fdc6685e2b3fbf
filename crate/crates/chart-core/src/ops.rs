//! Type decomposition, top-degree wedge, induced complex structures and
//! the Nijenhuis tensor.

use crate::error::{GkError, Result};
use crate::linalg::{cond, j_std, RMat, COND_MAX};
use crate::tensor::{Endomorphism, TwoForm};

/// (1,1) part of F with respect to I: (F + I^T F I) / 2.
pub fn oneone_part(f: &TwoForm, i: &Endomorphism) -> Result<TwoForm> {
    i.ensure_complex()?;
    Ok(TwoForm::new((&f.matrix + i.matrix.transpose() * &f.matrix * &i.matrix) * 0.5))
}

/// Coefficient of F1 ^ F2 against dq1 ^ dqbar1 ^ dq2 ^ dqbar2 on a
/// four-dimensional chart.
pub fn wedge_top4(f1: &TwoForm, f2: &TwoForm) -> Result<f64> {
    if f1.dim() != 4 || f2.dim() != 4 {
        return Err(GkError::Dimension { expected: 4, got: f1.dim().min(f2.dim()) });
    }
    let a = |i: usize, j: usize| f1.matrix[(i, j)];
    let b = |i: usize, j: usize| f2.matrix[(i, j)];
    // coefficient against dx1 ^ dy1 ^ dx2 ^ dy2
    let vol = a(0, 1) * b(2, 3) - a(0, 2) * b(1, 3) + a(0, 3) * b(1, 2) + a(1, 2) * b(0, 3)
        - a(1, 3) * b(0, 2)
        + a(2, 3) * b(0, 1);
    // dq1 ^ dqbar1 ^ dq2 ^ dqbar2 = -4 dx1 ^ dy1 ^ dx2 ^ dy2
    Ok(vol / -4.0)
}

/// Complex structure making the components of a local map holomorphic:
/// jac^{-1} J jac.
pub fn pushforward_cx(j_target: &Endomorphism, jac: &RMat) -> Result<Endomorphism> {
    let k = cond(jac);
    if !(k < COND_MAX) {
        return Err(GkError::Conditioning { cond: k });
    }
    let inv = jac.clone().try_inverse().ok_or(GkError::Conditioning { cond: f64::INFINITY })?;
    Ok(Endomorphism::new(inv * &j_target.matrix * jac))
}

/// Same as [`pushforward_cx`] with the standard structure on the target.
pub fn induced_structure(jac: &RMat) -> Result<Endomorphism> {
    pushforward_cx(&Endomorphism::new(j_std(jac.nrows() / 2)), jac)
}

/// Frobenius norm of the Nijenhuis tensor of I given I and its partial
/// derivatives `di[l] = d I / d x_l`.
pub fn nijenhuis_norm(i: &RMat, di: &[RMat]) -> f64 {
    let d = i.nrows();
    let mut total = 0.0;
    for a in 0..d {
        for b in 0..d {
            for k in 0..d {
                let mut v = 0.0;
                for l in 0..d {
                    v += i[(l, a)] * di[l][(k, b)] - i[(l, b)] * di[l][(k, a)];
                    v -= i[(k, l)] * (di[a][(l, b)] - di[b][(l, a)]);
                }
                total += v * v;
            }
        }
    }
    total.sqrt()
}

/// Central-difference partial derivatives of a matrix field.
pub fn fd_partials<F>(field: F, x: &[f64], h: f64) -> Result<Vec<RMat>>
where
    F: Fn(&[f64]) -> Result<RMat>,
{
    let mut out = Vec::with_capacity(x.len());
    for l in 0..x.len() {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[l] += h;
        xm[l] -= h;
        out.push((field(&xp)? - field(&xm)?) / (2.0 * h));
    }
    Ok(out)
}

/// Max |dF| component of a two-form field from central differences.
pub fn closedness_residual<F>(field: F, x: &[f64], h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<RMat>,
{
    let dfs = fd_partials(field, x, h)?;
    let d = x.len();
    // component F_{bc} is M[(c, b)] in the contraction convention
    let comp = |l: usize, b: usize, c: usize| dfs[l][(c, b)];
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in (a + 1)..d {
            for c in (b + 1)..d {
                let v = comp(a, b, c) + comp(b, c, a) + comp(c, a, b);
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}
