//! Tensors at a chart point, stored in the real basis (x1,y1,...,xn,yn).
//!
//! Two-forms and bivectors are kept as contraction maps: the matrix of a
//! two-form F sends X to F(X, .), so composites like `F * I` are literal
//! matrix products. Symmetric tensors store the Gram matrix.

use crate::error::{GkError, Result};
use crate::linalg::{c, complexify, frob, frob_c, im_part, re_part, CMat, RMat, CVec, TOL_ALG};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub coords: Vec<Complex64>,
}

impl ChartPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(GkError::InvalidArgument("chart point needs n >= 1".into()));
        }
        for (k, z) in coords.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(GkError::Domain { index: k, detail: format!("{z}") });
            }
        }
        Ok(Self { coords })
    }

    pub fn from_real(x: &[f64]) -> Result<Self> {
        if x.len() % 2 != 0 {
            return Err(GkError::Dimension { expected: x.len() + 1, got: x.len() });
        }
        Self::new(x.chunks(2).map(|p| c(p[0], p[1])).collect())
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn real(&self) -> Vec<f64> {
        self.coords.iter().flat_map(|z| [z.re, z.im]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Endomorphism {
    pub matrix: RMat,
}

impl Endomorphism {
    pub fn new(matrix: RMat) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    pub fn std(n: usize) -> Self {
        Self::new(crate::linalg::j_std(n))
    }

    /// Frobenius norm of I^2 + Id.
    pub fn complex_residual(&self) -> f64 {
        let d = self.matrix.nrows();
        frob(&(&self.matrix * &self.matrix + RMat::identity(d, d)))
    }

    pub fn ensure_complex(&self) -> Result<()> {
        let r = self.complex_residual();
        if r < TOL_ALG * (1.0 + frob(&self.matrix).powi(2)) {
            Ok(())
        } else {
            Err(GkError::NotComplex { residual: r })
        }
    }
}

macro_rules! antisym_type {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            pub matrix: RMat,
        }

        impl $name {
            /// Antisymmetrizes the input.
            pub fn new(m: RMat) -> Self {
                let matrix = (&m - m.transpose()) * 0.5;
                Self { matrix }
            }

            pub fn zeros(dim: usize) -> Self {
                Self { matrix: RMat::zeros(dim, dim) }
            }

            pub fn dim(&self) -> usize {
                self.matrix.nrows()
            }
        }

        impl std::ops::Add for &$name {
            type Output = $name;
            fn add(self, o: &$name) -> $name {
                $name { matrix: &self.matrix + &o.matrix }
            }
        }

        impl std::ops::Sub for &$name {
            type Output = $name;
            fn sub(self, o: &$name) -> $name {
                $name { matrix: &self.matrix - &o.matrix }
            }
        }

        impl std::ops::Mul<f64> for &$name {
            type Output = $name;
            fn mul(self, s: f64) -> $name {
                $name { matrix: &self.matrix * s }
            }
        }
    };
}

antisym_type!(TwoForm);
antisym_type!(Bivector);

impl TwoForm {
    /// Real two-form from a complex map matrix that should be real.
    /// Returns the form and the size of the discarded imaginary part.
    pub fn from_complex(m: &CMat) -> (Self, f64) {
        (Self::new(re_part(m)), frob(&im_part(m)))
    }

    /// Pullback along a Jacobian: jac^T F jac.
    pub fn pullback(&self, jac: &RMat) -> Self {
        Self::new(jac.transpose() * &self.matrix * jac)
    }
}

impl Bivector {
    /// Pushforward along a Jacobian: jac Q jac^T.
    pub fn pushforward(&self, jac: &RMat) -> Self {
        Self::new(jac * &self.matrix * jac.transpose())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    pub matrix: RMat,
}

impl SymTensor {
    /// Symmetrizes the input.
    pub fn new(m: RMat) -> Self {
        Self { matrix: (&m + m.transpose()) * 0.5 }
    }

    pub fn from_complex(m: &CMat) -> (Self, f64) {
        (Self::new(re_part(m)), frob(&im_part(m)))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::min_sym_eigenvalue(&self.matrix)
    }
}

/// Omega = B + i omega with both parts real two-forms.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTwoForm {
    pub real_part: TwoForm,
    pub imag_part: TwoForm,
}

impl ComplexTwoForm {
    pub fn from_complex(m: &CMat) -> Self {
        Self { real_part: TwoForm::new(re_part(m)), imag_part: TwoForm::new(im_part(m)) }
    }

    pub fn to_complex(&self) -> CMat {
        complexify(&self.real_part.matrix) + complexify(&self.imag_part.matrix) * c(0.0, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.real_part.dim()
    }

    /// The complex structure omega^{-1} B for which this form is of type (2,0).
    pub fn complex_structure(&self) -> Result<Endomorphism> {
        let winv = crate::linalg::inverse_checked(&self.imag_part.matrix)?;
        let i = Endomorphism::new(winv * &self.real_part.matrix);
        i.ensure_complex()?;
        Ok(i)
    }

    pub fn pullback(&self, jac: &RMat) -> Self {
        Self { real_part: self.real_part.pullback(jac), imag_part: self.imag_part.pullback(jac) }
    }
}

/// Complex bivector stored as a complex contraction map.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBivector {
    pub matrix: CMat,
}

impl ComplexBivector {
    pub fn new(m: CMat) -> Self {
        Self { matrix: (&m - m.transpose()) * c(0.5, 0.0) }
    }

    pub fn imag(&self) -> Bivector {
        Bivector::new(im_part(&self.matrix))
    }

    pub fn real(&self) -> Bivector {
        Bivector::new(re_part(&self.matrix))
    }

    /// Residual of the (2,0) condition I sigma = i sigma, sigma I^T = i sigma.
    pub fn type20_residual(&self, i: &Endomorphism) -> f64 {
        let ic = complexify(&i.matrix);
        let iu = c(0.0, 1.0);
        let a = &ic * &self.matrix - &self.matrix * iu;
        let b = &self.matrix * ic.transpose() - &self.matrix * iu;
        frob_c(&a) + frob_c(&b)
    }
}

/// Basis covectors and vectors in the real basis, and their algebra.
pub mod forms {
    use super::*;

    pub fn dx(j: usize, n: usize) -> CVec {
        let mut v = CVec::zeros(2 * n);
        v[2 * j] = c(1.0, 0.0);
        v
    }

    pub fn dy(j: usize, n: usize) -> CVec {
        let mut v = CVec::zeros(2 * n);
        v[2 * j + 1] = c(1.0, 0.0);
        v
    }

    pub fn dq(j: usize, n: usize) -> CVec {
        let mut v = CVec::zeros(2 * n);
        v[2 * j] = c(1.0, 0.0);
        v[2 * j + 1] = c(0.0, 1.0);
        v
    }

    pub fn dqbar(j: usize, n: usize) -> CVec {
        dq(j, n).map(|z| z.conj())
    }

    /// Wirtinger vector d/dq_j = (d/dx_j - i d/dy_j)/2.
    pub fn d_dq(j: usize, n: usize) -> CVec {
        let mut v = CVec::zeros(2 * n);
        v[2 * j] = c(0.5, 0.0);
        v[2 * j + 1] = c(0.0, -0.5);
        v
    }

    pub fn d_dqbar(j: usize, n: usize) -> CVec {
        d_dq(j, n).map(|z| z.conj())
    }

    /// Contraction map of a ^ b (works for covectors and vectors alike).
    pub fn wedge(a: &CVec, b: &CVec) -> CMat {
        b * a.transpose() - a * b.transpose()
    }

    /// Gram matrix of the symmetric product ab = (a(x)b + b(x)a)/2.
    pub fn sym(a: &CVec, b: &CVec) -> CMat {
        (a * b.transpose() + b * a.transpose()) * c(0.5, 0.0)
    }
}
