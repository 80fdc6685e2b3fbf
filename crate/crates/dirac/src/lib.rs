//! Pointwise linear algebra of T + T*: the pairing, Dirac subspaces and
//! generalized complex structures.
//!
//! A generalized vector is a column (X; xi) of length 4n. Subspaces are
//! stored by a basis of such columns.

mod conditions;
mod gc;

pub use conditions::{check_gk_conditions, sigma_subspaces, GkConditionReport, HolomorphicSplit};
pub use gc::{build_gc_pair, extract_bihermitian, j_sigma, Bihermitian, GCStructure};

use chart_core::linalg::{self, c, complexify, frob_c, CMat, CVec, RMat, TOL_ALG};
use chart_core::{ComplexBivector, Endomorphism, GkError, Result, TwoForm};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct GenTangentVector {
    pub x: CVec,
    pub xi: CVec,
}

impl GenTangentVector {
    pub fn stacked(&self) -> CVec {
        let d = self.x.len();
        let mut v = CVec::zeros(2 * d);
        v.rows_mut(0, d).copy_from(&self.x);
        v.rows_mut(d, d).copy_from(&self.xi);
        v
    }
}

/// Matrix P with <u, v> = u^T P v on stacked vectors.
pub fn pairing_matrix(dim: usize) -> RMat {
    let mut p = RMat::zeros(2 * dim, 2 * dim);
    for k in 0..dim {
        p[(k, dim + k)] = 0.5;
        p[(dim + k, k)] = 0.5;
    }
    p
}

/// <X + xi, Y + eta> = (xi(Y) + eta(X)) / 2, complex bilinear.
pub fn pairing(u: &GenTangentVector, v: &GenTangentVector) -> Result<Complex64> {
    if u.x.len() != v.x.len() || u.xi.len() != v.xi.len() || u.x.len() != u.xi.len() {
        return Err(GkError::Dimension { expected: u.x.len(), got: v.x.len() });
    }
    Ok((u.xi.dot(&v.x) + v.xi.dot(&u.x)) * 0.5)
}

/// Half-dimensional isotropic subspace of (T + T*) tensored with C.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracSubspace {
    pub basis: CMat,
}

impl DiracSubspace {
    /// Validates rank and isotropy; the basis is orthonormalized.
    pub fn new(basis: CMat) -> Result<Self> {
        if basis.nrows() % 2 != 0 || basis.ncols() * 2 != basis.nrows() {
            return Err(GkError::Dimension { expected: basis.nrows() / 2, got: basis.ncols() });
        }
        let q = linalg::orth(&basis, 1e-10);
        if q.ncols() != basis.ncols() {
            return Err(GkError::RankDeficient { rank: q.ncols(), needed: basis.ncols() });
        }
        let l = Self { basis: q };
        let iso = l.isotropy_residual();
        if iso > 1e-8 {
            return Err(GkError::InvalidArgument(format!("subspace not isotropic: {iso:.3e}")));
        }
        Ok(l)
    }

    /// Real dimension of the underlying manifold.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn tangent_part(&self) -> CMat {
        self.basis.rows(0, self.dim()).into_owned()
    }

    pub fn form_part(&self) -> CMat {
        self.basis.rows(self.dim(), self.dim()).into_owned()
    }

    /// Largest entry of basis^T P basis for an orthonormal basis.
    pub fn isotropy_residual(&self) -> f64 {
        let p = complexify(&pairing_matrix(self.dim()));
        linalg::max_abs_c(&(self.basis.transpose() * p * &self.basis))
    }

    pub fn conj(&self) -> Self {
        Self { basis: self.basis.map(|z| z.conj()) }
    }

    /// e^B: X + xi maps to X + xi + i_X B; B may be complex.
    pub fn gauge(&self, b: &CMat) -> Self {
        let t = self.tangent_part();
        let mut out = self.basis.clone();
        let f = self.form_part() + b * &t;
        out.rows_mut(self.dim(), self.dim()).copy_from(&f);
        Self { basis: linalg::orth(&out, 1e-12) }
    }

    pub fn gauge_real(&self, b: &TwoForm) -> Self {
        self.gauge(&complexify(&b.matrix))
    }

    /// Elements with vanishing form part, as tangent vectors.
    pub fn tangent_intersection(&self) -> CMat {
        let k = linalg::null_space(&self.form_part(), 1e-9);
        linalg::orth(&(self.tangent_part() * k), 1e-9)
    }

    /// Basis of this intersected with another subspace (as stacked vectors).
    pub fn intersection(&self, other: &DiracSubspace) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(2 * d, 2 * d);
        m.columns_mut(0, d).copy_from(&self.basis);
        m.columns_mut(d, d).copy_from(&(-&other.basis));
        let k = linalg::null_space(&m, 1e-9);
        let a = k.rows(0, d).into_owned();
        linalg::orth(&(&self.basis * a), 1e-9)
    }
}

/// Graph of a two-form, {X + i_X B}.
pub fn graph_two_form(b: &TwoForm) -> DiracSubspace {
    graph_complex(&complexify(&b.matrix))
}

/// Graph of a complex two-form given by its contraction map.
pub fn graph_complex(b: &CMat) -> DiracSubspace {
    let d = b.nrows();
    let mut basis = CMat::zeros(2 * d, d);
    basis.rows_mut(0, d).copy_from(&CMat::identity(d, d));
    basis.rows_mut(d, d).copy_from(b);
    DiracSubspace { basis: linalg::orth(&basis, 1e-12) }
}

/// lambda L = {X + lambda xi}.
pub fn scale_dirac(lambda: Complex64, l: &DiracSubspace) -> Result<DiracSubspace> {
    if lambda.norm() == 0.0 {
        return Err(GkError::InvalidArgument("scaling factor must be nonzero".into()));
    }
    let mut b = l.basis.clone();
    let d = l.dim();
    let f = l.form_part() * lambda;
    b.rows_mut(d, d).copy_from(&f);
    Ok(DiracSubspace { basis: linalg::orth(&b, 1e-12) })
}

/// L1 + L2 = {X + xi + eta : X + xi in L1, X + eta in L2}.
pub fn sum_dirac(l1: &DiracSubspace, l2: &DiracSubspace) -> Result<DiracSubspace> {
    let d = l1.dim();
    if l2.dim() != d {
        return Err(GkError::Dimension { expected: d, got: l2.dim() });
    }
    let (t1, t2) = (l1.tangent_part(), l2.tangent_part());
    let mut joint = CMat::zeros(d, 2 * d);
    joint.columns_mut(0, d).copy_from(&t1);
    joint.columns_mut(d, d).copy_from(&t2);
    // bases are orthonormal, so an absolute threshold is meaningful
    let r = linalg::rank_abs(&joint, 1e-9);
    if r < d {
        return Err(GkError::Transversality { rank: r, needed: d });
    }
    let mut system = joint.clone();
    system.columns_mut(d, d).copy_from(&(-&t2));
    let k = linalg::null_space(&system, 1e-9);
    let (a, b) = (k.rows(0, d).into_owned(), k.rows(d, d).into_owned());
    let mut out = CMat::zeros(2 * d, k.ncols());
    out.rows_mut(0, d).copy_from(&(&t1 * &a));
    out.rows_mut(d, d).copy_from(&(l1.form_part() * &a + l2.form_part() * &b));
    let q = linalg::orth(&out, 1e-9);
    if q.ncols() != d {
        return Err(GkError::RankDeficient { rank: q.ncols(), needed: d });
    }
    Ok(DiracSubspace { basis: q })
}

/// L_sigma = {X + sigma(zeta) + zeta : X in T^{0,1}, zeta in T*_{1,0}}.
pub fn build_l_sigma(i: &Endomorphism, sigma: &ComplexBivector) -> Result<DiracSubspace> {
    i.ensure_complex()?;
    let res = sigma.type20_residual(i);
    if res > TOL_ALG * (1.0 + frob_c(&sigma.matrix)) {
        return Err(GkError::NotType20 { residual: res });
    }
    let d = i.matrix.nrows();
    let ic = complexify(&i.matrix);
    let id = CMat::identity(d, d);
    let v01 = linalg::orth(&(&id + &ic * c(0.0, 1.0)), 1e-9);
    let z10 = linalg::orth(&(&id - ic.transpose() * c(0.0, 1.0)), 1e-9);
    let h = d / 2;
    if v01.ncols() != h || z10.ncols() != h {
        return Err(GkError::RankDeficient { rank: v01.ncols().min(z10.ncols()), needed: h });
    }
    let mut basis = CMat::zeros(2 * d, d);
    basis.view_mut((0, 0), (d, h)).copy_from(&v01);
    basis.view_mut((0, h), (d, h)).copy_from(&(&sigma.matrix * &z10));
    basis.view_mut((d, h), (d, h)).copy_from(&z10);
    DiracSubspace::new(basis)
}

/// Largest principal angle between the two subspaces.
pub fn subspace_distance(l1: &DiracSubspace, l2: &DiracSubspace) -> Result<f64> {
    linalg::largest_principal_angle(&l1.basis, &l2.basis)
}
