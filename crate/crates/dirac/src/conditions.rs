use crate::{scale_dirac, sum_dirac, DiracSubspace};
use chart_core::linalg::{self, c, complexify, CMat};
use chart_core::{GkError, Result};

/// How a Dirac subspace meets T_C and its conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct HolomorphicSplit {
    pub subspace: DiracSubspace,
    pub tangent_dim: usize,
    pub conj_tangent_dim: usize,
    /// T_C = (L meet T_C) + (conj L meet T_C) as a direct sum.
    pub splits: bool,
}

impl HolomorphicSplit {
    pub fn of(l: DiracSubspace) -> Self {
        let d = l.dim();
        let a = l.tangent_intersection();
        let b = l.conj().tangent_intersection();
        let mut joint = CMat::zeros(d, a.ncols() + b.ncols());
        joint.columns_mut(0, a.ncols()).copy_from(&a);
        joint.columns_mut(a.ncols(), b.ncols()).copy_from(&b);
        let splits = a.ncols() + b.ncols() == d && linalg::rank(&joint, 1e-8) == d;
        Self { tangent_dim: a.ncols(), conj_tangent_dim: b.ncols(), splits, subspace: l }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GkConditionReport {
    /// dim(L meet conj L) for L_A and L_B; zero for generalized complex.
    pub real_index_a: usize,
    pub real_index_b: usize,
    pub sigma_plus: Option<HolomorphicSplit>,
    pub sigma_minus: Option<HolomorphicSplit>,
    pub intersection_dim: usize,
    /// Minimum of <u, conj u> over unit u in L_A meet L_B.
    pub min_pairing: f64,
    pub degenerate: bool,
}

impl GkConditionReport {
    pub fn condition1(&self) -> bool {
        self.real_index_a == 0 && self.real_index_b == 0
    }

    pub fn condition2(&self) -> bool {
        let ok = |s: &Option<HolomorphicSplit>| s.as_ref().is_some_and(|h| h.splits);
        ok(&self.sigma_plus) && ok(&self.sigma_minus)
    }

    pub fn condition3(&self, dim: usize) -> bool {
        self.intersection_dim == dim / 2 && self.min_pairing > 0.0
    }

    pub fn passes(&self, dim: usize) -> bool {
        !self.degenerate && self.condition1() && self.condition2() && self.condition3(dim)
    }
}

/// L_{sigma+} = (i/2)(conj L_B - conj L_A), L_{sigma-} = (i/2)(conj L_B - L_A).
pub fn sigma_subspaces(la: &DiracSubspace, lb: &DiracSubspace) -> (Result<DiracSubspace>, Result<DiracSubspace>) {
    let half_i = c(0.0, 0.5);
    let combine = |a: &DiracSubspace| -> Result<DiracSubspace> {
        let neg = scale_dirac(c(-1.0, 0.0), a)?;
        scale_dirac(half_i, &sum_dirac(&lb.conj(), &neg)?)
    };
    (combine(&la.conj()), combine(la))
}

pub fn check_gk_conditions(la: &DiracSubspace, lb: &DiracSubspace) -> Result<GkConditionReport> {
    let d = la.dim();
    if lb.dim() != d {
        return Err(GkError::Dimension { expected: d, got: lb.dim() });
    }
    let real_index_a = la.intersection(&la.conj()).ncols();
    let real_index_b = lb.intersection(&lb.conj()).ncols();
    let (sp, sm) = sigma_subspaces(la, lb);
    let mut degenerate = false;
    // a failed sum means the pair is degenerate here, not that the call failed
    let mut keep = |r: Result<DiracSubspace>| match r {
        Ok(l) => Some(HolomorphicSplit::of(l)),
        Err(_) => {
            degenerate = true;
            None
        }
    };
    let sigma_plus = keep(sp);
    let sigma_minus = keep(sm);
    let n = la.intersection(lb);
    let min_pairing = if n.ncols() == 0 {
        f64::NEG_INFINITY
    } else {
        let p = complexify(&crate::pairing_matrix(d));
        linalg::min_herm_eigenvalue(&(n.adjoint() * p * &n))
    };
    Ok(GkConditionReport {
        real_index_a,
        real_index_b,
        sigma_plus,
        sigma_minus,
        intersection_dim: n.ncols(),
        min_pairing,
        degenerate,
    })
}
