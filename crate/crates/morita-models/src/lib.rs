//! Chart-level holomorphic symplectic Morita equivalences: Darboux charts,
//! source and target maps, brane bisections, and the pipeline from a brane
//! to degenerate generalized Kähler data.
//!
//! Every model uses Darboux coordinates w = (p_1..p_n, q_1..q_n) on the
//! total space Z, with real order following the chart-core convention.

pub mod affine;
mod brane;
mod induced;
mod models;

pub use affine::{closed_form_affine_metric, group_omega, group_to_darboux, multiplicativity_residual};
pub use brane::{brane_from_potential, brane_two_form, deform_brane, potential_from_brane, BraneBisection, BraneKind, BranePoint, OneForm, TwoFormField};
pub use induced::{
    brane_transversality, induced_report, induced_structures, nijenhuis_residuals, InducedReport, TransversalityReport,
};
pub use models::{
    darboux_frame, make_affine_model, make_cotangent_model, make_hyperkahler_model, make_pair_model, pair_diagonal_brane, quaternion_triple,
    PairCharts, TwistField,
};

use chart_core::linalg::{self, complexify, CMat, RMat};
use chart_core::{CJet, ChartPoint, ComplexBivector, ComplexTwoForm, GkError, Result};
use std::sync::Arc;

pub type HoloMap = dyn Fn(&[CJet]) -> Vec<CJet> + Send + Sync;
pub type FormField = dyn Fn(&ChartPoint) -> ComplexTwoForm + Send + Sync;
pub type SigmaField = dyn Fn(&ChartPoint) -> ComplexBivector + Send + Sync;
pub type DomainFn = dyn Fn(&ChartPoint) -> bool + Send + Sync;
/// A real chart map with its real Jacobian.
pub type RealMap = dyn Fn(&ChartPoint) -> Result<(ChartPoint, RMat)> + Send + Sync;
/// A real two-form field as a contraction matrix.
pub type RealFormField = dyn Fn(&ChartPoint) -> Result<RMat> + Send + Sync;

/// Post-composition of the target map with `map`, with Omega shifted by the
/// pullback of `shift` along the target map in force before it.
#[derive(Clone)]
struct Relabel {
    map: Arc<RealMap>,
    shift: Arc<RealFormField>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Cotangent,
    Pair,
    Affine,
}

#[derive(Clone)]
pub struct MoritaModel {
    pub kind: ModelKind,
    /// Complex dimension of the base.
    pub n: usize,
    s_map: Arc<HoloMap>,
    t_map: Arc<HoloMap>,
    omega: Arc<FormField>,
    sigma_minus: Arc<SigmaField>,
    domain: Option<Arc<DomainFn>>,
    pub pair: Option<PairCharts>,
    relabels: Vec<Relabel>,
}

impl std::fmt::Debug for MoritaModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MoritaModel({:?}, n = {})", self.kind, self.n)
    }
}

/// Values and real Jacobian of a map given on CJet inputs.
pub(crate) fn map_with_jacobian<F>(map: &F, w: &ChartPoint) -> (ChartPoint, RMat)
where
    F: Fn(&[CJet]) -> Vec<CJet> + ?Sized,
{
    let seeded = CJet::seed(&w.coords);
    let out = map(&seeded);
    let nv = 2 * w.n();
    let mut jac = RMat::zeros(2 * out.len(), nv);
    for (k, o) in out.iter().enumerate() {
        for l in 0..nv {
            jac[(2 * k, l)] = o.re.g[l];
            jac[(2 * k + 1, l)] = o.im.g[l];
        }
    }
    let coords = out.iter().map(CJet::value).collect();
    (ChartPoint { coords }, jac)
}

/// Like [`map_with_jacobian`], adding the real Hessian of every real output row.
pub(crate) fn map_with_hessians<F>(map: &F, w: &ChartPoint) -> (ChartPoint, RMat, Vec<RMat>)
where
    F: Fn(&[CJet]) -> Vec<CJet> + ?Sized,
{
    let out = map(&CJet::seed(&w.coords));
    let nv = 2 * w.n();
    let mut jac = RMat::zeros(2 * out.len(), nv);
    let mut hess = Vec::with_capacity(2 * out.len());
    for (k, o) in out.iter().enumerate() {
        for (r, part) in [&o.re, &o.im].into_iter().enumerate() {
            for l in 0..nv {
                jac[(2 * k + r, l)] = part.g[l];
            }
            hess.push(RMat::from_row_slice(nv, nv, &part.h));
        }
    }
    let coords = out.iter().map(CJet::value).collect();
    (ChartPoint { coords }, jac, hess)
}

impl MoritaModel {
    pub fn darboux_dim(&self) -> usize {
        2 * self.n
    }

    pub fn contains(&self, w: &ChartPoint) -> bool {
        self.domain.as_ref().is_none_or(|d| d(w))
    }

    fn check(&self, w: &ChartPoint) -> Result<()> {
        if w.n() != self.darboux_dim() {
            return Err(GkError::Dimension { expected: self.darboux_dim(), got: w.n() });
        }
        if !self.contains(w) {
            return Err(GkError::OutsideDomain(format!("{:?}", w.coords)));
        }
        Ok(())
    }

    /// s(w) and its real Jacobian (2n x 4n).
    pub fn source(&self, w: &ChartPoint) -> Result<(ChartPoint, RMat)> {
        self.check(w)?;
        Ok(map_with_jacobian(&*self.s_map, w))
    }

    pub fn target(&self, w: &ChartPoint) -> Result<(ChartPoint, RMat)> {
        self.check(w)?;
        let (mut x, mut jac) = map_with_jacobian(&*self.t_map, w);
        for r in &self.relabels {
            let (y, dy) = (r.map)(&x)?;
            jac = dy * jac;
            x = y;
        }
        Ok((x, jac))
    }

    /// t(w), its real Jacobian and the real Hessian of each real component.
    /// Unavailable once the target has been relabeled.
    pub fn target_second_order(&self, w: &ChartPoint) -> Result<(ChartPoint, RMat, Vec<RMat>)> {
        self.check(w)?;
        if !self.relabels.is_empty() {
            return Err(GkError::InvalidArgument("second derivatives of a relabeled target map are not available".into()));
        }
        Ok(map_with_hessians(&*self.t_map, w))
    }

    /// Omega at w, including the real shifts added by relabelings.
    pub fn omega_at(&self, w: &ChartPoint) -> Result<ComplexTwoForm> {
        let mut om = (self.omega)(w);
        if self.relabels.is_empty() {
            return Ok(om);
        }
        let (mut x, mut jac) = map_with_jacobian(&*self.t_map, w);
        for r in &self.relabels {
            om.real_part.matrix += jac.transpose() * (r.shift)(&x)? * &jac;
            let (y, dy) = (r.map)(&x)?;
            jac = dy * jac;
            x = y;
        }
        Ok(om)
    }

    /// The same total space with target map `map` o t and Omega + t^* `shift`,
    /// t being the current target map.
    pub fn relabel_target<M, B>(&self, map: M, shift: B) -> MoritaModel
    where
        M: Fn(&ChartPoint) -> Result<(ChartPoint, RMat)> + Send + Sync + 'static,
        B: Fn(&ChartPoint) -> Result<RMat> + Send + Sync + 'static,
    {
        let mut m = self.clone();
        m.relabels.push(Relabel { map: Arc::new(map), shift: Arc::new(shift) });
        m
    }

    /// Holomorphic Poisson structure of the source base at x.
    pub fn sigma_minus_at(&self, x: &ChartPoint) -> ComplexBivector {
        (self.sigma_minus)(x)
    }

    /// Real Poisson bivector -4 Im(sigma-) on the source base at x.
    pub fn source_poisson(&self, x: &ChartPoint) -> RMat {
        models::poisson_of(&self.sigma_minus_at(x))
    }

    /// Largest |Im Omega(u, v)| over orthonormal bases u of ker ds, v of ker dt.
    pub fn kernel_orthogonality(&self, w: &ChartPoint) -> Result<f64> {
        let (_, ds) = self.source(w)?;
        let (_, dt) = self.target(w)?;
        let ks = linalg::null_space(&complexify(&ds), 1e-10);
        let kt = linalg::null_space(&complexify(&dt), 1e-10);
        let om = complexify(&self.omega_at(w)?.imag_part.matrix);
        let m: CMat = kt.transpose() * om * ks;
        Ok(linalg::max_abs_c(&m))
    }

    /// Poisson bivectors induced on the bases by the kernels:
    /// (dt w^{-1} dt^T, -ds w^{-1} ds^T) with w = Im Omega.
    pub fn kernel_poisson(&self, w: &ChartPoint) -> Result<(RMat, RMat)> {
        let (_, ds) = self.source(w)?;
        let (_, dt) = self.target(w)?;
        let winv = linalg::inverse_checked(&self.omega_at(w)?.imag_part.matrix)?;
        Ok((&dt * &winv * dt.transpose(), -(&ds * &winv * ds.transpose())))
    }
}
