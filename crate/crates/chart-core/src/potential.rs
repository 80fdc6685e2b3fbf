//! Real potentials K(q, qbar) evaluated to second order in Wirtinger form.

use crate::ad::CJet;
use crate::error::{GkError, Result};
use crate::linalg::{c, CMat, RMat, RVec};
use crate::tensor::ChartPoint;
use num_complex::Complex64;
use std::sync::Arc;

/// Second-order jet of a real function in Wirtinger form, together with
/// the real gradient and Hessian it was assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    /// dK/dq_j
    pub d: Vec<Complex64>,
    /// dK/dqbar_j
    pub dbar: Vec<Complex64>,
    /// d^2K/dq_j dqbar_k, Hermitian
    pub ddbar: CMat,
    /// d^2K/dq_j dq_k, symmetric
    pub dd: CMat,
    /// Real gradient in the order (x1, y1, ...).
    pub grad: RVec,
    /// Real Hessian in the same order.
    pub hess: RMat,
    /// Size of the anti-Hermitian part removed from `ddbar`.
    pub asymmetry: f64,
}

impl Jet2 {
    /// Assembles the Wirtinger blocks from a real gradient and Hessian.
    pub fn from_real(value: f64, grad: RVec, hess: RMat) -> Self {
        let n = grad.len() / 2;
        let hess = (&hess + hess.transpose()) * 0.5;
        let d: Vec<Complex64> = (0..n).map(|j| c(0.5 * grad[2 * j], -0.5 * grad[2 * j + 1])).collect();
        let dbar = d.iter().map(|z| z.conj()).collect();
        let mut ddbar = CMat::zeros(n, n);
        let mut dd = CMat::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
                ddbar[(j, k)] = c(
                    0.25 * (hess[(xj, xk)] + hess[(yj, yk)]),
                    0.25 * (hess[(xj, yk)] - hess[(yj, xk)]),
                );
                dd[(j, k)] = c(
                    0.25 * (hess[(xj, xk)] - hess[(yj, yk)]),
                    -0.25 * (hess[(xj, yk)] + hess[(yj, xk)]),
                );
            }
        }
        let herm = (&ddbar + ddbar.adjoint()) * c(0.5, 0.0);
        let asymmetry = crate::linalg::frob_c(&(&ddbar - &herm));
        Self { value, d, dbar, ddbar: herm, dd, grad, hess, asymmetry }
    }

    pub fn from_cjet(k: &CJet) -> Self {
        let nv = k.nvars();
        let grad = RVec::from_column_slice(&k.re.g);
        let hess = RMat::from_row_slice(nv, nv, &k.re.h);
        Self::from_real(k.re.v, grad, hess)
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }
}

type EvalFn = dyn Fn(&ChartPoint) -> Result<Jet2> + Send + Sync;
type DomainFn = dyn Fn(&ChartPoint) -> bool + Send + Sync;

/// A named real potential on an n-dimensional complex chart.
#[derive(Clone)]
pub struct PotentialFn {
    pub name: String,
    pub n: usize,
    eval: Arc<EvalFn>,
    domain: Option<Arc<DomainFn>>,
}

impl std::fmt::Debug for PotentialFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PotentialFn({}, n = {})", self.name, self.n)
    }
}

impl PotentialFn {
    pub fn from_eval<F>(name: impl Into<String>, n: usize, f: F) -> Self
    where
        F: Fn(&ChartPoint) -> Result<Jet2> + Send + Sync + 'static,
    {
        Self { name: name.into(), n, eval: Arc::new(f), domain: None }
    }

    /// Potential given by a formula in the seeded coordinates; derivatives by AD.
    pub fn from_jet_fn<F>(name: impl Into<String>, n: usize, f: F) -> Self
    where
        F: Fn(&[CJet]) -> CJet + Send + Sync + 'static,
    {
        Self::from_eval(name, n, move |z: &ChartPoint| {
            let q = CJet::seed(&z.coords);
            let k = f(&q);
            check_real(&k, z)?;
            Ok(Jet2::from_cjet(&k))
        })
    }

    pub fn with_domain<D>(mut self, d: D) -> Self
    where
        D: Fn(&ChartPoint) -> bool + Send + Sync + 'static,
    {
        self.domain = Some(Arc::new(d));
        self
    }

    pub fn contains(&self, z: &ChartPoint) -> bool {
        self.domain.as_ref().is_none_or(|d| d(z))
    }
}

pub(crate) fn check_real(k: &CJet, z: &ChartPoint) -> Result<()> {
    let finite = k.re.v.is_finite()
        && k.re.g.iter().all(|x| x.is_finite())
        && k.re.h.iter().all(|x| x.is_finite());
    if !finite {
        let idx = first_bad_coord(k).unwrap_or(0);
        return Err(GkError::Domain { index: idx, detail: format!("potential at {:?}", z.coords) });
    }
    if k.im.v.abs() > 1e-8 * (1.0 + k.re.v.abs()) {
        return Err(GkError::InvalidArgument(format!(
            "potential is not real-valued (imaginary part {:.3e})",
            k.im.v
        )));
    }
    Ok(())
}

fn first_bad_coord(k: &CJet) -> Option<usize> {
    let nv = k.nvars();
    (0..nv).find(|&i| !k.re.g[i].is_finite() || (0..nv).any(|j| !k.re.h[i * nv + j].is_finite())).map(|i| i / 2)
}

/// Evaluates K with its Wirtinger 2-jet at z.
pub fn eval_jet2(k: &PotentialFn, z: &ChartPoint) -> Result<Jet2> {
    if z.n() != k.n {
        return Err(GkError::Dimension { expected: k.n, got: z.n() });
    }
    if !k.contains(z) {
        return Err(GkError::OutsideDomain(format!("{:?}", z.coords)));
    }
    let j = (k.eval)(z)?;
    if !j.value.is_finite() {
        return Err(GkError::Domain { index: 0, detail: "non-finite potential value".into() });
    }
    Ok(j)
}

/// Third Wirtinger derivatives of K: `holo[j][k][l] = d_j d_k d_l K` and
/// `mixed[j][k][l] = d_j d_k dbar_l K`; the rest follow by conjugation.
#[derive(Debug, Clone)]
pub struct ThirdDerivs {
    pub n: usize,
    pub holo: Vec<Complex64>,
    pub mixed: Vec<Complex64>,
}

impl ThirdDerivs {
    fn idx(&self, j: usize, k: usize, l: usize) -> usize {
        (j * self.n + k) * self.n + l
    }

    pub fn holo(&self, j: usize, k: usize, l: usize) -> Complex64 {
        self.holo[self.idx(j, k, l)]
    }

    pub fn mixed(&self, j: usize, k: usize, l: usize) -> Complex64 {
        self.mixed[self.idx(j, k, l)]
    }
}

/// Central differences of the exact 2-jet, with mixed partials averaged
/// over the three ways of attaching the extra derivative.
pub fn third_derivs_fd(k: &PotentialFn, z: &ChartPoint) -> Result<ThirdDerivs> {
    let n = z.n();
    let scale = z.coords.iter().fold(1.0f64, |a, q| a.max(q.norm()));
    let h = 1e-5 * scale;
    // wirtinger derivatives of dd and ddbar along each coordinate
    let mut d_dd = Vec::with_capacity(n);
    let mut dbar_dd = Vec::with_capacity(n);
    let mut d_ddbar = Vec::with_capacity(n);
    for l in 0..n {
        let mut blocks = Vec::new();
        for dir in [c(1.0, 0.0), c(0.0, 1.0)] {
            let mut plus = z.clone();
            let mut minus = z.clone();
            plus.coords[l] += dir * h;
            minus.coords[l] -= dir * h;
            if plus.coords[l] == z.coords[l] {
                return Err(GkError::InvalidArgument("finite-difference step underflow".into()));
            }
            let jp = eval_jet2(k, &plus)?;
            let jm = eval_jet2(k, &minus)?;
            blocks.push(((&jp.dd - &jm.dd) / c(2.0 * h, 0.0), (&jp.ddbar - &jm.ddbar) / c(2.0 * h, 0.0)));
        }
        let (dx_dd, dx_ddbar) = &blocks[0];
        let (dy_dd, dy_ddbar) = &blocks[1];
        d_dd.push((dx_dd - dy_dd * c(0.0, 1.0)) * c(0.5, 0.0));
        dbar_dd.push((dx_dd + dy_dd * c(0.0, 1.0)) * c(0.5, 0.0));
        d_ddbar.push((dx_ddbar - dy_ddbar * c(0.0, 1.0)) * c(0.5, 0.0));
    }
    let mut holo = vec![c(0.0, 0.0); n * n * n];
    let mut mixed = vec![c(0.0, 0.0); n * n * n];
    for j in 0..n {
        for kk in 0..n {
            for l in 0..n {
                let i = (j * n + kk) * n + l;
                holo[i] = (d_dd[l][(j, kk)] + d_dd[j][(kk, l)] + d_dd[kk][(j, l)]) / 3.0;
                mixed[i] = (dbar_dd[l][(j, kk)] + d_ddbar[j][(kk, l)] + d_ddbar[kk][(j, l)]) / 3.0;
            }
        }
    }
    Ok(ThirdDerivs { n, holo, mixed })
}

/// Built-in potentials.
pub mod catalog {
    use super::*;

    /// Sum of |q_j|^2.
    pub fn quadratic(n: usize) -> PotentialFn {
        PotentialFn::from_jet_fn("quadratic", n, move |q: &[CJet]| {
            let nv = q[0].nvars();
            q.iter().fold(CJet::real(0.0, nv), |acc, qj| acc + qj.abs2())
        })
    }

    /// Second summand b(q2) of a split potential a(q1) + b(q2).
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub enum SplitProfile {
        /// b = |q2|^2, so d dbar b = 1.
        Quadratic,
        /// b = |q2|^4 / 4, so d dbar b = |q2|^2.
        Quartic,
        /// b = -Li2(-|q2|^2), so d dbar b = 1/(1 + |q2|^2).
        Dilog,
    }

    impl SplitProfile {
        /// d dbar b as a function of |q2|^2.
        pub fn beta(&self, r2: f64) -> f64 {
            match self {
                SplitProfile::Quadratic => 1.0,
                SplitProfile::Quartic => r2,
                SplitProfile::Dilog => 1.0 / (1.0 + r2),
            }
        }
    }

    /// K = alpha |q1|^2 + b(q2).
    pub fn split(alpha: f64, profile: SplitProfile) -> PotentialFn {
        let name = format!("split(alpha={alpha}, {profile:?})");
        PotentialFn::from_jet_fn(name, 2, move |q: &[CJet]| {
            let r2 = q[1].abs2();
            let b = match profile {
                SplitProfile::Quadratic => r2,
                SplitProfile::Quartic => (r2.clone() * r2).scale(c(0.25, 0.0)),
                SplitProfile::Dilog => -(-r2).dilog(),
            };
            q[0].abs2().scale(c(alpha, 0.0)) + b
        })
    }

    /// K = |q1|^2 / C - Li2(-|q2|^2).
    pub fn dilog_complete(cc: f64) -> PotentialFn {
        split(1.0 / cc, SplitProfile::Dilog)
    }
}
