use crate::MoritaModel;
use chart_core::linalg::{c, frob, RMat, RVec};
use chart_core::special::gauss_legendre;
use chart_core::{eval_jet2, CJet, ChartPoint, GkError, Jet2, PotentialFn, Result, TwoForm};
use gk_core::real_jacobian;
use num_complex::Complex64;
use std::sync::Arc;

pub type EmbedFn = dyn Fn(&ChartPoint) -> Result<(ChartPoint, RMat)> + Send + Sync;
pub type OneFormFn = dyn Fn(&ChartPoint) -> Result<(Vec<Complex64>, RMat)> + Send + Sync;
pub type TwoFormField = Arc<dyn Fn(&ChartPoint) -> Result<TwoForm> + Send + Sync>;

/// A (1,0)-form on the base chart, used to move graph branes.
#[derive(Clone)]
pub enum OneForm {
    /// alpha = -i df.
    Potential(PotentialFn),
    /// Components alpha_j and the real Jacobian of (Re alpha_j, Im alpha_j).
    Field(Arc<OneFormFn>),
}

impl OneForm {
    pub fn eval(&self, q: &ChartPoint) -> Result<(Vec<Complex64>, RMat)> {
        match self {
            OneForm::Potential(f) => {
                let j = eval_jet2(f, q)?;
                Ok(minus_i_del(&j))
            }
            OneForm::Field(f) => f(q),
        }
    }
}

/// -i dK as components and real Jacobian.
fn minus_i_del(j: &Jet2) -> (Vec<Complex64>, RMat) {
    let mi = c(0.0, -1.0);
    let vals = j.d.iter().map(|z| mi * z).collect();
    let jac = real_jacobian(&(&j.dd * mi), &(&j.ddbar * mi));
    (vals, jac)
}

#[derive(Clone)]
pub enum BraneKind {
    /// Graph of -i dK over the q coordinates.
    Potential(PotentialFn),
    /// A general embedding u -> w with its real Jacobian.
    Embedding(Arc<EmbedFn>),
    /// Graph brane shifted by a (1,0)-form in the p coordinates.
    Deformed(Box<BraneBisection>, OneForm),
}

/// A brane bisection parametrized by n complex coordinates u.
#[derive(Clone)]
pub struct BraneBisection {
    pub name: String,
    pub n: usize,
    pub kind: BraneKind,
}

impl std::fmt::Debug for BraneBisection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BraneBisection({}, n = {})", self.name, self.n)
    }
}

/// Position of a brane point in Z and the real Jacobian (4n x 2n) of the embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct BranePoint {
    pub u: ChartPoint,
    pub w: ChartPoint,
    pub jac: RMat,
}

impl BraneBisection {
    pub fn from_potential(k: PotentialFn) -> Self {
        Self { name: format!("graph(-i dK), K = {}", k.name), n: k.n, kind: BraneKind::Potential(k) }
    }

    pub fn from_embedding<F>(name: impl Into<String>, n: usize, f: F) -> Self
    where
        F: Fn(&ChartPoint) -> Result<(ChartPoint, RMat)> + Send + Sync + 'static,
    {
        Self { name: name.into(), n, kind: BraneKind::Embedding(Arc::new(f)) }
    }

    /// Embedding given by a formula u -> w; the Jacobian comes from AD.
    pub fn from_jet_map<F>(name: impl Into<String>, n: usize, f: F) -> Self
    where
        F: Fn(&[CJet]) -> Vec<CJet> + Send + Sync + 'static,
    {
        let map: Arc<crate::HoloMap> = Arc::new(f);
        Self::from_embedding(name, n, move |u: &ChartPoint| Ok(crate::map_with_jacobian(&*map, u)))
    }

    pub fn eval(&self, u: &ChartPoint) -> Result<BranePoint> {
        if u.n() != self.n {
            return Err(GkError::Dimension { expected: self.n, got: u.n() });
        }
        let n = self.n;
        match &self.kind {
            BraneKind::Potential(k) => {
                let j = eval_jet2(k, u)?;
                let (p, dp) = minus_i_del(&j);
                let mut jac = RMat::zeros(4 * n, 2 * n);
                jac.view_mut((0, 0), (2 * n, 2 * n)).copy_from(&dp);
                jac.view_mut((2 * n, 0), (2 * n, 2 * n)).copy_from(&RMat::identity(2 * n, 2 * n));
                let w = ChartPoint::new(p.into_iter().chain(u.coords.iter().copied()).collect())?;
                Ok(BranePoint { u: u.clone(), w, jac })
            }
            BraneKind::Embedding(f) => {
                let (w, jac) = f(u)?;
                if w.n() != 2 * n || jac.shape() != (4 * n, 2 * n) {
                    return Err(GkError::Dimension { expected: 2 * n, got: w.n() });
                }
                Ok(BranePoint { u: u.clone(), w, jac })
            }
            BraneKind::Deformed(base, alpha) => {
                let mut bp = base.eval(u)?;
                let q = ChartPoint::new(bp.w.coords[n..].to_vec())?;
                let (a, da) = alpha.eval(&q)?;
                for (k, ak) in a.iter().enumerate() {
                    bp.w.coords[k] += ak;
                }
                let dq_du = bp.jac.rows(2 * n, 2 * n).into_owned();
                let shift = da * dq_du;
                let mut top = bp.jac.rows_mut(0, 2 * n);
                top += shift;
                Ok(bp)
            }
        }
    }

    /// The p components over q = u, if the brane is a graph at u.
    pub fn eta(&self, u: &ChartPoint) -> Result<(Vec<Complex64>, RMat)> {
        let bp = self.eval(u)?;
        let n = self.n;
        let q_off = bp.w.coords[n..].iter().zip(&u.coords).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let dq = bp.jac.rows(2 * n, 2 * n).into_owned();
        if q_off > 1e-12 || frob(&(dq - RMat::identity(2 * n, 2 * n))) > 1e-12 {
            return Err(GkError::InvalidArgument("brane is not parametrized as a graph over q".into()));
        }
        Ok((bp.w.coords[..n].to_vec(), bp.jac.rows(0, 2 * n).into_owned()))
    }
}

/// F = Re(Omega|_L) in brane coordinates and the size of Im(Omega|_L),
/// which vanishes for a Lagrangian brane.
pub fn brane_two_form(model: &MoritaModel, bp: &BranePoint) -> Result<(TwoForm, f64)> {
    let om = model.omega_at(&bp.w)?.pullback(&bp.jac);
    let resid = frob(&om.imag_part.matrix);
    Ok((om.real_part, resid))
}

/// The brane Gr(-i dK) and its two-form field F = i ddbar K (plus the twist
/// of a twisted cotangent model).
pub fn brane_from_potential(model: &MoritaModel, k: PotentialFn) -> Result<(BraneBisection, TwoFormField)> {
    if k.n != model.n {
        return Err(GkError::Dimension { expected: model.n, got: k.n });
    }
    let brane = BraneBisection::from_potential(k);
    let (m, b) = (model.clone(), brane.clone());
    let field: TwoFormField = Arc::new(move |u: &ChartPoint| {
        let bp = b.eval(u)?;
        Ok(brane_two_form(&m, &bp)?.0)
    });
    Ok((brane, field))
}

/// Gradient -2 Im(eta) of K as a real covector, with its Jacobian.
fn potential_gradient(brane: &BraneBisection, z: &ChartPoint) -> Result<(RVec, RMat)> {
    let (eta, deta) = brane.eta(z)?;
    let n = brane.n;
    let mut grad = RVec::zeros(2 * n);
    let mut hess = RMat::zeros(2 * n, 2 * n);
    for j in 0..n {
        // Im(eta_j dq_j) evaluated on d/dx_j and d/dy_j
        grad[2 * j] = -2.0 * eta[j].im;
        grad[2 * j + 1] = -2.0 * eta[j].re;
        hess.row_mut(2 * j).copy_from(&(deta.row(2 * j + 1) * -2.0));
        hess.row_mut(2 * j + 1).copy_from(&(deta.row(2 * j) * -2.0));
    }
    Ok((grad, hess))
}

const CLOSED_TOL: f64 = 1e-6;

fn closedness(hess: &RMat) -> f64 {
    frob(&(hess - hess.transpose())) * 0.5
}

/// K(z) = -2 * integral of Im(eta) along the segment from `base_point` to z,
/// by 64-point Gauss-Legendre; K(base_point) = 0.
pub fn potential_from_brane(model: &MoritaModel, brane: &BraneBisection, base_point: &ChartPoint) -> Result<PotentialFn> {
    if brane.n != model.n || base_point.n() != model.n {
        return Err(GkError::Dimension { expected: model.n, got: base_point.n() });
    }
    let (_, h0) = potential_gradient(brane, base_point)?;
    let r = closedness(&h0);
    if r > CLOSED_TOL {
        return Err(GkError::NotClosed { residual: r });
    }
    let (nodes, weights) = gauss_legendre(64);
    let brane = brane.clone();
    let z0 = base_point.clone();
    Ok(PotentialFn::from_eval(format!("potential of {}", brane.name), model.n, move |z: &ChartPoint| {
        let x0 = z0.real();
        let dx: Vec<f64> = z.real().iter().zip(&x0).map(|(a, b)| a - b).collect();
        let mut value = 0.0;
        for (s, wt) in nodes.iter().zip(&weights) {
            let t = 0.5 * (s + 1.0);
            let x: Vec<f64> = x0.iter().zip(&dx).map(|(a, d)| a + t * d).collect();
            let (g, _) = potential_gradient(&brane, &ChartPoint::from_real(&x)?)?;
            value += 0.5 * wt * g.iter().zip(&dx).map(|(a, b)| a * b).sum::<f64>();
        }
        let (grad, hess) = potential_gradient(&brane, z)?;
        let r = closedness(&hess);
        if r > CLOSED_TOL {
            return Err(GkError::NotClosed { residual: r });
        }
        Ok(Jet2::from_real(value, grad, hess))
    }))
}

/// Shifts the brane by alpha in the p coordinates: Gr(eta) -> Gr(eta + alpha).
pub fn deform_brane(brane: &BraneBisection, alpha: OneForm) -> BraneBisection {
    BraneBisection { name: format!("{} deformed", brane.name), n: brane.n, kind: BraneKind::Deformed(Box::new(brane.clone()), alpha) }
}
