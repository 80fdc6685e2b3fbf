//! Hamiltonian-flow constructions of degenerate generalized Kähler data on
//! a holomorphic Poisson chart: the flow of Q(df_t), time quadrature of the
//! pulled-back forms, exponentials of infinitesimal symmetries, and flows of
//! brane bisections inside a Morita model.

mod brane_flow;
mod construction;
mod integrator;

pub use brane_flow::brane_flow_in_z;
pub use construction::{
    dc_d, exp_courant, flow_construction, flow_construction_grid, flow_endpoint, fd_flow_jacobian, hamiltonian_base_flow,
    symmetry_residuals, transport_data, CourantSample, FlowResult, VecField,
};
pub use integrator::{FlowNode, IntegratorConfig, Trajectory};

use chart_core::expr::Expr;
use chart_core::linalg::{j_std, RMat, RVec};
use chart_core::{CJet, ChartPoint, GkError, Jet2, PotentialFn, Result};
use morita_models::MoritaModel;
use std::sync::Arc;

pub type MatField = dyn Fn(&ChartPoint) -> Result<RMat> + Send + Sync;
pub type DomainFn = dyn Fn(&ChartPoint) -> bool + Send + Sync;
type JetFn = dyn Fn(f64, &ChartPoint) -> Result<Jet2> + Send + Sync;
type FormFn = dyn Fn(f64, &ChartPoint) -> Result<(RVec, RMat)> + Send + Sync;

/// A real function f_t(z), t in [0, 1], evaluated to second order.
#[derive(Clone)]
pub struct TimeDependentPotential {
    pub name: String,
    pub n: usize,
    eval: Arc<JetFn>,
}

impl std::fmt::Debug for TimeDependentPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TimeDependentPotential({}, n = {})", self.name, self.n)
    }
}

impl TimeDependentPotential {
    pub fn new<F>(name: impl Into<String>, n: usize, f: F) -> Self
    where
        F: Fn(f64, &ChartPoint) -> Result<Jet2> + Send + Sync + 'static,
    {
        Self { name: name.into(), n, eval: Arc::new(f) }
    }

    pub fn from_jet_fn<F>(name: impl Into<String>, n: usize, f: F) -> Self
    where
        F: Fn(f64, &[CJet]) -> CJet + Send + Sync + 'static,
    {
        Self::new(name, n, move |t, z: &ChartPoint| {
            let k = f(t, &CJet::seed(&z.coords));
            jet_of(&k, z)
        })
    }

    pub fn from_expr(expr: Expr) -> Self {
        let (name, n) = (expr.source.clone(), expr.n);
        Self::from_jet_fn(name, n, move |t, q| expr.eval(q, t))
    }

    /// Time-independent f_t = K.
    pub fn constant(k: PotentialFn) -> Self {
        Self::new(k.name.clone(), k.n, move |_, z| chart_core::eval_jet2(&k, z))
    }

    /// c * f_t.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        Self::new(format!("{c} * ({})", self.name), self.n, move |t, z| {
            let j = inner(t, z)?;
            Ok(Jet2::from_real(c * j.value, j.grad * c, j.hess * c))
        })
    }

    pub fn eval(&self, t: f64, z: &ChartPoint) -> Result<Jet2> {
        if z.n() != self.n {
            return Err(GkError::Dimension { expected: self.n, got: z.n() });
        }
        (self.eval)(t, z)
    }

    pub fn differential(&self) -> ClosedOneForm {
        let f = self.clone();
        ClosedOneForm::new(format!("d({})", self.name), self.n, move |t, z| {
            let j = f.eval(t, z)?;
            Ok((j.grad, j.hess))
        })
    }
}

fn jet_of(k: &CJet, z: &ChartPoint) -> Result<Jet2> {
    let finite = k.re.v.is_finite() && k.re.g.iter().chain(&k.re.h).all(|x| x.is_finite());
    if !finite {
        return Err(GkError::Domain { index: 0, detail: format!("potential at {:?}", z.coords) });
    }
    if k.im.v.abs() > 1e-8 * (1.0 + k.re.v.abs()) {
        return Err(GkError::InvalidArgument(format!("potential is not real-valued (imaginary part {:.3e})", k.im.v)));
    }
    Ok(Jet2::from_cjet(k))
}

/// A real one-form alpha_t given by its components and their Jacobian
/// in real coordinates.
#[derive(Clone)]
pub struct ClosedOneForm {
    pub name: String,
    pub n: usize,
    eval: Arc<FormFn>,
}

impl std::fmt::Debug for ClosedOneForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ClosedOneForm({}, n = {})", self.name, self.n)
    }
}

/// Allowed antisymmetric part of the Jacobian of a closed form.
pub const CLOSED_TOL: f64 = 1e-6;

impl ClosedOneForm {
    pub fn new<F>(name: impl Into<String>, n: usize, f: F) -> Self
    where
        F: Fn(f64, &ChartPoint) -> Result<(RVec, RMat)> + Send + Sync + 'static,
    {
        Self { name: name.into(), n, eval: Arc::new(f) }
    }

    pub fn exact(f: PotentialFn) -> Self {
        TimeDependentPotential::constant(f).differential()
    }

    pub fn zero(n: usize) -> Self {
        Self::new("0", n, move |_, _| Ok((RVec::zeros(2 * n), RMat::zeros(2 * n, 2 * n))))
    }

    /// Components and Jacobian at (t, z); fails if dalpha does not vanish.
    pub fn eval(&self, t: f64, z: &ChartPoint) -> Result<(RVec, RMat)> {
        if z.n() != self.n {
            return Err(GkError::Dimension { expected: self.n, got: z.n() });
        }
        let (a, da) = (self.eval)(t, z)?;
        let r = chart_core::linalg::frob(&(&da - da.transpose())) * 0.5;
        if r > CLOSED_TOL * (1.0 + chart_core::linalg::frob(&da)) {
            return Err(GkError::NotClosed { residual: r });
        }
        Ok((a, da))
    }
}

/// A holomorphic Poisson chart: the real bivector Q, the complex structure
/// I- (standard unless given) and an optional domain.
#[derive(Clone)]
pub struct PoissonBase {
    pub n: usize,
    poisson: Arc<MatField>,
    i_minus: Option<Arc<MatField>>,
    domain: Option<Arc<DomainFn>>,
}

impl std::fmt::Debug for PoissonBase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PoissonBase(n = {}, standard I- = {})", self.n, self.i_minus.is_none())
    }
}

impl PoissonBase {
    pub fn new<F>(n: usize, q: F) -> Self
    where
        F: Fn(&ChartPoint) -> Result<RMat> + Send + Sync + 'static,
    {
        Self { n, poisson: Arc::new(q), i_minus: None, domain: None }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(n, move |_| Ok(RMat::zeros(2 * n, 2 * n)))
    }

    /// The source base of a model in its Darboux coordinates.
    pub fn model_source(model: &MoritaModel) -> Self {
        let m = model.clone();
        Self::new(model.n, move |x| Ok(m.source_poisson(x)))
    }

    pub fn with_i_minus<F>(mut self, f: F) -> Self
    where
        F: Fn(&ChartPoint) -> Result<RMat> + Send + Sync + 'static,
    {
        self.i_minus = Some(Arc::new(f));
        self
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

    pub fn poisson(&self, z: &ChartPoint) -> Result<RMat> {
        (self.poisson)(z)
    }

    pub fn i_minus(&self, z: &ChartPoint) -> Result<RMat> {
        match &self.i_minus {
            Some(f) => f(z),
            None => Ok(j_std(self.n)),
        }
    }

    pub(crate) fn standard_i_minus(&self) -> bool {
        self.i_minus.is_none()
    }
}
