use chart_core::linalg::{max_abs, RMat, RVec};
use chart_core::{GkError, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    /// RK4 steps over the integration interval; Simpson uses the same nodes.
    pub step_count: usize,
    /// Allowed step-halving error per unit time.
    pub tolerance: f64,
    /// Integrate the variational equation alongside the trajectory.
    pub jacobian_transport: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { step_count: 100, tolerance: 1e-7, jacobian_transport: true }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.step_count < 4 || self.step_count % 2 != 0 {
            return Err(GkError::InvalidArgument(format!("step_count must be even and >= 4, got {}", self.step_count)));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(GkError::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowNode {
    pub t: f64,
    pub x: RVec,
    /// Jacobian of the flow map at the start point; identity without transport.
    pub jac: RMat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub nodes: Vec<FlowNode>,
    /// Largest endpoint difference against a run with halved steps.
    pub error_estimate: f64,
}

impl Trajectory {
    pub fn end(&self) -> &FlowNode {
        self.nodes.last().expect("trajectories have at least two nodes")
    }

    /// Composite Simpson rule over the nodes of a matrix-valued integrand.
    pub fn simpson<F>(&self, f: F) -> Result<RMat>
    where
        F: Fn(&FlowNode) -> Result<RMat>,
    {
        let n = self.nodes.len() - 1;
        let h = (self.end().t - self.nodes[0].t) / n as f64;
        let mut acc: Option<RMat> = None;
        for (k, node) in self.nodes.iter().enumerate() {
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            let v = f(node)? * w;
            acc = Some(match acc {
                Some(a) => a + v,
                None => v,
            });
        }
        Ok(acc.expect("nonempty") * (h / 3.0))
    }
}

/// Vector field V(t, x) and, when asked, its Jacobian in x.
pub(crate) type VectorField<'a> = dyn Fn(f64, &RVec, bool) -> Result<(RVec, RMat)> + 'a;

fn integrate(field: &VectorField, x0: &RVec, t_end: f64, steps: usize, transport: bool, inside: &dyn Fn(&RVec) -> bool) -> Result<Vec<FlowNode>> {
    let d = x0.len();
    let h = t_end / steps as f64;
    let mut x = x0.clone();
    let mut jac = RMat::identity(d, d);
    let mut nodes = vec![FlowNode { t: 0.0, x: x.clone(), jac: jac.clone() }];
    let eval = |t: f64, x: &RVec, j: &RMat| -> Result<(RVec, RMat)> {
        if !inside(x) || x.iter().any(|v| !v.is_finite()) {
            return Err(GkError::FlowEscape { time: t });
        }
        let (v, dv) = field(t, x, transport)?;
        let dj = if transport { dv * j } else { RMat::zeros(d, d) };
        Ok((v, dj))
    };
    for k in 0..steps {
        let t = k as f64 * h;
        let (k1, l1) = eval(t, &x, &jac)?;
        let (k2, l2) = eval(t + 0.5 * h, &(&x + &k1 * (0.5 * h)), &(&jac + &l1 * (0.5 * h)))?;
        let (k3, l3) = eval(t + 0.5 * h, &(&x + &k2 * (0.5 * h)), &(&jac + &l2 * (0.5 * h)))?;
        let (k4, l4) = eval(t + h, &(&x + &k3 * h), &(&jac + &l3 * h))?;
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        jac += (l1 + l2 * 2.0 + l3 * 2.0 + l4) * (h / 6.0);
        let t1 = (k + 1) as f64 * h;
        if !inside(&x) || x.iter().any(|v| !v.is_finite()) {
            return Err(GkError::FlowEscape { time: t1 });
        }
        nodes.push(FlowNode { t: t1, x: x.clone(), jac: jac.clone() });
    }
    Ok(nodes)
}

/// RK4 over [0, t_end] with the step-halving error check.
pub(crate) fn integrate_checked(
    field: &VectorField,
    x0: &RVec,
    t_end: f64,
    cfg: &IntegratorConfig,
    inside: &dyn Fn(&RVec) -> bool,
) -> Result<Trajectory> {
    cfg.validate()?;
    let nodes = integrate(field, x0, t_end, cfg.step_count, cfg.jacobian_transport, inside)?;
    let fine = integrate(field, x0, t_end, 2 * cfg.step_count, cfg.jacobian_transport, inside)?;
    let (a, b) = (nodes.last().expect("nodes"), fine.last().expect("nodes"));
    let error_estimate = max_abs(&RMat::from_column_slice(a.x.len(), 1, (&a.x - &b.x).as_slice())).max(max_abs(&(&a.jac - &b.jac)));
    let tolerance = cfg.tolerance * t_end.abs().max(1.0);
    if error_estimate > tolerance {
        return Err(GkError::IntegratorTolerance { estimate: error_estimate, tolerance });
    }
    Ok(Trajectory { nodes, error_estimate })
}
