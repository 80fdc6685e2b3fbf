use crate::integrator::{integrate_checked, IntegratorConfig, Trajectory, VectorField};
use crate::{ClosedOneForm, MatField, PoissonBase, TimeDependentPotential};
use chart_core::linalg::{frob, inverse_checked, RMat, RVec};
use chart_core::ops::fd_partials;
use chart_core::{Bivector, ChartPoint, Endomorphism, Result, TwoForm};
use gk_core::{star_residuals, DegenerateGKData};
use rayon::prelude::*;

pub type VecField = dyn Fn(&ChartPoint) -> Result<RVec> + Send + Sync;

fn fd_step(x: &[f64]) -> f64 {
    1e-5 * x.iter().fold(1.0, |m: f64, v| m.max(v.abs()))
}

fn point(x: &RVec) -> Result<ChartPoint> {
    ChartPoint::from_real(x.as_slice())
}

fn partials(f: &dyn Fn(&ChartPoint) -> Result<RMat>, x: &RVec) -> Result<Vec<RMat>> {
    fd_partials(|y| f(&ChartPoint::from_real(y)?), x.as_slice(), fd_step(x.as_slice()))
}

/// The real two-form d(I-^T alpha); for alpha = df this is d^c df = -2i ddbar f
/// when I- is standard.
pub fn dc_d(base: &PoissonBase, alpha: &ClosedOneForm, t: f64, z: &ChartPoint) -> Result<TwoForm> {
    let (a, da) = alpha.eval(t, z)?;
    let i = base.i_minus(z)?;
    // column l holds d_l (I^T alpha)
    let mut d = i.transpose() * da;
    if !base.standard_i_minus() {
        let di = partials(&|p| base.i_minus(p), &RVec::from_vec(z.real()))?;
        for (l, dil) in di.iter().enumerate() {
            let col = dil.transpose() * &a;
            let mut c = d.column_mut(l);
            c += col;
        }
    }
    Ok(TwoForm::new(&d - d.transpose()))
}

fn hamiltonian_field<'a>(base: &'a PoissonBase, alpha: &'a ClosedOneForm) -> impl Fn(f64, &RVec, bool) -> Result<(RVec, RMat)> + 'a {
    move |t, x, need_jac| {
        let z = point(x)?;
        let q = base.poisson(&z)?;
        let dqs = if need_jac { partials(&|p| base.poisson(p), x)? } else { Vec::new() };
        if q.iter().chain(dqs.iter().flatten()).all(|v| *v == 0.0) {
            // a vanishing Poisson structure leaves every point fixed
            let d = x.len();
            return Ok((RVec::zeros(d), if need_jac { RMat::zeros(d, d) } else { RMat::zeros(0, 0) }));
        }
        let (a, da) = alpha.eval(t, &z)?;
        let v = &q * &a;
        if !need_jac {
            return Ok((v, RMat::zeros(0, 0)));
        }
        let mut dv = &q * da;
        for (l, dq) in dqs.iter().enumerate() {
            let col = dq * &a;
            let mut c = dv.column_mut(l);
            c += col;
        }
        Ok((v, dv))
    }
}

fn inside(base: &PoissonBase) -> impl Fn(&RVec) -> bool + '_ {
    move |x| point(x).map(|z| base.contains(&z)).unwrap_or(false)
}

/// Trajectory of dz/dt = Q(alpha_t) from z0 over [0, t_end], with the
/// transported Jacobian when configured.
pub fn hamiltonian_base_flow(
    base: &PoissonBase,
    alpha: &ClosedOneForm,
    z0: &ChartPoint,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let field = hamiltonian_field(base, alpha);
    let mut tr = integrate_checked(&field, &RVec::from_vec(z0.real()), t_end, cfg, &inside(base))?;
    if !cfg.jacobian_transport {
        fill_fd_jacobians(&field, base, z0, t_end, cfg, &mut tr)?;
    }
    Ok(tr)
}

/// Jacobians at every node by central differences of perturbed trajectories.
fn fill_fd_jacobians(field: &VectorField, base: &PoissonBase, z0: &ChartPoint, t_end: f64, cfg: &IntegratorConfig, tr: &mut Trajectory) -> Result<()> {
    let x0 = RVec::from_vec(z0.real());
    let h = 1e-4 * x0.iter().fold(1.0, |m: f64, v| m.max(v.abs()));
    let plain = IntegratorConfig { jacobian_transport: false, ..*cfg };
    for l in 0..x0.len() {
        let mut xp = x0.clone();
        let mut xm = x0.clone();
        xp[l] += h;
        xm[l] -= h;
        let p = integrate_checked(field, &xp, t_end, &plain, &inside(base))?;
        let m = integrate_checked(field, &xm, t_end, &plain, &inside(base))?;
        for (k, node) in tr.nodes.iter_mut().enumerate() {
            let col = (&p.nodes[k].x - &m.nodes[k].x) / (2.0 * h);
            node.jac.set_column(l, &col);
        }
    }
    Ok(())
}

/// psi_{t_end}(z) without Jacobians.
pub fn flow_endpoint(base: &PoissonBase, alpha: &ClosedOneForm, z: &ChartPoint, t_end: f64, cfg: &IntegratorConfig) -> Result<ChartPoint> {
    let plain = IntegratorConfig { jacobian_transport: false, ..*cfg };
    let field = hamiltonian_field(base, alpha);
    let tr = integrate_checked(&field, &RVec::from_vec(z.real()), t_end, &plain, &inside(base))?;
    point(&tr.end().x)
}

/// Jacobian of psi_{t_end} at z by central differences of endpoints.
pub fn fd_flow_jacobian(base: &PoissonBase, alpha: &ClosedOneForm, z: &ChartPoint, t_end: f64, cfg: &IntegratorConfig) -> Result<RMat> {
    let x0 = z.real();
    let h = 1e-4 * x0.iter().fold(1.0, |m: f64, v| m.max(v.abs()));
    let mut jac = RMat::zeros(x0.len(), x0.len());
    for l in 0..x0.len() {
        let mut xp = x0.clone();
        let mut xm = x0.clone();
        xp[l] += h;
        xm[l] -= h;
        let p = flow_endpoint(base, alpha, &ChartPoint::from_real(&xp)?, t_end, cfg)?.real();
        let m = flow_endpoint(base, alpha, &ChartPoint::from_real(&xm)?, t_end, cfg)?.real();
        for r in 0..x0.len() {
            jac[(r, l)] = (p[r] - m[r]) / (2.0 * h);
        }
    }
    Ok(jac)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub data: DegenerateGKData,
    /// psi_{t_end}(z) and its Jacobian.
    pub endpoint: ChartPoint,
    pub jacobian: RMat,
    pub error_estimate: f64,
    pub star1: f64,
    pub star2: f64,
}

/// Moves GK data (I+, I-, Q, F) along the flow of Q(alpha_t):
/// I+ -> psi^* I+, F -> psi^* F + integral of psi_s^* d^c_- alpha_s, with I-
/// and Q kept. `data0` must share Q and I- with the base.
pub fn transport_data<D>(
    base: &PoissonBase,
    alpha: &ClosedOneForm,
    data0: D,
    z: &ChartPoint,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<FlowResult>
where
    D: Fn(&ChartPoint) -> Result<DegenerateGKData>,
{
    let tr = hamiltonian_base_flow(base, alpha, z, t_end, cfg)?;
    let swept = tr.simpson(|node| {
        let w = dc_d(base, alpha, node.t, &point(&node.x)?)?;
        Ok(node.jac.transpose() * w.matrix * &node.jac)
    })?;
    let end = tr.end();
    let endpoint = point(&end.x)?;
    let start = data0(z)?;
    let moved = data0(&endpoint)?;
    let j = &end.jac;
    let jinv = inverse_checked(j)?;
    let i_plus = Endomorphism::new(&jinv * &moved.i_plus.matrix * j);
    let f = TwoForm::new(j.transpose() * &moved.f.matrix * j + swept);
    let data = DegenerateGKData::new(i_plus, start.i_minus, start.q, f)?;
    let (star1, star2) = star_residuals(&data);
    Ok(FlowResult { data, endpoint, jacobian: j.clone(), error_estimate: tr.error_estimate, star1, star2 })
}

/// Data of the universal local construction: I- and Q from the base,
/// I+ = psi_1^* I- and F = integral over [0, 1] of psi_t^* d^c_- df_t.
pub fn flow_construction(base: &PoissonBase, f: &TimeDependentPotential, z: &ChartPoint, cfg: &IntegratorConfig) -> Result<FlowResult> {
    let degenerate = |x: &ChartPoint| {
        let i = Endomorphism::new(base.i_minus(x)?);
        DegenerateGKData::new(i.clone(), i, Bivector::new(base.poisson(x)?), TwoForm::zeros(2 * base.n))
    };
    transport_data(base, &f.differential(), degenerate, z, 1.0, cfg)
}

/// [`flow_construction`] over many points in parallel; order is preserved.
pub fn flow_construction_grid(
    base: &PoissonBase,
    f: &TimeDependentPotential,
    points: &[ChartPoint],
    cfg: &IntegratorConfig,
) -> Vec<Result<FlowResult>> {
    points.par_iter().map(|z| flow_construction(base, f, z, cfg)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CourantSample {
    pub t: f64,
    pub point: ChartPoint,
    pub jacobian: RMat,
    /// Integral over [0, t] of phi_s^* omega.
    pub f: TwoForm,
}

/// The path (phi_t, F_t) generated by an infinitesimal symmetry (V, omega),
/// sampled at every second integrator node.
pub fn exp_courant(v: &VecField, omega: &MatField, z: &ChartPoint, t_end: f64, cfg: &IntegratorConfig) -> Result<Vec<CourantSample>> {
    let field = |_: f64, x: &RVec, need_jac: bool| -> Result<(RVec, RMat)> {
        let val = v(&point(x)?)?;
        if !need_jac {
            return Ok((val, RMat::zeros(0, 0)));
        }
        let vm = |p: &ChartPoint| v(p).map(|r| RMat::from_column_slice(r.len(), 1, r.as_slice()));
        let cols = partials(&vm, x)?;
        let mut dv = RMat::zeros(x.len(), x.len());
        for (l, c) in cols.iter().enumerate() {
            dv.set_column(l, &c.column(0));
        }
        Ok((val, dv))
    };
    let cfg = IntegratorConfig { jacobian_transport: true, ..*cfg };
    let tr = integrate_checked(&field, &RVec::from_vec(z.real()), t_end, &cfg, &|_| true)?;
    let pulled: Vec<RMat> = tr
        .nodes
        .iter()
        .map(|n| Ok(n.jac.transpose() * omega(&point(&n.x)?)? * &n.jac))
        .collect::<Result<_>>()?;
    let h = t_end / cfg.step_count as f64;
    let d = pulled[0].nrows();
    let mut acc = RMat::zeros(d, d);
    let mut out = Vec::new();
    for (k, node) in tr.nodes.iter().enumerate().step_by(2) {
        if k > 0 {
            acc += (&pulled[k - 2] + &pulled[k - 1] * 4.0 + &pulled[k]) * (h / 3.0);
        }
        out.push(CourantSample { t: node.t, point: point(&node.x)?, jacobian: node.jac.clone(), f: TwoForm::new(acc.clone()) });
    }
    Ok(out)
}

/// Residuals of the infinitesimal-symmetry conditions at z for the base
/// structure (I-, Q): |omega I + I^T omega| and |L_V I - Q omega|.
pub fn symmetry_residuals(base: &PoissonBase, v: &VecField, omega: &MatField, z: &ChartPoint) -> Result<(f64, f64)> {
    let i = base.i_minus(z)?;
    let q = base.poisson(z)?;
    let w = omega(z)?;
    let type11 = frob(&(&w * &i + i.transpose() * &w));
    let x = RVec::from_vec(z.real());
    let val = v(z)?;
    let vm = |p: &ChartPoint| v(p).map(|r| RMat::from_column_slice(r.len(), 1, r.as_slice()));
    let cols = partials(&vm, &x)?;
    let mut dv = RMat::zeros(x.len(), x.len());
    for (l, c) in cols.iter().enumerate() {
        dv.set_column(l, &c.column(0));
    }
    let mut lie = &i * &dv - &dv * &i;
    if !base.standard_i_minus() {
        for (l, di) in partials(&|p| base.i_minus(p), &x)?.iter().enumerate() {
            lie += di * val[l];
        }
    }
    Ok((type11, frob(&(lie - q * w))))
}
