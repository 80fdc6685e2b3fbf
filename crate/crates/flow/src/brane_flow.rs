use crate::integrator::{integrate_checked, IntegratorConfig};
use crate::ClosedOneForm;
use chart_core::linalg::{inverse_checked, RMat, RVec};
use chart_core::{ChartPoint, GkError, Result};
use morita_models::{BraneBisection, MoritaModel};

/// Relative size of the smallest singular value of d(t o e) below which the
/// moved brane no longer projects diffeomorphically to the target.
const FOLD_TOL: f64 = 1e-10;

/// Moves a brane bisection by the flow of V = (Im Omega)^{-1} t^* alpha, with
/// alpha a closed one-form on the target base. V is tangent to the source
/// fibres, so the moved brane keeps its parametrization over the source.
/// Im Omega is constant on every model chart, so DV only involves second
/// derivatives of t and the Jacobian of alpha.
pub fn brane_flow_in_z(
    model: &MoritaModel,
    brane: &BraneBisection,
    alpha: &ClosedOneForm,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<BraneBisection> {
    cfg.validate()?;
    if alpha.n != model.n || brane.n != model.n {
        return Err(GkError::Dimension { expected: model.n, got: alpha.n.min(brane.n) });
    }
    let (model, brane, alpha, cfg) = (model.clone(), brane.clone(), alpha.clone(), *cfg);
    let name = format!("{} moved by {} for t = {t}", brane.name, alpha.name);
    let n = model.n;
    Ok(BraneBisection::from_embedding(name, n, move |u: &ChartPoint| {
        let bp = brane.eval(u)?;
        let field = |s: f64, x: &RVec, need_jac: bool| -> Result<(RVec, RMat)> {
            let w = ChartPoint::from_real(x.as_slice())?;
            let (tw, dt, hess) = model.target_second_order(&w)?;
            let winv = inverse_checked(&model.omega_at(&w)?.imag_part.matrix)?;
            let (a, da) = alpha.eval(s, &tw)?;
            let v = &winv * dt.transpose() * &a;
            if !need_jac {
                return Ok((v, RMat::zeros(0, 0)));
            }
            let mut inner = dt.transpose() * da * &dt;
            for (ar, h) in a.iter().zip(&hess) {
                inner += h * *ar;
            }
            Ok((v, &winv * inner))
        };
        let inside = |x: &RVec| ChartPoint::from_real(x.as_slice()).map(|w| model.contains(&w)).unwrap_or(false);
        let cfg = IntegratorConfig { jacobian_transport: true, ..cfg };
        let tr = integrate_checked(&field, &RVec::from_vec(bp.w.real()), t, &cfg, &inside)?;
        let end = tr.end();
        let w = ChartPoint::from_real(end.x.as_slice())?;
        let jac = &end.jac * &bp.jac;
        let (_, dt) = model.target(&w)?;
        let sv = (&dt * &jac).singular_values();
        if sv.min() <= FOLD_TOL * sv.max().max(1.0) {
            return Err(GkError::Fold { point: u.real() });
        }
        Ok((w, jac))
    }))
}
