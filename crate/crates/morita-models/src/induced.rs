use crate::brane::{brane_two_form, BraneBisection, BranePoint};
use crate::models::poisson_of;
use crate::MoritaModel;
use chart_core::linalg::{complexify, inverse_checked, j_std, null_space, smallest_principal_angle, RMat};
use chart_core::ops::{fd_partials, induced_structure, nijenhuis_norm};
use chart_core::{Bivector, ChartPoint, GkError, Kernel, Result};
use gk_core::{star_residuals, DegenerateGKData};
use serde::Serialize;

/// Smallest accepted principal angle between the brane and a kernel.
pub const MIN_ANGLE: f64 = 1e-6;

/// Relative singular-value threshold for the nondegeneracy flags.
const FLAG_TOL: f64 = 1e-8;

/// Angles of T L against ker(ds), ker(dt) and its own image under the
/// complex structure of Z.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversalityReport {
    pub angle_source: f64,
    pub angle_target: f64,
    pub angle_self: f64,
    pub transverse: bool,
    /// I(TL) meets TL trivially, so F = Re(Omega|_L) is invertible.
    pub f_invertible: bool,
    /// Smallest singular value of I+ + I- relative to the largest, when transverse.
    pub sum_min_singular: Option<f64>,
    /// Both F and I+ + I- invertible, so g = -F(I+ + I-)/2 is nondegenerate.
    pub metric_nondegenerate: bool,
}

fn kernel_angle(jac: &RMat, tl: &chart_core::CMat) -> f64 {
    smallest_principal_angle(tl, &null_space(&complexify(jac), 1e-10))
}

fn restricted_jacobians(model: &MoritaModel, bp: &BranePoint) -> Result<(RMat, RMat, ChartPoint)> {
    let tl = complexify(&bp.jac);
    let (x, ds) = model.source(&bp.w)?;
    let (_, dt) = model.target(&bp.w)?;
    for (kernel, d) in [(Kernel::Source, &ds), (Kernel::Target, &dt)] {
        let angle = kernel_angle(d, &tl);
        if angle <= MIN_ANGLE {
            return Err(GkError::DegenerateConfiguration { kernel, angle });
        }
    }
    Ok((ds * &bp.jac, dt * &bp.jac, x))
}

/// (I+, I-, Q, F) induced on the brane at brane coordinates z.
pub fn induced_structures(model: &MoritaModel, brane: &BraneBisection, z: &ChartPoint) -> Result<DegenerateGKData> {
    let bp = brane.eval(z)?;
    induced_at(model, &bp).map(|(d, _)| d)
}

fn induced_at(model: &MoritaModel, bp: &BranePoint) -> Result<(DegenerateGKData, f64)> {
    let (ds_l, dt_l, x) = restricted_jacobians(model, bp)?;
    let i_minus = induced_structure(&ds_l)?;
    let i_plus = induced_structure(&dt_l)?;
    let base_q = Bivector::new(poisson_of(&model.sigma_minus_at(&x)));
    let q = base_q.pushforward(&inverse_checked(&ds_l)?);
    let (f, lagrangian) = brane_two_form(model, bp)?;
    Ok((DegenerateGKData::new(i_plus, i_minus, q, f)?, lagrangian))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InducedReport {
    pub z: Vec<[f64; 2]>,
    pub star1: f64,
    pub star2: f64,
    /// Size of Im(Omega) restricted to the brane.
    pub lagrangian_residual: f64,
    pub transversality: TransversalityReport,
}

/// Induced data at z together with its residuals.
pub fn induced_report(model: &MoritaModel, brane: &BraneBisection, z: &ChartPoint) -> Result<(DegenerateGKData, InducedReport)> {
    let bp = brane.eval(z)?;
    let (d, lagrangian_residual) = induced_at(model, &bp)?;
    let (star1, star2) = star_residuals(&d);
    let transversality = transversality_at(model, &bp)?;
    let rep = InducedReport {
        z: z.coords.iter().map(|q| [q.re, q.im]).collect(),
        star1,
        star2,
        lagrangian_residual,
        transversality,
    };
    Ok((d, rep))
}

fn transversality_at(model: &MoritaModel, bp: &BranePoint) -> Result<TransversalityReport> {
    let tl = complexify(&bp.jac);
    let (_, ds) = model.source(&bp.w)?;
    let (_, dt) = model.target(&bp.w)?;
    let angle_source = kernel_angle(&ds, &tl);
    let angle_target = kernel_angle(&dt, &tl);
    // the Darboux chart is holomorphic, so the complex structure of Z is standard
    let itl = complexify(&(j_std(model.darboux_dim()) * &bp.jac));
    let angle_self = smallest_principal_angle(&tl, &itl);
    let transverse = angle_source > MIN_ANGLE && angle_target > MIN_ANGLE;
    let f_invertible = angle_self > MIN_ANGLE;
    let sum_min_singular = if transverse {
        let (d, _) = induced_at(model, bp)?;
        let sv = (&d.i_plus.matrix + &d.i_minus.matrix).singular_values();
        Some(sv.min() / sv.max())
    } else {
        None
    };
    let metric_nondegenerate = f_invertible && sum_min_singular.is_some_and(|s| s > FLAG_TOL);
    Ok(TransversalityReport { angle_source, angle_target, angle_self, transverse, f_invertible, sum_min_singular, metric_nondegenerate })
}

/// Transversality and nondegeneracy of the brane at z. Only evaluation
/// failures are errors.
pub fn brane_transversality(model: &MoritaModel, brane: &BraneBisection, z: &ChartPoint) -> Result<TransversalityReport> {
    let bp = brane.eval(z)?;
    transversality_at(model, &bp)
}

/// Nijenhuis norms of (I+, I-) from central differences of the induced fields.
pub fn nijenhuis_residuals(model: &MoritaModel, brane: &BraneBisection, z: &ChartPoint) -> Result<(f64, f64)> {
    let x = z.real();
    let scale = z.coords.iter().map(|q| q.norm()).fold(1.0, f64::max);
    let h = 1e-5 * scale;
    let field = |plus: bool| {
        move |y: &[f64]| -> Result<RMat> {
            let d = induced_structures(model, brane, &ChartPoint::from_real(y)?)?;
            Ok(if plus { d.i_plus.matrix } else { d.i_minus.matrix })
        }
    };
    let d = induced_structures(model, brane, z)?;
    let dp = fd_partials(field(true), &x, h)?;
    let dm = fd_partials(field(false), &x, h)?;
    Ok((nijenhuis_norm(&d.i_plus.matrix, &dp), nijenhuis_norm(&d.i_minus.matrix, &dm)))
}
