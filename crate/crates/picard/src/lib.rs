//! Courant automorphisms (phi, F) of a holomorphic Poisson chart: the group
//! law, membership checks, one-parameter subgroups generated by closed
//! one-forms, and the action on the data of a Morita model.

use chart_core::linalg::{frob, inverse_checked, j_std, RMat, RVec};
use chart_core::ops::closedness_residual;
use chart_core::{ChartPoint, Dual2, GkError, Result, TwoForm};
use flow::{exp_courant, IntegratorConfig, MatField, PoissonBase, VecField};
use morita_models::{BraneBisection, MoritaModel, RealMap};
use std::sync::Arc;

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX: usize = 60;

/// A diffeomorphism phi of a chart with its Jacobian, paired with a closed
/// real two-form F. Composition is (phi1 o phi2, phi2^* F1 + F2).
#[derive(Clone)]
pub struct CourantAutomorphism {
    pub name: String,
    pub n: usize,
    phi: Arc<RealMap>,
    form: Arc<MatField>,
}

impl std::fmt::Debug for CourantAutomorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CourantAutomorphism({}, n = {})", self.name, self.n)
    }
}

impl CourantAutomorphism {
    pub fn new<P, F>(name: impl Into<String>, n: usize, phi: P, form: F) -> Self
    where
        P: Fn(&ChartPoint) -> Result<(ChartPoint, RMat)> + Send + Sync + 'static,
        F: Fn(&ChartPoint) -> Result<RMat> + Send + Sync + 'static,
    {
        Self { name: name.into(), n, phi: Arc::new(phi), form: Arc::new(form) }
    }

    pub fn identity(n: usize) -> Self {
        Self::b_field("id", n, move |_| Ok(RMat::zeros(2 * n, 2 * n)))
    }

    /// (id, F).
    pub fn b_field<F>(name: impl Into<String>, n: usize, form: F) -> Self
    where
        F: Fn(&ChartPoint) -> Result<RMat> + Send + Sync + 'static,
    {
        Self::new(name, n, move |z: &ChartPoint| Ok((z.clone(), RMat::identity(2 * n, 2 * n))), form)
    }

    /// phi given on the real coordinates; its Jacobian comes from AD.
    pub fn from_real_map<M, F>(name: impl Into<String>, n: usize, map: M, form: F) -> Self
    where
        M: Fn(&[Dual2]) -> Vec<Dual2> + Send + Sync + 'static,
        F: Fn(&ChartPoint) -> Result<RMat> + Send + Sync + 'static,
    {
        let phi = move |z: &ChartPoint| {
            let x = z.real();
            let d = x.len();
            let vars: Vec<Dual2> = x.iter().enumerate().map(|(k, &v)| Dual2::var(v, k, d)).collect();
            let out = map(&vars);
            if out.len() != d {
                return Err(GkError::Dimension { expected: d, got: out.len() });
            }
            let jac = RMat::from_fn(d, d, |r, l| out[r].g[l]);
            let y: Vec<f64> = out.iter().map(|o| o.v).collect();
            Ok((ChartPoint::from_real(&y)?, jac))
        };
        Self::new(name, n, phi, form)
    }

    /// The time-t element of the one-parameter subgroup generated by an
    /// infinitesimal symmetry (V, omega).
    pub fn from_symmetry(name: impl Into<String>, n: usize, v: Arc<VecField>, omega: Arc<MatField>, t: f64, cfg: IntegratorConfig) -> Self {
        let sample = move |z: &ChartPoint| {
            exp_courant(&*v, &*omega, z, t, &cfg)?.pop().ok_or_else(|| GkError::InvalidArgument("empty flow path".into()))
        };
        let sample = Arc::new(sample);
        let s2 = sample.clone();
        Self::new(name, n, move |z: &ChartPoint| sample(z).map(|s| (s.point, s.jacobian)), move |z: &ChartPoint| s2(z).map(|s| s.f.matrix))
    }

    /// phi(z) and its Jacobian.
    pub fn apply(&self, z: &ChartPoint) -> Result<(ChartPoint, RMat)> {
        if z.n() != self.n {
            return Err(GkError::Dimension { expected: self.n, got: z.n() });
        }
        (self.phi)(z)
    }

    pub fn form(&self, z: &ChartPoint) -> Result<TwoForm> {
        Ok(TwoForm::new((self.form)(z)?))
    }

    /// Largest |dF| component at z, by central differences.
    pub fn closedness(&self, z: &ChartPoint) -> Result<f64> {
        let x = z.real();
        let h = 1e-4 * x.iter().fold(1.0, |m: f64, v| m.max(v.abs()));
        closedness_residual(|y| (self.form)(&ChartPoint::from_real(y)?), &x, h)
    }

    /// self o other = (phi_self o phi_other, phi_other^* F_self + F_other).
    pub fn compose(&self, other: &CourantAutomorphism) -> Result<CourantAutomorphism> {
        if self.n != other.n {
            return Err(GkError::Dimension { expected: self.n, got: other.n });
        }
        let (a, b) = (self.clone(), other.clone());
        let (a2, b2) = (self.clone(), other.clone());
        let phi = move |z: &ChartPoint| {
            let (y, jb) = b.apply(z)?;
            let (x, ja) = a.apply(&y)?;
            Ok((x, ja * jb))
        };
        let form = move |z: &ChartPoint| {
            let (y, jb) = b2.apply(z)?;
            Ok(jb.transpose() * (a2.form)(&y)? * &jb + (b2.form)(z)?)
        };
        Ok(Self::new(format!("({}) o ({})", self.name, other.name), self.n, phi, form))
    }

    /// (phi^{-1}, -(phi^{-1})^* F), with phi inverted by Newton's method.
    pub fn inverse(&self) -> CourantAutomorphism {
        let (a, a2) = (self.clone(), self.clone());
        let phi = move |z: &ChartPoint| {
            let y = a.preimage(z)?;
            let (_, j) = a.apply(&y)?;
            Ok((y, inverse_checked(&j)?))
        };
        let form = move |z: &ChartPoint| {
            let y = a2.preimage(z)?;
            let (_, j) = a2.apply(&y)?;
            let ji = inverse_checked(&j)?;
            Ok(-(ji.transpose() * (a2.form)(&y)? * ji))
        };
        Self::new(format!("({})^-1", self.name), self.n, phi, form)
    }

    /// The point y with phi(y) = z.
    pub fn preimage(&self, z: &ChartPoint) -> Result<ChartPoint> {
        let target = RVec::from_vec(z.real());
        let scale = target.amax().max(1.0);
        let mut y = target.clone();
        for _ in 0..NEWTON_MAX {
            let (p, j) = self.apply(&ChartPoint::from_real(y.as_slice())?)?;
            let r = RVec::from_vec(p.real()) - &target;
            if r.amax() <= NEWTON_TOL * scale {
                return ChartPoint::from_real(y.as_slice());
            }
            y -= inverse_checked(&j)? * r;
        }
        Err(GkError::Singular(format!("Newton inversion of {} did not converge", self.name)))
    }
}

/// Membership residuals of (phi, F) for a holomorphic Poisson structure
/// (I, Q), as maxima over the checked points.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MembershipReport {
    /// |F I + I^T F + F Q F|.
    pub compatibility: f64,
    /// |(I + QF)^2 + 1|.
    pub square: f64,
    /// |dphi (I + QF) - I(phi) dphi|.
    pub transport: f64,
    /// |dphi Q dphi^T - Q(phi)|.
    pub poisson: f64,
    /// Largest |dF| component.
    pub closedness: f64,
}

impl MembershipReport {
    pub fn max(&self) -> f64 {
        [self.compatibility, self.square, self.transport, self.poisson, self.closedness].into_iter().fold(0.0, f64::max)
    }

    fn merge(&mut self, o: &MembershipReport) {
        self.compatibility = self.compatibility.max(o.compatibility);
        self.square = self.square.max(o.square);
        self.transport = self.transport.max(o.transport);
        self.poisson = self.poisson.max(o.poisson);
        self.closedness = self.closedness.max(o.closedness);
    }
}

fn residuals_at(a: &CourantAutomorphism, z: &ChartPoint, i: &RMat, q: &RMat, i_img: &RMat, q_img: &RMat) -> Result<MembershipReport> {
    let f = (a.form)(z)?;
    let (_, j) = a.apply(z)?;
    let deformed = i + q * &f;
    let d = i.nrows();
    Ok(MembershipReport {
        compatibility: frob(&(&f * i + i.transpose() * &f + &f * q * &f)),
        square: frob(&(&deformed * &deformed + RMat::identity(d, d))),
        transport: frob(&(&j * &deformed - i_img * &j)),
        poisson: frob(&(&j * q * j.transpose() - q_img)),
        closedness: a.closedness(z)?,
    })
}

/// Residuals of the conditions F I + I^T F + F Q F = 0, phi_*(I + QF) = I,
/// phi_* Q = Q and dF = 0 at the given points, for the structure (I-, Q) of
/// `base`.
pub fn check_membership(a: &CourantAutomorphism, base: &PoissonBase, points: &[ChartPoint]) -> Result<MembershipReport> {
    let mut rep = MembershipReport::default();
    for z in points {
        let (y, _) = a.apply(z)?;
        let r = residuals_at(a, z, &base.i_minus(z)?, &base.poisson(z)?, &base.i_minus(&y)?, &base.poisson(&y)?)?;
        rep.merge(&r);
    }
    Ok(rep)
}

/// Brane parameter u with t(e(u)) = x, by Newton's method from `guess`.
fn lift_to_brane(model: &MoritaModel, brane: &BraneBisection, x: &ChartPoint, guess: &ChartPoint) -> Result<ChartPoint> {
    let target = RVec::from_vec(x.real());
    let scale = target.amax().max(1.0);
    let mut u = RVec::from_vec(guess.real());
    for _ in 0..NEWTON_MAX {
        let bp = brane.eval(&ChartPoint::from_real(u.as_slice())?)?;
        let (tx, dt) = model.target(&bp.w)?;
        let r = RVec::from_vec(tx.real()) - &target;
        if r.amax() <= 1e-13 * scale {
            return ChartPoint::from_real(u.as_slice());
        }
        u -= inverse_checked(&(dt * bp.jac))? * r;
    }
    Err(GkError::Singular("brane does not reach the target point".into()))
}

/// Target Poisson bivector at t(e(u)).
fn target_poisson(model: &MoritaModel, brane: &BraneBisection, u: &ChartPoint) -> Result<RMat> {
    Ok(model.kernel_poisson(&brane.eval(u)?.w)?.0)
}

/// Acts on the Morita data (Z, Omega, t, L) by (phi, F): the target map
/// becomes phi o t and Omega becomes Omega + t^* F, with the brane unchanged.
/// Membership is checked against the target structure at t(e(u)) for the
/// sampled brane parameters.
pub fn act_on_gk(
    a: &CourantAutomorphism,
    model: &MoritaModel,
    brane: &BraneBisection,
    samples: &[ChartPoint],
    tolerance: f64,
) -> Result<(MoritaModel, BraneBisection)> {
    if a.n != model.n {
        return Err(GkError::Dimension { expected: model.n, got: a.n });
    }
    let i = j_std(model.n);
    let mut rep = MembershipReport::default();
    for u in samples {
        let x = model.target(&brane.eval(u)?.w)?.0;
        let (y, _) = a.apply(&x)?;
        let q = target_poisson(model, brane, u)?;
        let q_img = target_poisson(model, brane, &lift_to_brane(model, brane, &y, u)?)?;
        rep.merge(&residuals_at(a, &x, &i, &q, &i, &q_img)?);
    }
    if rep.max() > tolerance {
        return Err(GkError::Membership { residual: rep.max() });
    }
    let (phi, form) = (a.clone(), a.clone());
    let acted = model.relabel_target(move |x: &ChartPoint| phi.apply(x), move |x: &ChartPoint| (form.form)(x));
    Ok((acted, brane.clone()))
}
