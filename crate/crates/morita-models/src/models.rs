use crate::{MoritaModel, ModelKind};
use chart_core::linalg::{c, complexify, frob, im_part, inverse_checked, j_std, CMat, RMat, I};
use chart_core::ops::closedness_residual;
use chart_core::tensor::forms::{d_dq, dq, wedge};
use chart_core::{CJet, ChartPoint, ComplexBivector, ComplexTwoForm, GkError, Result, TwoForm};
use std::sync::Arc;

/// A real closed two-form on the base, as a function of real coordinates.
pub type TwistField = Arc<dyn Fn(&[f64]) -> RMat + Send + Sync>;

/// Omega_0 = sum_a dp_a ^ dq_a on C^{2n} with w = (p, q).
pub(crate) fn canonical_form(n: usize) -> CMat {
    let mut m = CMat::zeros(4 * n, 4 * n);
    for a in 0..n {
        m += wedge(&dq(a, 2 * n), &dq(n + a, 2 * n));
    }
    m
}

fn closedness_probe_points(dim: usize) -> Vec<Vec<f64>> {
    // a fixed, irregular set of probe points in [-1, 1]^dim
    (0..6)
        .map(|k| (0..dim).map(|l| ((k * 7 + l * 3) as f64 * 0.618).sin()).collect())
        .collect()
}

/// T*X over a chart of C^n with Omega = Omega_0 + pi^* twist; s = t = pi.
pub fn make_cotangent_model(n: usize, twist: Option<TwistField>) -> Result<MoritaModel> {
    if n == 0 {
        return Err(GkError::InvalidArgument("base dimension must be >= 1".into()));
    }
    if let Some(tw) = &twist {
        for x in closedness_probe_points(2 * n) {
            let r = closedness_residual(|y: &[f64]| Ok(tw(y)), &x, 1e-4)?;
            if r > 1e-6 {
                return Err(GkError::NotClosed { residual: r });
            }
        }
    }
    let base = canonical_form(n);
    let omega = move |w: &ChartPoint| {
        let mut m = base.clone();
        if let Some(tw) = &twist {
            let x: Vec<f64> = w.real()[2 * n..].to_vec();
            let f = TwoForm::new(tw(&x)).matrix;
            let mut block = m.view_mut((2 * n, 2 * n), (2 * n, 2 * n));
            block += complexify(&f);
        }
        ComplexTwoForm::from_complex(&m)
    };
    let proj = move |w: &[CJet]| w[n..].to_vec();
    Ok(MoritaModel {
        kind: ModelKind::Cotangent,
        n,
        s_map: Arc::new(proj),
        t_map: Arc::new(proj),
        omega: Arc::new(omega),
        sigma_minus: Arc::new(move |_: &ChartPoint| ComplexBivector::new(CMat::zeros(2 * n, 2 * n))),
        domain: None,
        pair: None,
        relabels: Vec::new(),
    })
}

/// Complex-linear Darboux frames of the two factors: original real
/// coordinates = phi * (real Darboux coordinates (P, Q)).
#[derive(Debug, Clone, PartialEq)]
pub struct PairCharts {
    pub phi_plus: RMat,
    pub phi_minus: RMat,
}

/// Complex value of Omega(u, v) for a contraction-map matrix.
fn omega_c(om: &ComplexTwoForm, u: &RMat, v: &RMat) -> num_complex::Complex64 {
    let b = (v.transpose() * &om.real_part.matrix * u)[(0, 0)];
    let w = (v.transpose() * &om.imag_part.matrix * u)[(0, 0)];
    c(b, w)
}

/// Multiplication of a real vector by a complex scalar through I.
fn cscale(z: num_complex::Complex64, v: &RMat, i: &RMat) -> RMat {
    v * z.re + i * v * z.im
}

/// Complex symplectic Gram-Schmidt: a real matrix whose columns are
/// (e_1, I e_1, ..., e_m, I e_m, f_1, I f_1, ...) with Omega(e_a, f_b) = delta_ab.
pub fn darboux_frame(om: &ComplexTwoForm) -> Result<RMat> {
    let d = om.dim();
    if d % 4 != 0 {
        return Err(GkError::Dimension { expected: 4 * (d / 4 + 1), got: d });
    }
    let i = om.complex_structure()?.matrix;
    let m = d / 4;
    let mut pool: Vec<RMat> = (0..d).map(|k| RMat::from_fn(d, 1, |r, _| if r == k { 1.0 } else { 0.0 })).collect();
    let (mut es, mut fs) = (Vec::new(), Vec::new());
    for _ in 0..m {
        let ei = (0..pool.len())
            .max_by(|&a, &b| frob(&pool[a]).total_cmp(&frob(&pool[b])))
            .ok_or_else(|| GkError::Singular("empty pool".into()))?;
        let e = pool[ei].clone() / frob(&pool[ei]);
        let (fi, val) = (0..pool.len())
            .map(|k| (k, omega_c(om, &e, &pool[k])))
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .ok_or_else(|| GkError::Singular("empty pool".into()))?;
        if val.norm() < 1e-12 {
            return Err(GkError::Singular("holomorphic symplectic form is degenerate".into()));
        }
        let f = cscale(val.inv(), &pool[fi], &i);
        pool = pool
            .iter()
            .map(|v| {
                let a = omega_c(om, v, &f);
                let b = omega_c(om, v, &e);
                v - cscale(a, &e, &i) + cscale(b, &f, &i)
            })
            .filter(|v| frob(v) > 1e-10)
            .collect();
        es.push(e);
        fs.push(f);
    }
    let mut phi = RMat::zeros(d, d);
    for (k, v) in es.iter().chain(fs.iter()).enumerate() {
        phi.set_column(2 * k, &v.column(0));
        phi.set_column(2 * k + 1, &(&i * v).column(0));
    }
    Ok(phi)
}

/// (X+, Omega+) x (X-, -Omega-) for constant holomorphic symplectic forms
/// on R^{2n}. Darboux coordinates w = (P+, Q-, Q+, P-), t = (P+, Q+),
/// s = (P-, Q-); both bases are charted by their Darboux coordinates.
pub fn make_pair_model(omega_plus: &ComplexTwoForm, omega_minus: &ComplexTwoForm) -> Result<MoritaModel> {
    let d = omega_plus.dim();
    if omega_minus.dim() != d {
        return Err(GkError::Dimension { expected: d, got: omega_minus.dim() });
    }
    let phi_plus = darboux_frame(omega_plus)?;
    let phi_minus = darboux_frame(omega_minus)?;
    let n = d / 2;
    let m = n / 2;
    let t_map = move |w: &[CJet]| w[..m].iter().chain(&w[n..n + m]).cloned().collect();
    let s_map = move |w: &[CJet]| w[n + m..].iter().chain(&w[m..n]).cloned().collect();
    let omega = ComplexTwoForm::from_complex(&canonical_form(n));
    // inverse of the Darboux form on the source base, as a (2,0) bivector
    let sigma = {
        let om = ComplexTwoForm::from_complex(&canonical_form(m));
        let q = inverse_checked(&om.imag_part.matrix)?;
        let qc = complexify(&q);
        ComplexBivector::new((complexify(&j_std(n)) * &qc + qc * I) * c(-0.25, 0.0))
    };
    Ok(MoritaModel {
        kind: ModelKind::Pair,
        n,
        s_map: Arc::new(s_map),
        t_map: Arc::new(t_map),
        omega: Arc::new(move |_: &ChartPoint| omega.clone()),
        sigma_minus: Arc::new(move |_: &ChartPoint| sigma.clone()),
        domain: None,
        pair: Some(crate::PairCharts { phi_plus, phi_minus }),
        relabels: Vec::new(),
    })
}

/// The diagonal of X x X in a pair model with Omega+ and Omega- on the same
/// space X, parametrized by the original coordinates of X.
pub fn pair_diagonal_brane(model: &MoritaModel) -> Result<crate::BraneBisection> {
    let charts = model.pair.as_ref().ok_or_else(|| GkError::InvalidArgument("not a pair model".into()))?;
    let n = model.n;
    let m = n / 2;
    let plus = inverse_checked(&charts.phi_plus)?;
    let minus = inverse_checked(&charts.phi_minus)?;
    // real rows of (P+, Q-, Q+, P-) in terms of the real coordinates of X
    let mut lin = RMat::zeros(4 * n, 2 * n);
    lin.rows_mut(0, 2 * m).copy_from(&plus.rows(0, 2 * m));
    lin.rows_mut(2 * m, 2 * m).copy_from(&minus.rows(2 * m, 2 * m));
    lin.rows_mut(2 * n, 2 * m).copy_from(&plus.rows(2 * m, 2 * m));
    lin.rows_mut(2 * n + 2 * m, 2 * m).copy_from(&minus.rows(0, 2 * m));
    Ok(crate::BraneBisection::from_embedding("pair diagonal", n, move |u: &ChartPoint| {
        let x = chart_core::RVec::from_vec(u.real());
        let w = &lin * x;
        Ok((ChartPoint::from_real(w.as_slice())?, lin.clone()))
    }))
}

/// Complex structures (I, J, K = IJ) of the flat quaternionic C^2.
pub fn quaternion_triple() -> (RMat, RMat, RMat) {
    let i = j_std(2);
    let j = RMat::from_row_slice(4, 4, &[
        0.0, 0.0, -1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, -1.0, 0.0, 0.0,
    ]);
    let k = &i * &j;
    (i, j, k)
}

/// Pair model of flat C^2 with Omega+ = w_J + i w_K and Omega- = -w_I + i w_K,
/// where w_A has matrix A.
pub fn make_hyperkahler_model() -> Result<MoritaModel> {
    let (i, j, k) = quaternion_triple();
    let plus = ComplexTwoForm { real_part: TwoForm::new(j), imag_part: TwoForm::new(k.clone()) };
    let minus = ComplexTwoForm { real_part: TwoForm::new(-i), imag_part: TwoForm::new(k) };
    make_pair_model(&plus, &minus)
}

/// The action groupoid of the affine Poisson plane in the Darboux chart
/// w = (p1, p2, q1, q2): s = (q2, q1 + p2 q2), t = (exp(p1) q2, q1).
pub fn make_affine_model() -> MoritaModel {
    let s_map = |w: &[CJet]| vec![w[3].clone(), w[2].clone() + w[1].clone() * w[3].clone()];
    let t_map = |w: &[CJet]| vec![w[0].exp() * w[3].clone(), w[2].clone()];
    let omega = ComplexTwoForm::from_complex(&canonical_form(2));
    // sigma- = -x d/dx ^ d/dy on the source base (x, y)
    let sigma = |x: &ChartPoint| ComplexBivector::new(wedge(&d_dq(0, 2), &d_dq(1, 2)) * -x.coords[0]);
    MoritaModel {
        kind: ModelKind::Affine,
        n: 2,
        s_map: Arc::new(s_map),
        t_map: Arc::new(t_map),
        omega: Arc::new(move |_: &ChartPoint| omega.clone()),
        sigma_minus: Arc::new(sigma),
        domain: Some(Arc::new(|w: &ChartPoint| w.coords[0].re < 700.0)),
        pair: None,
        relabels: Vec::new(),
    }
}

/// -4 Im(sigma) as a real bivector matrix.
pub(crate) fn poisson_of(sigma: &ComplexBivector) -> RMat {
    im_part(&sigma.matrix) * -4.0
}
