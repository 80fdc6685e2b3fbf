//! The affine groupoid in its group coordinates g = (a, b, x, y):
//! s(g) = (x, y), t(g) = (e^a x, y + x b), and
//! g1 g2 = (a1 + a2, b1 e^{a2} + b2, x2, y2) whenever s(g1) = t(g2).

use crate::map_with_jacobian;
use chart_core::linalg::{c, frob_c};
use chart_core::tensor::forms::{dq, dqbar, sym, wedge};
use chart_core::{CJet, ChartPoint, ComplexTwoForm, SymTensor};
use num_complex::Complex64;

/// Omega = da ^ d(y + x b) - db ^ dx at g, as a form on the real coordinates of (a, b, x, y).
pub fn group_omega(g: &[Complex64; 4]) -> ComplexTwoForm {
    let (b, x) = (g[1], g[2]);
    let d = |k| dq(k, 4);
    let m = wedge(&d(0), &d(3)) + wedge(&d(0), &d(2)) * b + wedge(&d(0), &d(1)) * x - wedge(&d(1), &d(2));
    ComplexTwoForm::from_complex(&m)
}

/// Group coordinates to the Darboux chart (p1, p2, q1, q2) = (a, -b, y + x b, x).
pub fn group_to_darboux(g: &[CJet]) -> Vec<CJet> {
    vec![g[0].clone(), -g[1].clone(), g[3].clone() + g[2].clone() * g[1].clone(), g[2].clone()]
}

/// The second factor of a composable pair, fixed by g1 and its (a2, b2).
fn second_factor(v: &[CJet]) -> Vec<CJet> {
    let (x1, y1, a2, b2) = (&v[2], &v[3], &v[4], &v[5]);
    let x2 = x1.clone() * (-a2.clone()).exp();
    let y2 = y1.clone() - x2.clone() * b2.clone();
    vec![a2.clone(), b2.clone(), x2, y2]
}

fn product(v: &[CJet]) -> Vec<CJet> {
    let g2 = second_factor(v);
    vec![v[0].clone() + g2[0].clone(), v[1].clone() * g2[0].exp() + g2[1].clone(), g2[2].clone(), g2[3].clone()]
}

/// |m*Omega - p1*Omega - p2*Omega| on the space of composable pairs,
/// parametrized by g1 and the (a, b) components of g2.
pub fn multiplicativity_residual(g1: [Complex64; 4], a2: Complex64, b2: Complex64) -> f64 {
    let v = ChartPoint { coords: vec![g1[0], g1[1], g1[2], g1[3], a2, b2] };
    let first = |u: &[CJet]| u[..4].to_vec();
    let pullback = |map: &dyn Fn(&[CJet]) -> Vec<CJet>| {
        let (g, jac) = map_with_jacobian(map, &v);
        let g: [Complex64; 4] = [g.coords[0], g.coords[1], g.coords[2], g.coords[3]];
        group_omega(&g).pullback(&jac).to_complex()
    };
    let lhs = pullback(&product);
    let rhs = pullback(&first) + pullback(&second_factor);
    frob_c(&(lhs - rhs))
}

/// g = 2 Re(alpha dq1 dq1bar + beta dq2 dq2bar + i alpha beta conj(q2) dq1 dq2
/// - i alpha beta q2 dq1bar dq2bar), with alpha, beta evaluated at the point.
pub fn closed_form_affine_metric(q2: Complex64, alpha: f64, beta: f64) -> SymTensor {
    let i = c(0.0, 1.0);
    let ab = alpha * beta;
    let g = sym(&dq(0, 2), &dqbar(0, 2)) * c(alpha, 0.0)
        + sym(&dq(1, 2), &dqbar(1, 2)) * c(beta, 0.0)
        + sym(&dq(0, 2), &dq(1, 2)) * (i * ab * q2.conj())
        - sym(&dqbar(0, 2), &dqbar(1, 2)) * (i * ab * q2);
    SymTensor::from_complex(&(g * c(2.0, 0.0))).0
}
