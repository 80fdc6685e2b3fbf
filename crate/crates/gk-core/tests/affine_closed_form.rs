//! Closed-form data of the affine example with K = |q1|^2 + |q2|^2, coded
//! directly from the holomorphic coordinates of I- and I+.

use chart_core::linalg::{c, frob, re_part, CMat, RMat};
use chart_core::tensor::forms::{d_dq, dq, dqbar, sym, wedge};
use chart_core::{Bivector, ChartPoint, CoordGrid, Endomorphism, GridSpec, Ray, TwoForm};
use gk_core::*;
use num_complex::Complex64;

fn induced(dq_m: CMat, dqbar_m: CMat) -> Endomorphism {
    let jac = real_jacobian(&dq_m, &dqbar_m);
    chart_core::ops::induced_structure(&jac).unwrap()
}

fn data(q1: Complex64, q2: Complex64) -> DegenerateGKData {
    let n = 2;
    let i = c(0.0, 1.0);
    // I- coordinates (q2, q1 - i|q2|^2)
    let im = induced(
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), -i * q2.conj()]),
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), -i * q2]),
    );
    // I+ coordinates (exp(-i conj q1) q2, q1)
    let e = (-i * q1.conj()).exp();
    let ip = induced(
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), e, c(1.0, 0.0), c(0.0, 0.0)]),
        CMat::from_row_slice(2, 2, &[-i * e * q2, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
    );
    let f = re_part(&((wedge(&dq(0, n), &dqbar(0, n)) + wedge(&dq(1, n), &dqbar(1, n))) * i));
    // 4 Re[(q2 d/dq2 ^ d/dq1 - c.c.) / 2i]
    let a = wedge(&d_dq(1, n), &d_dq(0, n)) * q2;
    let q = re_part(&((&a - a.map(|z| z.conj())) * c(0.0, -0.5))) * 4.0;
    DegenerateGKData::new(ip, im, Bivector::new(q), TwoForm::new(f)).unwrap()
}

fn closed_metric(q2: Complex64) -> RMat {
    let n = 2;
    let i = c(0.0, 1.0);
    let g = (sym(&dq(0, n), &dqbar(0, n)) + sym(&dq(1, n), &dqbar(1, n)) + sym(&dq(0, n), &dq(1, n)) * (i * q2.conj())
        - sym(&dqbar(0, n), &dqbar(1, n)) * (i * q2))
        * c(2.0, 0.0);
    re_part(&g)
}

fn sample_points() -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::new();
    for a in 0..7 {
        for b in 0..7 {
            let t = a as f64 * 0.9;
            let s = b as f64 * 0.13;
            out.push((c(0.8 * t.cos(), 0.5 * t.sin()), c(s * (1.0 + t).cos(), s * (1.0 + t).sin())));
        }
    }
    out
}

#[test]
fn star_equations_hold() {
    for (q1, q2) in sample_points() {
        let (s1, s2) = star_residuals(&data(q1, q2));
        assert!(s1 < 1e-8 && s2 < 1e-8, "{q1} {q2}: {s1:e} {s2:e}");
    }
}

#[test]
fn metric_matches_closed_form_and_both_oneone_routes() {
    for (q1, q2) in sample_points() {
        let d = data(q1, q2);
        let mb = metric_b_from_data(&d);
        let want = closed_metric(q2);
        assert!(frob(&(&mb.g.matrix - &want)) < 1e-8);
        let (gp, gm) = oneone_metrics(&d).unwrap();
        assert!(frob(&(&gp - &want)) < 1e-8);
        assert!(frob(&(&gm - &want)) < 1e-8);
    }
}

#[test]
fn hitchin_poisson_recovers_q() {
    for (q1, q2) in sample_points() {
        let d = data(q1, q2);
        let mb = metric_b_from_data(&d);
        let q = hitchin_poisson(&mb.g, &d.i_plus, &d.i_minus).unwrap();
        assert!(frob(&(&q.matrix - &d.q.matrix)) < 1e-7);
    }
}

#[test]
fn sigma_minus_is_type20() {
    let d = data(c(0.0, 0.0), c(0.5, 0.0));
    let (_, resid) = holomorphic_poisson(&d.i_minus, &d.q);
    assert!(resid < 1e-9);
}

#[test]
fn symmetric_and_antisymmetric_parts() {
    for (q1, q2) in sample_points() {
        let d = data(q1, q2);
        let (sp, ap) = split_sym_antisym(&d.f, &d.i_plus).unwrap();
        let (sm, am) = split_sym_antisym(&d.f, &d.i_minus).unwrap();
        assert!(frob(&(&sp.matrix - &sm.matrix)) < 1e-8);
        assert!(frob(&(&ap.matrix + &am.matrix)) < 1e-8);
    }
}

#[test]
fn oneone_part_of_f_for_i_minus() {
    let n = 2;
    let i = c(0.0, 1.0);
    let q2 = c(0.3, 0.4);
    let d = data(c(0.2, -0.1), q2);
    let f11 = chart_core::oneone_part(&d.f, &d.i_minus).unwrap();
    let want = wedge(&dq(0, n), &dqbar(0, n)) * i
        + wedge(&dq(1, n), &dqbar(1, n)) * (i * (1.0 - 2.0 * q2.norm_sqr()))
        + wedge(&dq(1, n), &dq(0, n)) * q2.conj()
        + wedge(&dqbar(1, n), &dqbar(0, n)) * q2;
    assert!(frob(&(&f11.matrix - re_part(&want))) < 1e-10);
    let top = chart_core::wedge_top4(&f11, &f11).unwrap();
    assert!((top + 2.0 * (1.0 - q2.norm_sqr())).abs() < 1e-10);
}

#[test]
fn gauge_identity_and_positivity_region() {
    for (q1, q2) in sample_points() {
        let d = data(q1, q2);
        assert!(gauge_identity_distance(&d).unwrap() < 1e-10);
    }
    for r in [0.0, 0.3, 0.7, 0.95, 1.05, 1.3, 2.0] {
        let d = data(c(0.1, 0.2), c(0.0, r));
        let m = min_pairing(&d).unwrap();
        assert_eq!(m > 0.0, r < 1.0, "r = {r}: {m:e}");
    }
}

#[test]
fn scan_finds_unit_circle() {
    let field = |z: &ChartPoint| Ok(data(z.coords[0], z.coords[1]));
    let ray = Ray { origin: vec![[0.0, 0.0]; 2], direction: vec![[0.0, 0.0], [1.0, 0.0]], r_max: 2.0, samples: 20 };
    let grid = GridSpec {
        coords: vec![
            CoordGrid::Polar { r: [0.0, 1.0], r_count: 3, theta_count: 3 },
            CoordGrid::Polar { r: [0.0, 0.9], r_count: 3, theta_count: 3 },
        ],
    };
    let rep = positivity_scan(field, &grid, &[ray]).unwrap();
    assert!(rep.all_positive());
    assert_eq!(rep.rays[0].boundaries.len(), 1);
    assert!((rep.rays[0].boundaries[0] - 1.0).abs() < 1e-3);
    let json = serde_json::to_string(&rep).unwrap();
    assert!(json.contains("boundaries"));
}
