//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

use chart_core::linalg::{c, frob, j_std, max_abs, min_sym_eigenvalue, re_part, RMat, RVec};
use chart_core::potential::catalog::{self, SplitProfile};
use chart_core::tensor::forms::{dq, dqbar, sym};
use chart_core::{eval_jet2, CJet, ChartPoint, CoordGrid, Dual2, Endomorphism, GridSpec, PotentialFn, Ray, SymTensor, TwoForm};
use dirac::{build_gc_pair, extract_bihermitian};
use flow::{
    brane_flow_in_z, dc_d, flow_construction, ClosedOneForm, IntegratorConfig, MatField, PoissonBase, TimeDependentPotential, VecField,
};
use gk_core::{gauge_identity_distance, metric_b_from_data, min_pairing, oneone_metrics, positivity_scan};
use morita_models::*;
use num_complex::Complex64;
use picard::{check_membership, CourantAutomorphism};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn pt(v: &[Complex64]) -> ChartPoint {
    ChartPoint::new(v.to_vec()).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, r: f64) -> ChartPoint {
    pt(&(0..n).map(|_| c(rng.gen_range(-r..r), rng.gen_range(-r..r))).collect::<Vec<_>>())
}

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn catalog_potentials() -> Vec<PotentialFn> {
    vec![
        catalog::quadratic(2),
        catalog::split(0.5, SplitProfile::Quadratic),
        catalog::split(1.5, SplitProfile::Quartic),
        catalog::split(1.0, SplitProfile::Dilog),
        catalog::dilog_complete(2.0),
    ]
}

/// Model with a brane for the pipeline: potential branes on the affine and
/// cotangent models, the diagonal brane on the hyper-Kahler pair.
fn model_branes() -> Vec<(&'static str, MoritaModel, BraneBisection)> {
    let affine = make_affine_model();
    let cot = make_cotangent_model(2, None).unwrap();
    let hk = make_hyperkahler_model().unwrap();
    let (ba, _) = brane_from_potential(&affine, catalog::quadratic(2)).unwrap();
    let (bc, _) = brane_from_potential(&cot, catalog::quadratic(2)).unwrap();
    let bh = pair_diagonal_brane(&hk).unwrap();
    vec![("affine", affine, ba), ("cotangent", cot, bc), ("hyperkahler", hk, bh)]
}

/// 2 Re(dq1 dq1bar + dq2 dq2bar + i conj(q2) dq1 dq2 - i q2 dq1bar dq2bar).
fn example_metric(q2: Complex64) -> RMat {
    let i = c(0.0, 1.0);
    let g = sym(&dq(0, 2), &dqbar(0, 2)) + sym(&dq(1, 2), &dqbar(1, 2)) + sym(&dq(0, 2), &dq(1, 2)) * (i * q2.conj())
        - sym(&dqbar(0, 2), &dqbar(1, 2)) * (i * q2);
    re_part(&(g * c(2.0, 0.0)))
}

fn polar_grid(r1: f64, r2: f64, count: usize) -> GridSpec {
    GridSpec {
        coords: vec![
            CoordGrid::Polar { r: [0.0, r1], r_count: count, theta_count: count },
            CoordGrid::Polar { r: [0.0, r2], r_count: count, theta_count: count },
        ],
    }
}

fn example_metric_grid() -> Outcome {
    let start = Instant::now();
    let m = make_affine_model();
    let (b, _) = brane_from_potential(&m, catalog::quadratic(2)).map_err(|e| e.to_string())?;
    let pts = polar_grid(1.0, 0.9, 9).points().map_err(|e| e.to_string())?;
    let errs: Vec<f64> = pts
        .par_iter()
        .map(|z| {
            let g = metric_b_from_data(&induced_structures(&m, &b, z)?).g;
            Ok(max_abs(&(g.matrix - example_metric(z.coords[1]))))
        })
        .collect::<chart_core::Result<_>>()
        .map_err(|e| e.to_string())?;
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    let elapsed = start.elapsed();
    ensure(
        pts.len() == 6561 && worst < 1e-8 && elapsed < Duration::from_secs(5),
        format!("{} points, max entry error {worst:.2e}, {:.2}s", pts.len(), elapsed.as_secs_f64()),
    )
}

fn star_residuals_everywhere() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut pipeline: f64 = 0.0;
    for (_, m, b) in model_branes() {
        for _ in 0..100 {
            let (_, rep) = induced_report(&m, &b, &random_point(&mut rng, 2, 0.9)).map_err(|e| e.to_string())?;
            pipeline = pipeline.max(rep.star1).max(rep.star2);
        }
    }
    for m in [make_affine_model(), make_cotangent_model(2, None).unwrap()] {
        for k in catalog_potentials() {
            let (b, _) = brane_from_potential(&m, k).map_err(|e| e.to_string())?;
            for _ in 0..40 {
                let (_, rep) = induced_report(&m, &b, &random_point(&mut rng, 2, 0.9)).map_err(|e| e.to_string())?;
                pipeline = pipeline.max(rep.star1).max(rep.star2);
            }
        }
    }

    let cfg = IntegratorConfig::default();
    let mut flows: f64 = 0.0;
    let affine = PoissonBase::model_source(&make_affine_model());
    let flat = PoissonBase::zero(2);
    for k in catalog_potentials() {
        let f = TimeDependentPotential::constant(k.clone()).scaled(0.1);
        for _ in 0..5 {
            let z = random_point(&mut rng, 2, 0.6);
            for base in [&affine, &flat] {
                let r = flow_construction(base, &f, &z, &cfg).map_err(|e| e.to_string())?;
                flows = flows.max(r.star1).max(r.star2);
            }
        }
        let alpha = f.differential();
        for (name, m, b) in model_branes() {
            let moved = brane_flow_in_z(&m, &b, &alpha, 0.5, &cfg).map_err(|e| format!("{name}: {e}"))?;
            for _ in 0..3 {
                let (_, rep) = induced_report(&m, &moved, &random_point(&mut rng, 2, 0.6)).map_err(|e| format!("{name}: {e}"))?;
                flows = flows.max(rep.star1).max(rep.star2);
            }
        }
    }
    ensure(pipeline < 1e-8 && flows < 1e-5, format!("pipeline {pipeline:.2e}, flows {flows:.2e}"))
}

fn located_boundary(m: &MoritaModel, k: PotentialFn, q1: f64, r_max: f64) -> Result<f64, String> {
    let (b, _) = brane_from_potential(m, k).map_err(|e| e.to_string())?;
    let ray = Ray { origin: vec![[q1, 0.0], [0.0, 0.0]], direction: vec![[0.0, 0.0], [0.6, 0.8]], r_max, samples: 24 };
    let grid = GridSpec { coords: vec![CoordGrid::Fixed { re: q1, im: 0.0 }, CoordGrid::Fixed { re: 0.0, im: 0.0 }] };
    let rep = positivity_scan(|z: &ChartPoint| induced_structures(m, &b, z), &grid, &[ray]).map_err(|e| e.to_string())?;
    match rep.rays[0].boundaries.as_slice() {
        [r] => Ok(*r),
        other => Err(format!("expected one boundary, found {other:?}")),
    }
}

fn positivity_boundaries() -> Outcome {
    let m = make_affine_model();
    let unit = located_boundary(&m, catalog::quadratic(2), 0.0, 2.0)?;
    let mut msg = format!("|q2| = {unit:.6}");
    let mut ok = (unit - 1.0).abs() < 1e-3;
    // alpha = 1/C, with beta from the q2 profile; a boundary needs C < 1
    for (cc, profile) in [(0.5, SplitProfile::Quadratic), (0.8, SplitProfile::Dilog)] {
        let r = located_boundary(&m, catalog::split(1.0 / cc, profile), 0.2, 4.0)?;
        let ab = profile.beta(r * r) * r * r / cc;
        ok &= (ab - 1.0).abs() < 1e-3;
        msg += &format!(", C = {cc} {profile:?}: alpha beta |q2|^2 = {ab:.6}");
    }
    ensure(ok, msg)
}

/// (1,1) part of F with respect to I, from the contraction matrix.
fn oneone(f: &RMat, i: &RMat) -> RMat {
    (f + i.transpose() * f * i) * 0.5
}

fn oneone_routes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for (name, m, b) in model_branes() {
        for _ in 0..1000 {
            let d = induced_structures(&m, &b, &random_point(&mut rng, 2, 0.9)).map_err(|e| format!("{name}: {e}"))?;
            let (f, ip, im) = (&d.f.matrix, &d.i_plus.matrix, &d.i_minus.matrix);
            let g = -(f * (ip + im)) * 0.5;
            let plus = -(oneone(f, ip) * ip);
            let minus = -(oneone(f, im) * im);
            let (lp, lm) = oneone_metrics(&d).map_err(|e| e.to_string())?;
            worst = [frob(&(&plus - &g)), frob(&(&minus - &g)), frob(&(lp - &g)), frob(&(lm - &g))].into_iter().fold(worst, f64::max);
        }
    }
    ensure(worst < 1e-8, format!("3000 points, max deviation {worst:.2e}"))
}

fn dirac_identity() -> Outcome {
    let m = make_affine_model();
    let (b, _) = brane_from_potential(&m, catalog::quadratic(2)).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let q1 = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let q2 = Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..std::f64::consts::TAU));
        let z = pt(&[q1, q2]);
        let d = induced_structures(&m, &b, &z).map_err(|e| e.to_string())?;
        worst = worst.max(gauge_identity_distance(&d).map_err(|e| e.to_string())?);
    }
    // radii 0.05, 0.15, ..., 1.95 never touch the unit circle
    let mut mismatches = 0;
    let mut checked = 0;
    for k in 0..20 {
        let r = 0.05 + 0.1 * k as f64;
        for a in 0..6 {
            let th = a as f64 * std::f64::consts::TAU / 6.0;
            for q1 in [c(0.0, 0.0), c(0.4, -0.3)] {
                let d = induced_structures(&m, &b, &pt(&[q1, Complex64::from_polar(r, th)])).map_err(|e| e.to_string())?;
                let p = min_pairing(&d).map_err(|e| e.to_string())?;
                checked += 1;
                if (p > 0.0) != (r < 1.0) {
                    mismatches += 1;
                }
            }
        }
    }
    ensure(worst < 1e-10 && mismatches == 0, format!("gauge distance {worst:.2e}, pairing sign mismatches {mismatches}/{checked}"))
}

fn zero_poisson_flow() -> Outcome {
    let start = Instant::now();
    let cot = make_cotangent_model(2, None).unwrap();
    let base = PoissonBase::zero(2);
    let cfg = IntegratorConfig::default();
    let pts = polar_grid(0.8, 0.8, 3).points().map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for k in catalog_potentials() {
        let (_, kahler) = brane_from_potential(&cot, k.clone()).map_err(|e| e.to_string())?;
        let f = TimeDependentPotential::constant(k).scaled(-0.5);
        let errs: Vec<f64> = pts
            .par_iter()
            .map(|z| Ok(frob(&(flow_construction(&base, &f, z, &cfg)?.data.f.matrix - kahler(z)?.matrix))))
            .collect::<chart_core::Result<_>>()
            .map_err(|e| e.to_string())?;
        worst = errs.into_iter().fold(worst, f64::max);
    }
    let elapsed = start.elapsed();
    ensure(
        worst < 1e-9 && elapsed < Duration::from_secs(2),
        format!("{} flows, max error {worst:.2e}, {:.2}s", 5 * pts.len(), elapsed.as_secs_f64()),
    )
}

/// d(J^T grad f) by central differences of the analytic gradient of
/// eps (|q1|^2 + |q2|^2), whose real gradient is 2 eps x.
fn quadratic_dc_d(eps: f64, x: &[f64]) -> RMat {
    let beta = |y: &[f64]| j_std(2).transpose() * RVec::from_iterator(4, y.iter().map(|v| 2.0 * eps * v));
    let h = 1e-5;
    let mut d = RMat::zeros(4, 4);
    for l in 0..4 {
        let (mut p, mut q) = (x.to_vec(), x.to_vec());
        p[l] += h;
        q[l] -= h;
        d.set_column(l, &((beta(&p) - beta(&q)) / (2.0 * h)));
    }
    &d - d.transpose()
}

fn general_flow() -> Outcome {
    let base = PoissonBase::model_source(&make_affine_model());
    let cfg = IntegratorConfig::default();
    let fd = IntegratorConfig { jacobian_transport: false, ..cfg };
    let eps = 0.1;
    let f = |e: f64| TimeDependentPotential::constant(catalog::quadratic(2)).scaled(e);
    let mut transport: f64 = 0.0;
    let mut slope_err: f64 = 0.0;
    for z in [pt(&[c(0.3, -0.2), c(0.4, 0.1)]), pt(&[c(-0.5, 0.6), c(0.2, -0.7)]), pt(&[c(0.1, 0.8), c(-0.6, 0.3)])] {
        let a = flow_construction(&base, &f(eps), &z, &cfg).map_err(|e| e.to_string())?;
        let b = flow_construction(&base, &f(eps), &z, &fd).map_err(|e| e.to_string())?;
        transport = transport.max(frob(&(&a.data.i_plus.matrix - &b.data.i_plus.matrix)));
        // F(e)/e = dc_d f + O(e); Richardson removes the first order term
        let half = flow_construction(&base, &f(eps / 2.0), &z, &cfg).map_err(|e| e.to_string())?;
        let slope = half.data.f.matrix * (4.0 / eps) - &a.data.f.matrix * (1.0 / eps);
        let want = quadratic_dc_d(1.0, &z.real());
        slope_err = slope_err.max(frob(&(slope - &want)) / frob(&want));
    }
    ensure(transport < 1e-6 && slope_err < 0.02, format!("transport vs FD {transport:.2e}, slope relative error {slope_err:.2e}"))
}

fn multiplicativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut z = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let worst = (0..100).map(|_| multiplicativity_residual([z(), z(), z(), z()], z(), z())).fold(0.0, f64::max);
    ensure(worst < 1e-11, format!("100 pairs, max residual {worst:.2e}"))
}

fn completeness_bound() -> Outcome {
    let cc = 2.0;
    let m = make_affine_model();
    let k = catalog::dilog_complete(cc);
    let (b, _) = brane_from_potential(&m, k.clone()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pts: Vec<(ChartPoint, Complex64)> = (0..10_000)
        .map(|_| {
            let s: f64 = rng.gen_range(0.01..3.0);
            let q2 = Complex64::from_polar(s.sinh(), rng.gen_range(0.0..std::f64::consts::TAU));
            (pt(&[c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), q2]), q2)
        })
        .collect();
    let eigs: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|(z, q2)| {
            let g = metric_b_from_data(&induced_structures(&m, &b, z)?).g;
            // ds for s = asinh|q2|
            let r = q2.norm();
            let w = 1.0 / (r * (1.0 + r * r).sqrt());
            let ds = RVec::from_vec(vec![0.0, 0.0, q2.re * w, q2.im * w]);
            let bound = &g.matrix - (&ds * ds.transpose()) * (2.0 * (cc - 1.0) / cc);
            let beta = eval_jet2(&k, z)?.ddbar[(1, 1)].re;
            Ok((min_sym_eigenvalue(&bound), (beta - 1.0 / (1.0 + r * r)).abs()))
        })
        .collect::<chart_core::Result<_>>()
        .map_err(|e| e.to_string())?;
    let min = eigs.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
    let beta = eigs.iter().map(|e| e.1).fold(0.0, f64::max);
    ensure(min > -1e-9 && beta < 1e-9, format!("10000 points, min eigenvalue {min:.3e}, beta error {beta:.2e}"))
}

fn hyperkahler() -> Outcome {
    let m = make_hyperkahler_model().map_err(|e| e.to_string())?;
    let b = pair_diagonal_brane(&m).map_err(|e| e.to_string())?;
    // I, J and K = IJ on the real coordinates (x1, y1, x2, y2)
    let i = j_std(2);
    #[rustfmt::skip]
    let j = RMat::from_row_slice(4, 4, &[
        0.0, 0.0, -1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, -1.0, 0.0, 0.0,
    ]);
    let k = &i * &j;
    let (ti, tj, tk) = quaternion_triple();
    if frob(&(&ti - &i)) + frob(&(&tj - &j)) + frob(&(&tk - &k)) > 1e-15 {
        return Err("unexpected quaternion triple".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut tuple: f64 = 0.0;
    for _ in 0..50 {
        let (d, rep) = induced_report(&m, &b, &random_point(&mut rng, 2, 1.5)).map_err(|e| e.to_string())?;
        let kinv = k.clone().try_inverse().unwrap();
        tuple = [frob(&(&d.i_plus.matrix - &i)), frob(&(&d.i_minus.matrix - &j)), frob(&(&d.q.matrix - kinv)), frob(&(&d.f.matrix - (&i + &j))), rep.star1, rep.star2]
            .into_iter()
            .fold(tuple, f64::max);
    }
    // f = x1^2 = (q1 + conj q1)^2 / 4
    let f = PotentialFn::from_jet_fn("x1^2", 2, |q: &[CJet]| {
        let s = q[0].clone() + q[0].conj();
        (s.clone() * s).scale(c(0.25, 0.0))
    });
    let alpha = ClosedOneForm::exact(f);
    let cfg = IntegratorConfig::default();
    let mut flowed: f64 = 0.0;
    let mut change: f64 = 0.0;
    for t in [0.1, 0.2, 0.3, 0.4, 0.5] {
        let moved = brane_flow_in_z(&m, &b, &alpha, t, &cfg).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let (d, rep) = induced_report(&m, &moved, &random_point(&mut rng, 2, 1.0)).map_err(|e| e.to_string())?;
            flowed = flowed.max(rep.star1).max(rep.star2);
            change = change.max(frob(&(&d.f.matrix - (&i + &j))));
        }
    }
    ensure(
        tuple < 1e-12 && flowed < 1e-5 && change > 1e-3,
        format!("tuple {tuple:.2e}, flowed star {flowed:.2e}, largest change of F {change:.2e}"),
    )
}

/// (1 + a x1^2) dx1 ^ dy1 + g dx2 ^ dy2.
fn closed_form(a: f64, g: f64) -> impl Fn(&ChartPoint) -> chart_core::Result<RMat> + Send + Sync {
    move |z: &ChartPoint| {
        let x = z.real();
        let mut m = RMat::zeros(4, 4);
        let f = 1.0 + a * x[0] * x[0];
        m[(1, 0)] = f;
        m[(0, 1)] = -f;
        m[(3, 2)] = g;
        m[(2, 3)] = -g;
        Ok(m)
    }
}

fn picard_group() -> Outcome {
    let shear = |k: f64| {
        move |v: &[Dual2]| {
            let sq = v[0].clone() * v[0].clone();
            vec![v[0].clone(), v[1].clone() + sq.scale(k), v[2].clone() + v[1].clone().scale(0.5 * k), v[3].clone() + v[0].clone() * v[2].clone().scale(k)]
        }
    };
    let g = [
        CourantAutomorphism::from_real_map("s1", 2, shear(0.3), closed_form(0.5, 0.2)),
        CourantAutomorphism::from_real_map("s2", 2, shear(-0.7), closed_form(-0.2, 1.0)),
        CourantAutomorphism::b_field("b", 2, closed_form(1.0, -0.4)),
    ];
    let id = CourantAutomorphism::identity(2);
    let err = |e: chart_core::GkError| e.to_string();
    let left = g[0].compose(&g[1]).map_err(err)?.compose(&g[2]).map_err(err)?;
    let right = g[0].compose(&g[1].compose(&g[2]).map_err(err)?).map_err(err)?;
    let gap = |a: &CourantAutomorphism, b: &CourantAutomorphism, z: &ChartPoint| -> chart_core::Result<f64> {
        let ((pa, ja), (pb, jb)) = (a.apply(z)?, b.apply(z)?);
        let dp = pa.coords.iter().zip(&pb.coords).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        Ok(dp.max(frob(&(ja - jb))).max(frob(&(a.form(z)?.matrix - b.form(z)?.matrix))))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut axioms: f64 = 0.0;
    for _ in 0..100 {
        let z = random_point(&mut rng, 2, 1.0);
        axioms = axioms.max(gap(&left, &right, &z).map_err(err)?);
        for a in &g {
            let inv = a.inverse();
            for (x, y) in [(a.compose(&id), a.clone()), (id.compose(a), a.clone()), (a.compose(&inv), id.clone()), (inv.compose(a), id.clone())] {
                axioms = axioms.max(gap(&x.map_err(err)?, &y, &z).map_err(err)?);
            }
        }
    }

    let base = PoissonBase::model_source(&make_affine_model());
    let points = [pt(&[c(0.3, -0.2), c(0.4, 0.1)]), pt(&[c(-0.5, 0.2), c(0.1, -0.6)])];
    let mut membership: f64 = 0.0;
    let potentials = [
        TimeDependentPotential::constant(catalog::quadratic(2)).scaled(0.2).differential(),
        ClosedOneForm::exact(catalog::split(0.5, SplitProfile::Quartic)),
    ];
    for alpha in potentials {
        let (b1, a1, b2, a2) = (base.clone(), alpha.clone(), base.clone(), alpha.clone());
        let v: Arc<VecField> = Arc::new(move |x: &ChartPoint| Ok(b1.poisson(x)? * a1.eval(0.0, x)?.0));
        let om: Arc<MatField> = Arc::new(move |x: &ChartPoint| Ok(dc_d(&b2, &a2, 0.0, x)?.matrix));
        for t in [0.3, 1.0] {
            let a = CourantAutomorphism::from_symmetry(format!("exp {t}"), 2, v.clone(), om.clone(), t, IntegratorConfig::default());
            membership = membership.max(check_membership(&a, &base, &points).map_err(err)?.max());
        }
    }
    ensure(axioms < 1e-12 && membership < 1e-5, format!("axioms {axioms:.2e}, membership {membership:.2e}"))
}

/// Unit combination of the flat quaternionic structures.
fn quaternionic(rng: &mut ChaCha8Rng) -> RMat {
    let (i, j, k) = quaternion_triple();
    let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (i * v[0] + j * v[1] + k * v[2]) / n
}

fn roundtrips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut potential: f64 = 0.0;
    for m in [make_affine_model(), make_cotangent_model(2, None).unwrap()] {
        for k in catalog_potentials() {
            let (b, _) = brane_from_potential(&m, k.clone()).map_err(|e| e.to_string())?;
            let z0 = pt(&[c(0.2, 0.1), c(-0.1, 0.3)]);
            let back = potential_from_brane(&m, &b, &z0).map_err(|e| e.to_string())?;
            let k0 = eval_jet2(&k, &z0).map_err(|e| e.to_string())?.value;
            for _ in 0..10 {
                let z = random_point(&mut rng, 2, 0.9);
                let got = eval_jet2(&back, &z).map_err(|e| e.to_string())?.value;
                let want = eval_jet2(&k, &z).map_err(|e| e.to_string())?.value - k0;
                potential = potential.max((got - want).abs());
            }
        }
    }

    let mut bihermitian: f64 = 0.0;
    for _ in 0..100 {
        let g = SymTensor::new(RMat::identity(4, 4) * rng.gen_range(0.5..3.0));
        let ip = Endomorphism::new(quaternionic(&mut rng));
        let im = Endomorphism::new(quaternionic(&mut rng));
        let b = TwoForm::new(RMat::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0)));
        let (ja, jb) = build_gc_pair(&g, &ip, &im, &b).map_err(|e| e.to_string())?;
        let back = extract_bihermitian(&ja, &jb).map_err(|e| e.to_string())?;
        bihermitian = [
            frob(&(&back.g.matrix - &g.matrix)),
            frob(&(&back.b.matrix - &b.matrix)),
            frob(&(&back.i_plus.matrix - &ip.matrix)),
            frob(&(&back.i_minus.matrix - &im.matrix)),
        ]
        .into_iter()
        .fold(bihermitian, f64::max);
    }
    ensure(potential < 1e-7 && bihermitian < 1e-9, format!("potential {potential:.2e}, bihermitian {bihermitian:.2e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("affine example metric on the polar grid", example_metric_grid),
        ("star equations for pipeline and flows", star_residuals_everywhere),
        ("positivity boundaries", positivity_boundaries),
        ("(1,1) routes to the metric", oneone_routes),
        ("gauge identity and pairing region", dirac_identity),
        ("zero Poisson flow equals i ddbar K", zero_poisson_flow),
        ("general flow transport and linearization", general_flow),
        ("multiplicativity of the affine groupoid form", multiplicativity),
        ("completeness bound and dilog derivative", completeness_bound),
        ("hyper-Kahler data and its brane flow", hyperkahler),
        ("Courant automorphism group", picard_group),
        ("roundtrips", roundtrips),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let out = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match out {
            Ok(msg) => println!("PASS {:>2} {name}: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
