use crate::config::{CatalogName, FlowBase, GoldenCommand, ModelKindConfig, PotentialConfig, ProfileName, RunConfig};
use crate::report::{compare_json, config_hash, summarize, Diff, Provenance, Record, ReportDocument, SCHEMA_VERSION};
use chart_core::expr::Expr;
use chart_core::linalg::{c, frob, re_part, CMat, RMat};
use chart_core::potential::catalog::{self, SplitProfile};
use chart_core::tensor::forms::{dq, dqbar, wedge};
use chart_core::{eval_jet2, ChartPoint, GkError, PotentialFn};
use flow::{flow_construction_grid, PoissonBase, TimeDependentPotential};
use gk_core::analyze;
use morita_models::{
    brane_from_potential, closed_form_affine_metric, induced_report, induced_structures, make_affine_model, make_cotangent_model,
    make_hyperkahler_model, pair_diagonal_brane, BraneBisection, MoritaModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::path::Path;

/// Problems with the configuration, as opposed to failed checks.
#[derive(Debug)]
pub struct UsageError(pub String);

impl From<GkError> for UsageError {
    fn from(e: GkError) -> Self {
        UsageError(e.to_string())
    }
}

type Usage<T> = std::result::Result<T, UsageError>;

pub struct Setup {
    pub model: MoritaModel,
    pub brane: BraneBisection,
    pub potential: Option<PotentialFn>,
    /// The potential is a catalog split potential, so the closed-form metric applies.
    pub split: bool,
}

pub fn build_model(cfg: &RunConfig) -> Usage<MoritaModel> {
    Ok(match cfg.model.kind {
        ModelKindConfig::Affine => make_affine_model(),
        ModelKindConfig::Cotangent => make_cotangent_model(cfg.model.n.unwrap_or(1), None)?,
        ModelKindConfig::Pair => make_hyperkahler_model()?,
    })
}

pub fn build_potential(p: &PotentialConfig, n: usize) -> Usage<PotentialFn> {
    if let Some(src) = &p.expr {
        return Ok(PotentialFn::from_expr(Expr::parse(src, n, &p.params)?, 0.0));
    }
    let need_two = |k: PotentialFn| if n == 2 { Ok(k) } else { Err(UsageError("split potentials need n = 2".into())) };
    match p.catalog {
        Some(CatalogName::Quadratic) => Ok(catalog::quadratic(n)),
        Some(CatalogName::Split) => {
            let profile = match p.profile.unwrap_or(ProfileName::Quadratic) {
                ProfileName::Quadratic => SplitProfile::Quadratic,
                ProfileName::Quartic => SplitProfile::Quartic,
                ProfileName::Dilog => SplitProfile::Dilog,
            };
            need_two(catalog::split(p.alpha.unwrap_or(1.0), profile))
        }
        Some(CatalogName::Dilog) => need_two(catalog::dilog_complete(p.c.unwrap_or(2.0))),
        None => Err(UsageError("potential needs catalog or expr".into())),
    }
}

fn time_dependent(p: &PotentialConfig, n: usize) -> Usage<TimeDependentPotential> {
    match &p.expr {
        Some(src) => Ok(TimeDependentPotential::from_expr(Expr::parse(src, n, &p.params)?)),
        None => Ok(TimeDependentPotential::constant(build_potential(p, n)?)),
    }
}

pub fn setup(cfg: &RunConfig) -> Usage<Setup> {
    let model = build_model(cfg)?;
    if cfg.model.kind == ModelKindConfig::Pair {
        if cfg.potential.is_some() {
            return Err(UsageError("the pair model uses its diagonal brane; remove [potential]".into()));
        }
        let brane = pair_diagonal_brane(&model)?;
        return Ok(Setup { model, brane, potential: None, split: false });
    }
    let p = cfg.potential.as_ref().ok_or_else(|| UsageError("[potential] is required for this model".into()))?;
    let k = build_potential(p, model.n)?;
    let (brane, _) = brane_from_potential(&model, k.clone())?;
    let split = cfg.model.kind == ModelKindConfig::Affine && p.catalog.is_some();
    Ok(Setup { model, brane, potential: Some(k), split })
}

/// Grid points followed by seeded uniform samples in the coordinate boxes.
pub fn points(cfg: &RunConfig, n: usize, seed: Option<u64>) -> Usage<Vec<ChartPoint>> {
    let mut pts = match &cfg.grid {
        Some(g) => g.points()?,
        None => Vec::new(),
    };
    if let Some(s) = &cfg.sample {
        let seed = seed.ok_or_else(|| UsageError("sampling needs a seed".into()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..s.count {
            let coords = (0..n).map(|_| c(rng.gen_range(-s.radius..s.radius), rng.gen_range(-s.radius..s.radius))).collect();
            pts.push(ChartPoint::new(coords)?);
        }
    }
    if pts.is_empty() {
        return Err(UsageError("no evaluation points: give [grid] or [sample]".into()));
    }
    if let Some(p) = pts.iter().find(|p| p.n() != n) {
        return Err(UsageError(format!("grid points have {} coordinates, the model needs {n}", p.n())));
    }
    Ok(pts)
}

fn coords(z: &ChartPoint) -> Vec<[f64; 2]> {
    z.coords.iter().map(|q| [q.re, q.im]).collect()
}

/// i ddbar K as a real two-form.
pub fn kahler_form(k: &PotentialFn, z: &ChartPoint) -> chart_core::Result<RMat> {
    let j = eval_jet2(k, z)?;
    let n = k.n;
    let mut m = CMat::zeros(2 * n, 2 * n);
    for a in 0..n {
        for b in 0..n {
            m += wedge(&dq(a, n), &dqbar(b, n)) * (c(0.0, 1.0) * j.ddbar[(a, b)]);
        }
    }
    Ok(re_part(&m))
}

fn verify_record(s: &Setup, z: &ChartPoint) -> chart_core::Result<Record> {
    let (data, rep) = induced_report(&s.model, &s.brane, z)?;
    let a = analyze(&data);
    let mut r = Record::new(coords(z))
        .value("star1", rep.star1)
        .value("star2", rep.star2)
        .value("lagrangian", rep.lagrangian_residual)
        .value("min_eig", a.min_metric_eigenvalue)
        .flag("positive", !a.degenerate)
        .flag("transverse", rep.transversality.transverse)
        .flag("metric_nondegenerate", rep.transversality.metric_nondegenerate);
    if let (true, Some(k)) = (s.split, &s.potential) {
        let jet = eval_jet2(k, z)?;
        let want = closed_form_affine_metric(z.coords[1], jet.ddbar[(0, 0)].re, jet.ddbar[(1, 1)].re);
        r = r.value("metric_error", chart_core::linalg::max_abs(&(&a.g.matrix - &want.matrix)));
    }
    Ok(r)
}

fn extreme(doc: &[Record], key: &str) -> f64 {
    doc.iter().filter_map(|r| r.values.get(key)).fold(0.0, |m: f64, v| m.max(*v))
}

fn star_checks(records: &[Record], tol: f64, require_positive: bool, checks: &mut Vec<String>) -> bool {
    let mut ok = true;
    for key in ["star1", "star2"] {
        let m = extreme(records, key);
        if m > tol {
            checks.push(format!("{key} {m:.3e} exceeds {tol:.1e}"));
            ok = false;
        }
    }
    if require_positive {
        let bad = records.iter().filter(|r| r.flags.get("positive") == Some(&false)).count();
        if bad > 0 {
            checks.push(format!("{bad} points with non-positive metric"));
            ok = false;
        }
    }
    ok
}

fn document(command: &str, cfg_text: &str, seed: Option<u64>, records: Vec<Record>, boundaries: Vec<Vec<f64>>, passed: bool, checks: Vec<String>) -> ReportDocument {
    let mut summary = summarize(&records, boundaries);
    summary.passed = passed;
    summary.checks = checks;
    ReportDocument {
        schema_version: SCHEMA_VERSION,
        command: command.into(),
        config: cfg_text.into(),
        provenance: Provenance { config_sha256: config_hash(cfg_text), version: env!("CARGO_PKG_VERSION").into(), seed },
        summary,
        records,
    }
}

pub fn cmd_verify(cfg: &RunConfig, text: &str, seed: Option<u64>) -> Usage<ReportDocument> {
    let s = setup(cfg)?;
    let pts = points(cfg, s.model.n, seed)?;
    let records: Vec<Record> = pts
        .par_iter()
        .map(|z| verify_record(&s, z).unwrap_or_else(|e| Record::failed(coords(z), e.to_string())))
        .collect();
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();
    let mut ok = star_checks(&records, tol.star, tol.require_positive, &mut checks);
    let metric = extreme(&records, "metric_error");
    if metric > tol.metric {
        checks.push(format!("metric_error {metric:.3e} exceeds {:.1e}", tol.metric));
        ok = false;
    }
    let failures = records.iter().filter(|r| r.error.is_some()).count();
    if failures > 0 {
        checks.push(format!("{failures} points failed to evaluate"));
        ok = false;
    }
    Ok(document("verify", text, seed, records, vec![], ok, checks))
}

pub fn cmd_flow(cfg: &RunConfig, text: &str, seed: Option<u64>) -> Usage<ReportDocument> {
    let model = build_model(cfg)?;
    let n = model.n;
    let p = cfg.potential.as_ref().ok_or_else(|| UsageError("[potential] is required for flow".into()))?;
    let f = time_dependent(p, n)?.scaled(cfg.flow.scale);
    let base = match cfg.flow.base {
        FlowBase::Model => PoissonBase::model_source(&model),
        FlowBase::Zero => PoissonBase::zero(n),
    };
    // with Q = 0 and a static potential, F must equal i ddbar of -2 f
    let pipeline = match (cfg.flow.base, p.expr.as_ref().map(|e| Expr::parse(e, n, &p.params)).transpose()?) {
        (FlowBase::Zero, Some(e)) if e.uses_time() => None,
        (FlowBase::Zero, _) => Some(build_potential(p, n)?),
        _ => None,
    };
    let pts = points(cfg, n, seed)?;
    let results = flow_construction_grid(&base, &f, &pts, &cfg.flow.integrator);
    let records: Vec<Record> = pts
        .iter()
        .zip(results)
        .map(|(z, r)| match r {
            Ok(r) => {
                let mut rec = Record::new(coords(z))
                    .value("star1", r.star1)
                    .value("star2", r.star2)
                    .value("error_estimate", r.error_estimate);
                let d = r.data.f.matrix.nrows();
                for i in 0..d {
                    for j in 0..d {
                        if i < j {
                            rec = rec.value(&format!("f_{i}_{j}"), r.data.f.matrix[(i, j)]);
                        }
                        rec = rec.value(&format!("iplus_{i}_{j}"), r.data.i_plus.matrix[(i, j)]);
                    }
                }
                if let Some(k) = &pipeline {
                    match kahler_form(k, z) {
                        Ok(w) => rec = rec.value("pipeline_error", frob(&(&r.data.f.matrix - w * (-2.0 * cfg.flow.scale)))),
                        Err(e) => rec.error = Some(e.to_string()),
                    }
                }
                rec
            }
            Err(e) => Record::failed(coords(z), e.to_string()),
        })
        .collect();
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();
    let mut ok = star_checks(&records, tol.flow_star, tol.require_positive, &mut checks);
    let pe = extreme(&records, "pipeline_error");
    if pe > tol.pipeline {
        checks.push(format!("pipeline_error {pe:.3e} exceeds {:.1e}", tol.pipeline));
        ok = false;
    }
    let escaped = records.iter().filter(|r| r.error.is_some()).count() as f64 / records.len() as f64;
    if escaped > tol.max_escaped_fraction {
        checks.push(format!("fraction of failed flows {escaped:.3} exceeds {}", tol.max_escaped_fraction));
        ok = false;
    }
    Ok(document("flow", text, seed, records, vec![], ok, checks))
}

pub fn cmd_scan(cfg: &RunConfig, text: &str, seed: Option<u64>) -> Usage<ReportDocument> {
    let s = setup(cfg)?;
    let grid = cfg.grid.as_ref().ok_or_else(|| UsageError("scan needs [grid]".into()))?;
    let field = |z: &ChartPoint| induced_structures(&s.model, &s.brane, z);
    let locus = gk_core::positivity_scan(field, grid, &cfg.rays)?;
    let records: Vec<Record> = locus
        .points
        .iter()
        .map(|p| {
            let mut r = Record::new(p.coords.clone());
            r.error = p.error.clone();
            for (k, v) in [("min_eig", p.min_eig), ("star1", p.star1), ("star2", p.star2)] {
                if let Some(v) = v {
                    r = r.value(k, v);
                }
            }
            if p.error.is_none() {
                r = r.flag("positive", p.positive());
            }
            r
        })
        .collect();
    let boundaries = locus.rays.iter().map(|r| r.boundaries.clone()).collect();
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();
    let mut ok = star_checks(&records, tol.star, tol.require_positive, &mut checks);
    let failures = records.iter().filter(|r| r.error.is_some()).count() + locus.rays.iter().map(|r| r.failures).sum::<usize>();
    if failures > 0 {
        checks.push(format!("{failures} evaluations failed"));
        ok = false;
    }
    Ok(document("scan", text, seed, records, boundaries, ok, checks))
}

/// Regenerates the report named in [golden] and compares it with the stored one.
pub fn cmd_golden(cfg: &RunConfig, text: &str, seed: Option<u64>, base_dir: &Path) -> Usage<(ReportDocument, Vec<Diff>)> {
    let g = cfg.golden.as_ref().ok_or_else(|| UsageError("golden needs a [golden] section".into()))?;
    let path = if g.path.is_absolute() { g.path.clone() } else { base_dir.join(&g.path) };
    let stored = std::fs::read_to_string(&path).map_err(|e| UsageError(format!("reading golden {}: {e}", path.display())))?;
    let expected: serde_json::Value = serde_json::from_str(&stored).map_err(|e| UsageError(format!("golden {}: {e}", path.display())))?;
    let doc = match g.command {
        GoldenCommand::Verify => cmd_verify(cfg, text, seed)?,
        GoldenCommand::Flow => cmd_flow(cfg, text, seed)?,
        GoldenCommand::Scan => cmd_scan(cfg, text, seed)?,
    };
    let actual = serde_json::to_value(&doc).map_err(|e| UsageError(e.to_string()))?;
    Ok((doc, compare_json(&expected, &actual, g.tolerance, &g.fields)))
}
