//! Degenerate generalized Kähler data (I+, I-, Q, F) in the gauge beta = 0:
//! the defining equations, the induced metric and B-field, the Hitchin
//! Poisson structure and positivity analysis.

mod scan;

pub use scan::{positivity_scan, LocusReport, RayReport, ScanPoint};

use chart_core::linalg::{c, complexify, frob, frob_c, inverse_checked, CMat, RMat, TOL_ALG};
use chart_core::{oneone_part, Bivector, ComplexBivector, Endomorphism, GkError, Result, SymTensor, TwoForm};
use dirac::DiracSubspace;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateGKData {
    pub i_plus: Endomorphism,
    pub i_minus: Endomorphism,
    pub q: Bivector,
    pub f: TwoForm,
}

impl DegenerateGKData {
    pub fn new(i_plus: Endomorphism, i_minus: Endomorphism, q: Bivector, f: TwoForm) -> Result<Self> {
        let d = i_plus.matrix.nrows();
        for got in [i_minus.matrix.nrows(), q.dim(), f.dim()] {
            if got != d {
                return Err(GkError::Dimension { expected: d, got });
            }
        }
        i_plus.ensure_complex()?;
        i_minus.ensure_complex()?;
        Ok(Self { i_plus, i_minus, q, f })
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }
}

/// Frobenius norms of I+ - I- - QF and F I+ + I-^T F.
pub fn star_residuals(d: &DegenerateGKData) -> (f64, f64) {
    let (ip, im, q, f) = (&d.i_plus.matrix, &d.i_minus.matrix, &d.q.matrix, &d.f.matrix);
    (frob(&(ip - im - q * f)), frob(&(f * ip + im.transpose() * f)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricB {
    pub g: SymTensor,
    pub b: TwoForm,
    /// Antisymmetric part dropped from g.
    pub g_asymmetry: f64,
    /// Symmetric part dropped from b.
    pub b_symmetry: f64,
}

/// g = -F(I+ + I-)/2 and b = -F(I+ - I-)/2.
pub fn metric_b_from_data(d: &DegenerateGKData) -> MetricB {
    let (ip, im, f) = (&d.i_plus.matrix, &d.i_minus.matrix, &d.f.matrix);
    let g = -(f * (ip + im)) * 0.5;
    let b = -(f * (ip - im)) * 0.5;
    MetricB {
        g_asymmetry: frob(&(&g - g.transpose())) * 0.5,
        b_symmetry: frob(&(&b + b.transpose())) * 0.5,
        g: SymTensor::new(g),
        b: TwoForm::new(b),
    }
}

/// The two (1,1)-part routes to the metric: -F^(1,1)_{+} I+ and -F^(1,1)_{-} I-.
pub fn oneone_metrics(d: &DegenerateGKData) -> Result<(RMat, RMat)> {
    let gp = -(oneone_part(&d.f, &d.i_plus)?.matrix * &d.i_plus.matrix);
    let gm = -(oneone_part(&d.f, &d.i_minus)?.matrix * &d.i_minus.matrix);
    Ok((gp, gm))
}

/// Q = [I-, I+] g^{-1} / 2.
pub fn hitchin_poisson(g: &SymTensor, i_plus: &Endomorphism, i_minus: &Endomorphism) -> Result<Bivector> {
    let ginv = inverse_checked(&g.matrix)?;
    let (ip, im) = (&i_plus.matrix, &i_minus.matrix);
    Ok(Bivector::new((im * ip - ip * im) * ginv * 0.5))
}

/// sigma = -(I Q + i Q)/4 and its residual against the (2,0) condition.
pub fn holomorphic_poisson(i: &Endomorphism, q: &Bivector) -> (ComplexBivector, f64) {
    let qc = complexify(&q.matrix);
    let m = (complexify(&i.matrix) * &qc + qc * c(0.0, 1.0)) * c(-0.25, 0.0);
    // keep the raw matrix so a non-antisymmetric result shows in the residual
    let raw = ComplexBivector { matrix: m.clone() };
    let resid = raw.type20_residual(i) + frob_c(&(&m + m.transpose()));
    (raw, resid)
}

/// S = F^(1,1) I (symmetric) and A = F^((2,0)+(0,2)) I (antisymmetric).
pub fn split_sym_antisym(f: &TwoForm, i: &Endomorphism) -> Result<(SymTensor, TwoForm)> {
    let f11 = oneone_part(f, i)?;
    let s = &f11.matrix * &i.matrix;
    let a = (&f.matrix - &f11.matrix) * &i.matrix;
    Ok((SymTensor::new(s), TwoForm::new(a)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GKReport {
    pub star1_residual: f64,
    pub star2_residual: f64,
    pub min_metric_eigenvalue: f64,
    /// g fails to be positive definite.
    pub degenerate: bool,
    #[serde(skip)]
    pub g: SymTensor,
    #[serde(skip)]
    pub b: TwoForm,
}

pub fn analyze(d: &DegenerateGKData) -> GKReport {
    let (s1, s2) = star_residuals(d);
    let mb = metric_b_from_data(d);
    let min_eig = mb.g.min_eigenvalue();
    GKReport {
        star1_residual: s1,
        star2_residual: s2,
        min_metric_eigenvalue: min_eig,
        degenerate: !(min_eig > TOL_ALG * (1.0 + frob(&mb.g.matrix))),
        g: mb.g,
        b: mb.b,
    }
}

/// Dirac structures of the symplectic-type pair:
/// L_A = graph of -iF, L_B = e^{iF}(2i conj L_{sigma-}).
pub fn dirac_pair(d: &DegenerateGKData) -> Result<(DiracSubspace, DiracSubspace)> {
    let fc = complexify(&d.f.matrix);
    let la = dirac::graph_complex(&(&fc * c(0.0, -1.0)));
    let (sigma_minus, _) = holomorphic_poisson(&d.i_minus, &d.q);
    let lsm = dirac::build_l_sigma(&d.i_minus, &sigma_minus)?;
    let lb = dirac::scale_dirac(c(0.0, 2.0), &lsm.conj())?.gauge(&(fc * c(0.0, 1.0)));
    Ok((la, lb))
}

/// Principal-angle distance between e^F L_{sigma-} and L_{sigma+}.
pub fn gauge_identity_distance(d: &DegenerateGKData) -> Result<f64> {
    let (sp, _) = holomorphic_poisson(&d.i_plus, &d.q);
    let (sm, _) = holomorphic_poisson(&d.i_minus, &d.q);
    let lp = dirac::build_l_sigma(&d.i_plus, &sp)?;
    let lm = dirac::build_l_sigma(&d.i_minus, &sm)?;
    dirac::subspace_distance(&lm.gauge_real(&d.f), &lp)
}

/// Minimum of <u, conj u> on L_A meet L_B; positive exactly when g > 0.
pub fn min_pairing(d: &DegenerateGKData) -> Result<f64> {
    let (la, lb) = dirac_pair(d)?;
    Ok(dirac::check_gk_conditions(&la, &lb)?.min_pairing)
}

/// Real 2n x 2n Jacobian of a map given its Wirtinger derivatives
/// dw_i/dq_j and dw_i/dqbar_j.
pub fn real_jacobian(dq: &CMat, dqbar: &CMat) -> RMat {
    let (m, k) = dq.shape();
    let mut r = RMat::zeros(2 * m, 2 * k);
    for i in 0..m {
        for j in 0..k {
            let dx = dq[(i, j)] + dqbar[(i, j)];
            let dy = (dq[(i, j)] - dqbar[(i, j)]) * c(0.0, 1.0);
            r[(2 * i, 2 * j)] = dx.re;
            r[(2 * i + 1, 2 * j)] = dx.im;
            r[(2 * i, 2 * j + 1)] = dy.re;
            r[(2 * i + 1, 2 * j + 1)] = dy.im;
        }
    }
    r
}
