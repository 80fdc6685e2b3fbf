//! Dilogarithm on the non-positive axis and quadrature rules.

use crate::error::{GkError, Result};

/// Li2(x) = -int_0^x ln(1-u)/u du for x <= 0.
pub fn dilog(x: f64) -> Result<f64> {
    if !(x <= 0.0) {
        return Err(GkError::InvalidArgument(format!("dilog only evaluated for x <= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.abs() < 0.5 {
        let mut sum = 0.0;
        let mut pow = x;
        for k in 1..200 {
            let term = pow / (k * k) as f64;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            pow *= x;
        }
        return Ok(sum);
    }
    let integrand = |u: f64| if u == 0.0 { -1.0 } else { (-u).ln_1p() / u };
    Ok(adaptive_simpson(&integrand, x, 0.0, 1e-13, 60))
}

/// First and second derivatives of Li2 at x <= 0.
pub fn dilog_derivatives(x: f64) -> (f64, f64) {
    let d1 = if x == 0.0 { 1.0 } else { -(-x).ln_1p() / x };
    let d2 = if x.abs() < 0.1 {
        // sum_k (k+1)/(k+2) x^k
        let mut sum = 0.0;
        let mut pow = 1.0;
        for k in 0..40 {
            sum += pow * (k + 1) as f64 / (k + 2) as f64;
            pow *= x;
        }
        sum
    } else {
        (x / (1.0 - x) + (-x).ln_1p()) / (x * x)
    };
    (d1, d2)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
