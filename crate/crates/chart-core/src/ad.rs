//! Forward-mode second-order jets over a fixed number of real variables,
//! and complex values built from pairs of them.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value, gradient and Hessian of a real function of `nvars` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual2 {
    pub v: f64,
    pub g: Vec<f64>,
    /// Row-major nvars x nvars.
    pub h: Vec<f64>,
}

impl Dual2 {
    pub fn constant(v: f64, nvars: usize) -> Self {
        Self { v, g: vec![0.0; nvars], h: vec![0.0; nvars * nvars] }
    }

    /// The k-th independent variable at value v.
    pub fn var(v: f64, k: usize, nvars: usize) -> Self {
        let mut d = Self::constant(v, nvars);
        d.g[k] = 1.0;
        d
    }

    pub fn nvars(&self) -> usize {
        self.g.len()
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.h[i * self.nvars() + j]
    }

    /// Applies a scalar function given its value and first two derivatives.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.nvars();
        let g = self.g.iter().map(|x| f1 * x).collect();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] = f1 * self.h[i * n + j] + f2 * self.g[i] * self.g[j];
            }
        }
        Self { v: f0, g, h }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            v: self.v * s,
            g: self.g.iter().map(|x| x * s).collect(),
            h: self.h.iter().map(|x| x * s).collect(),
        }
    }

    pub fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Self {
        self.chain(self.v.ln(), 1.0 / self.v, -1.0 / (self.v * self.v))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn recip(&self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Add for Dual2 {
    type Output = Dual2;
    fn add(mut self, o: Dual2) -> Dual2 {
        self.v += o.v;
        self.g.iter_mut().zip(&o.g).for_each(|(a, b)| *a += b);
        self.h.iter_mut().zip(&o.h).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for Dual2 {
    type Output = Dual2;
    fn sub(mut self, o: Dual2) -> Dual2 {
        self.v -= o.v;
        self.g.iter_mut().zip(&o.g).for_each(|(a, b)| *a -= b);
        self.h.iter_mut().zip(&o.h).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Neg for Dual2 {
    type Output = Dual2;
    fn neg(self) -> Dual2 {
        self.scale(-1.0)
    }
}

impl Mul for Dual2 {
    type Output = Dual2;
    fn mul(self, o: Dual2) -> Dual2 {
        let n = self.nvars();
        let mut out = Dual2::constant(self.v * o.v, n);
        for i in 0..n {
            out.g[i] = self.v * o.g[i] + o.v * self.g[i];
        }
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                out.h[k] = self.v * o.h[k]
                    + o.v * self.h[k]
                    + self.g[i] * o.g[j]
                    + o.g[i] * self.g[j];
            }
        }
        out
    }
}

impl Div for Dual2 {
    type Output = Dual2;
    fn div(self, o: Dual2) -> Dual2 {
        self * o.recip()
    }
}

/// A complex quantity whose real and imaginary parts are real jets.
#[derive(Debug, Clone, PartialEq)]
pub struct CJet {
    pub re: Dual2,
    pub im: Dual2,
}

impl CJet {
    pub fn constant(z: Complex64, nvars: usize) -> Self {
        Self { re: Dual2::constant(z.re, nvars), im: Dual2::constant(z.im, nvars) }
    }

    pub fn real(x: f64, nvars: usize) -> Self {
        Self::constant(Complex64::new(x, 0.0), nvars)
    }

    /// Complex coordinate q_j = x_j + i y_j seeded on variables 2j, 2j+1.
    pub fn coord(z: Complex64, j: usize, nvars: usize) -> Self {
        Self { re: Dual2::var(z.re, 2 * j, nvars), im: Dual2::var(z.im, 2 * j + 1, nvars) }
    }

    /// Seeds every coordinate of a point: q_j on variables 2j, 2j+1.
    pub fn seed(coords: &[Complex64]) -> Vec<CJet> {
        let nv = 2 * coords.len();
        coords.iter().enumerate().map(|(j, z)| CJet::coord(*z, j, nv)).collect()
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.v, self.im.v)
    }

    pub fn nvars(&self) -> usize {
        self.re.nvars()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn abs2(&self) -> Self {
        let r = self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone();
        Self { re: r, im: Dual2::constant(0.0, self.nvars()) }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            re: self.re.scale(s.re) - self.im.scale(s.im),
            im: self.re.scale(s.im) + self.im.scale(s.re),
        }
    }

    /// Complex gradient and Hessian of the underlying complex function.
    fn complex_parts(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let g = self.re.g.iter().zip(&self.im.g).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let h = self.re.h.iter().zip(&self.im.h).map(|(a, b)| Complex64::new(*a, *b)).collect();
        (g, h)
    }

    /// Applies a holomorphic function given f, f', f'' at the current value.
    pub fn holo_chain(&self, f0: Complex64, f1: Complex64, f2: Complex64) -> Self {
        let n = self.nvars();
        let (g, h) = self.complex_parts();
        let mut re = Dual2::constant(f0.re, n);
        let mut im = Dual2::constant(f0.im, n);
        for i in 0..n {
            let gi = f1 * g[i];
            re.g[i] = gi.re;
            im.g[i] = gi.im;
        }
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                let hk = f1 * h[k] + f2 * g[i] * g[j];
                re.h[k] = hk.re;
                im.h[k] = hk.im;
            }
        }
        Self { re, im }
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.holo_chain(e, e, e)
    }

    /// Principal branch.
    pub fn ln(&self) -> Self {
        let z = self.value();
        self.holo_chain(z.ln(), 1.0 / z, -1.0 / (z * z))
    }

    pub fn recip(&self) -> Self {
        let z = self.value();
        let r = 1.0 / z;
        self.holo_chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn sinh(&self) -> Self {
        let z = self.value();
        self.holo_chain(z.sinh(), z.cosh(), z.sinh())
    }

    pub fn cosh(&self) -> Self {
        let z = self.value();
        self.holo_chain(z.cosh(), z.sinh(), z.cosh())
    }

    pub fn powi(&self, k: i32) -> Self {
        let z = self.value();
        let kf = k as f64;
        let f0 = z.powi(k);
        let f1 = if k == 0 { Complex64::new(0.0, 0.0) } else { z.powi(k - 1) * kf };
        let f2 = if k == 0 || k == 1 { Complex64::new(0.0, 0.0) } else { z.powi(k - 2) * (kf * (kf - 1.0)) };
        self.holo_chain(f0, f1, f2)
    }

    /// Dilogarithm on the non-positive real axis. Any other argument
    /// yields NaN, which surfaces as a domain error upstream.
    pub fn dilog(&self) -> Self {
        let z = self.value();
        if z.im != 0.0 || z.re > 0.0 {
            let nan = Complex64::new(f64::NAN, f64::NAN);
            return self.holo_chain(nan, nan, nan);
        }
        let x = z.re;
        let (d1, d2) = crate::special::dilog_derivatives(x);
        let f = Complex64::new(crate::special::dilog(x).unwrap_or(f64::NAN), 0.0);
        self.holo_chain(f, Complex64::new(d1, 0.0), Complex64::new(d2, 0.0))
    }
}

impl Add for CJet {
    type Output = CJet;
    fn add(self, o: CJet) -> CJet {
        CJet { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for CJet {
    type Output = CJet;
    fn sub(self, o: CJet) -> CJet {
        CJet { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for CJet {
    type Output = CJet;
    fn neg(self) -> CJet {
        CJet { re: -self.re, im: -self.im }
    }
}

impl Mul for CJet {
    type Output = CJet;
    fn mul(self, o: CJet) -> CJet {
        let re = self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone();
        let im = self.re * o.im + self.im * o.re;
        CJet { re, im }
    }
}

impl Div for CJet {
    type Output = CJet;
    fn div(self, o: CJet) -> CJet {
        self * o.recip()
    }
}
