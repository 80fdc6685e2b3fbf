//! Evaluation grids and rays over chart coordinates.

use crate::error::{GkError, Result};
use crate::linalg::c;
use crate::tensor::ChartPoint;
use serde::{Deserialize, Serialize};

/// Sample set for one complex coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoordGrid {
    /// Rectangle in the real and imaginary parts.
    Box { re: [f64; 2], im: [f64; 2], re_count: usize, im_count: usize },
    /// Radii times equally spaced angles starting at 0.
    Polar { r: [f64; 2], r_count: usize, theta_count: usize },
    Fixed { re: f64, im: f64 },
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

impl CoordGrid {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(GkError::InvalidArgument(m.to_string()));
        match self {
            CoordGrid::Box { re, im, re_count, im_count } => {
                if *re_count == 0 || *im_count == 0 {
                    return bad("grid counts must be >= 1");
                }
                if !re.iter().chain(im).all(|x| x.is_finite()) {
                    return bad("grid ranges must be finite");
                }
            }
            CoordGrid::Polar { r, r_count, theta_count } => {
                if *r_count == 0 || *theta_count == 0 {
                    return bad("grid counts must be >= 1");
                }
                if !r.iter().all(|x| x.is_finite() && *x >= 0.0) {
                    return bad("polar radii must be finite and non-negative");
                }
            }
            CoordGrid::Fixed { re, im } => {
                if !re.is_finite() || !im.is_finite() {
                    return bad("fixed coordinate must be finite");
                }
            }
        }
        Ok(())
    }

    fn values(&self) -> Vec<num_complex::Complex64> {
        match self {
            CoordGrid::Box { re, im, re_count, im_count } => {
                let xs = linspace(re[0], re[1], *re_count);
                let ys = linspace(im[0], im[1], *im_count);
                xs.iter().flat_map(|&x| ys.iter().map(move |&y| c(x, y))).collect()
            }
            CoordGrid::Polar { r, r_count, theta_count } => {
                let rs = linspace(r[0], r[1], *r_count);
                let tau = std::f64::consts::TAU;
                rs.iter()
                    .flat_map(|&rr| {
                        (0..*theta_count).map(move |k| {
                            let th = tau * k as f64 / *theta_count as f64;
                            c(rr * th.cos(), rr * th.sin())
                        })
                    })
                    .collect()
            }
            CoordGrid::Fixed { re, im } => vec![c(*re, *im)],
        }
    }
}

/// Tensor-product grid, one factor per complex coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub coords: Vec<CoordGrid>,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.coords.is_empty() {
            return Err(GkError::InvalidArgument("grid needs at least one coordinate".into()));
        }
        self.coords.iter().try_for_each(|g| g.validate())
    }

    /// Points in lexicographic order, first coordinate slowest.
    pub fn points(&self) -> Result<Vec<ChartPoint>> {
        self.validate()?;
        let mut out: Vec<Vec<num_complex::Complex64>> = vec![vec![]];
        for g in &self.coords {
            let vals = g.values();
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    vals.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(*v);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(ChartPoint::new).collect()
    }
}

/// A ray origin + r * direction with r in [0, r_max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ray {
    pub origin: Vec<[f64; 2]>,
    pub direction: Vec<[f64; 2]>,
    pub r_max: f64,
    pub samples: usize,
}

impl Ray {
    pub fn validate(&self) -> Result<()> {
        if self.origin.len() != self.direction.len() || self.origin.is_empty() {
            return Err(GkError::InvalidArgument("ray origin and direction must match in length".into()));
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) || self.samples < 2 {
            return Err(GkError::InvalidArgument("ray needs r_max > 0 and at least 2 samples".into()));
        }
        Ok(())
    }

    pub fn at(&self, r: f64) -> Result<ChartPoint> {
        ChartPoint::new(
            self.origin
                .iter()
                .zip(&self.direction)
                .map(|(o, d)| c(o[0] + r * d[0], o[1] + r * d[1]))
                .collect(),
        )
    }
}
