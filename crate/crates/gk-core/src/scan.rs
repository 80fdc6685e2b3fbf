use crate::{analyze, DegenerateGKData};
use chart_core::{ChartPoint, GridSpec, Ray, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Bisection stops once the bracket is this short in the ray parameter.
const RAY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    /// (re, im) per coordinate.
    pub coords: Vec<[f64; 2]>,
    pub min_eig: Option<f64>,
    pub star1: Option<f64>,
    pub star2: Option<f64>,
    pub error: Option<String>,
}

impl ScanPoint {
    pub fn positive(&self) -> bool {
        self.min_eig.is_some_and(|e| e > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayReport {
    pub ray: Ray,
    /// Ray parameters where the minimum metric eigenvalue changes sign.
    pub boundaries: Vec<f64>,
    /// Samples where evaluation failed.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocusReport {
    pub points: Vec<ScanPoint>,
    pub rays: Vec<RayReport>,
}

impl LocusReport {
    pub fn all_positive(&self) -> bool {
        self.points.iter().all(ScanPoint::positive)
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.error.is_some()).count()
    }

    /// CSV with columns re_q1, im_q1, ..., min_eig, star1, star2, error.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let n = self.points.first().map_or(0, |p| p.coords.len());
        let mut header: Vec<String> = (1..=n).flat_map(|k| [format!("re_q{k}"), format!("im_q{k}")]).collect();
        header.extend(["min_eig", "star1", "star2", "error"].map(String::from));
        out.write_record(&header)?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        for p in &self.points {
            let mut row: Vec<String> = p.coords.iter().flat_map(|z| [format!("{:.17e}", z[0]), format!("{:.17e}", z[1])]).collect();
            row.extend([opt(p.min_eig), opt(p.star1), opt(p.star2), p.error.clone().unwrap_or_default()]);
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn evaluate<F>(field: &F, z: &ChartPoint) -> ScanPoint
where
    F: Fn(&ChartPoint) -> Result<DegenerateGKData>,
{
    let coords = z.coords.iter().map(|q| [q.re, q.im]).collect();
    match field(z) {
        Ok(d) => {
            let r = analyze(&d);
            ScanPoint {
                coords,
                min_eig: Some(r.min_metric_eigenvalue),
                star1: Some(r.star1_residual),
                star2: Some(r.star2_residual),
                error: None,
            }
        }
        Err(e) => ScanPoint { coords, min_eig: None, star1: None, star2: None, error: Some(e.to_string()) },
    }
}

fn min_eig_at<F>(field: &F, ray: &Ray, r: f64) -> Option<f64>
where
    F: Fn(&ChartPoint) -> Result<DegenerateGKData>,
{
    let z = ray.at(r).ok()?;
    evaluate(field, &z).min_eig
}

fn scan_ray<F>(field: &F, ray: &Ray) -> Result<RayReport>
where
    F: Fn(&ChartPoint) -> Result<DegenerateGKData>,
{
    ray.validate()?;
    let rs: Vec<f64> = (0..ray.samples).map(|k| ray.r_max * k as f64 / (ray.samples - 1) as f64).collect();
    let vals: Vec<Option<f64>> = rs.iter().map(|&r| min_eig_at(field, ray, r)).collect();
    let failures = vals.iter().filter(|v| v.is_none()).count();
    let mut boundaries = Vec::new();
    for k in 0..rs.len() - 1 {
        let (Some(va), Some(vb)) = (vals[k], vals[k + 1]) else { continue };
        if (va > 0.0) == (vb > 0.0) {
            continue;
        }
        let (mut a, mut b) = (rs[k], rs[k + 1]);
        let sign_a = va > 0.0;
        while b - a > RAY_TOL {
            let m = 0.5 * (a + b);
            match min_eig_at(field, ray, m) {
                Some(v) if (v > 0.0) == sign_a => a = m,
                Some(_) => b = m,
                // an evaluation failure inside the bracket is treated as the boundary
                None => b = m,
            }
        }
        boundaries.push(0.5 * (a + b));
    }
    Ok(RayReport { ray: ray.clone(), boundaries, failures })
}

/// Minimum metric eigenvalue and star residuals over a grid, plus sign-change
/// boundaries along rays. Point order follows the grid enumeration.
pub fn positivity_scan<F>(field: F, grid: &GridSpec, rays: &[Ray]) -> Result<LocusReport>
where
    F: Fn(&ChartPoint) -> Result<DegenerateGKData> + Sync,
{
    let pts = grid.points()?;
    let points = pts.par_iter().map(|z| evaluate(&field, z)).collect();
    let rays = rays.par_iter().map(|r| scan_ray(&field, r)).collect::<Result<Vec<_>>>()?;
    Ok(LocusReport { points, rays })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chart_core::linalg::j_std;
    use chart_core::{Bivector, CoordGrid, Endomorphism, GkError, TwoForm};

    /// Kahler-type data whose metric turns indefinite for |q2| > 1.
    fn toy(z: &ChartPoint) -> Result<DegenerateGKData> {
        let r2 = z.coords[1].norm_sqr();
        if r2 > 9.0 {
            return Err(GkError::OutsideDomain("toy domain".into()));
        }
        let mut w = j_std(2);
        w[(3, 2)] = 1.0 - r2;
        w[(2, 3)] = -(1.0 - r2);
        DegenerateGKData::new(Endomorphism::std(2), Endomorphism::std(2), Bivector::zeros(4), TwoForm::new(w))
    }

    #[test]
    fn boundary_on_unit_circle() {
        let ray = Ray { origin: vec![[0.0, 0.0]; 2], direction: vec![[0.0, 0.0], [0.6, 0.8]], r_max: 2.0, samples: 21 };
        let grid = GridSpec { coords: vec![CoordGrid::Fixed { re: 0.0, im: 0.0 }, CoordGrid::Box { re: [0.0, 4.0], im: [0.0, 0.0], re_count: 5, im_count: 1 }] };
        let rep = positivity_scan(toy, &grid, &[ray]).unwrap();
        assert_eq!(rep.rays[0].boundaries.len(), 1);
        assert!((rep.rays[0].boundaries[0] - 1.0).abs() < 1e-5);
        // q2 = 4 is outside the toy domain and recorded, not fatal
        assert_eq!(rep.failures(), 1);
        assert!(rep.points[0].positive());
        assert!(!rep.points[2].positive());
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("re_q1,im_q1,re_q2,im_q2,min_eig,star1,star2,error"));
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn flat_kahler_has_no_boundary() {
        let flat = |_: &ChartPoint| {
            DegenerateGKData::new(Endomorphism::std(2), Endomorphism::std(2), Bivector::zeros(4), TwoForm::new(j_std(2)))
        };
        let ray = Ray { origin: vec![[0.1, 0.0]; 2], direction: vec![[1.0, 0.0], [0.0, 1.0]], r_max: 10.0, samples: 50 };
        let grid = GridSpec { coords: vec![CoordGrid::Fixed { re: 0.0, im: 0.0 }; 2] };
        let rep = positivity_scan(flat, &grid, &[ray]).unwrap();
        assert!(rep.rays[0].boundaries.is_empty());
        assert!(rep.all_positive());
    }
}
