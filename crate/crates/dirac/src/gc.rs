use crate::pairing_matrix;
use chart_core::linalg::{self, complexify, frob, inverse_checked, re_part, RMat, TOL_ALG};
use chart_core::{Bivector, Endomorphism, GkError, Result, SymTensor, TwoForm};

/// Generalized complex structure as a real 4n x 4n matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GCStructure {
    pub j: RMat,
}

impl GCStructure {
    pub fn new(j: RMat) -> Result<Self> {
        let s = Self { j };
        let (sq, orth) = s.residuals();
        if sq > TOL_ALG * (1.0 + frob(&s.j).powi(2)) {
            return Err(GkError::NotComplex { residual: sq });
        }
        if orth > TOL_ALG * (1.0 + frob(&s.j).powi(2)) {
            return Err(GkError::InvalidArgument(format!("not orthogonal for the pairing: {orth:.3e}")));
        }
        Ok(s)
    }

    /// Norms of J^2 + 1 and J^T P J - P.
    pub fn residuals(&self) -> (f64, f64) {
        let d = self.j.nrows();
        let p = pairing_matrix(d / 2);
        (frob(&(&self.j * &self.j + RMat::identity(d, d))), frob(&(self.j.transpose() * &p * &self.j - p)))
    }

    /// The +i eigenbundle as a Dirac subspace.
    pub fn plus_i_eigenspace(&self) -> Result<crate::DiracSubspace> {
        let d = self.j.nrows();
        let jc = complexify(&self.j);
        let shifted = jc - linalg::CMat::identity(d, d) * linalg::I;
        crate::DiracSubspace::new(linalg::null_space(&shifted, 1e-9))
    }
}

fn block(tl: &RMat, tr: &RMat, bl: &RMat, br: &RMat) -> RMat {
    let d = tl.nrows();
    let mut m = RMat::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(tl);
    m.view_mut((0, d), (d, d)).copy_from(tr);
    m.view_mut((d, 0), (d, d)).copy_from(bl);
    m.view_mut((d, d), (d, d)).copy_from(br);
    m
}

fn b_transform(b: &RMat) -> RMat {
    let d = b.nrows();
    block(&RMat::identity(d, d), &RMat::zeros(d, d), b, &RMat::identity(d, d))
}

/// The structure [[-I, Q], [0, I^T]] whose +i eigenbundle is L_sigma.
pub fn j_sigma(i: &Endomorphism, q: &Bivector) -> Result<GCStructure> {
    let d = i.matrix.nrows();
    GCStructure::new(block(&(-&i.matrix), &q.matrix, &RMat::zeros(d, d), &i.matrix.transpose()))
}

/// (J_A, J_B) from bihermitian data (g, I+, I-, b).
pub fn build_gc_pair(
    g: &SymTensor,
    i_plus: &Endomorphism,
    i_minus: &Endomorphism,
    b: &TwoForm,
) -> Result<(GCStructure, GCStructure)> {
    let wp = &g.matrix * &i_plus.matrix;
    let wm = &g.matrix * &i_minus.matrix;
    let compat = frob(&(&wp + wp.transpose())) + frob(&(&wm + wm.transpose()));
    if compat > TOL_ALG * (1.0 + frob(&g.matrix)) {
        return Err(GkError::InvalidArgument(format!("g is not Hermitian for I+ and I-: {compat:.3e}")));
    }
    let wp_inv = inverse_checked(&wp)?;
    let wm_inv = inverse_checked(&wm)?;
    let (ip, im) = (&i_plus.matrix, &i_minus.matrix);
    let jb = block(&(ip + im), &(-(&wp_inv - &wm_inv)), &(&wp - &wm), &(-(ip.transpose() + im.transpose())));
    let ja = block(&(ip - im), &(-(&wp_inv + &wm_inv)), &(&wp + &wm), &(-(ip.transpose() - im.transpose())));
    let eb = b_transform(&b.matrix);
    let emb = b_transform(&(-&b.matrix));
    let ja = GCStructure::new(&eb * ja * &emb * 0.5)?;
    let jb = GCStructure::new(&eb * jb * &emb * 0.5)?;
    Ok((ja, jb))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bihermitian {
    pub g: SymTensor,
    pub b: TwoForm,
    pub i_plus: Endomorphism,
    pub i_minus: Endomorphism,
}

/// Recovers (g, b, I+, I-) from the eigenbundles C+ and C- of -J_A J_B.
pub fn extract_bihermitian(ja: &GCStructure, jb: &GCStructure) -> Result<Bihermitian> {
    let d2 = ja.j.nrows();
    let d = d2 / 2;
    let gg = -(&ja.j * &jb.j);
    let sq = frob(&(&gg * &gg - RMat::identity(d2, d2)));
    if sq > 1e-7 * (1.0 + frob(&gg).powi(2)) {
        return Err(GkError::InvalidArgument(format!("-J_A J_B does not square to 1: {sq:.3e}")));
    }
    let graph_of = |sign: f64| -> Result<RMat> {
        let shifted = complexify(&(&gg - RMat::identity(d2, d2) * sign));
        let k = linalg::null_space(&shifted, 1e-8);
        if k.ncols() != d {
            return Err(GkError::RankDeficient { rank: k.ncols(), needed: d });
        }
        let top = k.rows(0, d).into_owned();
        let bottom = k.rows(d, d).into_owned();
        let inv = linalg::inverse_checked_c(&top)?;
        Ok(re_part(&(bottom * inv)))
    };
    let bp = graph_of(1.0)?;
    let bm = graph_of(-1.0)?;
    let g = SymTensor::new((&bp - &bm) * 0.5);
    let b = TwoForm::new((&bp + &bm) * 0.5);
    let restrict = |m: &RMat| -> Endomorphism {
        let mut lift = RMat::zeros(d2, d);
        lift.rows_mut(0, d).copy_from(&RMat::identity(d, d));
        lift.rows_mut(d, d).copy_from(m);
        Endomorphism::new((&jb.j * lift).rows(0, d).into_owned())
    };
    Ok(Bihermitian { i_plus: restrict(&bp), i_minus: restrict(&bm), g, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chart_core::linalg::j_std;

    /// Flat R^4 quaternionic triple (I, J, K) with K = IJ.
    pub(crate) fn quaternions() -> (RMat, RMat, RMat) {
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

    #[test]
    fn quaternion_relations() {
        let (i, j, k) = quaternions();
        let id = RMat::identity(4, 4);
        assert_eq!(&j * &j, -&id);
        assert_eq!(&k * &k, -&id);
        assert_eq!(&i * &j, -(&j * &i));
    }

    #[test]
    fn kahler_pair_collapses() {
        let g = SymTensor::new(RMat::identity(4, 4) * 2.0);
        let i = Endomorphism::std(2);
        let (ja, jb) = build_gc_pair(&g, &i, &i, &TwoForm::zeros(4)).unwrap();
        let w = &g.matrix * &i.matrix;
        let want_b = block(&i.matrix, &RMat::zeros(4, 4), &RMat::zeros(4, 4), &(-i.matrix.transpose()));
        let want_a = block(&RMat::zeros(4, 4), &(-w.clone().try_inverse().unwrap()), &w, &RMat::zeros(4, 4));
        assert!(frob(&(&jb.j - want_b)) < 1e-15);
        assert!(frob(&(&ja.j - want_a)) < 1e-15);
    }

    #[test]
    fn hyperkahler_pair_commutes_and_roundtrips() {
        let (i, j, _) = quaternions();
        let g = SymTensor::new(RMat::identity(4, 4));
        let (ja, jb) =
            build_gc_pair(&g, &Endomorphism::new(i.clone()), &Endomorphism::new(j.clone()), &TwoForm::zeros(4)).unwrap();
        assert!(frob(&(&ja.j * &jb.j - &jb.j * &ja.j)) < 1e-12);
        let back = extract_bihermitian(&ja, &jb).unwrap();
        assert!(frob(&(&back.g.matrix - &g.matrix)) < 1e-12);
        assert!(frob(&back.b.matrix) < 1e-12);
        assert!(frob(&(&back.i_plus.matrix - i)) < 1e-12);
        assert!(frob(&(&back.i_minus.matrix - j)) < 1e-12);
    }

    #[test]
    fn incompatible_metric_rejected() {
        let mut g = RMat::identity(4, 4);
        g[(0, 0)] = 3.0;
        let i = Endomorphism::std(2);
        assert!(build_gc_pair(&SymTensor::new(g), &i, &i, &TwoForm::zeros(4)).is_err());
    }

    #[test]
    fn j_sigma_eigenbundle_is_l_sigma() {
        use chart_core::tensor::forms::*;
        use chart_core::ComplexBivector;
        let n = 2;
        let x = chart_core::linalg::c(0.7, -0.2);
        let sigma = ComplexBivector::new(wedge(&d_dq(0, n), &d_dq(1, n)) * x);
        let q = Bivector::new(chart_core::linalg::im_part(&sigma.matrix) * -4.0);
        let i = Endomorphism::std(n);
        let l = crate::build_l_sigma(&i, &sigma).unwrap();
        let e = j_sigma(&i, &q).unwrap().plus_i_eigenspace().unwrap();
        assert!(crate::subspace_distance(&l, &e).unwrap() < 1e-12);
    }
}
