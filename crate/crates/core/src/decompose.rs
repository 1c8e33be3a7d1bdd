//! Schouten/Weyl and scalar/trace-free-Ricci/Weyl decompositions of a
//! curvature tensor, and the norms used by the pinching conditions.
//!
//! `Rm = S ⊙ g + W` with `S = (Ric - R g / (2(n-1))) / (n-2)`, and
//! `Rm = R/(2n(n-1)) g ⊙ g + Ric° ⊙ g / (n-2) + W`.

use alloc::format;

use crate::tensor::{kulkarni_nomizu, ricci_contract, CurvatureTensor, FullNorm, SymTwoTensor};
use crate::{Error, Result};

/// Relative tolerance for `|Z|^2 = 4|Ric°|^2/(n-2) + |W|^2`.
pub const CONCIRCULAR_IDENTITY_TOL: f64 = 1e-8;

/// Every piece of the two decompositions of one curvature tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedCurvature {
    pub scalar: f64,
    pub ricci: SymTwoTensor,
    pub schouten: SymTwoTensor,
    pub traceless_ricci: SymTwoTensor,
    pub weyl: CurvatureTensor,
    pub concircular: CurvatureTensor,
}

fn check_dim(rm: &CurvatureTensor) -> Result<usize> {
    let n = rm.dim();
    if n < 3 {
        return Err(Error::Dimension(format!("decomposition needs dim >= 3, got {n}")));
    }
    Ok(n)
}

fn schouten_of(ricci: &SymTwoTensor, scalar: f64) -> SymTwoTensor {
    let n = ricci.dim();
    let shift = scalar / (2.0 * (n as f64 - 1.0));
    ricci
        .sub(&SymTwoTensor::metric(n).scaled(shift))
        .expect("same dimension")
        .scaled(1.0 / (n as f64 - 2.0))
}

pub fn schouten(rm: &CurvatureTensor) -> Result<SymTwoTensor> {
    check_dim(rm)?;
    let ricci = ricci_contract(rm);
    let scalar = ricci.trace();
    Ok(schouten_of(&ricci, scalar))
}

/// `W = Rm - S ⊙ g`.
pub fn weyl(rm: &CurvatureTensor) -> Result<CurvatureTensor> {
    let s = schouten(rm)?;
    rm.sub(&kulkarni_nomizu(&s, &SymTwoTensor::metric(rm.dim()))?)
}

pub fn orthogonal_decompose(rm: &CurvatureTensor) -> Result<DecomposedCurvature> {
    let n = check_dim(rm)?;
    let g = SymTwoTensor::metric(n);
    let ricci = ricci_contract(rm);
    let scalar = ricci.trace();
    let schouten = schouten_of(&ricci, scalar);
    let traceless_ricci = ricci.trace_free();
    let weyl = rm.sub(&kulkarni_nomizu(&schouten, &g)?)?;
    let concircular = kulkarni_nomizu(&traceless_ricci, &g)?
        .scaled(1.0 / (n as f64 - 2.0))
        .add(&weyl)?;
    Ok(DecomposedCurvature { scalar, ricci, schouten, traceless_ricci, weyl, concircular })
}

impl DecomposedCurvature {
    pub fn dim(&self) -> usize {
        self.ricci.dim()
    }

    /// `S ⊙ g + W`.
    pub fn reconstruct_schouten(&self) -> CurvatureTensor {
        let g = SymTwoTensor::metric(self.dim());
        kulkarni_nomizu(&self.schouten, &g)
            .and_then(|sg| sg.add(&self.weyl))
            .expect("consistent dimensions")
    }

    /// `R/(2n(n-1)) g ⊙ g + Ric° ⊙ g / (n-2) + W`.
    pub fn reconstruct_orthogonal(&self) -> CurvatureTensor {
        let n = self.dim() as f64;
        let g = SymTwoTensor::metric(self.dim());
        let gg = kulkarni_nomizu(&g, &g).expect("same dim");
        let rg = kulkarni_nomizu(&self.traceless_ricci, &g).expect("same dim");
        gg.scaled(self.scalar / (2.0 * n * (n - 1.0)))
            .add(&rg.scaled(1.0 / (n - 2.0)))
            .and_then(|t| t.add(&self.weyl))
            .expect("same dim")
    }

    /// `max_{i,k} |Σ_j W_ijkj|`.
    pub fn weyl_trace_residual(&self) -> f64 {
        ricci_contract(&self.weyl).matrix().as_slice().iter().map(|x| libm::fabs(*x)).fold(0.0, f64::max)
    }

    pub fn weyl_norm_sq(&self) -> f64 {
        self.weyl.full_norm_sq()
    }

    pub fn traceless_ricci_norm_sq(&self) -> f64 {
        self.traceless_ricci.full_norm_sq()
    }

    /// `|Z|^2`, cross-checked against `4|Ric°|^2/(n-2) + |W|^2`.
    pub fn concircular_norm_sq(&self) -> Result<f64> {
        let direct = self.concircular.full_norm_sq();
        let n = self.dim() as f64;
        let identity = 4.0 / (n - 2.0) * self.traceless_ricci_norm_sq() + self.weyl_norm_sq();
        let gap = libm::fabs(direct - identity);
        if gap > CONCIRCULAR_IDENTITY_TOL * (1.0 + libm::fabs(identity)) {
            return Err(Error::InternalConsistency(format!(
                "|Z|^2 = {direct:e} but 4|Ric°|^2/(n-2) + |W|^2 = {identity:e}"
            )));
        }
        Ok(direct)
    }

    /// `sqrt(1/(n-2)) |Ric°| + |W|`, the integrand of the Yamabe-type
    /// pinching conditions.
    pub fn pinching_quantity(&self) -> f64 {
        let n = self.dim() as f64;
        libm::sqrt(1.0 / (n - 2.0)) * self.traceless_ricci.full_norm() + self.weyl.full_norm()
    }
}

pub fn concircular_norm_sq(d: &DecomposedCurvature) -> Result<f64> {
    d.concircular_norm_sq()
}

pub fn pinching_quantity(d: &DecomposedCurvature) -> f64 {
    d.pinching_quantity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::symmetrize_random;

    fn sphere(n: usize) -> CurvatureTensor {
        let g = SymTwoTensor::metric(n);
        kulkarni_nomizu(&g, &g).unwrap().scaled(0.5)
    }

    fn s2xs2() -> CurvatureTensor {
        CurvatureTensor::from_entries(4, &[(0, 1, 0, 1, 1.0), (2, 3, 2, 3, 1.0)]).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn schouten_examples() {
        let s = schouten(&sphere(4)).unwrap();
        assert!(s.sub(&SymTwoTensor::metric(4).scaled(0.5)).unwrap().full_norm() < 1e-15);
        let s = schouten(&s2xs2()).unwrap();
        assert!(s.sub(&SymTwoTensor::metric(4).scaled(1.0 / 6.0)).unwrap().full_norm() < 1e-15);
        assert_eq!(schouten(&CurvatureTensor::zeros(4).unwrap()).unwrap(), SymTwoTensor::zeros(4));
    }

    #[test]
    fn weyl_examples() {
        for n in 3..9 {
            assert!(weyl(&sphere(n)).unwrap().full_norm_sq() < 1e-24);
        }
        let w = weyl(&s2xs2()).unwrap();
        assert_close(w.get(0, 1, 0, 1), 2.0 / 3.0, 1e-15);
        assert_close(w.get(0, 2, 0, 2), -1.0 / 3.0, 1e-15);
        assert_close(w.full_norm_sq(), 16.0 / 3.0, 1e-13);
    }

    #[test]
    fn orthogonal_decomposition_examples() {
        for n in 3..9 {
            let d = orthogonal_decompose(&sphere(n)).unwrap();
            assert!(d.traceless_ricci_norm_sq() < 1e-26);
            assert!(d.weyl_norm_sq() < 1e-24);
            assert_close(d.scalar, (n * (n - 1)) as f64, 1e-12);
            assert!(d.concircular_norm_sq().unwrap() < 1e-24);
            assert!(d.pinching_quantity() < 1e-12);
        }
        let d = orthogonal_decompose(&s2xs2()).unwrap();
        assert!(d.traceless_ricci_norm_sq() < 1e-28);
        assert_close(d.weyl_norm_sq(), 16.0 / 3.0, 1e-13);
        assert_close(d.scalar, 4.0, 1e-15);
        assert_close(d.concircular_norm_sq().unwrap(), 16.0 / 3.0, 1e-13);
        assert_close(d.pinching_quantity(), libm::sqrt(16.0 / 3.0), 1e-13);
    }

    #[test]
    fn random_round_trip_and_trace_freeness() {
        for seed in 0..30 {
            let n = 3 + (seed as usize % 5);
            let rm = symmetrize_random(seed, n).unwrap();
            let d = orthogonal_decompose(&rm).unwrap();
            let scale = 1.0 + rm.full_norm();
            assert!(d.reconstruct_schouten().max_abs_diff(&rm) < 1e-9 * scale);
            assert!(d.reconstruct_orthogonal().max_abs_diff(&rm) < 1e-9 * scale);
            assert!(d.weyl_trace_residual() < 1e-9 * scale);
            assert!(d.traceless_ricci.trace().abs() < 1e-10 * scale);
            d.weyl.validate(1e-12, true).unwrap();
            if n == 3 {
                assert!(d.weyl_norm_sq() < 1e-20);
            }
        }
    }

    #[test]
    fn concircular_identity_by_brute_force() {
        let rm = symmetrize_random(5, 6).unwrap();
        let d = orthogonal_decompose(&rm).unwrap();
        let mut lhs = 0.0;
        let n = 6;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        lhs += d.concircular.get(i, j, k, l).powi(2);
                    }
                }
            }
        }
        let mut ric0 = 0.0;
        for i in 0..n {
            for j in 0..n {
                ric0 += d.traceless_ricci.get(i, j).powi(2);
            }
        }
        let rhs = 4.0 / (n as f64 - 2.0) * ric0 + d.weyl.full_norm_sq();
        assert!((lhs - rhs).abs() < 1e-8 * rhs);
        assert!((d.concircular_norm_sq().unwrap() - lhs).abs() < 1e-12 * lhs);
    }

    #[test]
    fn traceless_ricci_product_norm() {
        for seed in 0..10 {
            let n = 4 + seed as usize % 3;
            let d = orthogonal_decompose(&symmetrize_random(100 + seed, n).unwrap()).unwrap();
            let g = SymTwoTensor::metric(n);
            let part = kulkarni_nomizu(&d.traceless_ricci, &g).unwrap().scaled(1.0 / (n as f64 - 2.0));
            let expected = 4.0 / (n as f64 - 2.0) * d.traceless_ricci_norm_sq();
            assert!((part.full_norm_sq() - expected).abs() < 1e-10 * (1.0 + expected));
        }
    }

    #[test]
    fn decomposition_is_linear() {
        let a = symmetrize_random(1, 5).unwrap();
        let b = symmetrize_random(2, 5).unwrap();
        let wa = weyl(&a).unwrap();
        let wb = weyl(&b).unwrap();
        let wsum = weyl(&a.add(&b).unwrap()).unwrap();
        assert!(wsum.max_abs_diff(&wa.add(&wb).unwrap()) < 1e-12);
        let w3 = weyl(&a.scaled(3.0)).unwrap();
        assert!(w3.max_abs_diff(&wa.scaled(3.0)) < 1e-12);
    }

    #[test]
    fn corrupted_identity_is_reported() {
        let mut d = orthogonal_decompose(&symmetrize_random(9, 5).unwrap()).unwrap();
        d.concircular = d.concircular.scaled(2.0);
        assert!(matches!(d.concircular_norm_sq(), Err(Error::InternalConsistency(_))));
    }
}
