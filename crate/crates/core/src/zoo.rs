//! Closed-form curvature tensors: space forms, products of space forms and
//! seeded random tensors with prescribed scalar / trace-free Ricci / Weyl
//! sizes.

use alloc::format;
use alloc::vec::Vec;

use crate::decompose::weyl;
use crate::linalg::SymMatrix;
use crate::tensor::{kulkarni_nomizu, ricci_contract, symmetrize_random, CurvatureTensor, FullNorm, SymTwoTensor};
use crate::{rng, Error, Result};

/// Trace norm below which the iterated Weyl projection stops.
pub const WEYL_PROJECTION_TOL: f64 = 1e-12;
const WEYL_PROJECTION_MAX_ROUNDS: usize = 8;
/// Mixes the user seed before drawing the Weyl part so it is independent
/// of the trace-free Ricci draw.
const WEYL_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// One factor `M^dimension` of constant curvature `curvature`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Factor {
    pub dimension: usize,
    pub curvature: f64,
}

/// Serializable description of a generated tensor.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "snake_case")
)]
pub enum ModelSpec {
    SpaceForm {
        dimension: usize,
        curvature: f64,
    },
    Product {
        factors: Vec<Factor>,
    },
    Random {
        dimension: usize,
        #[cfg_attr(feature = "serde", serde(default))]
        seed: u64,
        #[cfg_attr(feature = "serde", serde(default = "one"))]
        weyl_scale: f64,
        #[cfg_attr(feature = "serde", serde(default = "one"))]
        ricci_scale: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        scalar: f64,
    },
    /// Explicit representatives `(i, j, k, l, value)`.
    Raw {
        dimension: usize,
        components: Vec<(usize, usize, usize, usize, f64)>,
    },
}

#[cfg(feature = "serde")]
fn one() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn dimension(&self) -> usize {
        match self {
            Self::SpaceForm { dimension, .. } | Self::Random { dimension, .. } | Self::Raw { dimension, .. } => {
                *dimension
            }
            Self::Product { factors } => factors.iter().map(|f| f.dimension).sum(),
        }
    }

    pub fn build(&self) -> Result<CurvatureTensor> {
        match self {
            Self::SpaceForm { dimension, curvature } => space_form(*dimension, *curvature),
            Self::Product { factors } => {
                product(&factors.iter().map(|f| (f.dimension, f.curvature)).collect::<Vec<_>>())
            }
            Self::Random { dimension, seed, weyl_scale, ricci_scale, scalar } => {
                random_curvature(*dimension, *seed, *weyl_scale, *ricci_scale, *scalar)
            }
            Self::Raw { dimension, components } => CurvatureTensor::from_entries(*dimension, components),
        }
    }
}

/// `(c/2) g ⊙ g`: constant sectional curvature `c`.
pub fn space_form(n: usize, c: f64) -> Result<CurvatureTensor> {
    if n < 3 {
        return Err(Error::Dimension(format!("curvature tensors need dimension >= 3, got {n}")));
    }
    let g = SymTwoTensor::metric(n);
    Ok(kulkarni_nomizu(&g, &g)?.scaled(c / 2.0))
}

/// Riemannian product of space forms `(dimension, curvature)`; mixed
/// components vanish. One-dimensional factors are flat circles or lines.
pub fn product(factors: &[(usize, f64)]) -> Result<CurvatureTensor> {
    if let Some(&(d, _)) = factors.iter().find(|f| f.0 == 0) {
        return Err(Error::Dimension(format!("factor of dimension {d}")));
    }
    let n: usize = factors.iter().map(|f| f.0).sum();
    let mut entries = Vec::new();
    let mut offset = 0;
    for &(d, c) in factors {
        for i in offset..offset + d {
            for j in (i + 1)..offset + d {
                entries.push((i, j, i, j, c));
            }
        }
        offset += d;
    }
    if n < 3 {
        return Err(Error::Dimension(format!("total dimension must be >= 3, got {n}")));
    }
    CurvatureTensor::from_entries(n, &entries)
}

/// Projects onto totally trace-free tensors by repeated Weyl projection.
pub fn weyl_projection(t: &CurvatureTensor) -> Result<CurvatureTensor> {
    let mut w = weyl(t)?;
    for _ in 0..WEYL_PROJECTION_MAX_ROUNDS {
        if ricci_contract(&w).full_norm() < WEYL_PROJECTION_TOL {
            return Ok(w);
        }
        w = weyl(&w)?;
    }
    let residual = ricci_contract(&w).full_norm();
    if residual < WEYL_PROJECTION_TOL {
        Ok(w)
    } else {
        Err(Error::Numerical(format!("Weyl projection left trace norm {residual:e}")))
    }
}

/// Random symmetric trace-free 2-tensor of unit full norm.
fn random_trace_free(n: usize, seed: u64) -> SymTwoTensor {
    let mut r = rng::seeded(seed);
    loop {
        let raw: Vec<f64> = (0..n * n).map(|_| rng::normal(&mut r)).collect();
        let m = SymMatrix::from_fn(n, |i, j| 0.5 * (raw[i * n + j] + raw[j * n + i]));
        let t = SymTwoTensor::new(m).expect("n >= 2").trace_free();
        let len = t.full_norm();
        if len > 1e-8 {
            return t.scaled(1.0 / len);
        }
    }
}

/// `R/(2n(n-1)) g⊙g + h⊙g/(n-2) + W`, where `h` is a random trace-free
/// symmetric tensor with `|h| = ricci_scale` (it is the trace-free Ricci
/// tensor of the result) and `W` a random Weyl tensor with
/// `|W| = weyl_scale`.
pub fn random_curvature(n: usize, seed: u64, weyl_scale: f64, ricci_scale: f64, scalar: f64) -> Result<CurvatureTensor> {
    if n < 3 {
        return Err(Error::Dimension(format!("curvature tensors need dimension >= 3, got {n}")));
    }
    if weyl_scale != 0.0 && n < 4 {
        return Err(Error::Dimension(format!("Weyl tensors vanish in dimension {n}; weyl_scale must be 0")));
    }
    let nf = n as f64;
    let g = SymTwoTensor::metric(n);
    let mut rm = kulkarni_nomizu(&g, &g)?.scaled(scalar / (2.0 * nf * (nf - 1.0)));
    if ricci_scale != 0.0 {
        let h = random_trace_free(n, seed).scaled(ricci_scale);
        rm = rm.add(&kulkarni_nomizu(&h, &g)?.scaled(1.0 / (nf - 2.0)))?;
    }
    if weyl_scale != 0.0 {
        let w = weyl_projection(&symmetrize_random(seed ^ WEYL_SEED_SALT, n)?)?;
        rm = rm.add(&w.scaled(weyl_scale / w.full_norm()))?;
    }
    Ok(rm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::orthogonal_decompose;
    use crate::operator::{spectrum, BivectorMatrix};
    use alloc::vec;

    #[test]
    fn space_form_examples() {
        let op = BivectorMatrix::of_tensor(&space_form(4, 1.0).unwrap());
        assert_eq!(op.matrix, SymMatrix::identity(6));
        assert_eq!(space_form(5, 0.0).unwrap(), CurvatureTensor::zeros(5).unwrap());
        let op = BivectorMatrix::of_tensor(&space_form(4, -1.0).unwrap());
        assert_eq!(op.matrix, SymMatrix::identity(6).scaled(-1.0));
        for n in 3..9 {
            let rm = space_form(n, 0.7).unwrap();
            rm.validate(1e-10, true).unwrap();
            let d = orthogonal_decompose(&rm).unwrap();
            assert!(d.weyl_norm_sq() < 1e-24);
            assert!(d.ricci.sub(&SymTwoTensor::metric(n).scaled(0.7 * (n as f64 - 1.0))).unwrap().full_norm() < 1e-13);
        }
        assert!(matches!(space_form(2, 1.0), Err(Error::Dimension(_))));
    }

    #[test]
    fn product_examples() {
        let rm = product(&[(2, 1.0), (2, 1.0)]).unwrap();
        let d = orthogonal_decompose(&rm).unwrap();
        assert_eq!(d.scalar, 4.0);
        assert!((d.weyl_norm_sq() - 16.0 / 3.0).abs() < 1e-13);
        let s = spectrum(&BivectorMatrix::of_tensor(&rm)).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0]);

        let d = orthogonal_decompose(&product(&[(2, 1.0), (2, -1.0)]).unwrap()).unwrap();
        assert_eq!(d.scalar, 0.0);
        assert_eq!(d.ricci, SymTwoTensor::diagonal(&[1.0, 1.0, -1.0, -1.0]).unwrap());

        for n in 4..8 {
            let rm = product(&[(1, 0.0), (n - 1, 1.0)]).unwrap();
            rm.validate(1e-10, true).unwrap();
            assert!(weyl(&rm).unwrap().full_norm_sq() < 1e-18, "n = {n}");
        }
        for n in 3..7 {
            assert_eq!(product(&[(n, 0.3)]).unwrap(), space_form(n, 0.3).unwrap());
        }
        assert!(product(&[(1, 0.0), (1, 0.0)]).is_err());
        assert!(product(&[(0, 1.0), (3, 1.0)]).is_err());
    }

    #[test]
    fn random_curvature_round_trip() {
        for seed in 0..12 {
            let n = 4 + seed as usize % 4;
            let (ws, rs, r) = (0.5 + seed as f64 * 0.1, 0.3, 2.0 - seed as f64 * 0.4);
            let rm = random_curvature(n, seed, ws, rs, r).unwrap();
            rm.validate(1e-10, true).unwrap();
            let d = orthogonal_decompose(&rm).unwrap();
            assert!((d.scalar - r).abs() < 1e-8);
            assert!((d.traceless_ricci.full_norm() - rs).abs() < 1e-8);
            assert!((d.weyl.full_norm() - ws).abs() < 1e-8);
            assert!(d.weyl_trace_residual() < 1e-10);
            assert!(d.reconstruct_orthogonal().max_abs_diff(&rm) < 1e-8);
        }
    }

    #[test]
    fn random_without_traceless_parts_is_space_form() {
        let rm = random_curvature(5, 3, 0.0, 0.0, 20.0).unwrap();
        assert!(rm.max_abs_diff(&space_form(5, 1.0).unwrap()) < 1e-14);
        assert!(random_curvature(3, 0, 1.0, 0.0, 0.0).is_err());
        assert!(random_curvature(3, 0, 0.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn weyl_norm_is_linear_in_scale() {
        let base = orthogonal_decompose(&random_curvature(4, 9, 1.0, 0.5, 1.0).unwrap()).unwrap().weyl.full_norm();
        for s in [0.25, 2.0, 7.5] {
            let w = orthogonal_decompose(&random_curvature(4, 9, s, 0.5, 1.0).unwrap()).unwrap().weyl.full_norm();
            assert!((w / base - s).abs() < 1e-9);
        }
    }

    #[test]
    fn specs_build() {
        let spec = ModelSpec::Product {
            factors: vec![Factor { dimension: 2, curvature: 1.0 }, Factor { dimension: 2, curvature: 1.0 }],
        };
        assert_eq!(spec.dimension(), 4);
        assert_eq!(spec.build().unwrap(), product(&[(2, 1.0), (2, 1.0)]).unwrap());
        let raw = ModelSpec::Raw { dimension: 4, components: vec![(0, 1, 0, 1, 1.0), (2, 3, 2, 3, 1.0)] };
        assert_eq!(raw.build().unwrap(), spec.build().unwrap());
    }
}
