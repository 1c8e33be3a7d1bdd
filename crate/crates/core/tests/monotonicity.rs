//! Enlarging the Weyl part with every hypothesis constant held fixed can only
//! make a pinching certificate harder to meet.

use curvop_core::certify::{certify_field, CertifyParams, CurvatureField, FieldTheorem, Verdict};
use curvop_core::zoo::random_curvature;
use proptest::prelude::*;

fn field(n: usize, seeds: &[u64], weights: &[f64], ws: f64, rs: f64, scalar: f64) -> CurvatureField {
    let samples = seeds
        .iter()
        .zip(weights)
        .map(|(&s, &w)| (w, random_curvature(n, s, ws, rs, scalar).unwrap()))
        .collect();
    CurvatureField::new(samples).unwrap()
}

fn met(v: Verdict) -> bool {
    v == Verdict::HypothesesMet
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weyl_integral(seed in 0u64..1000, n in 4usize..7, kf in 0.0f64..1.0, ws in 0.0f64..2.0, grow in 1.0f64..4.0,
                     a in 0.01f64..3.0, weights in prop::collection::vec(0.1f64..2.0, 1..5)) {
        let k = 1 + ((n - 2) as f64 * kf) as usize;
        let seeds: Vec<u64> = (0..weights.len() as u64).map(|i| seed * 10 + i).collect();
        let p = CertifyParams { k: Some(k), a: Some(a), ..Default::default() };
        let small = certify_field(&field(n, &seeds, &weights, ws, 0.5, 20.0), FieldTheorem::WeylIntegral, &p).unwrap();
        let large = certify_field(&field(n, &seeds, &weights, ws * grow, 0.5, 20.0), FieldTheorem::WeylIntegral, &p).unwrap();
        prop_assert!(large.margin <= small.margin + 1e-12);
        prop_assert!(!(met(large.verdict) && !met(small.verdict)));
    }

    #[test]
    fn yamabe_integral(seed in 0u64..1000, n in 8usize..10, kf in 0.0f64..1.0, ws in 0.0f64..2.0, grow in 1.0f64..4.0,
                       yamabe in 1.0f64..200.0, weights in prop::collection::vec(0.1f64..2.0, 1..4)) {
        let k = 1 + ((n - 2) as f64 * kf) as usize;
        let seeds: Vec<u64> = (0..weights.len() as u64).map(|i| seed * 10 + i).collect();
        let p = CertifyParams { k: Some(k), yamabe: Some(yamabe), ..Default::default() };
        let small = certify_field(&field(n, &seeds, &weights, ws, 0.2, 30.0), FieldTheorem::YamabeIntegral, &p).unwrap();
        let large = certify_field(&field(n, &seeds, &weights, ws * grow, 0.2, 30.0), FieldTheorem::YamabeIntegral, &p).unwrap();
        prop_assert!(large.margin <= small.margin + 1e-12);
        prop_assert!(!(met(large.verdict) && !met(small.verdict)));
    }

    #[test]
    fn weyl_l2_four_dim(seed in 0u64..1000, ws in 0.0f64..3.0, grow in 1.0f64..4.0, rs in 0.0f64..1.0,
                        weights in prop::collection::vec(0.05f64..1.0, 1..5)) {
        let seeds: Vec<u64> = (0..weights.len() as u64).map(|i| seed * 10 + i).collect();
        let p = CertifyParams::default();
        let small = certify_field(&field(4, &seeds, &weights, ws, rs, 12.0), FieldTheorem::WeylL2FourDim, &p).unwrap();
        let large = certify_field(&field(4, &seeds, &weights, ws * grow, rs, 12.0), FieldTheorem::WeylL2FourDim, &p).unwrap();
        prop_assert!(large.margin <= small.margin + 1e-12);
        prop_assert!(!(met(large.verdict) && !met(small.verdict)));
    }
}
