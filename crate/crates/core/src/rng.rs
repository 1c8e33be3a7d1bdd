use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn normal<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Uniformly distributed unit vector in `R^n`.
pub(crate) fn unit_vector<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> alloc::vec::Vec<f64> {
    loop {
        let v: alloc::vec::Vec<f64> = (0..n).map(|_| normal(rng)).collect();
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
