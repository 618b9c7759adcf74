//! Random sources and the complex samplers used throughout the solver.
//!
//! All randomness flows through [`ChaCha8Rng`] streams.  Substreams are
//! derived by key rather than by drawing from a shared generator, so results
//! are bitwise reproducible regardless of evaluation order or thread count.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::CVector;

/// SplitMix64 finalizer; decorrelates nearby keys into independent seeds.
fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Deterministic substream for `(seed, key)`.
///
/// Streams for distinct keys behave as independent generators, so callers can
/// hand one stream to each parallel work item without sharing state.
pub fn keyed_stream(seed: u64, key: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(key)))
}

/// Substream keyed by two indices, e.g. `(row, trial)`.
pub fn keyed_stream2(seed: u64, key_a: u64, key_b: u64) -> ChaCha8Rng {
    keyed_stream(mix64(seed ^ mix64(key_a)), key_b)
}

/// Standard complex Gaussian: real and imaginary parts are independent
/// `N(0, 1/2)`, so `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * core::f64::consts::FRAC_1_SQRT_2, im * core::f64::consts::FRAC_1_SQRT_2)
}

/// Vector of iid standard complex Gaussians.
pub fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    CVector::from_iterator(dim, (0..dim).map(|_| complex_gaussian(rng)))
}

/// Unit vector drawn uniformly from the sphere in `C^dim`.
pub fn unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    loop {
        let v = gaussian_vector(dim, rng);
        let n = v.norm();
        if n > 1e-6 {
            return v / Complex64::new(n, 0.0);
        }
    }
}

/// Point drawn uniformly from the unit ball of `C^dim` (real dimension
/// `2 dim`): a uniform direction scaled by `U^(1/(2 dim))`.
pub fn unit_ball_point<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let dir = unit_vector(dim, rng);
    let u: f64 = rng.random();
    let radius = u.powf(1.0 / (2.0 * dim as f64));
    dir * Complex64::new(radius, 0.0)
}

/// Phase drawn uniformly from the unit circle.
pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let theta = rng.random::<f64>() * core::f64::consts::TAU;
    Complex64::new(theta.cos(), theta.sin())
}

/// Draws `count` independent unit-ball points; convenience for estimators.
pub fn unit_ball_points<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Vec<CVector> {
    (0..count).map(|_| unit_ball_point(dim, rng)).collect()
}
