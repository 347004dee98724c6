//! Seeded randomness helpers shared by the solvers and generators. All
//! sampling goes through an explicit ChaCha stream so identical seeds give
//! identical runs on every platform.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::mat::{dot, normalize, Mat};
use crate::scalar::Real;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from `[lo, hi)` as the scalar type in use.
pub fn uniform<F: Real>(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> F {
    F::from_f64(rng.gen_range(lo..hi))
}

/// Standard normal via Box-Muller; good enough for direction sampling.
pub fn standard_normal<F: Real>(rng: &mut ChaCha8Rng) -> F {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    F::from_f64((-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos())
}

/// Uniform direction on the unit sphere of dimension `dim`.
pub fn unit_vector<F: Real>(dim: usize, rng: &mut ChaCha8Rng) -> Vec<F> {
    loop {
        let mut v: Vec<F> = (0..dim).map(|_| standard_normal(rng)).collect();
        if normalize(&mut v) > F::from_f64(1e-12) {
            return v;
        }
    }
}

/// Matrix with orthonormal columns (`rows ≥ cols`), Gram-Schmidt on Gaussian
/// draws.
pub fn orthonormal_columns<F: Real>(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mat<F> {
    assert!(rows >= cols, "cannot fit {cols} orthonormal columns in dimension {rows}");
    let mut cols_vecs: Vec<Vec<F>> = Vec::with_capacity(cols);
    while cols_vecs.len() < cols {
        let mut v = unit_vector::<F>(rows, rng);
        for prev in &cols_vecs {
            let proj = dot(&v, prev);
            for (x, &p) in v.iter_mut().zip(prev.iter()) {
                *x -= proj * p;
            }
        }
        if normalize(&mut v) > F::from_f64(1e-6) {
            cols_vecs.push(v);
        }
    }
    Mat::from_fn(rows, cols, |r, c| cols_vecs[c][r])
}
