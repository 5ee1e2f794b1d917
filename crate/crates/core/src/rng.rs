//! Seeded randomness.
//!
//! All random draws come from [`ChaCha8Rng`] streams seeded with 64-bit values.
//! Child seeds for parallel trials are derived with the SplitMix64 finalizer,
//! so a trial depends only on `(base_seed, cell, trial)` and never on scheduling.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{Field, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into `base` one SplitMix64 round at a time.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// FNV-1a hash of a label, for turning names into seed parts.
pub fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// i.i.d. real N(0, std²) entries.
pub fn real_gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize, std: f64) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        C64::new(std * x, 0.0)
    })
}

/// i.i.d. circular complex Gaussian entries with E|z|² = 1.
pub fn complex_gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(h * re, h * im)
    })
}

/// Unit-variance Gaussian entries over `field`.
pub fn gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize, field: Field) -> DMatrix<C64> {
    match field {
        Field::Real => real_gaussian(rng, rows, cols, 1.0),
        Field::Complex => complex_gaussian(rng, rows, cols),
    }
}

/// Haar-distributed `m × r` matrix with orthonormal columns.
///
/// QR of a Gaussian block, with the phases of `diag(R)` moved into `Q`.
pub fn haar_orthonormal<R: Rng>(rng: &mut R, m: usize, r: usize, field: Field) -> DMatrix<C64> {
    assert!(r <= m, "cannot draw {r} orthonormal columns in dimension {m}");
    let g = gaussian(rng, m, r, field);
    let qr = g.qr();
    let mut q = qr.q();
    let rmat = qr.r();
    for k in 0..r {
        let d = rmat[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..m {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Uniform `k`-subset of `0..n`, sorted.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut v = rand::seq::index::sample(rng, n, k).into_vec();
    v.sort_unstable();
    v
}
