//! Deterministic, chunked random streams.
//!
//! Every Monte Carlo run is cut into fixed-size chunks. Chunk `i` draws from
//! a ChaCha8 generator seeded with the run seed and switched to stream `i`,
//! so results depend only on `(seed, samples)` and never on how many threads
//! happened to process the chunks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Samples per independent stream.
pub const CHUNK: u64 = 1 << 16;

/// Generator for chunk `index` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `work(rng, count)` over every chunk in parallel and returns the
/// per-chunk outputs in chunk order.
pub fn map_chunks<T, F>(samples: u64, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|i| {
            let count = CHUNK.min(samples - i * CHUNK);
            let mut rng = chunk_rng(seed, i);
            work(&mut rng, count)
        })
        .collect()
}

/// Draws a standard Gaussian vector of length `n` and returns
/// `(|g₊|², |g₋|²)`. Normalizing gives the split norms of a uniform point on
/// the sphere.
pub fn gaussian_split_sq<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (f64, f64) {
    let (mut pp, mut mm) = (0.0, 0.0);
    for _ in 0..n {
        let g: f64 = rng.sample(StandardNormal);
        if g > 0.0 {
            pp += g * g;
        } else {
            mm += g * g;
        }
    }
    (pp, mm)
}

/// Uniform unit vector in `R^n` (normalized Gaussian).
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return g.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform unit vector in the closed positive orthant.
pub fn positive_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    unit_vector(rng, n).into_iter().map(f64::abs).collect()
}

/// Random point whose positive and negative parts have norms `a` and `b`,
/// with the sign pattern and both directions uniform. A part whose
/// coordinate set comes out empty is zero.
pub fn point_with_split_norms<R: Rng + ?Sized>(rng: &mut R, n: usize, a: f64, b: f64) -> Vec<f64> {
    let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let (pp, mm) = g.iter().fold(
        (0.0, 0.0),
        |(p, m), &x| {
            if x > 0.0 {
                (p + x * x, m)
            } else {
                (p, m + x * x)
            }
        },
    );
    let (sp, sm) = (a / pp.sqrt(), b / mm.sqrt());
    g.into_iter()
        .map(|x| {
            if x > 0.0 {
                x * sp
            } else if x < 0.0 {
                x * sm
            } else {
                0.0
            }
        })
        .collect()
}
