//! Seeded random streams for the synthetic experiments.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64` and split into independent streams with `set_stream`.
//! Uniforms are the standard 53-bit `[0, 1)` conversion. Normal deviates come
//! from the Marsaglia polar method, consuming uniform pairs and caching the
//! second deviate. Student-t deviates are `Z / sqrt(χ²_df / df)` with `χ²_df`
//! a sum of `df` squared normals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream used for design matrices and eigenbases.
pub const DESIGN_STREAM: u64 = 0;
/// Stream used for the true coefficients.
pub const SIGNAL_STREAM: u64 = 1;
/// Stream used for noise draws.
pub const NOISE_STREAM: u64 = 2;

pub struct SimRng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl SimRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SimRng { inner, spare: None }
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let m = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * m);
                return u * m;
            }
        }
    }

    pub fn student_t(&mut self, df: u32) -> f64 {
        let z = self.normal();
        let chi2: f64 = (0..df).map(|_| self.normal().powi(2)).sum();
        z / (chi2 / f64::from(df)).sqrt()
    }

    pub fn normal_vec(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.normal()).collect()
    }
}
