//! Additive-recurrence (R_d) low-discrepancy points with a seeded
//! Cranley–Patterson shift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Unique positive root of `x^(d+1) = x + 1`.
fn generalized_golden_ratio(d: usize) -> f64 {
    let p = (d + 1) as f64;
    let mut x: f64 = 2.0;
    for _ in 0..64 {
        let f = x.powf(p) - x - 1.0;
        let df = p * x.powf(p - 1.0) - 1.0;
        let next = x - f / df;
        if (next - x).abs() < 1e-16 {
            return next;
        }
        x = next;
    }
    x
}

/// Infinite deterministic sequence of points in `[0, 1)^d`.
#[derive(Debug, Clone)]
pub struct RSequence {
    alpha: Vec<f64>,
    state: Vec<f64>,
}

impl RSequence {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim >= 1);
        let phi = generalized_golden_ratio(dim);
        let alpha = (1..=dim).map(|j| phi.powi(-(j as i32)).fract()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = (0..dim).map(|_| rng.random::<f64>()).collect();
        Self { alpha, state }
    }
}

impl Iterator for RSequence {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let out = self.state.clone();
        for (s, a) in self.state.iter_mut().zip(&self.alpha) {
            *s = (*s + a).fract();
        }
        Some(out)
    }
}
