#![allow(dead_code)]

use gmm_modes::Mixture;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn normal_vec(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    DVector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// `A Aᵀ + 0.05 I` with Gaussian `A` scaled by `spread`.
pub fn random_spd(rng: &mut ChaCha8Rng, d: usize, spread: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| spread * rng.sample::<f64, _>(StandardNormal));
    &a * a.transpose() + DMatrix::identity(d, d) * 0.05
}

pub fn random_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

pub fn random_mixture(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Mixture {
    let weights = random_weights(rng, k);
    let means = (0..k).map(|_| normal_vec(rng, d) * 1.5).collect();
    let covs = (0..k).map(|_| random_spd(rng, d, 0.7)).collect();
    Mixture::new(weights, means, covs).unwrap()
}

pub fn random_homoscedastic(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Mixture {
    let weights = random_weights(rng, k);
    let means = (0..k).map(|_| normal_vec(rng, d) * 1.5).collect();
    let cov = random_spd(rng, d, 0.7);
    Mixture::new(weights, means, vec![cov; k]).unwrap()
}

/// Well-conditioned invertible map: singular values in `[0.5, 2]`.
pub fn random_affine(rng: &mut ChaCha8Rng, d: usize) -> (DMatrix<f64>, DVector<f64>) {
    let q1 = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal)).qr().q();
    let q2 = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal)).qr().q();
    let s = DMatrix::from_diagonal(&DVector::from_iterator(d, (0..d).map(|_| rng.random_range(0.5..2.0))));
    let b = DVector::from_iterator(d, (0..d).map(|_| rng.random_range(-2.0..2.0)));
    (q1 * s * q2, b)
}

/// Euclidean distance from `x` to the convex hull of `points`, exact by
/// enumerating supports: the nearest hull point is the projection onto the
/// affine hull of some subset with nonnegative barycentric coordinates.
pub fn distance_to_hull(points: &[DVector<f64>], x: &DVector<f64>) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let base = &points[idx[0]];
        let m = idx.len() - 1;
        let candidate = if m == 0 {
            Some(base.clone())
        } else {
            let e = DMatrix::from_columns(&idx[1..].iter().map(|&i| &points[i] - base).collect::<Vec<_>>());
            let gram = e.transpose() * &e;
            gram.clone().cholesky().and_then(|c| {
                let lam = c.solve(&(e.transpose() * (x - base)));
                let first = 1.0 - lam.sum();
                (first >= -1e-12 && lam.iter().all(|v| *v >= -1e-12)).then(|| base + &e * lam)
            })
        };
        if let Some(p) = candidate {
            best = best.min((x - p).norm());
        }
    }
    best
}
