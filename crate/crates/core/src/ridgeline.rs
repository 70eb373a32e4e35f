//! The ridgeline map `x*(α) = [Σ α_i Σ_i⁻¹]⁻¹ Σ α_i Σ_i⁻¹ μ_i` and the
//! exhaustive two-component critical point search built on it.
//!
//! Every critical point `x` of the mixture density satisfies
//! `x = x*(ᾱ(x))`, with `ᾱ` the responsibilities at `x`, so the image of the
//! simplex under `x*` contains all of them.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::mixture::Mixture;
use crate::modes::{classify, dedup_points, newton_refine, AscentOptions, CriticalPoint};

/// Combined precisions above this condition estimate are rejected.
pub const MAX_CONDITION: f64 = 1e14;
const MIN_ORACLE_SAMPLES: usize = 1000;
const ROOT_TOL: f64 = 1e-12;

/// Evaluates `x*(α)` for arbitrary nonnegative weights by factorizing the
/// combined precision.
pub fn ridgeline_point(mix: &Mixture, alpha: &[f64]) -> Result<DVector<f64>> {
    if alpha.len() != mix.len() {
        return Err(Error::DimensionMismatch {
            context: "ridgeline weights".into(),
            expected: mix.len(),
            found: alpha.len(),
        });
    }
    if alpha.iter().any(|a| !a.is_finite() || *a < 0.0) || alpha.iter().sum::<f64>() <= 0.0 {
        return Err(Error::InvalidParameter("ridgeline weights must be nonnegative with positive sum".into()));
    }
    combined_solve(mix, alpha)
}

fn combined_solve(mix: &Mixture, weights: &[f64]) -> Result<DVector<f64>> {
    let d = mix.dim();
    let mut prec = nalgebra::DMatrix::zeros(d, d);
    let mut rhs = DVector::zeros(d);
    for (w, c) in weights.iter().zip(mix.components()) {
        if *w == 0.0 {
            continue;
        }
        prec += c.precision() * *w;
        rhs.axpy(*w, c.precision_mean(), 1.0);
    }
    crate::mixture::symmetrize(&mut prec);
    let chol = prec
        .cholesky()
        .ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
    let diag = chol.l_dirty().diagonal();
    let (max, min) = (diag.max(), diag.min());
    let condition = (max / min).powi(2);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    Ok(chol.solve(&rhs))
}

/// One step of the fixed-point iteration `x ↦ x*(ᾱ(x))`.
///
/// For a homoscedastic mixture this is the Gaussian mean-shift update
/// `Σ ᾱ_i μ_i`.
pub fn fixed_point_step(mix: &Mixture, x: &DVector<f64>) -> Result<DVector<f64>> {
    let resp = mix.responsibilities(x);
    if resp.iter().all(|r| *r == 0.0) {
        return Err(Error::NonFinite(x.iter().copied().collect()));
    }
    combined_solve(mix, &resp)
}

/// `‖x*(ᾱ(x)) − x‖`, which vanishes exactly at critical points.
pub fn verify_ridgeline_membership(mix: &Mixture, cp: &CriticalPoint) -> f64 {
    let x = DVector::from_column_slice(&cp.location);
    match fixed_point_step(mix, &x) {
        Ok(y) => (y - x).norm(),
        Err(_) => f64::INFINITY,
    }
}

/// Finds every critical point of a two-component mixture by scanning the
/// ridgeline curve `t ↦ x*(t, 1 − t)`.
///
/// Along the curve `d/dt f(x*(t))` vanishes only at critical points of `f`
/// (the gradient there is parallel to `Σ_1⁻¹(μ_1 − x)` and the tangent is
/// that vector pushed through a positive definite matrix), so its sign
/// changes on a fine grid bracket all of them.
pub fn ridgeline_oracle_k2(mix: &Mixture, samples: usize, opts: &AscentOptions) -> Result<Vec<CriticalPoint>> {
    if mix.len() != 2 {
        return Err(Error::ComponentCount {
            expected: 2,
            found: mix.len(),
        });
    }
    if samples < MIN_ORACLE_SAMPLES {
        return Err(Error::TooFewSamples {
            samples,
            min: MIN_ORACLE_SAMPLES,
        });
    }
    let curve = |t: f64| combined_solve(mix, &[t, 1.0 - t]);
    let end0 = curve(0.0)?;
    let end1 = curve(1.0)?;
    let span = (&end1 - &end0).norm();
    let radius = opts.dedup_radius.unwrap_or(1e-5 * span.max(1e-3));
    let scale = mix
        .means()
        .map(|m| m.amax())
        .fold(1.0f64, f64::max);

    let mut roots: Vec<DVector<f64>> = Vec::new();
    if span <= 1e-12 * scale {
        // the curve collapses to a point, which is then the only critical point
        roots.push(curve(0.5)?);
    } else {
        let fd_step = 1e-6;
        let slope = |t: f64| -> Result<f64> {
            let lo = mix.log_density(&curve(t - fd_step)?);
            let hi = mix.log_density(&curve(t + fd_step)?);
            Ok((hi - lo) / (2.0 * fd_step))
        };
        let grid: Vec<f64> = (0..samples).map(|j| j as f64 / (samples - 1) as f64).collect();
        let values = grid.iter().map(|&t| slope(t)).collect::<Result<Vec<_>>>()?;
        for j in 0..samples - 1 {
            let (a, b) = (values[j], values[j + 1]);
            if a == 0.0 {
                roots.push(curve(grid[j])?);
                continue;
            }
            if a.signum() == b.signum() || b == 0.0 {
                continue;
            }
            let (mut lo, mut hi, mut flo) = (grid[j], grid[j + 1], a);
            while hi - lo > ROOT_TOL {
                let mid = 0.5 * (lo + hi);
                let fm = slope(mid)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(curve(0.5 * (lo + hi))?);
        }
        // critical points at the very ends of the curve show no sign change
        roots.push(end0);
        roots.push(end1);
    }

    let refined: Vec<CriticalPoint> = roots
        .into_iter()
        .filter_map(|x| {
            let (x, converged) = newton_refine(mix, x, opts);
            converged.then(|| classify(mix, &x, opts))
        })
        .collect();
    Ok(dedup_points(refined, radius))
}
