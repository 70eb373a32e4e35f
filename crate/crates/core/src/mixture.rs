//! Gaussian mixture densities and their derivatives.
//!
//! Every component caches the lower Cholesky factor of its covariance and
//! all quadratic forms go through triangular solves against that factor.
//! Derivatives are accumulated relative to the largest weighted component
//! term, so the log scale survives components whose peak heights differ by
//! many orders of magnitude.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const WEIGHT_SUM_TOL: f64 = 1e-9;
const EQUALITY_TOL: f64 = 1e-12;
/// Below this log-density the reported density (and derivatives) is zero.
pub const LOG_DENSITY_FLOOR: f64 = -700.0;

/// One weighted Gaussian term of a mixture.
#[derive(Debug, Clone)]
pub struct GaussianComponent {
    weight: f64,
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    chol_lower: DMatrix<f64>,
    precision: DMatrix<f64>,
    precision_mean: DVector<f64>,
    log_normalizer: f64,
}

impl GaussianComponent {
    /// Validates and factorizes one component. `index` is only used for error reporting.
    pub fn new(weight: f64, mean: DVector<f64>, covariance: DMatrix<f64>, index: usize) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::InvalidParameter("mean must have positive length".into()));
        }
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(Error::DimensionMismatch {
                context: format!("covariance {index}"),
                expected: d,
                found: if covariance.nrows() != d { covariance.nrows() } else { covariance.ncols() },
            });
        }
        if !weight.is_finite() {
            return Err(Error::InvalidParameter(format!("weight {index} is not finite")));
        }
        if weight < 0.0 {
            return Err(Error::NegativeWeight { index, value: weight });
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(mean.iter().copied().collect()));
        }
        if covariance.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonSpd { index });
        }
        let scale = covariance.amax();
        for i in 0..d {
            for j in 0..i {
                if (covariance[(i, j)] - covariance[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::NonSpd { index });
                }
            }
        }
        let covariance = (&covariance + covariance.transpose()) * 0.5;
        let chol = covariance.clone().cholesky().ok_or(Error::NonSpd { index })?;
        let chol_lower = chol.l();
        if chol_lower.diagonal().iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::NonSpd { index });
        }
        let precision = chol.inverse();
        let precision = (&precision + precision.transpose()) * 0.5;
        let precision_mean = chol.solve(&mean);
        let log_det: f64 = chol_lower.diagonal().iter().map(|p| 2.0 * p.ln()).sum();
        let log_normalizer = -0.5 * log_det - 0.5 * d as f64 * (2.0 * PI).ln();
        Ok(Self {
            weight,
            mean,
            covariance,
            chol_lower,
            precision,
            precision_mean,
            log_normalizer,
        })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Lower-triangular `L` with `L Lᵀ = covariance`.
    pub fn cholesky_lower(&self) -> &DMatrix<f64> {
        &self.chol_lower
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    /// `precision · mean`.
    pub fn precision_mean(&self) -> &DVector<f64> {
        &self.precision_mean
    }

    /// `−½·log det(2π·covariance)`.
    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Whitened offset `L⁻¹(x − μ)`.
    fn whiten(&self, x: &DVector<f64>) -> DVector<f64> {
        let diff = x - &self.mean;
        self.chol_lower
            .solve_lower_triangular(&diff)
            .expect("cached factor has a positive diagonal")
    }

    /// Log of the unweighted component density at `x`.
    pub fn log_pdf(&self, x: &DVector<f64>) -> f64 {
        let z = self.whiten(x);
        self.log_normalizer - 0.5 * z.norm_squared()
    }

    fn with_weight(&self, weight: f64) -> Self {
        Self {
            weight,
            ..self.clone()
        }
    }
}

/// A finite Gaussian mixture in `R^dim`.
#[derive(Debug, Clone)]
pub struct Mixture {
    dim: usize,
    components: Vec<GaussianComponent>,
}

/// Density, derivatives and responsibilities at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub log_density: f64,
    /// `exp(log_density)`, or exactly 0 when `log_density` is below −700.
    pub density: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
    pub responsibilities: Vec<f64>,
}

/// Derivatives divided by the density: `∇f/f` and `∇²f/f`.
///
/// These stay finite and well scaled wherever `log f` is finite, which is
/// what the ascent and classification code works with.
#[derive(Debug, Clone)]
pub struct ScaledDerivatives {
    pub log_density: f64,
    pub responsibilities: Vec<f64>,
    pub grad_log: DVector<f64>,
    pub hessian_scaled: Option<DMatrix<f64>>,
}

impl Mixture {
    /// Builds a validated mixture. Weights summing to 1 within 1e-9 are renormalized.
    pub fn new(weights: Vec<f64>, means: Vec<DVector<f64>>, covariances: Vec<DMatrix<f64>>) -> Result<Self> {
        if weights.is_empty() || means.is_empty() || covariances.is_empty() {
            return Err(Error::EmptyMixture);
        }
        if means.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                context: "number of means".into(),
                expected: weights.len(),
                found: means.len(),
            });
        }
        if covariances.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                context: "number of covariances".into(),
                expected: weights.len(),
                found: covariances.len(),
            });
        }
        let dim = means[0].len();
        for (i, m) in means.iter().enumerate() {
            if m.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: format!("mean {i}"),
                    expected: dim,
                    found: m.len(),
                });
            }
        }
        let components = weights
            .into_iter()
            .zip(means)
            .zip(covariances)
            .enumerate()
            .map(|(i, ((w, m), c))| GaussianComponent::new(w, m, c, i))
            .collect::<Result<Vec<_>>>()?;
        Self::from_components(components)
    }

    /// Convenience constructor from nested row-major arrays.
    pub fn from_nested(weights: &[f64], means: &[Vec<f64>], covariances: &[Vec<Vec<f64>>]) -> Result<Self> {
        let means = means.iter().map(|m| DVector::from_column_slice(m)).collect();
        let covs = covariances
            .iter()
            .enumerate()
            .map(|(i, rows)| nested_to_matrix(rows, i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(weights.to_vec(), means, covs)
    }

    /// Reassembles a mixture from already factorized components, renormalizing weights.
    pub fn from_components(components: Vec<GaussianComponent>) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptyMixture)?;
        let dim = first.dim();
        if let Some((i, c)) = components.iter().enumerate().find(|(_, c)| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                context: format!("component {i}"),
                expected: dim,
                found: c.dim(),
            });
        }
        let sum: f64 = components.iter().map(|c| c.weight).sum();
        if !((1.0 - WEIGHT_SUM_TOL)..=(1.0 + WEIGHT_SUM_TOL)).contains(&sum) {
            return Err(Error::WeightSumInvalid { sum });
        }
        let components = components.iter().map(|c| c.with_weight(c.weight / sum)).collect();
        Ok(Self { dim, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of components `k`.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn means(&self) -> impl Iterator<Item = &DVector<f64>> {
        self.components.iter().map(|c| &c.mean)
    }

    fn check_point(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "evaluation point".into(),
                expected: self.dim,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(x.to_vec()));
        }
        Ok(DVector::from_column_slice(x))
    }

    /// Full evaluation: density, gradient, Hessian and responsibilities.
    pub fn evaluate(&self, x: &[f64]) -> Result<EvalResult> {
        let x = self.check_point(x)?;
        let s = self.scaled_derivatives(&x, true);
        let density = if s.log_density > LOG_DENSITY_FLOOR {
            s.log_density.exp()
        } else {
            0.0
        };
        let hessian = s.hessian_scaled.expect("requested") * density;
        Ok(EvalResult {
            log_density: s.log_density,
            density,
            gradient: s.grad_log * density,
            hessian,
            responsibilities: s.responsibilities,
        })
    }

    /// Log of the weighted component terms `log(α_i f_i(x))`.
    pub fn log_terms(&self, x: &DVector<f64>) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| c.weight.ln() + c.log_pdf(x))
            .collect()
    }

    pub fn log_density(&self, x: &DVector<f64>) -> f64 {
        log_sum_exp(&self.log_terms(x))
    }

    pub fn responsibilities(&self, x: &DVector<f64>) -> Vec<f64> {
        let terms = self.log_terms(x);
        normalize_log_weights(&terms, log_sum_exp(&terms))
    }

    /// `log f`, responsibilities, `∇f/f` and (optionally) `∇²f/f` at `x`.
    pub fn scaled_derivatives(&self, x: &DVector<f64>, with_hessian: bool) -> ScaledDerivatives {
        let d = self.dim;
        let mut log_terms = Vec::with_capacity(self.len());
        let mut pulls = Vec::with_capacity(self.len());
        for c in &self.components {
            let z = c.whiten(x);
            log_terms.push(c.weight.ln() + c.log_normalizer - 0.5 * z.norm_squared());
            // Σ⁻¹(μ − x) = −L⁻ᵀ z
            let u = c
                .chol_lower
                .tr_solve_lower_triangular(&z)
                .expect("cached factor has a positive diagonal");
            pulls.push(-u);
        }
        let log_density = log_sum_exp(&log_terms);
        let resp = normalize_log_weights(&log_terms, log_density);
        let mut grad = DVector::zeros(d);
        let mut hess = with_hessian.then(|| DMatrix::zeros(d, d));
        for ((r, u), c) in resp.iter().zip(&pulls).zip(&self.components) {
            if *r == 0.0 {
                continue;
            }
            grad.axpy(*r, u, 1.0);
            if let Some(h) = hess.as_mut() {
                h.ger(*r, u, u, 1.0);
                *h -= &c.precision * *r;
            }
        }
        if let Some(h) = hess.as_mut() {
            symmetrize(h);
        }
        ScaledDerivatives {
            log_density,
            responsibilities: resp,
            grad_log: grad,
            hessian_scaled: hess,
        }
    }

    /// Image of the mixture under `x ↦ A x + b`.
    pub fn affine_transform(&self, a: &DMatrix<f64>, b: &DVector<f64>) -> Result<Mixture> {
        let d = self.dim;
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::DimensionMismatch {
                context: "affine matrix".into(),
                expected: d,
                found: a.nrows().max(a.ncols()),
            });
        }
        if b.len() != d {
            return Err(Error::DimensionMismatch {
                context: "affine offset".into(),
                expected: d,
                found: b.len(),
            });
        }
        let sv = a.clone().singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if !(smin > 0.0) || !smin.is_finite() || smin <= 1e-12 * smax {
            return Err(Error::SingularTransform);
        }
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut cov = a * &c.covariance * a.transpose();
                symmetrize(&mut cov);
                GaussianComponent::new(c.weight, a * &c.mean + b, cov, i)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Mixture { dim: d, components })
    }

    /// All components share one covariance (within 1e-12 relative).
    pub fn is_homoscedastic(&self) -> bool {
        let first = &self.components[0].covariance;
        self.components
            .iter()
            .all(|c| matrices_close(first, &c.covariance, EQUALITY_TOL))
    }

    /// Every covariance is a scalar multiple of the identity.
    pub fn is_isotropic(&self) -> bool {
        self.components.iter().all(|c| {
            let scalar = c.covariance[(0, 0)];
            let iso = DMatrix::identity(self.dim, self.dim) * scalar;
            matrices_close(&iso, &c.covariance, EQUALITY_TOL)
        })
    }

    /// SHA-256 over the canonical JSON encoding.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(&MixtureFile::from(self)).expect("mixture serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

fn matrices_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    let scale = a.amax().max(b.amax());
    a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= tol * scale)
}

/// Max-shifted `log Σ exp(v_i)`; `-inf` entries contribute nothing.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

fn normalize_log_weights(terms: &[f64], total: f64) -> Vec<f64> {
    if !total.is_finite() {
        return vec![0.0; terms.len()];
    }
    let mut r: Vec<f64> = terms.iter().map(|t| (t - total).exp()).collect();
    let s: f64 = r.iter().sum();
    r.iter_mut().for_each(|v| *v /= s);
    r
}

fn nested_to_matrix(rows: &[Vec<f64>], index: usize) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if let Some(row) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            context: format!("covariance {index} row"),
            expected: n,
            found: row.len(),
        });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// On-disk form: `{"dim": d, "components": [{"weight", "mean", "cov"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureFile {
    pub dim: usize,
    pub components: Vec<ComponentFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentFile {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
}

impl From<&Mixture> for MixtureFile {
    fn from(m: &Mixture) -> Self {
        MixtureFile {
            dim: m.dim,
            components: m
                .components
                .iter()
                .map(|c| ComponentFile {
                    weight: c.weight,
                    mean: c.mean.iter().copied().collect(),
                    cov: (0..m.dim)
                        .map(|i| (0..m.dim).map(|j| c.covariance[(i, j)]).collect())
                        .collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<MixtureFile> for Mixture {
    type Error = Error;

    fn try_from(file: MixtureFile) -> Result<Self> {
        let weights: Vec<f64> = file.components.iter().map(|c| c.weight).collect();
        let means: Vec<Vec<f64>> = file.components.iter().map(|c| c.mean.clone()).collect();
        let covs: Vec<Vec<Vec<f64>>> = file.components.iter().map(|c| c.cov.clone()).collect();
        let mix = Mixture::from_nested(&weights, &means, &covs)?;
        if mix.dim != file.dim {
            return Err(Error::DimensionMismatch {
                context: "declared dim".into(),
                expected: file.dim,
                found: mix.dim,
            });
        }
        Ok(mix)
    }
}

impl Serialize for Mixture {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MixtureFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mixture {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = MixtureFile::deserialize(d)?;
        Mixture::try_from(file).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cross() -> Mixture {
        Mixture::from_nested(
            &[0.5, 0.5],
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[
                vec![vec![1.0, 0.0], vec![0.0, 0.1]],
                vec![vec![0.1, 0.0], vec![0.0, 1.0]],
            ],
        )
        .unwrap()
    }

    #[test]
    fn standard_normal_peak() {
        let m = Mixture::from_nested(&[1.0], &[vec![0.0]], &[vec![vec![1.0]]]).unwrap();
        let e = m.evaluate(&[0.0]).unwrap();
        assert!((e.log_density + 0.5 * (2.0 * PI).ln()).abs() < 1e-15);
        assert!((e.log_density - (-0.918938533204672)).abs() < 1e-12);
        assert_eq!(e.gradient[0], 0.0);
        assert_eq!(e.responsibilities, vec![1.0]);
    }

    #[test]
    fn rejects_indefinite_covariance() {
        let err = Mixture::from_nested(&[1.0], &[vec![0.0, 0.0]], &[vec![vec![1.0, 2.0], vec![2.0, 1.0]]]);
        assert!(matches!(err, Err(Error::NonSpd { index: 0 })));
    }

    #[test]
    fn rejects_asymmetric_covariance() {
        let err = Mixture::from_nested(&[1.0], &[vec![0.0, 0.0]], &[vec![vec![1.0, 0.2], vec![0.1, 1.0]]]);
        assert!(matches!(err, Err(Error::NonSpd { .. })));
    }

    #[test]
    fn weight_validation() {
        let one = vec![vec![1.0]];
        let err = Mixture::from_nested(&[1.2, -0.2], &[vec![0.0], vec![1.0]], &[one.clone(), one.clone()]);
        assert!(matches!(err, Err(Error::NegativeWeight { index: 1, .. })));
        let err = Mixture::from_nested(&[0.5, 0.6], &[vec![0.0], vec![1.0]], &[one.clone(), one.clone()]);
        assert!(matches!(err, Err(Error::WeightSumInvalid { .. })));
        let m = Mixture::from_nested(&[0.5 + 4e-10, 0.5], &[vec![0.0], vec![1.0]], &[one.clone(), one]).unwrap();
        let s: f64 = m.components().iter().map(|c| c.weight()).sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let err = Mixture::from_nested(
            &[0.5, 0.5],
            &[vec![0.0], vec![1.0, 2.0]],
            &[vec![vec![1.0]], vec![vec![1.0]]],
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
        let err = Mixture::from_nested(&[1.0], &[vec![0.0, 1.0]], &[vec![vec![1.0]]]);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            Mixture::new(vec![], vec![], vec![]),
            Err(Error::EmptyMixture)
        ));
    }

    #[test]
    fn cached_log_normalizer() {
        let m = cross();
        for c in m.components() {
            let det = c.covariance().determinant();
            let expected = -0.5 * (det * (2.0 * PI).powi(2)).ln();
            assert!((c.log_normalizer() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn single_gaussian_gradient_vanishes_at_mean() {
        let m = Mixture::from_nested(
            &[1.0],
            &[vec![0.3, -1.2, 2.0]],
            &[vec![vec![2.0, 0.3, 0.1], vec![0.3, 1.0, -0.2], vec![0.1, -0.2, 0.5]]],
        )
        .unwrap();
        let e = m.evaluate(&[0.3, -1.2, 2.0]).unwrap();
        assert!(e.gradient.norm() == 0.0);
    }

    #[test]
    fn far_tail_is_finite_and_zero_density() {
        let m = cross();
        let e = m.evaluate(&[1e4, -1e4]).unwrap();
        assert!(e.log_density.is_finite());
        assert!(e.log_density < LOG_DENSITY_FLOOR);
        assert_eq!(e.density, 0.0);
        let s: f64 = e.responsibilities.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(e.gradient.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn non_finite_point_rejected() {
        let m = cross();
        assert!(matches!(m.evaluate(&[f64::NAN, 0.0]), Err(Error::NonFinite(_))));
        assert!(matches!(m.evaluate(&[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn homoscedastic_and_isotropic_flags() {
        let m = cross();
        assert!(!m.is_homoscedastic());
        assert!(!m.is_isotropic());
        let single = Mixture::from_nested(&[1.0], &[vec![0.0, 0.0]], &[vec![vec![2.0, 0.5], vec![0.5, 1.0]]]).unwrap();
        assert!(single.is_homoscedastic());
        let iso = Mixture::from_nested(
            &[0.5, 0.5],
            &[vec![0.0, 0.0], vec![1.0, 0.0]],
            &[vec![vec![2.0, 0.0], vec![0.0, 2.0]], vec![vec![0.5, 0.0], vec![0.0, 0.5]]],
        )
        .unwrap();
        assert!(iso.is_isotropic());
        assert!(!iso.is_homoscedastic());
    }

    #[test]
    fn identity_affine_map_is_identity() {
        let m = cross();
        let t = m
            .affine_transform(&DMatrix::identity(2, 2), &DVector::zeros(2))
            .unwrap();
        assert_eq!(MixtureFile::from(&m), MixtureFile::from(&t));
    }

    #[test]
    fn singular_affine_map_rejected() {
        let m = cross();
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            m.affine_transform(&a, &DVector::zeros(2)),
            Err(Error::SingularTransform)
        ));
    }

    #[test]
    fn whitening_a_homoscedastic_mixture() {
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.0]);
        let m = Mixture::new(
            vec![0.3, 0.7],
            vec![DVector::from_vec(vec![0.0, 1.0]), DVector::from_vec(vec![2.0, -1.0])],
            vec![cov.clone(), cov.clone()],
        )
        .unwrap();
        let eig = cov.symmetric_eigen();
        let inv_sqrt = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
            * eig.eigenvectors.transpose();
        let w = m.affine_transform(&inv_sqrt, &DVector::zeros(2)).unwrap();
        for c in w.components() {
            assert!((c.covariance() - DMatrix::identity(2, 2)).amax() < 1e-12);
        }
        assert!(w.is_isotropic());
    }

    #[test]
    fn json_round_trip_validates() {
        let m = cross();
        let s = serde_json::to_string(&m).unwrap();
        let back: Mixture = serde_json::from_str(&s).unwrap();
        assert_eq!(MixtureFile::from(&m), MixtureFile::from(&back));
        let bad = r#"{"dim":1,"components":[{"weight":1.0,"mean":[0.0],"cov":[[-1.0]]}]}"#;
        assert!(serde_json::from_str::<Mixture>(bad).is_err());
        let wrong_dim = r#"{"dim":2,"components":[{"weight":1.0,"mean":[0.0],"cov":[[1.0]]}]}"#;
        assert!(serde_json::from_str::<Mixture>(wrong_dim).is_err());
    }

    #[test]
    fn evaluation_is_deterministic() {
        let m = cross();
        let a = m.evaluate(&[0.4, 0.7]).unwrap();
        let b = m.evaluate(&[0.4, 0.7]).unwrap();
        assert_eq!(a, b);
    }
}
