//! Named mixture configurations with known or measured mode counts.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::arrangement::{
    arrangement_mixture, cube_certificate, generic_arrangement, CubeCertificate, HyperplaneArrangement,
};
use crate::bounds;
use crate::error::{Error, Result};
use crate::mixture::{GaussianComponent, Mixture};
use crate::modes::{default_starts, find_critical_points_with, AscentOptions, ModeReport};
use crate::par::Execution;

/// Cap on the component count of a product mixture.
pub const MAX_PRODUCT_COMPONENTS: usize = 10_000;
const BOX_STD_DEVS: f64 = 3.0;

/// Where an expected mode count comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Stated in the literature for these exact parameters.
    Paper,
    /// Measured by an independent oracle and frozen.
    Derived,
    None,
}

/// Axis-aligned box used to place random starts and grid scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SearchBox {
    /// Bounding box of the `3σ` ellipsoids of all components.
    pub fn around(mix: &Mixture) -> Self {
        let d = mix.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for c in mix.components() {
            for j in 0..d {
                let half = BOX_STD_DEVS * c.covariance()[(j, j)].sqrt();
                lo[j] = lo[j].min(c.mean()[j] - half);
                hi[j] = hi[j].max(c.mean()[j] + half);
            }
        }
        Self { lo, hi }
    }

    pub fn include(&mut self, p: &[f64]) {
        for (j, v) in p.iter().enumerate() {
            self.lo[j] = self.lo[j].min(*v);
            self.hi[j] = self.hi[j].max(*v);
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn diameter(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(j, v)| *v >= self.lo[j] && *v <= self.hi[j])
    }

    fn product(boxes: &[SearchBox]) -> Self {
        Self {
            lo: boxes.iter().flat_map(|b| b.lo.iter().copied()).collect(),
            hi: boxes.iter().flat_map(|b| b.hi.iter().copied()).collect(),
        }
    }
}

/// A mixture together with what we expect of it.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub mixture: Mixture,
    pub expected_modes: Option<usize>,
    pub provenance: Provenance,
    pub search_box: SearchBox,
    pub notes: String,
    pub arrangement: Option<HyperplaneArrangement>,
}

impl Scenario {
    /// Scenario without expectations, with the default search box.
    pub fn from_mixture(name: impl Into<String>, mixture: Mixture) -> Self {
        let search_box = SearchBox::around(&mixture);
        Self {
            name: name.into(),
            mixture,
            expected_modes: None,
            provenance: Provenance::None,
            search_box,
            notes: String::new(),
            arrangement: None,
        }
    }

    fn expect(mut self, modes: usize, provenance: Provenance) -> Self {
        self.expected_modes = Some(modes);
        self.provenance = provenance;
        self
    }

    fn note(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn metadata(&self) -> ScenarioMetadata {
        ScenarioMetadata {
            name: self.name.clone(),
            expected_modes: self.expected_modes,
            provenance: self.provenance,
            search_box: self.search_box.clone(),
            notes: self.notes.clone(),
            arrangement: self.arrangement.clone(),
        }
    }

    /// Rebuilds a scenario from a mixture file and its sidecar.
    pub fn from_parts(mixture: Mixture, meta: ScenarioMetadata) -> Result<Self> {
        if meta.search_box.dim() != mixture.dim() || meta.search_box.hi.len() != mixture.dim() {
            return Err(Error::DimensionMismatch {
                context: "search box".into(),
                expected: mixture.dim(),
                found: meta.search_box.dim(),
            });
        }
        Ok(Self {
            name: meta.name,
            mixture,
            expected_modes: meta.expected_modes,
            provenance: meta.provenance,
            search_box: meta.search_box,
            notes: meta.notes,
            arrangement: meta.arrangement,
        })
    }
}

/// Sidecar written next to a mixture file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMetadata {
    pub name: String,
    pub expected_modes: Option<usize>,
    pub provenance: Provenance,
    pub search_box: SearchBox,
    #[serde(default)]
    pub notes: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrangement: Option<HyperplaneArrangement>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Classical unimodality tests for a two-component univariate mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnimodalityCertificates {
    /// `|μ2 − μ1| ≤ 2·min(σ1, σ2)`.
    pub behboodian_sufficient: bool,
    /// Equal σ and α = ½: unimodal iff `|μ2 − μ1| ≤ 2σ`.
    pub equal_sigma_iff: Option<bool>,
    /// Equal σ: `|μ2 − μ1| ≤ 2σ·sqrt(1 + |log α − log(1−α)|/2)` suffices.
    pub equal_sigma_log_sufficient: Option<bool>,
}

pub fn unimodality_certificates(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64, alpha: f64) -> UnimodalityCertificates {
    let gap = (mu2 - mu1).abs();
    let equal_sigma = sigma1 == sigma2;
    UnimodalityCertificates {
        behboodian_sufficient: gap <= 2.0 * sigma1.min(sigma2),
        equal_sigma_iff: (equal_sigma && alpha == 0.5).then_some(gap <= 2.0 * sigma1),
        equal_sigma_log_sufficient: equal_sigma.then(|| {
            gap <= 2.0 * sigma1 * (1.0 + (alpha.ln() - (1.0 - alpha).ln()).abs() / 2.0).sqrt()
        }),
    }
}

/// `α·N(μ1, σ1²) + (1−α)·N(μ2, σ2²)` on the line.
pub fn univariate_pair(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64, alpha: f64) -> Result<Scenario> {
    positive("sigma1", sigma1)?;
    positive("sigma2", sigma2)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !mu1.is_finite() || !mu2.is_finite() {
        return Err(Error::InvalidParameter("means must be finite".into()));
    }
    let mixture = Mixture::from_nested(
        &[alpha, 1.0 - alpha],
        &[vec![mu1], vec![mu2]],
        &[vec![vec![sigma1 * sigma1]], vec![vec![sigma2 * sigma2]]],
    )?;
    let cert = unimodality_certificates(mu1, sigma1, mu2, sigma2, alpha);
    let name = format!("univariate-pair-{}", fmt_num(mu2 - mu1));
    let mut s = Scenario::from_mixture(name, mixture);
    if mu1 == mu2 && sigma1 == sigma2 {
        s = s.expect(1, Provenance::Paper).note("identical components form one Gaussian");
    } else if let Some(iff) = cert.equal_sigma_iff {
        s = s
            .expect(if iff { 1 } else { 2 }, Provenance::Paper)
            .note("equal variances and weights: unimodal iff |mu2 - mu1| <= 2 sigma");
    } else if cert.behboodian_sufficient || cert.equal_sigma_log_sufficient == Some(true) {
        s = s.expect(1, Provenance::Paper).note("sufficient unimodality condition holds");
    }
    Ok(s)
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v}");
    s.trim_end_matches(".0").to_string()
}

/// Two bivariate Gaussians at `(1,0)` and `(0,1)` with crossed elongated
/// covariances; three modes.
pub fn cross_example() -> Scenario {
    let mixture = Mixture::from_nested(
        &[0.5, 0.5],
        &[vec![1.0, 0.0], vec![0.0, 1.0]],
        &[
            vec![vec![1.0, 0.0], vec![0.0, 0.1]],
            vec![vec![0.1, 0.0], vec![0.0, 1.0]],
        ],
    )
    .expect("valid parameters");
    Scenario::from_mixture("cross", mixture)
        .expect(3, Provenance::Paper)
        .note("two modes near the means and a third near the origin")
}

/// Corners of the equilateral triangle inscribed in the unit circle.
pub fn triangle_corners() -> [[f64; 2]; 3] {
    let s = 3f64.sqrt() / 2.0;
    [[1.0, 0.0], [-0.5, s], [-0.5, -s]]
}

/// Equal-weight isotropic components `N(v_i, σ²I)` at the triangle corners.
/// At `σ = 0.72` the origin is a fourth mode.
pub fn duistermaat_triangle(sigma: f64) -> Result<Scenario> {
    positive("sigma", sigma)?;
    let w = 1.0 / 3.0;
    let cov = vec![vec![sigma * sigma, 0.0], vec![0.0, sigma * sigma]];
    let means: Vec<Vec<f64>> = triangle_corners().iter().map(|c| c.to_vec()).collect();
    let mixture = Mixture::from_nested(&[w, w, w], &means, &[cov.clone(), cov.clone(), cov])?;
    let s = Scenario::from_mixture(format!("duistermaat-{}", fmt_num(sigma)), mixture);
    Ok(if sigma == 0.72 {
        s.expect(4, Provenance::Paper)
            .note("three modes near the means and a fourth at the origin")
    } else {
        s
    })
}

/// Three components at the side midpoints of the triangle, each with
/// variance `sigma_tangential` along its side and `sigma_normal` across.
pub fn seven_mode_probe(sigma_tangential: f64, sigma_normal: f64) -> Result<Scenario> {
    positive("sigma_tangential", sigma_tangential)?;
    positive("sigma_normal", sigma_normal)?;
    let corners = triangle_corners();
    let mut means = Vec::new();
    let mut covs = Vec::new();
    for i in 0..3 {
        let a = corners[(i + 1) % 3];
        let b = corners[(i + 2) % 3];
        let mid = DVector::from_vec(vec![0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
        let t = DVector::from_vec(vec![b[0] - a[0], b[1] - a[1]]).normalize();
        let n = DVector::from_vec(vec![-t[1], t[0]]);
        let cov = &t * t.transpose() * sigma_tangential + &n * n.transpose() * sigma_normal;
        means.push(mid);
        covs.push(cov);
    }
    let w = 1.0 / 3.0;
    let mixture = Mixture::new(vec![w, w, w], means, covs)?;
    let mut s = Scenario::from_mixture(
        format!("seven-probe-{}-{}", fmt_num(sigma_tangential), fmt_num(sigma_normal)),
        mixture,
    )
    .note("probe for a seventh mode at the origin; never expected");
    for c in corners {
        s.search_box.include(&c);
    }
    Ok(s)
}

/// Cartesian product of mixtures: block-diagonal covariances, concatenated
/// means, multiplied weights. The density factorizes over the blocks.
pub fn product_mixture(factors: &[Mixture]) -> Result<Mixture> {
    if factors.is_empty() {
        return Err(Error::EmptyMixture);
    }
    let count = factors
        .iter()
        .try_fold(1usize, |acc, f| acc.checked_mul(f.len()))
        .unwrap_or(usize::MAX);
    if count > MAX_PRODUCT_COMPONENTS {
        return Err(Error::TooManyComponents {
            count,
            cap: MAX_PRODUCT_COMPONENTS,
        });
    }
    let dim: usize = factors.iter().map(Mixture::dim).sum();
    let mut components = Vec::with_capacity(count);
    let mut idx = vec![0usize; factors.len()];
    for n in 0..count {
        let mut weight = 1.0;
        let mut mean = DVector::zeros(dim);
        let mut cov = DMatrix::zeros(dim, dim);
        let mut off = 0;
        for (f, &i) in factors.iter().zip(&idx) {
            let c = &f.components()[i];
            let fd = f.dim();
            weight *= c.weight();
            mean.rows_mut(off, fd).copy_from(c.mean());
            cov.view_mut((off, off), (fd, fd)).copy_from(c.covariance());
            off += fd;
        }
        components.push(GaussianComponent::new(weight, mean, cov, n)?);
        // odometer, last factor fastest
        for pos in (0..factors.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < factors[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
    Mixture::from_components(components)
}

/// Product of `n` copies of the `σ = 0.72` triangle: `4^n` modes in `R^{2n}`.
pub fn triangle_product(n: usize) -> Result<Scenario> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one factor".into()));
    }
    let factor = duistermaat_triangle(0.72)?;
    let mixture = product_mixture(&vec![factor.mixture.clone(); n])?;
    let mut s = Scenario::from_mixture(format!("triangle-product-{n}"), mixture)
        .expect(4usize.pow(n as u32), Provenance::Paper)
        .note("products of the four-mode triangle");
    s.search_box = SearchBox::product(&vec![factor.search_box; n]);
    Ok(s)
}

/// Mode count the arrangement construction aims for: `C(k,d) + k`, except on
/// the line where vertex and mean modes coincide and `m(1,k) = k` caps it.
pub fn arrangement_target(d: usize, k: usize) -> usize {
    if d == 1 {
        k
    } else {
        let v = bounds::lower(d as u64, k as u64);
        usize::try_from(v).expect("small arrangement")
    }
}

/// Scenario for the arrangement mixture at a given `δ`.
pub fn arrangement_scenario(arr: &HyperplaneArrangement, delta: f64) -> Result<Scenario> {
    let mixture = arrangement_mixture(arr, delta, None)?;
    let (d, k) = (arr.dim, arr.k());
    let mut s = Scenario::from_mixture(format!("arrangement-{d}-{k}"), mixture);
    for v in &arr.vertices {
        s.search_box.include(&v.point);
    }
    s.arrangement = Some(arr.clone());
    let target = arrangement_target(d, k);
    s = if d == 1 {
        s.expect(target, Provenance::Derived).note(format!(
            "delta={delta}; on the line vertex and mean modes coincide, so k modes rather than C(k,1)+k"
        ))
    } else {
        s.expect(target, Provenance::Paper)
            .note(format!("delta={delta}; C(k,d) vertex modes plus k mean modes"))
    };
    Ok(s)
}

/// Knobs for [`select_delta`].
#[derive(Debug, Clone)]
pub struct DeltaSearch {
    pub budget: usize,
    pub seed: u64,
    pub ascent: AscentOptions,
    /// Tries `δ = 2^-1, …, 2^-halvings`.
    pub halvings: u32,
    pub execution: Execution,
}

impl Default for DeltaSearch {
    fn default() -> Self {
        Self {
            budget: 500,
            seed: 1,
            ascent: AscentOptions::default(),
            halvings: 20,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeltaSelection {
    pub delta: f64,
    pub target: usize,
    pub report: ModeReport,
    pub certificates: Vec<CubeCertificate>,
    /// `(δ, measured modes)` for every δ tried, in order.
    pub tried: Vec<(f64, usize)>,
}

impl DeltaSelection {
    pub fn certificates_hold(&self) -> bool {
        self.certificates.iter().all(|c| c.holds)
    }
}

/// Walks the halving schedule and returns the first `δ` whose measured mode
/// count reaches the arrangement target, with cube certificates at every vertex.
pub fn select_delta(arr: &HyperplaneArrangement, search: &DeltaSearch) -> Result<DeltaSelection> {
    let target = arrangement_target(arr.dim, arr.k());
    let mut tried = Vec::new();
    for j in 1..=search.halvings {
        let delta = 0.5f64.powi(j as i32);
        let scenario = arrangement_scenario(arr, delta)?;
        let starts = default_starts(&scenario, search.budget, search.seed);
        let report = find_critical_points_with(&scenario.mixture, &starts, &search.ascent, search.execution);
        tried.push((delta, report.mode_count));
        if report.mode_count >= target {
            let certificates = (0..arr.vertices.len())
                .map(|v| cube_certificate(&scenario.mixture, arr, v, delta))
                .collect();
            return Ok(DeltaSelection {
                delta,
                target,
                report,
                certificates,
                tried,
            });
        }
    }
    Err(Error::DeltaNotFound { target, counts: tried })
}

/// Arrangement parameters used in the catalog: `(d, k, seed, δ)`.
pub const CATALOG_ARRANGEMENTS: [(usize, usize, u64, f64); 5] = [
    (1, 2, 1, 0.5),
    (2, 2, 1, 0.125),
    (2, 3, 1, 0.125),
    (2, 4, 1, 0.0625),
    (3, 3, 1, 0.0625),
];

/// Every named scenario, in a fixed order.
pub fn scenario_catalog() -> Vec<Scenario> {
    let mut out = vec![
        single_gaussian(2).named("single-gaussian"),
        univariate_pair(0.0, 1.0, 1.9, 1.0, 0.5).expect("valid"),
        univariate_pair(0.0, 1.0, 2.0, 1.0, 0.5).expect("valid"),
        univariate_pair(0.0, 1.0, 2.1, 1.0, 0.5).expect("valid"),
        univariate_pair(0.0, 1.0, 4.0, 1.0, 0.5).expect("valid"),
        univariate_pair(0.0, 1.0, 0.0, 1.0, 0.3)
            .expect("valid")
            .named("univariate-pair-identical"),
        cross_example(),
        duistermaat_triangle(0.72).expect("valid"),
        duistermaat_triangle(0.1)
            .expect("valid")
            .expect(3, Provenance::Derived)
            .note("tight components: only the three mean modes"),
        duistermaat_triangle(5.0)
            .expect("valid")
            .expect(1, Provenance::Derived)
            .note("heavily overlapped components"),
        seven_mode_probe(0.5, 0.01)
            .expect("valid")
            .expect(6, Provenance::Derived)
            .note("concentrated on the sides: three side modes and three corner modes"),
        seven_mode_probe(1.0, 1.0)
            .expect("valid")
            .expect(1, Provenance::Derived)
            .note("diffuse: a single mode"),
    ];
    for (d, k, seed, delta) in CATALOG_ARRANGEMENTS {
        let arr = generic_arrangement(d, k, seed).expect("catalog arrangement is generic");
        out.push(arrangement_scenario(&arr, delta).expect("catalog arrangement mixture"));
    }
    out.push(triangle_product(2).expect("valid"));
    out
}

/// Standard normal in `R^d`.
pub fn single_gaussian(d: usize) -> Scenario {
    let mixture = Mixture::new(
        vec![1.0],
        vec![DVector::zeros(d)],
        vec![DMatrix::identity(d, d)],
    )
    .expect("valid parameters");
    Scenario::from_mixture(format!("single-gaussian-{d}d"), mixture)
        .expect(1, Provenance::Paper)
        .note("a single Gaussian has one mode")
}

/// Looks a scenario up by name in [`scenario_catalog`].
pub fn catalog_scenario(name: &str) -> Result<Scenario> {
    let catalog = scenario_catalog();
    let names: Vec<String> = catalog.iter().map(|s| s.name.clone()).collect();
    catalog
        .into_iter()
        .find(|s| s.name == name)
        .ok_or(Error::UnknownScenario {
            name: name.into(),
            available: names,
        })
}
