//! Multistart search for critical points of a mixture density.
//!
//! Each start is pushed uphill by the damped ridgeline fixed-point
//! iteration and then polished with Newton's method on `∇f`. Converged
//! points are classified by the signs of their Hessian eigenvalues and
//! merged by radius. Mode counts are certificates of "at least N";
//! completeness for `k ≥ 3` is only as good as the start set.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bounds::{self, biguint_string};
use crate::constructions::Scenario;
use crate::error::{Error, Result};
use crate::lowdisc::RSequence;
use crate::mixture::Mixture;
use crate::par::{map_ordered, Execution};
use crate::ridgeline::fixed_point_step;

/// Largest log-density decrease a fixed-point step may cause before it is damped.
pub const ASCENT_SLACK: f64 = 1e-12;
const MAX_HALVINGS: usize = 60;
const PLATEAU_SAMPLES: usize = 16;
/// Plateau merge radius as a multiple of the dedup radius.
pub const PLATEAU_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscentOptions {
    pub max_fixed_point_iters: usize,
    pub max_newton_iters: usize,
    /// Tolerance on the scale-free gradient norm `‖∇f‖ / f`.
    pub gradient_tolerance: f64,
    pub step_tolerance: f64,
    /// Merge radius; `None` means `1e-5 ×` the bounding-box diameter of the starts and means.
    pub dedup_radius: Option<f64>,
    /// Relative to the largest `|eigenvalue|` of the scaled Hessian.
    pub degenerate_eigen_tolerance: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            max_fixed_point_iters: 500,
            max_newton_iters: 50,
            gradient_tolerance: 1e-10,
            step_tolerance: 1e-12,
            dedup_radius: None,
            degenerate_eigen_tolerance: 1e-8,
        }
    }
}

impl AscentOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if self.max_fixed_point_iters == 0 || self.max_newton_iters == 0 {
            return Err(Error::InvalidParameter("iteration caps must be at least 1".into()));
        }
        if !positive(self.gradient_tolerance)
            || !positive(self.step_tolerance)
            || !positive(self.degenerate_eigen_tolerance)
            || self.dedup_radius.is_some_and(|r| !positive(r))
        {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Mode,
    Antimode,
    /// Number of negative Hessian eigenvalues.
    Saddle(usize),
    Degenerate,
}

impl fmt::Display for CriticalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriticalKind::Mode => f.write_str("mode"),
            CriticalKind::Antimode => f.write_str("antimode"),
            CriticalKind::Saddle(i) => write!(f, "saddle({i})"),
            CriticalKind::Degenerate => f.write_str("degenerate"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: Vec<f64>,
    pub log_density: f64,
    /// `‖∇f‖ / f` at `location`.
    pub gradient_norm: f64,
    /// Ascending eigenvalues of `∇²f / f` (same signs as those of `∇²f`).
    pub hessian_eigenvalues: Vec<f64>,
    pub kind: CriticalKind,
    pub converged_from: usize,
}

impl CriticalPoint {
    pub fn min_eigenvalue(&self) -> f64 {
        self.hessian_eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn location_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.location)
    }
}

/// Classifies `x` from the spectrum of the scaled Hessian.
pub fn classify(mix: &Mixture, x: &DVector<f64>, opts: &AscentOptions) -> CriticalPoint {
    let s = mix.scaled_derivatives(x, true);
    let eig = sorted_eigenvalues(&s.hessian_scaled.expect("requested"));
    let largest = eig.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let tol = opts.degenerate_eigen_tolerance * largest;
    let neg = eig.iter().filter(|v| **v < -tol).count();
    let pos = eig.iter().filter(|v| **v > tol).count();
    let d = eig.len();
    let kind = if largest == 0.0 || neg + pos < d {
        CriticalKind::Degenerate
    } else if neg == d {
        CriticalKind::Mode
    } else if pos == d {
        CriticalKind::Antimode
    } else {
        CriticalKind::Saddle(neg)
    };
    CriticalPoint {
        location: x.iter().copied().collect(),
        log_density: s.log_density,
        gradient_norm: s.grad_log.norm(),
        hessian_eigenvalues: eig,
        kind,
        converged_from: 1,
    }
}

/// Newton's method on `∇f = 0` from `x`, backtracking on `‖∇f‖/f`.
///
/// The eigenvalues of the Hessian are floored in magnitude only for the
/// linear solve; the iteration heads for whichever critical point is
/// nearest, not just maxima. Returns the final point and whether the
/// gradient tolerance was met.
pub fn newton_refine(mix: &Mixture, mut x: DVector<f64>, opts: &AscentOptions) -> (DVector<f64>, bool) {
    for _ in 0..opts.max_newton_iters {
        let s = mix.scaled_derivatives(&x, true);
        let gnorm = s.grad_log.norm();
        if !gnorm.is_finite() {
            return (x, false);
        }
        if gnorm <= opts.gradient_tolerance {
            return (x, true);
        }
        let eig = s.hessian_scaled.expect("requested").symmetric_eigen();
        let largest = eig.eigenvalues.amax();
        if largest == 0.0 {
            return (x, false);
        }
        let floor = 1e-12 * largest;
        let mut step = DVector::zeros(x.len());
        for (j, lambda) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(j);
            let reg = if lambda.abs() < floor { floor.copysign(*lambda) } else { *lambda };
            step -= v * (v.dot(&s.grad_log) / reg);
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let cand = &x + &step * t;
            let g = mix.scaled_derivatives(&cand, false).grad_log.norm();
            if g < gnorm {
                x = cand;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            let gnorm = mix.scaled_derivatives(&x, false).grad_log.norm();
            return (x, gnorm <= opts.gradient_tolerance);
        }
    }
    let gnorm = mix.scaled_derivatives(&x, false).grad_log.norm();
    (x, gnorm <= opts.gradient_tolerance)
}

/// Full record of one ascent.
#[derive(Debug, Clone)]
pub struct AscentTrace {
    pub point: CriticalPoint,
    pub converged: bool,
    pub fixed_point_iters: usize,
    /// Largest log-density drop over accepted fixed-point steps (≤ 0 means monotone).
    pub max_log_decrease: f64,
}

/// Damped fixed-point ascent followed by Newton refinement.
pub fn ascend_traced(mix: &Mixture, x0: &DVector<f64>, opts: &AscentOptions) -> Result<AscentTrace> {
    if x0.len() != mix.dim() {
        return Err(Error::DimensionMismatch {
            context: "start".into(),
            expected: mix.dim(),
            found: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(x0.iter().copied().collect()));
    }
    let mut x = x0.clone();
    let mut log_f = mix.log_density(&x);
    if !log_f.is_finite() {
        return Err(Error::NonFinite(x0.iter().copied().collect()));
    }
    let mut max_decrease = f64::NEG_INFINITY;
    let mut iters = 0;
    while iters < opts.max_fixed_point_iters {
        let g = mix.scaled_derivatives(&x, false).grad_log.norm();
        if g < 1e3 * opts.gradient_tolerance {
            break;
        }
        iters += 1;
        let target = fixed_point_step(mix, &x)?;
        let mut step = target - &x;
        let mut cand = &x + &step;
        let mut cand_log = mix.log_density(&cand);
        let mut halvings = 0;
        while !(cand_log >= log_f - ASCENT_SLACK) && halvings < MAX_HALVINGS {
            step *= 0.5;
            cand = &x + &step;
            cand_log = mix.log_density(&cand);
            halvings += 1;
        }
        if !(cand_log >= log_f - ASCENT_SLACK) {
            break;
        }
        max_decrease = max_decrease.max(log_f - cand_log);
        let moved = step.norm();
        x = cand;
        log_f = cand_log;
        if moved < opts.step_tolerance {
            break;
        }
    }
    let (x, converged) = newton_refine(mix, x, opts);
    Ok(AscentTrace {
        point: classify(mix, &x, opts),
        converged,
        fixed_point_iters: iters,
        max_log_decrease: max_decrease,
    })
}

/// Ascent from one start to a classified critical point.
pub fn ascend(mix: &Mixture, x0: &DVector<f64>, opts: &AscentOptions) -> Result<CriticalPoint> {
    let trace = ascend_traced(mix, x0, opts)?;
    if trace.converged {
        Ok(trace.point)
    } else {
        Err(Error::NoConvergence {
            gradient_norm: trace.point.gradient_norm,
        })
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Greedy leader clustering after a lexicographic sort; each cluster keeps
/// its smallest-gradient member, with `converged_from` summed.
pub fn dedup_points(mut points: Vec<CriticalPoint>, radius: f64) -> Vec<CriticalPoint> {
    points.sort_by(|a, b| lexicographic(&a.location, &b.location));
    let mut clusters: Vec<(DVector<f64>, CriticalPoint)> = Vec::new();
    for p in points {
        let loc = p.location_vector();
        match clusters.iter_mut().find(|(leader, _)| (leader - &loc).norm() <= radius) {
            Some((_, rep)) => {
                let total = rep.converged_from + p.converged_from;
                if p.gradient_norm < rep.gradient_norm {
                    *rep = p;
                }
                rep.converged_from = total;
            }
            None => clusters.push((loc, p)),
        }
    }
    let mut out: Vec<CriticalPoint> = clusters.into_iter().map(|(_, p)| p).collect();
    out.sort_by(|a, b| lexicographic(&a.location, &b.location));
    out
}

/// True when the segment from `a` to `b` dips below both endpoints.
fn has_dip(mix: &Mixture, a: &CriticalPoint, b: &CriticalPoint) -> bool {
    let (xa, xb) = (a.location_vector(), b.location_vector());
    let floor = a.log_density.min(b.log_density);
    let tol = 1e-12 * floor.abs().max(1.0);
    (1..PLATEAU_SAMPLES).any(|j| {
        let t = j as f64 / PLATEAU_SAMPLES as f64;
        mix.log_density(&(&xa * (1.0 - t) + &xb * t)) < floor - tol
    })
}

/// Merges maxima and degenerate points lying within `radius` of each other
/// with no dip in log-density between them. A strict local maximum always
/// dips along every segment leaving it, so distinct modes are kept apart;
/// what merges are points smeared over a flat top where Newton converges
/// slowly.
pub fn merge_plateaus(mix: &Mixture, points: Vec<CriticalPoint>, radius: f64) -> Vec<CriticalPoint> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let hilltop = |p: &CriticalPoint| matches!(p.kind, CriticalKind::Mode | CriticalKind::Degenerate);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&points[i], &points[j]);
            if !hilltop(a) || !hilltop(b) || (a.location_vector() - b.location_vector()).norm() > radius {
                continue;
            }
            if !has_dip(mix, a, b) {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: Vec<Option<CriticalPoint>> = vec![None; n];
    for (i, p) in points.into_iter().enumerate() {
        let r = root(&mut parent, i);
        match &mut groups[r] {
            Some(rep) => {
                let total = rep.converged_from + p.converged_from;
                if p.gradient_norm < rep.gradient_norm {
                    *rep = p;
                }
                rep.converged_from = total;
            }
            slot => *slot = Some(p),
        }
    }
    let mut out: Vec<CriticalPoint> = groups.into_iter().flatten().collect();
    out.sort_by(|a, b| lexicographic(&a.location, &b.location));
    out
}

/// Higher-order test for a point whose Hessian is inconclusive: true when
/// the log-density is strictly lower at every probe at distance `h` along
/// the Hessian eigenvectors and their pairwise diagonals.
pub fn is_strict_local_max(mix: &Mixture, cp: &CriticalPoint, h: f64) -> bool {
    let x = cp.location_vector();
    let s = mix.scaled_derivatives(&x, true);
    let eig = s.hessian_scaled.expect("requested").symmetric_eigen();
    let d = x.len();
    let mut dirs: Vec<DVector<f64>> = (0..d).map(|j| eig.eigenvectors.column(j).into_owned()).collect();
    for i in 0..d {
        for j in i + 1..d {
            dirs.push((&dirs[i] + &dirs[j]).normalize());
            dirs.push((&dirs[i] - &dirs[j]).normalize());
        }
    }
    dirs.iter()
        .flat_map(|v| [1.0, -1.0].map(|sgn| &x + v * (sgn * h)))
        .all(|y| mix.log_density(&y) < s.log_density)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    #[serde(with = "biguint_string")]
    pub lower: num_bigint::BigUint,
    #[serde(with = "biguint_string")]
    pub conjecture: num_bigint::BigUint,
    #[serde(with = "biguint_string")]
    pub upper: num_bigint::BigUint,
    pub mode_count_within_upper: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartFailure {
    pub start: usize,
    pub reason: String,
}

/// Deduplicated, classified critical points of one mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub mixture_digest: String,
    pub dim: usize,
    pub components: usize,
    pub critical_points: Vec<CriticalPoint>,
    pub mode_count: usize,
    pub saddle_count: usize,
    pub antimode_count: usize,
    pub degenerate_count: usize,
    /// Degenerate points that a higher-order probe shows to be strict local
    /// maxima. Not included in `mode_count`.
    pub degenerate_maxima: usize,
    pub starts_used: usize,
    pub starts_converged: usize,
    pub failed_starts: Vec<StartFailure>,
    pub dedup_radius: f64,
    /// Largest log-density drop of any accepted fixed-point step.
    pub max_ascent_log_decrease: f64,
    pub bound_check: BoundCheck,
}

impl ModeReport {
    pub fn modes(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.critical_points.iter().filter(|p| p.kind == CriticalKind::Mode)
    }

    /// Strict local maxima of either kind: `mode_count + degenerate_maxima`.
    pub fn maxima_count(&self) -> usize {
        self.mode_count + self.degenerate_maxima
    }

    /// A numerical failure, never a disproof, if the upper bound is exceeded.
    pub fn is_numerical_failure(&self) -> bool {
        !self.bound_check.mode_count_within_upper
    }

    pub fn summary_line(&self) -> String {
        format!(
            "modes={} saddles={} minima={} degenerate={} upper_bound={}",
            self.mode_count, self.saddle_count, self.antimode_count, self.degenerate_count, self.bound_check.upper
        )
    }

    /// Columns `x_1..x_d, log_density, kind, min_eigenvalue, converged_from`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = (1..=self.dim).map(|i| format!("x_{i}")).collect();
        header.extend(["log_density", "kind", "min_eigenvalue", "converged_from"].map(String::from));
        w.write_record(&header)?;
        for p in &self.critical_points {
            let mut row: Vec<String> = p.location.iter().map(|v| format!("{v:e}")).collect();
            row.push(format!("{:e}", p.log_density));
            row.push(p.kind.to_string());
            row.push(format!("{:e}", p.min_eigenvalue()));
            row.push(p.converged_from.to_string());
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn bounding_diameter<'a>(points: impl Iterator<Item = &'a DVector<f64>>, d: usize) -> f64 {
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in points {
        for j in 0..d {
            lo[j] = lo[j].min(p[j]);
            hi[j] = hi[j].max(p[j]);
        }
    }
    lo.iter()
        .zip(&hi)
        .map(|(a, b)| (b - a).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Runs [`ascend`] from every start on the default execution path.
pub fn find_critical_points(mix: &Mixture, starts: &[DVector<f64>], opts: &AscentOptions) -> ModeReport {
    find_critical_points_with(mix, starts, opts, Execution::default())
}

/// As [`find_critical_points`], with explicit scheduling. The result does not
/// depend on `exec`.
pub fn find_critical_points_with(
    mix: &Mixture,
    starts: &[DVector<f64>],
    opts: &AscentOptions,
    exec: Execution,
) -> ModeReport {
    let outcomes = map_ordered(starts, exec, |x0| ascend_traced(mix, x0, opts));
    let mut converged = Vec::new();
    let mut failed = Vec::new();
    let mut max_decrease = f64::NEG_INFINITY;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(trace) => {
                max_decrease = max_decrease.max(trace.max_log_decrease);
                if trace.converged {
                    converged.push(trace.point);
                } else {
                    failed.push(StartFailure {
                        start: i,
                        reason: Error::NoConvergence {
                            gradient_norm: trace.point.gradient_norm,
                        }
                        .to_string(),
                    });
                }
            }
            Err(e) => failed.push(StartFailure {
                start: i,
                reason: e.to_string(),
            }),
        }
    }
    let starts_converged = converged.len();
    let radius = opts.dedup_radius.unwrap_or_else(|| {
        let diam = bounding_diameter(starts.iter().chain(mix.means()), mix.dim());
        1e-5 * diam.max(1e-3)
    });
    let points = merge_plateaus(mix, dedup_points(converged, radius), PLATEAU_FACTOR * radius);
    let count = |pred: fn(&CriticalKind) -> bool| points.iter().filter(|p| pred(&p.kind)).count();
    let mode_count = count(|k| *k == CriticalKind::Mode);
    let saddle_count = count(|k| matches!(k, CriticalKind::Saddle(_)));
    let antimode_count = count(|k| *k == CriticalKind::Antimode);
    let degenerate_count = count(|k| *k == CriticalKind::Degenerate);
    let degenerate_maxima = points
        .iter()
        .filter(|p| p.kind == CriticalKind::Degenerate && is_strict_local_max(mix, p, PLATEAU_FACTOR * radius))
        .count();
    let (d, k) = (mix.dim() as u64, mix.len() as u64);
    let upper = bounds::upper(d, k);
    let bound_check = BoundCheck {
        lower: bounds::lower(d, k),
        conjecture: bounds::conjecture(d, k),
        mode_count_within_upper: num_bigint::BigUint::from(mode_count) <= upper,
        upper,
    };
    ModeReport {
        mixture_digest: mix.digest(),
        dim: mix.dim(),
        components: mix.len(),
        critical_points: points,
        mode_count,
        saddle_count,
        antimode_count,
        degenerate_count,
        degenerate_maxima,
        starts_used: starts.len(),
        starts_converged,
        failed_starts: failed,
        dedup_radius: radius,
        max_ascent_log_decrease: if max_decrease.is_finite() { max_decrease } else { 0.0 },
        bound_check,
    }
}

/// Deterministic start set: component means, arrangement vertices, pairwise
/// mean midpoints, then seeded low-discrepancy points in the search box,
/// up to `budget` in total (structural points are never dropped).
pub fn default_starts(scenario: &Scenario, budget: usize, seed: u64) -> Vec<DVector<f64>> {
    let mix = &scenario.mixture;
    let d = mix.dim();
    let means: Vec<DVector<f64>> = mix.means().cloned().collect();
    let mut starts = means.clone();
    if let Some(arr) = &scenario.arrangement {
        starts.extend(arr.vertices.iter().map(|v| DVector::from_column_slice(&v.point)));
    }
    for i in 0..means.len() {
        for j in i + 1..means.len() {
            starts.push((&means[i] + &means[j]) * 0.5);
        }
    }
    let lo = &scenario.search_box.lo;
    let hi = &scenario.search_box.hi;
    let fill = budget.saturating_sub(starts.len());
    starts.extend(RSequence::new(d, seed).take(fill).map(|u| {
        DVector::from_iterator(d, (0..d).map(|j| lo[j] + u[j] * (hi[j] - lo[j])))
    }));
    starts
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{cross_example, duistermaat_triangle, univariate_pair, Scenario};

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn options_validation() {
        assert!(AscentOptions::default().validate().is_ok());
        let bad = AscentOptions {
            gradient_tolerance: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = AscentOptions {
            max_newton_iters: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn cross_ascents_reach_the_expected_modes() {
        let s = cross_example();
        let opts = AscentOptions::default();
        let a = ascend(&s.mixture, &v(&[0.9, 0.1]), &opts).unwrap();
        assert_eq!(a.kind, CriticalKind::Mode);
        assert!((a.location_vector() - v(&[1.0, 0.0])).norm() < 0.2);
        let b = ascend(&s.mixture, &v(&[0.05, 0.05]), &opts).unwrap();
        assert_eq!(b.kind, CriticalKind::Mode);
        assert!(b.location_vector().norm() < 0.2);
    }

    #[test]
    fn duistermaat_origin_is_a_mode() {
        let s = duistermaat_triangle(0.72).unwrap();
        let p = ascend(&s.mixture, &v(&[0.0, 0.0]), &AscentOptions::default()).unwrap();
        assert_eq!(p.kind, CriticalKind::Mode);
        assert!(p.location_vector().norm() < 1e-12);
    }

    #[test]
    fn single_gaussian_report() {
        let s = Scenario::from_mixture(
            "single",
            Mixture::from_nested(&[1.0], &[vec![1.0, 2.0]], &[vec![vec![1.0, 0.2], vec![0.2, 0.3]]]).unwrap(),
        );
        let starts = default_starts(&s, 20, 1);
        assert_eq!(starts.len(), 20);
        let r = find_critical_points(&s.mixture, &starts, &AscentOptions::default());
        assert_eq!(r.mode_count, 1);
        assert_eq!(r.critical_points.len(), 1);
        assert_eq!(r.critical_points[0].converged_from, 20);
        assert!((r.critical_points[0].location_vector() - v(&[1.0, 2.0])).norm() < 1e-10);
        assert!(r.bound_check.mode_count_within_upper);
    }

    #[test]
    fn univariate_pair_has_two_modes_and_an_antimode() {
        let s = univariate_pair(0.0, 1.0, 2.1, 1.0, 0.5).unwrap();
        let r = find_critical_points(&s.mixture, &default_starts(&s, 50, 3), &AscentOptions::default());
        assert_eq!((r.mode_count, r.antimode_count, r.critical_points.len()), (2, 1, 3));
        assert_eq!(r.summary_line().split(' ').next(), Some("modes=2"));
    }

    #[test]
    fn starts_include_structure_and_are_reproducible() {
        let s = cross_example();
        let starts = default_starts(&s, 50, 1);
        assert_eq!(starts.len(), 50);
        for p in [v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.5, 0.5])] {
            assert!(starts.iter().any(|q| (q - &p).norm() < 1e-15));
        }
        assert_eq!(starts, default_starts(&s, 50, 1));
        assert_ne!(starts, default_starts(&s, 50, 2));
    }

    #[test]
    fn dedup_keeps_smallest_gradient() {
        let mk = |x: f64, g: f64| CriticalPoint {
            location: vec![x],
            log_density: 0.0,
            gradient_norm: g,
            hessian_eigenvalues: vec![-1.0],
            kind: CriticalKind::Mode,
            converged_from: 1,
        };
        let out = dedup_points(vec![mk(1.0, 1e-11), mk(1.0 + 1e-7, 1e-13), mk(2.0, 0.0)], 1e-5);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].gradient_norm, 1e-13);
        assert_eq!(out[0].converged_from, 2);
    }

    #[test]
    fn parallel_and_sequential_reports_match() {
        let s = duistermaat_triangle(0.72).unwrap();
        let starts = default_starts(&s, 120, 5);
        let opts = AscentOptions::default();
        let a = find_critical_points_with(&s.mixture, &starts, &opts, Execution::Sequential);
        let b = find_critical_points_with(&s.mixture, &starts, &opts, Execution::Parallel);
        assert_eq!(a, b);
        assert_eq!(a.mode_count, 4);
    }

    #[test]
    fn csv_export_columns() {
        let s = cross_example();
        let r = find_critical_points(&s.mixture, &default_starts(&s, 30, 1), &AscentOptions::default());
        let csv = r.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x_1,x_2,log_density,kind,min_eigenvalue,converged_from"));
        assert_eq!(lines.count(), r.critical_points.len());
    }

    #[test]
    fn start_dimension_checked() {
        let s = cross_example();
        assert!(matches!(
            ascend(&s.mixture, &v(&[0.0]), &AscentOptions::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
