//! Generic hyperplane arrangements and the mixtures concentrated on them.
//!
//! Component `i` of an arrangement mixture is a standard Gaussian along
//! `H_i` and has variance `δ³` across it. For small `δ` every vertex where
//! `d` hyperplanes meet carries a mode, and so does every mean.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::{GaussianComponent, Mixture};

/// Required lower bound on subset singular values and vertex clearances.
pub const GENERICITY_MARGIN: f64 = 0.05;
const MAX_DRAWS: usize = 1000;
/// Distance the default means keep from every foreign hyperplane.
pub const MEAN_CLEARANCE: f64 = 0.25;
const ON_PLANE_TOL: f64 = 1e-9;
/// Largest `r·exp(−r²/2)` used by the balanced `d = k = 3` means (`r ≈ 0.6`).
const BALANCED_PEAK: f64 = 0.5;

/// `H = {x : normal · x = offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    /// Signed distance `normal · x − offset`.
    pub fn eta(&self, x: &DVector<f64>) -> f64 {
        self.normal.iter().zip(x.iter()).map(|(n, v)| n * v).sum::<f64>() - self.offset
    }

    pub fn normal_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.normal)
    }

    /// Orthogonal projection onto the hyperplane.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        x - self.normal_vector() * self.eta(x)
    }
}

/// Intersection point of the hyperplanes listed in `planes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub planes: Vec<usize>,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneArrangement {
    pub dim: usize,
    pub hyperplanes: Vec<Hyperplane>,
    pub vertices: Vec<Vertex>,
    /// Threshold every subset singular value and vertex clearance respects.
    pub genericity_margin: f64,
    /// The smallest such quantity actually present.
    pub achieved_margin: f64,
}

/// All `r`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

impl HyperplaneArrangement {
    /// Computes vertices and margins for the given hyperplanes (normals are normalized).
    pub fn from_hyperplanes(dim: usize, hyperplanes: Vec<Hyperplane>) -> Result<Self> {
        let k = hyperplanes.len();
        if dim == 0 || k < dim {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= d <= k, got d={dim}, k={k}"
            )));
        }
        let hyperplanes = hyperplanes
            .into_iter()
            .enumerate()
            .map(|(i, h)| {
                if h.normal.len() != dim {
                    return Err(Error::DimensionMismatch {
                        context: format!("normal {i}"),
                        expected: dim,
                        found: h.normal.len(),
                    });
                }
                let norm = h.normal.iter().map(|v| v * v).sum::<f64>().sqrt();
                if !(norm > 0.0) || !norm.is_finite() || !h.offset.is_finite() {
                    return Err(Error::InvalidParameter(format!("hyperplane {i} is degenerate")));
                }
                Ok(Hyperplane {
                    normal: h.normal.iter().map(|v| v / norm).collect(),
                    offset: h.offset / norm,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut margin = f64::INFINITY;
        let mut vertices = Vec::new();
        for subset in subsets(k, dim) {
            let n = subset_matrix(&hyperplanes, &subset);
            margin = margin.min(n.clone().singular_values().min());
            let rhs = DVector::from_iterator(dim, subset.iter().map(|&i| hyperplanes[i].offset));
            let point = n
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::InvalidParameter(format!("hyperplanes {subset:?} do not meet in a point")))?;
            vertices.push(Vertex {
                planes: subset,
                point: point.iter().copied().collect(),
            });
        }
        for v in &vertices {
            let p = DVector::from_column_slice(&v.point);
            for (j, h) in hyperplanes.iter().enumerate() {
                if !v.planes.contains(&j) {
                    margin = margin.min(h.eta(&p).abs());
                }
            }
        }
        Ok(Self {
            dim,
            hyperplanes,
            vertices,
            genericity_margin: GENERICITY_MARGIN,
            achieved_margin: margin,
        })
    }

    pub fn k(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_generic(&self) -> bool {
        self.achieved_margin >= self.genericity_margin
    }

    /// Uniformly rescales and shifts so all vertices lie in `[-1, 1]^d`,
    /// centred on their bounding box.
    pub fn normalized(&self) -> Result<Self> {
        let d = self.dim;
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for v in &self.vertices {
            for j in 0..d {
                lo[j] = lo[j].min(v.point[j]);
                hi[j] = hi[j].max(v.point[j]);
            }
        }
        let center = DVector::from_iterator(d, (0..d).map(|j| 0.5 * (lo[j] + hi[j])));
        let half = (0..d).map(|j| 0.5 * (hi[j] - lo[j])).fold(0.0, f64::max);
        let scale = if half > 0.0 { 1.0 / half } else { 1.0 };
        let planes = self
            .hyperplanes
            .iter()
            .map(|h| {
                let nc: f64 = h.normal.iter().zip(center.iter()).map(|(a, b)| a * b).sum();
                Hyperplane {
                    normal: h.normal.clone(),
                    offset: scale * (h.offset - nc),
                }
            })
            .collect();
        Self::from_hyperplanes(d, planes)
    }

    /// Vertices lying on hyperplane `i`.
    pub fn vertices_on(&self, i: usize) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter().filter(move |v| v.planes.contains(&i))
    }

    /// Smallest distance from `x` to any hyperplane other than `i`.
    pub fn clearance(&self, i: usize, x: &DVector<f64>) -> f64 {
        self.hyperplanes
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, h)| h.eta(x).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Default component means: the point of `H_i` nearest the centroid of
    /// its vertices, moved along `H_i` until it clears every other
    /// hyperplane by [`MEAN_CLEARANCE`].
    pub fn default_means(&self) -> Result<Vec<DVector<f64>>> {
        if self.dim == 3 && self.k() == 3 {
            return self.balanced_means();
        }
        (0..self.k()).map(|i| self.default_mean(i)).collect()
    }

    fn default_mean(&self, i: usize) -> Result<DVector<f64>> {
        let d = self.dim;
        let plane = &self.hyperplanes[i];
        let on_plane: Vec<&Vertex> = self.vertices_on(i).collect();
        let mut centroid = DVector::zeros(d);
        for v in &on_plane {
            centroid += DVector::from_column_slice(&v.point);
        }
        centroid /= on_plane.len().max(1) as f64;
        let base = plane.project(&centroid);
        if d == 1 {
            return Ok(base);
        }
        if self.clearance(i, &base) >= MEAN_CLEARANCE {
            return Ok(base);
        }
        let tangents = tangent_basis(&plane.normal_vector());
        for step in 1..=80 {
            let t = 0.05 * step as f64;
            for dir in &tangents {
                for sign in [1.0, -1.0] {
                    let cand = &base + dir * (sign * t);
                    if self.clearance(i, &cand) >= MEAN_CLEARANCE {
                        return Ok(cand);
                    }
                }
            }
        }
        Err(Error::MeanOnForeignHyperplane { index: i })
    }

    /// Means for three planes in `R^3` placed so that, on each line
    /// `H_i ∩ H_j`, the smooth two-component profile peaks exactly at the
    /// vertex; otherwise every such line carries a mode of its own.
    ///
    /// On the line through `p` with direction `l`, the profile's slope at `p`
    /// is `(w_i + w_j)·l` with `w_i = exp(−r_i²/2)(μ_i − p)`, `r_i = |μ_i − p|`.
    /// That is linear in the `w_i`, so any null vector of the three
    /// constraints gives valid means once each radius is recovered from
    /// `|w_i| = r_i exp(−r_i²/2)` on the branch `r_i < 1`, which also keeps
    /// every line profile unimodal.
    fn balanced_means(&self) -> Result<Vec<DVector<f64>>> {
        let p = DVector::from_column_slice(&self.vertices[0].point);
        let n: Vec<DVector<f64>> = self.hyperplanes.iter().map(|h| h.normal_vector()).collect();
        let bases: Vec<Vec<DVector<f64>>> = n.iter().map(tangent_basis).collect();
        let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
        let mut a = DMatrix::zeros(3, 6);
        for (row, &(i, j)) in pairs.iter().enumerate() {
            let l = n[i].cross(&n[j]).normalize();
            for plane in [i, j] {
                for c in 0..2 {
                    a[(row, 2 * plane + c)] = bases[plane][c].dot(&l);
                }
            }
        }
        let eig = (a.transpose() * &a).symmetric_eigen();
        let mut order: Vec<usize> = (0..6).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
        let null: Vec<DVector<f64>> = order[..3].iter().map(|&c| eig.eigenvectors.column(c).into_owned()).collect();
        let mut best: Option<(f64, Vec<DVector<f64>>)> = None;
        let steps = 12;
        for s0 in -steps..=steps {
            for s1 in -steps..=steps {
                for s2 in -steps..=steps {
                    let c = [s0, s1, s2].map(|v| v as f64 / steps as f64);
                    let coef = &null[0] * c[0] + &null[1] * c[1] + &null[2] * c[2];
                    let w: Vec<DVector<f64>> = (0..3)
                        .map(|i| &bases[i][0] * coef[2 * i] + &bases[i][1] * coef[2 * i + 1])
                        .collect();
                    let largest = w.iter().map(|v| v.norm()).fold(0.0, f64::max);
                    if largest < 1e-9 || w.iter().any(|v| v.norm() < 1e-3 * largest) {
                        continue;
                    }
                    let means: Vec<DVector<f64>> = w
                        .iter()
                        .map(|v| {
                            let r = radius_for_weighted_offset(BALANCED_PEAK * v.norm() / largest);
                            &p + v.normalize() * r
                        })
                        .collect();
                    let clear = (0..3)
                        .map(|i| self.clearance(i, &means[i]))
                        .fold(f64::INFINITY, f64::min);
                    if best.as_ref().is_none_or(|(b, _)| clear > *b) {
                        best = Some((clear, means));
                    }
                }
            }
        }
        match best {
            Some((clear, means)) if clear >= self.genericity_margin => Ok(means),
            _ => (0..3).map(|i| self.default_mean(i)).collect(),
        }
    }

    /// Checks the user-supplied means: `μ_i ∈ H_i` and clear of other hyperplanes.
    pub fn check_means(&self, means: &[DVector<f64>]) -> Result<()> {
        if means.len() != self.k() {
            return Err(Error::DimensionMismatch {
                context: "arrangement means".into(),
                expected: self.k(),
                found: means.len(),
            });
        }
        for (i, m) in means.iter().enumerate() {
            if m.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    context: format!("arrangement mean {i}"),
                    expected: self.dim,
                    found: m.len(),
                });
            }
            if self.hyperplanes[i].eta(m).abs() > ON_PLANE_TOL || self.clearance(i, m) < self.genericity_margin {
                return Err(Error::MeanOnForeignHyperplane { index: i });
            }
        }
        Ok(())
    }
}

/// Root `r ∈ (0, 1)` of `r·exp(−r²/2) = y` for `0 < y < exp(−½)`.
fn radius_for_weighted_offset(y: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid * (-0.5 * mid * mid).exp() < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn subset_matrix(planes: &[Hyperplane], subset: &[usize]) -> DMatrix<f64> {
    let d = planes[0].normal.len();
    DMatrix::from_fn(subset.len(), d, |r, c| planes[subset[r]].normal[c])
}

/// Orthonormal basis of the complement of `normal`, built by Gram–Schmidt
/// on the coordinate axes.
pub fn tangent_basis(normal: &DVector<f64>) -> Vec<DVector<f64>> {
    let d = normal.len();
    let n = normal.normalize();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(d.saturating_sub(1));
    let mut axes: Vec<usize> = (0..d).collect();
    // start from the axes least aligned with the normal
    axes.sort_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs()));
    for axis in axes {
        if basis.len() + 1 == d {
            break;
        }
        let mut v = DVector::zeros(d);
        v[axis] = 1.0;
        v -= &n * n.dot(&v);
        for b in &basis {
            v -= b * b.dot(&v);
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
    }
    basis
}

/// Draws a random arrangement with unit normals uniform on the sphere and
/// offsets in `[-1, 1]`, normalized into `[-1, 1]^d`, redrawing until the
/// genericity margin holds.
pub fn generic_arrangement(d: usize, k: usize, seed: u64) -> Result<HyperplaneArrangement> {
    if d == 0 || d > k {
        return Err(Error::InvalidParameter(format!("need 1 <= d <= k, got d={d}, k={k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..MAX_DRAWS {
        let planes: Vec<Hyperplane> = (0..k)
            .map(|_| {
                let normal: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let offset = rng.random_range(-1.0..=1.0);
                Hyperplane { normal, offset }
            })
            .collect();
        let Ok(raw) = HyperplaneArrangement::from_hyperplanes(d, planes) else {
            continue;
        };
        let Ok(arr) = raw.normalized() else {
            continue;
        };
        if arr.is_generic() {
            return Ok(arr);
        }
        best = best.max(arr.achieved_margin);
    }
    Err(Error::GenericityFailure {
        attempts: MAX_DRAWS,
        best_margin: best,
    })
}

/// The three lines through the sides of the equilateral triangle with
/// vertices `(1,0)`, `(−½, ±√3/2)`.
pub fn triangle_arrangement() -> HyperplaneArrangement {
    let s = 3f64.sqrt() / 2.0;
    let corners = [[1.0, 0.0], [-0.5, s], [-0.5, -s]];
    let planes = corners
        .iter()
        .map(|c| Hyperplane {
            normal: vec![-c[0], -c[1]],
            offset: 0.5,
        })
        .collect();
    HyperplaneArrangement::from_hyperplanes(2, planes).expect("triangle is generic")
}

/// Mixture with component `i` standard along `H_i`, variance `δ³` across it,
/// equal weights.
pub fn arrangement_mixture(
    arr: &HyperplaneArrangement,
    delta: f64,
    means: Option<&[DVector<f64>]>,
) -> Result<Mixture> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidDelta(delta));
    }
    let means = match means {
        Some(m) => {
            arr.check_means(m)?;
            m.to_vec()
        }
        None => arr.default_means()?,
    };
    let k = arr.k();
    let d = arr.dim;
    let normal_var = delta.powi(3);
    let components = arr
        .hyperplanes
        .iter()
        .zip(means)
        .enumerate()
        .map(|(i, (h, mean))| {
            let n = h.normal_vector();
            let cov = DMatrix::identity(d, d) + &n * n.transpose() * (normal_var - 1.0);
            GaussianComponent::new(1.0 / k as f64, mean, cov, i)
        })
        .collect::<Result<Vec<_>>>()?;
    Mixture::from_components(components)
}

/// Outcome of comparing the mixture at a vertex with the boundary of its
/// affine cube `{|η_i| ≤ δ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeCertificate {
    pub vertex: usize,
    pub center_log_density: f64,
    pub boundary_max_log_density: f64,
    pub boundary_samples: usize,
    pub holds: bool,
}

/// Samples each of the `2d` facets of the cube around vertex `vertex_index`
/// on a 9-point-per-axis grid and checks that the centre value beats them all.
pub fn cube_certificate(
    mix: &Mixture,
    arr: &HyperplaneArrangement,
    vertex_index: usize,
    delta: f64,
) -> CubeCertificate {
    let d = arr.dim;
    let vertex = &arr.vertices[vertex_index];
    let n = subset_matrix(&arr.hyperplanes, &vertex.planes);
    let offsets = DVector::from_iterator(d, vertex.planes.iter().map(|&i| arr.hyperplanes[i].offset));
    let lu = n.lu();
    let center = DVector::from_column_slice(&vertex.point);
    let center_log = mix.log_density(&center);
    let grid: Vec<f64> = (0..9).map(|s| -delta + 2.0 * delta * s as f64 / 8.0).collect();
    let mut max_log = f64::NEG_INFINITY;
    let mut samples = 0;
    let free = d - 1;
    let per_facet = 9usize.pow(free as u32);
    for facet in 0..d {
        for sign in [-1.0, 1.0] {
            for idx in 0..per_facet {
                let mut eta = DVector::zeros(d);
                let mut rem = idx;
                for j in (0..d).filter(|&j| j != facet) {
                    eta[j] = grid[rem % 9];
                    rem /= 9;
                }
                eta[facet] = sign * delta;
                let x = lu.solve(&(&offsets + eta)).expect("vertex subset is nonsingular");
                max_log = max_log.max(mix.log_density(&x));
                samples += 1;
            }
        }
    }
    CubeCertificate {
        vertex: vertex_index,
        center_log_density: center_log,
        boundary_max_log_density: max_log,
        boundary_samples: samples,
        holds: center_log > max_log,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn subsets_enumerate_binomially() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(subsets(5, 1).len(), 5);
    }

    #[test]
    fn vertex_counts() {
        assert_eq!(generic_arrangement(2, 3, 1).unwrap().vertices.len(), 3);
        assert_eq!(generic_arrangement(3, 3, 1).unwrap().vertices.len(), 1);
        let a = generic_arrangement(2, 4, 7).unwrap();
        assert_eq!(a.vertices.len(), 6);
        assert!(a.achieved_margin >= 0.05);
    }

    #[test]
    fn vertices_solve_their_equations() {
        for (d, k, seed) in [(1, 2, 1), (2, 3, 2), (2, 4, 7), (3, 3, 1), (3, 5, 4)] {
            let a = generic_arrangement(d, k, seed).unwrap();
            for h in &a.hyperplanes {
                let n: f64 = h.normal.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-12);
            }
            for v in &a.vertices {
                let p = DVector::from_column_slice(&v.point);
                assert!(p.iter().all(|c| c.abs() <= 1.0 + 1e-12));
                for (j, h) in a.hyperplanes.iter().enumerate() {
                    if v.planes.contains(&j) {
                        assert!(h.eta(&p).abs() <= 1e-10);
                    } else {
                        assert!(h.eta(&p).abs() >= a.genericity_margin);
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_shapes_rejected() {
        assert!(matches!(generic_arrangement(3, 2, 1), Err(Error::InvalidParameter(_))));
        assert!(matches!(generic_arrangement(0, 2, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn same_seed_same_arrangement() {
        assert_eq!(generic_arrangement(2, 4, 9).unwrap(), generic_arrangement(2, 4, 9).unwrap());
    }

    #[test]
    fn triangle_vertices_are_corners() {
        let t = triangle_arrangement();
        let s = 3f64.sqrt() / 2.0;
        let expected = [[-0.5, -s], [-0.5, s], [1.0, 0.0]];
        for (v, e) in t.vertices.iter().zip(expected) {
            assert!((v.point[0] - e[0]).abs() < 1e-12 && (v.point[1] - e[1]).abs() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn peak_value_on_the_hyperplane() {
        let arr = triangle_arrangement();
        let delta: f64 = 0.05;
        let mix = arrangement_mixture(&arr, delta, None).unwrap();
        let c = &mix.components()[0];
        let expected = -(2.0 * PI).ln() - 1.5 * delta.ln();
        assert!((c.log_pdf(c.mean()) - expected).abs() < 1e-12);
        assert!((c.log_normalizer() - expected).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_single_component() {
        let arr = HyperplaneArrangement::from_hyperplanes(
            1,
            vec![Hyperplane {
                normal: vec![1.0],
                offset: 0.3,
            }],
        )
        .unwrap();
        let mix = arrangement_mixture(&arr, 0.1, None).unwrap();
        assert_eq!(mix.len(), 1);
        assert!((mix.components()[0].covariance()[(0, 0)] - 1e-3).abs() < 1e-15);
        assert!((mix.components()[0].mean()[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn default_means_clear_other_planes() {
        for (d, k, seed) in [(2, 2, 1), (2, 3, 1), (2, 4, 7), (3, 3, 1)] {
            let arr = generic_arrangement(d, k, seed).unwrap();
            let means = arr.default_means().unwrap();
            arr.check_means(&means).unwrap();
        }
    }

    #[test]
    fn rejects_bad_means_and_delta() {
        let arr = triangle_arrangement();
        assert!(matches!(arrangement_mixture(&arr, 1.5, None), Err(Error::InvalidDelta(_))));
        assert!(matches!(arrangement_mixture(&arr, 0.0, None), Err(Error::InvalidDelta(_))));
        let mut means = arr.default_means().unwrap();
        // move mean 0 onto a vertex of H_0, which sits on another line
        let v = arr.vertices_on(0).next().unwrap();
        means[0] = DVector::from_column_slice(&v.point);
        assert!(matches!(
            arrangement_mixture(&arr, 0.1, Some(&means)),
            Err(Error::MeanOnForeignHyperplane { index: 0 })
        ));
    }

    #[test]
    fn component_shape_along_and_across() {
        let arr = generic_arrangement(3, 4, 5).unwrap();
        let delta: f64 = 0.2;
        let mix = arrangement_mixture(&arr, delta, None).unwrap();
        for (c, h) in mix.components().iter().zip(&arr.hyperplanes) {
            let n = h.normal_vector();
            let tangent = &tangent_basis(&n)[0];
            let peak = c.log_pdf(c.mean());
            for t in [0.3, 1.0, 2.0] {
                let along = c.log_pdf(&(c.mean() + tangent * t)) - peak;
                assert!((along.exp() / (-t * t / 2.0).exp() - 1.0).abs() < 1e-9);
                let s = t * 0.01;
                let across = c.log_pdf(&(c.mean() + &n * s)) - peak;
                let expected = -s * s / (2.0 * delta.powi(3));
                assert!((across.exp() / expected.exp() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn cube_grid_size() {
        let arr = generic_arrangement(3, 3, 1).unwrap();
        let mix = arrangement_mixture(&arr, 0.1, None).unwrap();
        let c = cube_certificate(&mix, &arr, 0, 0.1);
        assert_eq!(c.boundary_samples, 2 * 3 * 81);
    }
}
