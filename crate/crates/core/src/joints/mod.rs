//! Joint reasoning per tree edge: contact-region analysis, candidate
//! generation, objective optimization on the parent SDF, and type decisions.

mod dwcavl;
mod motion;

pub use dwcavl::{
    dwcavl_losses, optimize_candidate, rank_and_refine, total_objective, DeltaLoss, DwCavlConfig,
    KindScores, ObjectiveContext,
};
pub use motion::{
    axis_jacobian, rodrigues_matrix, rotate_point, rotate_points, translate_points, MotionError,
};

use nalgebra::{Matrix3, Point3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::SymmetryClusters;

#[derive(Debug, Error)]
pub enum JointError {
    #[error("no contact region: all cross distances exceed the threshold")]
    NoContact,
    #[error("non-finite objective during optimization")]
    NonFinite,
    #[error(transparent)]
    Motion(#[from] MotionError),
}

/// Joint kinds supported by the exporter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointType {
    Fixed,
    Revolute,
    Prismatic,
}

impl std::fmt::Display for JointType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JointType::Fixed => write!(f, "fixed"),
            JointType::Revolute => write!(f, "revolute"),
            JointType::Prismatic => write!(f, "prismatic"),
        }
    }
}

/// The typed joint carried by a tree edge. The parent-to-child origin lives
/// on the edge itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpec {
    pub joint_type: JointType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot: Option<[f64; 3]>,
    #[serde(default)]
    pub score: f64,
}

impl JointSpec {
    pub fn fixed() -> Self {
        JointSpec {
            joint_type: JointType::Fixed,
            axis: None,
            pivot: None,
            score: 0.0,
        }
    }

    pub fn revolute(axis: Unit<Vector3<f64>>, pivot: Point3<f64>, score: f64) -> Self {
        let a = axis.into_inner();
        JointSpec {
            joint_type: JointType::Revolute,
            axis: Some([a.x, a.y, a.z]),
            pivot: Some([pivot.x, pivot.y, pivot.z]),
            score,
        }
    }

    pub fn prismatic(axis: Unit<Vector3<f64>>, score: f64) -> Self {
        let a = axis.into_inner();
        JointSpec {
            joint_type: JointType::Prismatic,
            axis: Some([a.x, a.y, a.z]),
            pivot: None,
            score,
        }
    }

    pub fn axis_vector(&self) -> Option<Vector3<f64>> {
        self.axis.map(Vector3::from)
    }

    pub fn pivot_point(&self) -> Option<Point3<f64>> {
        self.pivot.map(Point3::from)
    }
}

/// Near-contact points between a parent and child with distance-decay
/// weights and their weighted moments.
#[derive(Debug, Clone)]
pub struct ContactRegion {
    pub points: Vec<Point3<f64>>,
    pub weights: Vec<f64>,
    pub centroid: Point3<f64>,
    pub covariance: Matrix3<f64>,
    /// Mean nearest-point difference direction, oriented parent → child.
    pub normal: Unit<Vector3<f64>>,
    /// Principal direction of smallest variance: the hinge-axis estimate.
    pub u_pca: Unit<Vector3<f64>>,
    /// Orthogonal completion of `u_pca` and `normal`.
    pub u_perp: Unit<Vector3<f64>>,
    /// All principal axes of the covariance, ascending eigenvalue.
    pub principal_axes: [Unit<Vector3<f64>>; 3],
}

fn nearest_distance_and_point(p: &Point3<f64>, others: &[Point3<f64>]) -> (f64, Point3<f64>) {
    let mut best = (f64::INFINITY, *p);
    for q in others {
        let d = (p - q).norm_squared();
        if d < best.0 {
            best = (d, *q);
        }
    }
    (best.0.sqrt(), best.1)
}

/// Extract the contact region: points on either part whose nearest neighbor
/// on the other part lies within `tau_c`, weighted by a Gaussian decay in
/// that distance.
pub fn extract_contact_region(
    samples_parent: &[Point3<f64>],
    samples_child: &[Point3<f64>],
    tau_c: f64,
    decay_scale: f64,
) -> Result<ContactRegion, JointError> {
    assert!(!samples_parent.is_empty() && !samples_child.is_empty());
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut diff_sum = Vector3::zeros();
    let mut diff_count = 0usize;

    for p in samples_parent {
        let (d, q) = nearest_distance_and_point(p, samples_child);
        if d <= tau_c {
            points.push(*p);
            weights.push((-d * d / (2.0 * decay_scale * decay_scale)).exp());
            diff_sum += q - p; // parent → child
            diff_count += 1;
        }
    }
    for p in samples_child {
        let (d, q) = nearest_distance_and_point(p, samples_parent);
        if d <= tau_c {
            points.push(*p);
            weights.push((-d * d / (2.0 * decay_scale * decay_scale)).exp());
            diff_sum += p - q; // parent → child
            diff_count += 1;
        }
    }
    if points.is_empty() {
        return Err(JointError::NoContact);
    }

    let normal_raw = if diff_count > 0 {
        diff_sum / diff_count as f64
    } else {
        Vector3::zeros()
    };
    Ok(region_from_weighted_points(points, weights, normal_raw))
}

/// Fallback region when nothing lies within the contact threshold: the
/// closest cross pair defines a midpoint contact with the pair direction as
/// normal.
pub fn fallback_region(
    samples_parent: &[Point3<f64>],
    samples_child: &[Point3<f64>],
) -> ContactRegion {
    let mut best = (f64::INFINITY, Point3::origin(), Point3::origin());
    for p in samples_parent {
        let (d, q) = nearest_distance_and_point(p, samples_child);
        if d < best.0 {
            best = (d, *p, q);
        }
    }
    let (_, p, q) = best;
    let mid = nalgebra::center(&p, &q);
    region_from_weighted_points(vec![p, mid, q], vec![1.0, 1.0, 1.0], q - p)
}

fn region_from_weighted_points(
    points: Vec<Point3<f64>>,
    weights: Vec<f64>,
    normal_raw: Vector3<f64>,
) -> ContactRegion {
    let w_sum: f64 = weights.iter().sum();
    let centroid = Point3::from(
        points
            .iter()
            .zip(&weights)
            .map(|(p, &w)| p.coords * w)
            .sum::<Vector3<f64>>()
            / w_sum,
    );
    let mut cov = Matrix3::zeros();
    for (p, &w) in points.iter().zip(&weights) {
        let d = p - centroid;
        cov += w * d * d.transpose();
    }
    cov /= w_sum;

    // Eigen-decomposition of the symmetric covariance, ascending.
    let eig = nalgebra::SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let axes: Vec<Unit<Vector3<f64>>> = order
        .iter()
        .map(|&i| {
            let v: Vector3<f64> = eig.eigenvectors.column(i).into();
            if v.norm() > 1e-12 {
                Unit::new_normalize(v)
            } else {
                Vector3::x_axis()
            }
        })
        .collect();
    let u_pca = axes[0];

    let normal = if normal_raw.norm() > 1e-12 {
        Unit::new_normalize(normal_raw)
    } else {
        // Degenerate: any direction orthogonal to the hinge estimate.
        orthogonal_to(&u_pca)
    };
    let cross = u_pca.cross(&normal);
    let u_perp = if cross.norm() > 1e-9 {
        Unit::new_normalize(cross)
    } else {
        orthogonal_to(&u_pca)
    };

    ContactRegion {
        points,
        weights,
        centroid,
        covariance: cov,
        normal,
        u_pca,
        u_perp,
        principal_axes: [axes[0], axes[1], axes[2]],
    }
}

fn orthogonal_to(u: &Unit<Vector3<f64>>) -> Unit<Vector3<f64>> {
    let candidate = if u.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    Unit::new_normalize(u.cross(&candidate))
}

/// A (pivot, axis) hypothesis with its evaluated objective.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JointCandidate {
    pub kind: JointType,
    pub pivot: [f64; 3],
    pub raw_axis: [f64; 3],
    /// Total objective; infinity until evaluated.
    pub objective: f64,
    /// Per-virtual-motion loss breakdown.
    pub breakdown: Vec<DeltaLoss>,
    pub pivot_regularizer: f64,
}

impl JointCandidate {
    pub fn new(kind: JointType, pivot: Point3<f64>, raw_axis: Vector3<f64>) -> Self {
        JointCandidate {
            kind,
            pivot: [pivot.x, pivot.y, pivot.z],
            raw_axis: [raw_axis.x, raw_axis.y, raw_axis.z],
            objective: f64::INFINITY,
            breakdown: Vec::new(),
            pivot_regularizer: 0.0,
        }
    }

    pub fn pivot_point(&self) -> Point3<f64> {
        Point3::from(self.pivot)
    }

    pub fn raw_axis_vector(&self) -> Vector3<f64> {
        Vector3::from(self.raw_axis)
    }

    pub fn axis(&self) -> Unit<Vector3<f64>> {
        Unit::new_normalize(self.raw_axis_vector())
    }

    /// Candidate score `1/(1+𝒥)` ∈ (0, 1].
    pub fn score(&self) -> f64 {
        1.0 / (1.0 + self.objective)
    }
}

/// Generate the unoptimized candidate pool for a contact region: the
/// deterministic axis pool (hinge estimate, contact normal, orthogonal
/// completion, covariance principal axes) plus seeded random directions,
/// deduplicated up to sign, with pivots slid along each axis.
pub fn generate_candidates(
    region: &ContactRegion,
    n_random_axes: usize,
    n_slide: usize,
    slide_step: f64,
    seed: u64,
) -> Vec<JointCandidate> {
    let mut axes: Vec<Unit<Vector3<f64>>> = vec![
        region.u_pca,
        region.normal,
        region.u_perp,
        region.principal_axes[0],
        region.principal_axes[1],
        region.principal_axes[2],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_random_axes {
        loop {
            let v = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                axes.push(Unit::new_normalize(v));
                break;
            }
        }
    }

    // Dedup up to sign.
    let mut unique: Vec<Unit<Vector3<f64>>> = Vec::new();
    for a in axes {
        if !unique.iter().any(|b| a.dot(b).abs() > 1.0 - 1e-6) {
            unique.push(a);
        }
    }

    let mut out = Vec::new();
    for axis in &unique {
        for j in -(n_slide as i64)..=(n_slide as i64) {
            let pivot = region.centroid + axis.into_inner() * (j as f64 * slide_step);
            out.push(JointCandidate::new(
                JointType::Revolute,
                pivot,
                axis.into_inner(),
            ));
        }
        out.push(JointCandidate::new(
            JointType::Prismatic,
            region.centroid,
            axis.into_inner(),
        ));
    }
    out
}

/// What an external type oracle may say about one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TypePrediction {
    Abstain,
    Distribution {
        fixed: f64,
        revolute: f64,
        prismatic: f64,
    },
}

/// Pre-extracted geometric features handed to a type prior.
#[derive(Debug, Clone, Copy)]
pub struct EdgeFeatures {
    pub parent: usize,
    pub child: usize,
    pub s_rev: f64,
    pub s_pri: f64,
    pub contact_point_count: usize,
}

/// Pluggable joint-type oracle. The default always abstains, leaving the
/// geometric score rule in charge.
pub trait TypePrior {
    fn predict(&self, features: &EdgeFeatures) -> TypePrediction;
}

/// The default prior: abstain on every edge.
#[derive(Debug, Default, Clone, Copy)]
pub struct AbstainPrior;

impl TypePrior for AbstainPrior {
    fn predict(&self, _features: &EdgeFeatures) -> TypePrediction {
        TypePrediction::Abstain
    }
}

/// Decide a joint type from the per-kind scores and an optional confident
/// prior: revolute wins when `s_rev > ζ·s_pri` and clears the floor, else
/// prismatic if it clears the floor, else fixed.
pub fn classify_joint(
    s_rev: f64,
    s_pri: f64,
    prediction: TypePrediction,
    zeta: f64,
    s_min: f64,
    p_conf: f64,
) -> JointType {
    if let TypePrediction::Distribution {
        fixed,
        revolute,
        prismatic,
    } = prediction
    {
        let (best_type, best_p) = [
            (JointType::Fixed, fixed),
            (JointType::Revolute, revolute),
            (JointType::Prismatic, prismatic),
        ]
        .into_iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
        if best_p >= p_conf {
            return best_type;
        }
    }
    if s_rev > zeta * s_pri && s_rev >= s_min {
        JointType::Revolute
    } else if s_pri >= s_min {
        JointType::Prismatic
    } else {
        JointType::Fixed
    }
}

/// The full per-edge estimate kept around for harmonization and diagnostics.
#[derive(Debug, Clone)]
pub struct EdgeJointEstimate {
    pub parent: usize,
    pub child: usize,
    pub revolute: Option<JointCandidate>,
    pub prismatic: Option<JointCandidate>,
    pub spec: JointSpec,
}

impl EdgeJointEstimate {
    /// The spec a given type would produce from the stored optimized
    /// candidates, if available.
    pub fn spec_for(&self, joint_type: JointType) -> Option<JointSpec> {
        match joint_type {
            JointType::Fixed => Some(JointSpec::fixed()),
            JointType::Revolute => self
                .revolute
                .as_ref()
                .map(|c| JointSpec::revolute(c.axis(), c.pivot_point(), c.score())),
            JointType::Prismatic => self
                .prismatic
                .as_ref()
                .map(|c| JointSpec::prismatic(c.axis(), c.score())),
        }
    }
}

/// Majority-vote type harmonization within symmetry clusters of child
/// parts: minority types are overridden with the majority and re-typed from
/// their already-optimized candidate of that kind; ties leave everything
/// unchanged. `estimates` holds one entry per tree edge.
pub fn harmonize_types(clusters: &SymmetryClusters, estimates: &mut [EdgeJointEstimate]) {
    for cluster in clusters.multi_clusters() {
        let member_edges: Vec<usize> = estimates
            .iter()
            .enumerate()
            .filter(|(_, e)| cluster.contains(&e.child))
            .map(|(i, _)| i)
            .collect();
        if member_edges.len() < 2 {
            continue;
        }
        let mut counts: std::collections::BTreeMap<JointType, usize> = Default::default();
        for &i in &member_edges {
            *counts.entry(estimates[i].spec.joint_type).or_insert(0) += 1;
        }
        let max_count = *counts.values().max().unwrap();
        let winners: Vec<JointType> = counts
            .iter()
            .filter(|(_, &c)| c == max_count)
            .map(|(&t, _)| t)
            .collect();
        if winners.len() != 1 {
            continue; // tie: keep original types
        }
        let majority = winners[0];
        for &i in &member_edges {
            if estimates[i].spec.joint_type != majority {
                if let Some(spec) = estimates[i].spec_for(majority) {
                    estimates[i].spec = spec;
                }
            }
        }
    }
}
