//! The distance-weighted contact-aware virtual-linkage objective: score a
//! (pivot, axis) hypothesis by how well small virtual motions of the child
//! preserve contact with the parent SDF without penetrating it.

use nalgebra::{Point3, Unit, Vector3};
use serde::{Deserialize, Serialize};

use super::motion::{axis_jacobian, rodrigues_matrix};
use super::{JointCandidate, JointError, JointType};
use crate::sdf::SdfField;

/// Absolute (already scale-resolved) objective parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DwCavlConfig {
    /// Volumetric margin `m_vol`.
    pub m_vol: f64,
    /// Logistic sharpness `k` of the volumetric gate.
    pub k_sharp: f64,
    /// Contact band width `σ_c` of the distance weights.
    pub sigma_c: f64,
    pub epsilon_small: f64,
    pub lambda_cons: f64,
    pub lambda_coll: f64,
    /// Pivot anchor weight `λ_p` (revolute only).
    pub lambda_pivot: f64,
    /// Virtual revolute angles (radians).
    pub theta_rev: Vec<f64>,
    /// Virtual prismatic displacements (absolute units).
    pub theta_pri: Vec<f64>,
    /// When false, `w_dist ≡ 1`: the anchor-free ablation together with
    /// `lambda_pivot = 0`.
    pub distance_weighting: bool,
    pub n_random_axes: usize,
    pub n_slide: usize,
    pub slide_step: f64,
    pub top_k: usize,
    /// Revolute/prismatic decision ratio `ζ`.
    pub zeta: f64,
    /// Minimum score for a movable classification.
    pub s_min: f64,
    /// Prior confidence needed to preempt the geometric rule.
    pub p_conf: f64,
    pub coarse_samples: usize,
    pub opt_iterations: usize,
    pub step_axis: f64,
    pub step_pivot: f64,
    pub candidate_seed: u64,
}

impl DwCavlConfig {
    /// Defaults resolved against an assembly diagonal. The loss weights are
    /// `1/(2σ_c²)` so that an SDF excess of one contact-band width costs
    /// O(1) regardless of assembly scale, keeping the ζ ratio test
    /// meaningful at any unit choice.
    pub fn for_diagonal(diagonal: f64) -> Self {
        let d = diagonal.max(1e-9);
        let sigma_c = 0.01 * d;
        let lambda = 1.0 / (2.0 * sigma_c * sigma_c);
        DwCavlConfig {
            m_vol: 0.005 * d,
            k_sharp: 200.0 / d,
            sigma_c,
            epsilon_small: 1e-9,
            lambda_cons: lambda,
            lambda_coll: lambda,
            lambda_pivot: 0.1,
            theta_rev: [-20.0f64, -10.0, -5.0, 5.0, 10.0, 20.0]
                .iter()
                .map(|deg| deg.to_radians())
                .collect(),
            theta_pri: vec![-0.05 * d, -0.02 * d, 0.02 * d, 0.05 * d],
            distance_weighting: true,
            n_random_axes: 4,
            n_slide: 2,
            slide_step: 0.02 * d,
            top_k: 5,
            zeta: 1.1,
            s_min: 0.25,
            p_conf: 0.8,
            coarse_samples: 256,
            opt_iterations: 120,
            step_axis: 0.05,
            step_pivot: 0.02 * d,
            candidate_seed: 0,
        }
    }

    /// Switch off the contact anchor: no pivot regularizer, no distance
    /// weighting.
    pub fn without_anchor(mut self) -> Self {
        self.lambda_pivot = 0.0;
        self.distance_weighting = false;
        self
    }

    fn deltas(&self, kind: JointType) -> &[f64] {
        match kind {
            JointType::Prismatic => &self.theta_pri,
            _ => &self.theta_rev,
        }
    }
}

/// Loss breakdown for one virtual motion.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeltaLoss {
    pub delta: f64,
    pub cons: f64,
    pub coll: f64,
}

/// Everything fixed per edge while candidates are evaluated: the child
/// sample points, their rest SDF values under the parent, and the
/// volumetric/distance weights (which depend on rest values only).
pub struct ObjectiveContext<'a> {
    pub parent_sdf: &'a SdfField,
    pub child_points: Vec<Point3<f64>>,
    pub contact_centroid: Point3<f64>,
    s0: Vec<f64>,
    w: Vec<f64>,
    w_sum: f64,
    w_tilde: Vec<f64>,
    w_tilde_sum: f64,
}

impl<'a> ObjectiveContext<'a> {
    pub fn new(
        parent_sdf: &'a SdfField,
        child_points: Vec<Point3<f64>>,
        contact_centroid: Point3<f64>,
        cfg: &DwCavlConfig,
    ) -> Self {
        let s0: Vec<f64> = child_points.iter().map(|p| parent_sdf.query(p)).collect();
        let sigmoid = |z: f64| 1.0 / (1.0 + (-z).exp());
        let w: Vec<f64> = s0
            .iter()
            .map(|&s| {
                let w_vol = sigmoid(-cfg.k_sharp * (s - cfg.m_vol));
                let w_dist = if cfg.distance_weighting {
                    (-s * s / (2.0 * cfg.sigma_c * cfg.sigma_c)).exp()
                } else {
                    1.0
                };
                w_vol * w_dist
            })
            .collect();
        let w_tilde: Vec<f64> = s0
            .iter()
            .map(|&s| sigmoid(cfg.k_sharp * (s - cfg.m_vol)))
            .collect();
        let w_sum = w.iter().sum();
        let w_tilde_sum = w_tilde.iter().sum();
        ObjectiveContext {
            parent_sdf,
            child_points,
            contact_centroid,
            s0,
            w,
            w_sum,
            w_tilde,
            w_tilde_sum,
        }
    }

    /// A context over the first `n` points; used for coarse ranking.
    pub fn subsampled(&self, n: usize, cfg: &DwCavlConfig) -> ObjectiveContext<'a> {
        let n = n.min(self.child_points.len());
        ObjectiveContext::new(
            self.parent_sdf,
            self.child_points[..n].to_vec(),
            self.contact_centroid,
            cfg,
        )
    }

    pub fn rest_values(&self) -> &[f64] {
        &self.s0
    }

    fn transformed(
        &self,
        kind: JointType,
        pivot: &Point3<f64>,
        axis: &Unit<Vector3<f64>>,
        delta: f64,
    ) -> Vec<Point3<f64>> {
        match kind {
            JointType::Prismatic => {
                let t = axis.into_inner() * delta;
                self.child_points.iter().map(|x| x + t).collect()
            }
            _ => {
                let rot = rodrigues_matrix(axis, delta);
                self.child_points
                    .iter()
                    .map(|x| pivot + rot * (x - pivot))
                    .collect()
            }
        }
    }
}

/// Contact-consistency and collision losses for one virtual motion of a
/// candidate: weighted squared hinge on separation past the margin, and
/// inverse-weighted squared hinge on penetration past it.
pub fn dwcavl_losses(
    ctx: &ObjectiveContext,
    kind: JointType,
    pivot: &Point3<f64>,
    axis: &Unit<Vector3<f64>>,
    delta: f64,
    cfg: &DwCavlConfig,
) -> DeltaLoss {
    let moved = ctx.transformed(kind, pivot, axis, delta);
    let mut cons_num = 0.0;
    let mut coll_num = 0.0;
    for (i, y) in moved.iter().enumerate() {
        let s = ctx.parent_sdf.query(y);
        let h = (s - cfg.m_vol).max(0.0);
        cons_num += ctx.w[i] * h * h;
        let q = (-s - cfg.m_vol).max(0.0);
        coll_num += ctx.w_tilde[i] * q * q;
    }
    DeltaLoss {
        delta,
        cons: cons_num / (ctx.w_sum + cfg.epsilon_small),
        coll: coll_num / (ctx.w_tilde_sum + cfg.epsilon_small),
    }
}

/// Total objective `𝒥`: virtual-motion losses averaged over the motion set
/// plus the pivot anchor (revolute only).
pub fn total_objective(
    ctx: &ObjectiveContext,
    kind: JointType,
    pivot: &Point3<f64>,
    axis: &Unit<Vector3<f64>>,
    cfg: &DwCavlConfig,
) -> (f64, Vec<DeltaLoss>, f64) {
    let deltas = cfg.deltas(kind);
    let mut breakdown = Vec::with_capacity(deltas.len());
    let mut total = 0.0;
    for &delta in deltas {
        let loss = dwcavl_losses(ctx, kind, pivot, axis, delta, cfg);
        total += cfg.lambda_cons * loss.cons + cfg.lambda_coll * loss.coll;
        breakdown.push(loss);
    }
    total /= deltas.len().max(1) as f64;
    let reg = if kind == JointType::Revolute {
        cfg.lambda_pivot * (pivot - ctx.contact_centroid).norm_squared()
    } else {
        0.0
    };
    (total + reg, breakdown, reg)
}

/// Analytic gradient of the objective with respect to the pivot and the raw
/// (unnormalized) axis, chained through the rigid motion, the SDF gradient,
/// and the axis-normalization Jacobian.
fn objective_gradient(
    ctx: &ObjectiveContext,
    kind: JointType,
    pivot: &Point3<f64>,
    raw_axis: &Vector3<f64>,
    cfg: &DwCavlConfig,
) -> Result<(Vector3<f64>, Vector3<f64>), JointError> {
    let axis_jac = axis_jacobian(raw_axis)?;
    let axis = Unit::new_normalize(*raw_axis);
    let u = axis.into_inner();
    let deltas = cfg.deltas(kind);

    let mut grad_pivot = Vector3::zeros();
    let mut grad_unit_axis = Vector3::zeros();

    for &delta in deltas {
        match kind {
            JointType::Prismatic => {
                let t = u * delta;
                let mut d_axis = Vector3::zeros();
                for (i, x) in ctx.child_points.iter().enumerate() {
                    let y = x + t;
                    let s = ctx.parent_sdf.query(&y);
                    let dj_ds = loss_slope(ctx, i, s, cfg);
                    if dj_ds == 0.0 {
                        continue;
                    }
                    let d = ctx.parent_sdf.gradient(&y) * dj_ds;
                    d_axis += d * delta;
                }
                grad_unit_axis += d_axis;
            }
            _ => {
                let rot = rodrigues_matrix(&axis, delta);
                let (sin_d, cos_d) = delta.sin_cos();
                let mut d_pivot = Vector3::zeros();
                let mut d_axis = Vector3::zeros();
                for (i, x) in ctx.child_points.iter().enumerate() {
                    let v = x - pivot;
                    let y = pivot + rot * v;
                    let s = ctx.parent_sdf.query(&y);
                    let dj_ds = loss_slope(ctx, i, s, cfg);
                    if dj_ds == 0.0 {
                        continue;
                    }
                    let d = ctx.parent_sdf.gradient(&y) * dj_ds;
                    // ∂y/∂p = I − R
                    d_pivot += d - rot.transpose() * d;
                    // ∂y/∂u contracted with d:
                    // sinθ (v × d) + (1−cosθ)((u·d) v + (u·v) d)
                    d_axis += v.cross(&d) * sin_d + (v * u.dot(&d) + d * u.dot(&v)) * (1.0 - cos_d);
                }
                grad_pivot += d_pivot;
                grad_unit_axis += d_axis;
            }
        }
    }

    let scale = 1.0 / deltas.len().max(1) as f64;
    grad_pivot *= scale;
    grad_unit_axis *= scale;

    if kind == JointType::Revolute {
        grad_pivot += (pivot - ctx.contact_centroid) * 2.0 * cfg.lambda_pivot;
    } else {
        grad_pivot = Vector3::zeros();
    }
    // Chain through u(a): the Jacobian is symmetric.
    let grad_raw_axis = axis_jac * grad_unit_axis;
    Ok((grad_pivot, grad_raw_axis))
}

/// d(λ_c·cons + λ_coll·coll)/ds for one moved point.
#[inline]
fn loss_slope(ctx: &ObjectiveContext, i: usize, s: f64, cfg: &DwCavlConfig) -> f64 {
    let mut slope = 0.0;
    let h = s - cfg.m_vol;
    if h > 0.0 {
        slope += cfg.lambda_cons * 2.0 * ctx.w[i] * h / (ctx.w_sum + cfg.epsilon_small);
    }
    let q = -s - cfg.m_vol;
    if q > 0.0 {
        slope -= cfg.lambda_coll * 2.0 * ctx.w_tilde[i] * q / (ctx.w_tilde_sum + cfg.epsilon_small);
    }
    slope
}

/// First-order descent on (pivot, raw axis) — raw axis only for prismatic —
/// with normalized block steps and backtracking halving. The objective
/// never increases.
pub fn optimize_candidate(
    ctx: &ObjectiveContext,
    candidate: &JointCandidate,
    cfg: &DwCavlConfig,
) -> Result<JointCandidate, JointError> {
    let kind = candidate.kind;
    let mut pivot = candidate.pivot_point();
    let mut raw = candidate.raw_axis_vector();
    if raw.norm() <= 1e-12 {
        return Err(JointError::NonFinite);
    }
    raw = raw.normalize();

    let eval = |pivot: &Point3<f64>, raw: &Vector3<f64>| -> Result<f64, JointError> {
        let axis = Unit::new_normalize(*raw);
        let (j, _, _) = total_objective(ctx, kind, pivot, &axis, cfg);
        if j.is_finite() {
            Ok(j)
        } else {
            Err(JointError::NonFinite)
        }
    };

    let mut current = eval(&pivot, &raw)?;
    let initial = current;

    for _ in 0..cfg.opt_iterations {
        let (gp, ga) = objective_gradient(ctx, kind, &pivot, &raw, cfg)?;
        let gp_norm = gp.norm();
        let ga_norm = ga.norm();
        if gp_norm < 1e-14 && ga_norm < 1e-14 {
            break;
        }
        let dir_p = if gp_norm > 0.0 {
            gp / gp_norm
        } else {
            Vector3::zeros()
        };
        let dir_a = if ga_norm > 0.0 {
            ga / ga_norm
        } else {
            Vector3::zeros()
        };

        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..8 {
            let trial_pivot = if kind == JointType::Revolute {
                pivot - dir_p * (alpha * cfg.step_pivot)
            } else {
                pivot
            };
            let trial_raw_unnorm = raw - dir_a * (alpha * cfg.step_axis);
            if trial_raw_unnorm.norm() <= 1e-9 {
                alpha *= 0.5;
                continue;
            }
            let trial_raw = trial_raw_unnorm.normalize();
            let j = eval(&trial_pivot, &trial_raw)?;
            if j < current {
                pivot = trial_pivot;
                raw = trial_raw;
                current = j;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    debug_assert!(current <= initial + 1e-12);
    let axis = Unit::new_normalize(raw);
    let (j, breakdown, reg) = total_objective(ctx, kind, &pivot, &axis, cfg);
    let mut out = JointCandidate::new(kind, pivot, raw);
    out.objective = j;
    out.breakdown = breakdown;
    out.pivot_regularizer = reg;
    Ok(out)
}

/// Best optimized candidate per joint kind, with scores `1/(1+𝒥)`.
#[derive(Debug, Clone)]
pub struct KindScores {
    pub revolute: Option<JointCandidate>,
    pub prismatic: Option<JointCandidate>,
}

impl KindScores {
    pub fn s_rev(&self) -> f64 {
        self.revolute.as_ref().map_or(0.0, |c| c.score())
    }

    pub fn s_pri(&self) -> f64 {
        self.prismatic.as_ref().map_or(0.0, |c| c.score())
    }
}

/// Rank all candidates coarsely on a subsample, refine the top-K per kind on
/// the full point set, and keep the best of each kind. Non-finite refinement
/// results are discarded.
pub fn rank_and_refine(
    candidates: &[JointCandidate],
    ctx: &ObjectiveContext,
    cfg: &DwCavlConfig,
) -> Result<KindScores, JointError> {
    let coarse_ctx = ctx.subsampled(cfg.coarse_samples, cfg);

    let mut best_per_kind: Vec<Option<JointCandidate>> = vec![None, None];
    for (slot, kind) in [
        (0usize, JointType::Revolute),
        (1usize, JointType::Prismatic),
    ] {
        let mut scored: Vec<(f64, usize)> = candidates
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == kind)
            .map(|(i, c)| {
                let (j, _, _) =
                    total_objective(&coarse_ctx, kind, &c.pivot_point(), &c.axis(), cfg);
                (j, i)
            })
            .collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

        let mut best: Option<(f64, usize, JointCandidate)> = None;
        for &(_, idx) in scored.iter().take(cfg.top_k.max(1)) {
            match optimize_candidate(ctx, &candidates[idx], cfg) {
                Ok(opt) => {
                    let better = match &best {
                        None => true,
                        Some((bj, bi, _)) => {
                            opt.objective < *bj || (opt.objective == *bj && idx < *bi)
                        }
                    };
                    if better {
                        best = Some((opt.objective, idx, opt));
                    }
                }
                Err(JointError::NonFinite) => continue,
                Err(e) => return Err(e),
            }
        }
        best_per_kind[slot] = best.map(|(_, _, c)| c);
    }

    Ok(KindScores {
        revolute: best_per_kind[0].take(),
        prismatic: best_per_kind[1].take(),
    })
}
