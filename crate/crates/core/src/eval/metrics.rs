//! Joint-parameter and topology metrics: axis angle error, axis position
//! error, and tree edit distance, aggregated into a report.

use nalgebra::{Point3, Unit, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ted::tree_edit_distance;
use crate::joints::JointType;
use crate::topology::KinematicTree;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("axis is not unit length (norm {norm})")]
    NonUnitAxis { norm: f64 },
    #[error("part correspondence missing for evaluation")]
    CorrespondenceMissing,
}

/// Angular deviation in degrees between two unit axes, treating opposite
/// directions as equivalent: `arccos(|a·b|)`.
pub fn axis_angle_error(pred: &Vector3<f64>, gt: &Vector3<f64>) -> Result<f64, MetricsError> {
    for v in [pred, gt] {
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(MetricsError::NonUnitAxis { norm });
        }
    }
    Ok(pred.dot(gt).abs().clamp(0.0, 1.0).acos().to_degrees())
}

/// How pivot error is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositionErrorMode {
    /// Euclidean distance between pivots.
    Literal,
    /// Distance from the predicted pivot to the ground-truth axis line
    /// (pivot drift along the hinge is free).
    Line,
}

pub fn axis_position_error(
    pred_pivot: &Point3<f64>,
    gt_pivot: &Point3<f64>,
    gt_axis: &Unit<Vector3<f64>>,
    mode: PositionErrorMode,
) -> f64 {
    let d = pred_pivot - gt_pivot;
    match mode {
        PositionErrorMode::Literal => d.norm(),
        PositionErrorMode::Line => (d - gt_axis.into_inner() * d.dot(gt_axis)).norm(),
    }
}

/// One joint's errors within a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JointErrorRow {
    pub parent: usize,
    pub child: usize,
    pub predicted_type: Option<JointType>,
    pub ground_truth_type: Option<JointType>,
    pub type_correct: bool,
    /// Degrees in [0, 90]; worst case for unmatched movable joints.
    pub axis_angle_deg: Option<f64>,
    /// Assembly units; literal pivot distance (revolute only).
    pub position_error: Option<f64>,
    /// Distance to the ground-truth axis line (revolute only).
    pub position_error_line: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub joints: Vec<JointErrorRow>,
    pub tree_edit_distance: u64,
    pub mean_axis_angle_deg: Option<f64>,
    pub median_axis_angle_deg: Option<f64>,
    pub mean_position_error: Option<f64>,
    pub median_position_error: Option<f64>,
    pub mean_position_error_line: Option<f64>,
    pub type_accuracy: Option<f64>,
}

impl MetricsReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "parent,child,predicted_type,ground_truth_type,type_correct,axis_angle_deg,position_error,position_error_line\n",
        );
        let fmt_opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for j in &self.joints {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                j.parent,
                j.child,
                j.predicted_type.map(|t| t.to_string()).unwrap_or_default(),
                j.ground_truth_type
                    .map(|t| t.to_string())
                    .unwrap_or_default(),
                j.type_correct,
                fmt_opt(j.axis_angle_deg),
                fmt_opt(j.position_error),
                fmt_opt(j.position_error_line),
            ));
        }
        out.push_str(&format!(
            "summary,,,,,{},{},{}\n",
            fmt_opt(self.mean_axis_angle_deg),
            fmt_opt(self.mean_position_error),
            self.tree_edit_distance
        ));
        out
    }
}

/// A tree with typed joints and the diagonal used for worst-case penalties.
pub struct EvalSide<'a> {
    pub tree: &'a KinematicTree,
    pub diagonal: f64,
}

fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Compare a predicted tree against ground truth. Joints are matched by
/// (parent, child) pair over shared part ids; movable joints missing from
/// either side incur the worst-case penalties (90°, the assembly diagonal).
pub fn evaluate(prediction: &EvalSide, ground_truth: &EvalSide) -> MetricsReport {
    let pred = prediction.tree;
    let gt = ground_truth.tree;
    let diagonal = ground_truth.diagonal.max(prediction.diagonal);

    let mut rows = Vec::new();
    let mut angle_errors = Vec::new();
    let mut pos_errors = Vec::new();
    let mut pos_line_errors = Vec::new();
    let mut type_hits = 0usize;
    let mut type_total = 0usize;

    for ge in &gt.edges {
        let pe = pred
            .edges
            .iter()
            .find(|e| e.parent == ge.parent && e.child == ge.child);
        let gt_type = ge.joint.joint_type;
        let pred_type = pe.map(|e| e.joint.joint_type);
        let type_correct = pred_type == Some(gt_type);
        type_total += 1;
        type_hits += usize::from(type_correct);

        let mut row = JointErrorRow {
            parent: ge.parent,
            child: ge.child,
            predicted_type: pred_type,
            ground_truth_type: Some(gt_type),
            type_correct,
            axis_angle_deg: None,
            position_error: None,
            position_error_line: None,
        };

        if gt_type != JointType::Fixed {
            let gt_axis = ge.joint.axis_vector();
            let pred_axis = pe.and_then(|e| e.joint.axis_vector());
            let angle = match (pred_axis, gt_axis) {
                (Some(p), Some(g)) => {
                    axis_angle_error(&p.normalize(), &g.normalize()).unwrap_or(90.0)
                }
                _ => 90.0, // unmatched movable joint: worst case
            };
            row.axis_angle_deg = Some(angle);
            angle_errors.push(angle);

            if gt_type == JointType::Revolute {
                let gt_pivot = ge.joint.pivot_point();
                let pred_pivot = pe.and_then(|e| e.joint.pivot_point());
                let (lit, line) = match (pred_pivot, gt_pivot, gt_axis) {
                    (Some(p), Some(g), Some(a)) => {
                        let axis = Unit::new_normalize(a);
                        (
                            axis_position_error(&p, &g, &axis, PositionErrorMode::Literal),
                            axis_position_error(&p, &g, &axis, PositionErrorMode::Line),
                        )
                    }
                    _ => (diagonal, diagonal),
                };
                row.position_error = Some(lit);
                row.position_error_line = Some(line);
                pos_errors.push(lit);
                pos_line_errors.push(line);
            }
        }
        rows.push(row);
    }

    // Predicted movable joints with no ground-truth counterpart also incur
    // the worst-case penalty.
    for pe in &pred.edges {
        let matched = gt
            .edges
            .iter()
            .any(|e| e.parent == pe.parent && e.child == pe.child);
        if !matched && pe.joint.joint_type != JointType::Fixed {
            let is_rev = pe.joint.joint_type == JointType::Revolute;
            rows.push(JointErrorRow {
                parent: pe.parent,
                child: pe.child,
                predicted_type: Some(pe.joint.joint_type),
                ground_truth_type: None,
                type_correct: false,
                axis_angle_deg: Some(90.0),
                position_error: is_rev.then_some(diagonal),
                position_error_line: is_rev.then_some(diagonal),
            });
            angle_errors.push(90.0);
            if is_rev {
                pos_errors.push(diagonal);
                pos_line_errors.push(diagonal);
            }
        }
    }

    MetricsReport {
        tree_edit_distance: tree_edit_distance(pred, gt),
        mean_axis_angle_deg: mean(&angle_errors),
        median_axis_angle_deg: median(&angle_errors),
        mean_position_error: mean(&pos_errors),
        median_position_error: median(&pos_errors),
        mean_position_error_line: mean(&pos_line_errors),
        type_accuracy: if type_total > 0 {
            Some(type_hits as f64 / type_total as f64)
        } else {
            None
        },
        joints: rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joints::JointSpec;

    #[test]
    fn angle_error_cases() {
        let x = Vector3::x();
        assert_eq!(axis_angle_error(&x, &x).unwrap(), 0.0);
        // Opposite directions are equivalent.
        assert_eq!(axis_angle_error(&x, &(-x)).unwrap(), 0.0);
        let diag = Vector3::new(1.0, 1.0, 0.0).normalize();
        assert!((axis_angle_error(&x, &diag).unwrap() - 45.0).abs() < 1e-9);
        assert!(axis_angle_error(&Vector3::new(2.0, 0.0, 0.0), &x).is_err());
    }

    #[test]
    fn position_error_modes() {
        let gt_pivot = Point3::origin();
        let axis = Vector3::z_axis();

        let same = axis_position_error(&gt_pivot, &gt_pivot, &axis, PositionErrorMode::Literal);
        assert_eq!(same, 0.0);

        // Perpendicular displacement: both modes agree.
        let p = Point3::new(0.3, 0.0, 0.0);
        assert!(
            (axis_position_error(&p, &gt_pivot, &axis, PositionErrorMode::Literal) - 0.3).abs()
                < 1e-12
        );
        assert!(
            (axis_position_error(&p, &gt_pivot, &axis, PositionErrorMode::Line) - 0.3).abs()
                < 1e-12
        );

        // Displacement along the axis: literal 0.5, line 0.
        let p = Point3::new(0.0, 0.0, 0.5);
        assert!(
            (axis_position_error(&p, &gt_pivot, &axis, PositionErrorMode::Literal) - 0.5).abs()
                < 1e-12
        );
        assert!(axis_position_error(&p, &gt_pivot, &axis, PositionErrorMode::Line) < 1e-12);
    }

    fn typed_tree(edges: &[(usize, usize, JointSpec)], n: usize, root: usize) -> KinematicTree {
        let centroids: Vec<Point3<f64>> = (0..n).map(|i| Point3::new(i as f64, 0.0, 0.0)).collect();
        let pairs: Vec<(usize, usize)> = edges.iter().map(|(p, c, _)| (*p, *c)).collect();
        let mut tree = KinematicTree::from_pairs(root, n, &pairs, &centroids);
        for (p, c, spec) in edges {
            tree.edge_mut(*p, *c).unwrap().joint = spec.clone();
        }
        tree
    }

    #[test]
    fn perfect_prediction_all_zero() {
        let edges = vec![
            (
                0,
                1,
                JointSpec::revolute(Vector3::z_axis(), Point3::new(0.5, 0.0, 0.0), 0.9),
            ),
            (1, 2, JointSpec::prismatic(Vector3::x_axis(), 0.8)),
        ];
        let tree = typed_tree(&edges, 3, 0);
        let side = EvalSide {
            tree: &tree,
            diagonal: 2.0,
        };
        let report = evaluate(&side, &side);
        assert_eq!(report.tree_edit_distance, 0);
        assert_eq!(report.mean_axis_angle_deg, Some(0.0));
        assert_eq!(report.mean_position_error, Some(0.0));
        assert_eq!(report.type_accuracy, Some(1.0));
    }

    #[test]
    fn rotated_axis_contributes_its_angle() {
        let gt_edges = vec![
            (
                0,
                1,
                JointSpec::revolute(Vector3::z_axis(), Point3::origin(), 1.0),
            ),
            (
                1,
                2,
                JointSpec::revolute(Vector3::z_axis(), Point3::origin(), 1.0),
            ),
        ];
        let mut pred_edges = gt_edges.clone();
        let tilted = Unit::new_normalize(Vector3::new(
            30f64.to_radians().sin(),
            0.0,
            30f64.to_radians().cos(),
        ));
        pred_edges[0].2 = JointSpec::revolute(tilted, Point3::origin(), 1.0);

        let gt = typed_tree(&gt_edges, 3, 0);
        let pred = typed_tree(&pred_edges, 3, 0);
        let report = evaluate(
            &EvalSide {
                tree: &pred,
                diagonal: 2.0,
            },
            &EvalSide {
                tree: &gt,
                diagonal: 2.0,
            },
        );
        // Mean over 2 joints: (30 + 0)/2.
        assert!((report.mean_axis_angle_deg.unwrap() - 15.0).abs() < 1e-9);
    }

    #[test]
    fn unmatched_movable_joint_worst_case() {
        let gt_edges = vec![(
            0,
            1,
            JointSpec::revolute(Vector3::z_axis(), Point3::origin(), 1.0),
        )];
        let pred_edges = vec![(1, 0, JointSpec::fixed())]; // flipped orientation
        let gt = typed_tree(&gt_edges, 2, 0);
        let pred = typed_tree(&pred_edges, 2, 1);
        let report = evaluate(
            &EvalSide {
                tree: &pred,
                diagonal: 3.0,
            },
            &EvalSide {
                tree: &gt,
                diagonal: 3.0,
            },
        );
        assert_eq!(report.mean_axis_angle_deg, Some(90.0));
        assert_eq!(report.mean_position_error, Some(3.0));
        assert!(report.tree_edit_distance > 0);
    }
}
