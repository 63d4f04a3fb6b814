//! Property tests for the invariants that hold across random inputs:
//! Chamfer symmetry and rigid invariance, rotation isometry, score
//! monotonicity, reward relabeling invariance, and metric symmetries.

use nalgebra::{Point3, Rotation3, Unit, Vector3};
use proptest::prelude::*;

use kinetree::assembly::{chamfer_distance, SymmetryClusters};
use kinetree::eval::{axis_angle_error, evaluate, EvalSide};
use kinetree::joints::{rotate_points, JointSpec};
use kinetree::topology::{reward, KinematicTree, PartNode, RewardConfig, SearchEdge, SearchGraph};

fn point_strategy() -> impl Strategy<Value = Point3<f64>> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

fn cloud_strategy(max: usize) -> impl Strategy<Value = Vec<Point3<f64>>> {
    proptest::collection::vec(point_strategy(), 1..max)
}

fn unit_strategy() -> impl Strategy<Value = Unit<Vector3<f64>>> {
    (-1.0..1.0f64, -1.0..1.0f64, 0.1..1.0f64)
        .prop_map(|(x, y, z)| Unit::new_normalize(Vector3::new(x, y, z)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chamfer_is_symmetric(a in cloud_strategy(24), b in cloud_strategy(24)) {
        let ab = chamfer_distance(&a, &b).unwrap();
        let ba = chamfer_distance(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn chamfer_is_rigid_invariant(
        a in cloud_strategy(24),
        b in cloud_strategy(24),
        axis in unit_strategy(),
        angle in -3.0..3.0f64,
        shift in point_strategy(),
    ) {
        let rot = Rotation3::from_axis_angle(&axis, angle);
        let transform = |pts: &[Point3<f64>]| -> Vec<Point3<f64>> {
            pts.iter().map(|p| rot * p + shift.coords).collect()
        };
        let before = chamfer_distance(&a, &b).unwrap();
        let after = chamfer_distance(&transform(&a), &transform(&b)).unwrap();
        prop_assert!((before - after).abs() <= 1e-9 * before.max(1.0));
    }

    #[test]
    fn rotation_preserves_pairwise_distances(
        pts in cloud_strategy(16),
        axis in unit_strategy(),
        angle in -3.0..3.0f64,
        pivot in point_strategy(),
    ) {
        let moved = rotate_points(&pts, &pivot, &axis, angle);
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let before = (pts[i] - pts[j]).norm();
                let after = (moved[i] - moved[j]).norm();
                prop_assert!((before - after).abs() <= 1e-9 * before.max(1.0));
            }
        }
    }

    #[test]
    fn candidate_score_is_monotone_in_objective(j1 in 0.0..100.0f64, j2 in 0.0..100.0f64) {
        let score = |j: f64| 1.0 / (1.0 + j);
        prop_assert!(score(j1) > 0.0 && score(j1) <= 1.0);
        if j1 < j2 {
            prop_assert!(score(j1) > score(j2));
        }
    }

    #[test]
    fn axis_angle_error_is_symmetric_and_sign_invariant(
        a in unit_strategy(),
        b in unit_strategy(),
    ) {
        let av = a.into_inner();
        let bv = b.into_inner();
        let e1 = axis_angle_error(&av, &bv).unwrap();
        let e2 = axis_angle_error(&bv, &av).unwrap();
        let e3 = axis_angle_error(&(-av), &bv).unwrap();
        let e4 = axis_angle_error(&av, &(-bv)).unwrap();
        prop_assert!((e1 - e2).abs() < 1e-9);
        prop_assert!((e1 - e3).abs() < 1e-9);
        prop_assert!((e1 - e4).abs() < 1e-9);
        prop_assert!((0.0..=90.0 + 1e-9).contains(&e1));
    }
}

/// Relabeling invariance of the full reward: permuting part ids (with all
/// node data carried along) leaves the reward unchanged up to float
/// reordering noise.
#[test]
fn reward_is_relabeling_invariant() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4242);
    for _ in 0..50 {
        let n = rng.random_range(3..=7usize);
        let parts: Vec<PartNode> = (0..n)
            .map(|_| PartNode {
                centroid: Point3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ),
                volume: rng.random_range(0.1..2.0),
            })
            .collect();
        // Random tree rooted at 0 plus one extra graph edge.
        let pairs: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
        let edges: Vec<SearchEdge> = pairs
            .iter()
            .map(|&(u, v)| SearchEdge {
                u,
                v,
                strength: rng.random_range(0.1..1.0),
                is_virtual: false,
            })
            .collect();
        let graph = SearchGraph::from_edge_list(n, edges.clone());
        let clusters = SymmetryClusters::singletons(n);
        let centroids: Vec<Point3<f64>> = parts.iter().map(|p| p.centroid).collect();
        let tree = KinematicTree::from_pairs(0, n, &pairs, &centroids);
        let cfg = RewardConfig::default();
        let before = reward(&tree, &graph, &parts, &clusters, &cfg);
        // All five terms stay strictly positive on valid trees.
        for (name, value) in [
            ("struct", before.structural),
            ("static", before.static_support),
            ("contact", before.contact),
            ("sym", before.symmetry),
            ("hier", before.hierarchy),
        ] {
            assert!(value > 0.0, "{name} term not positive: {value}");
        }

        // Random permutation of ids.
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        let parts_p: Vec<PartNode> = {
            let mut v = vec![parts[0]; n];
            for (old, &new) in perm.iter().enumerate() {
                v[new] = parts[old];
            }
            v
        };
        let pairs_p: Vec<(usize, usize)> = pairs.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let edges_p: Vec<SearchEdge> = edges
            .iter()
            .map(|e| SearchEdge {
                u: perm[e.u],
                v: perm[e.v],
                strength: e.strength,
                is_virtual: e.is_virtual,
            })
            .collect();
        let graph_p = SearchGraph::from_edge_list(n, edges_p);
        let centroids_p: Vec<Point3<f64>> = parts_p.iter().map(|p| p.centroid).collect();
        let tree_p = KinematicTree::from_pairs(perm[0], n, &pairs_p, &centroids_p);
        let after = reward(
            &tree_p,
            &graph_p,
            &parts_p,
            &SymmetryClusters::singletons(n),
            &cfg,
        );

        assert!(
            (before.total - after.total).abs() <= 1e-12 * before.total.abs().max(1.0),
            "reward changed under relabeling: {} vs {}",
            before.total,
            after.total
        );
    }
}

/// All metrics are invariant to one global rigid transform applied to both
/// prediction and ground truth (angles exactly, positions within 1e-9).
#[test]
fn metrics_are_rigid_invariant() {
    let rot = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::new(1.0, 2.0, 0.5)), 0.83);
    let shift = Vector3::new(0.4, -1.2, 2.0);
    let transform_spec = |spec: &JointSpec| -> JointSpec {
        let mut out = spec.clone();
        if let Some(a) = spec.axis_vector() {
            let r = rot * a;
            out.axis = Some([r.x, r.y, r.z]);
        }
        if let Some(p) = spec.pivot_point() {
            let moved = rot * p + shift;
            out.pivot = Some([moved.x, moved.y, moved.z]);
        }
        out
    };

    let centroids: Vec<Point3<f64>> = (0..4).map(|i| Point3::new(i as f64, 0.3, 0.0)).collect();
    let make = |specs: &[JointSpec], transform: bool| -> KinematicTree {
        let cs: Vec<Point3<f64>> = if transform {
            centroids.iter().map(|c| rot * c + shift).collect()
        } else {
            centroids.clone()
        };
        let mut tree = KinematicTree::from_pairs(0, 4, &[(0, 1), (1, 2), (1, 3)], &cs);
        for (edge, spec) in tree.edges.iter_mut().zip(specs) {
            edge.joint = if transform {
                transform_spec(spec)
            } else {
                spec.clone()
            };
        }
        tree
    };

    let gt_specs = vec![
        JointSpec::revolute(Vector3::z_axis(), Point3::new(0.5, 0.0, 0.0), 1.0),
        JointSpec::prismatic(Vector3::x_axis(), 1.0),
        JointSpec::fixed(),
    ];
    let pred_specs = vec![
        JointSpec::revolute(
            Unit::new_normalize(Vector3::new(0.1, 0.0, 1.0)),
            Point3::new(0.55, 0.1, 0.0),
            0.9,
        ),
        JointSpec::prismatic(Unit::new_normalize(Vector3::new(1.0, 0.2, 0.0)), 0.8),
        JointSpec::fixed(),
    ];

    let report = |transform: bool| {
        evaluate(
            &EvalSide {
                tree: &make(&pred_specs, transform),
                diagonal: 3.0,
            },
            &EvalSide {
                tree: &make(&gt_specs, transform),
                diagonal: 3.0,
            },
        )
    };
    let a = report(false);
    let b = report(true);
    assert_eq!(a.tree_edit_distance, b.tree_edit_distance);
    let angle_a = a.mean_axis_angle_deg.unwrap();
    let angle_b = b.mean_axis_angle_deg.unwrap();
    assert!((angle_a - angle_b).abs() < 1e-9, "{angle_a} vs {angle_b}");
    let pos_a = a.mean_position_error.unwrap();
    let pos_b = b.mean_position_error.unwrap();
    assert!((pos_a - pos_b).abs() < 1e-9, "{pos_a} vs {pos_b}");
}
