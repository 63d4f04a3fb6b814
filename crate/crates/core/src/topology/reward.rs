//! The five-term terminal reward scored on completed kinematic trees.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{KinematicTree, PartNode, SearchGraph};
use crate::assembly::SymmetryClusters;

/// Reciprocal guard: every `1/x` reward uses `1/max(x, GUARD)`.
const GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardConfig {
    /// Term weights: structure, static support, contact, symmetry, hierarchy.
    pub weights: [f64; 5],
    /// Preferred out-degree `k` in the structure term.
    pub preferred_out_degree: f64,
    /// Edge-count penalty `λ` in the structure term.
    pub edge_penalty: f64,
    /// Mass density `ρ`: part mass is `ρ · volume`.
    pub density: f64,
    pub gravity: f64,
    /// Division guard in the symmetry term's shared-parent ratio.
    pub epsilon_sym: f64,
    /// Division guard in the hierarchy term's volume ratio.
    pub epsilon_hier: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            weights: [1.0; 5],
            preferred_out_degree: 2.0,
            edge_penalty: 0.1,
            density: 1.0,
            gravity: 9.81,
            epsilon_sym: 1e-6,
            epsilon_hier: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub structural: f64,
    pub static_support: f64,
    pub contact: f64,
    pub symmetry: f64,
    pub hierarchy: f64,
    pub total: f64,
}

/// Structure term: penalizes deep trees, out-degrees away from `k`, and
/// edge count: `1 / (mean(d²) + mean((deg⁺−k)²) + λ|E|)`.
pub fn reward_struct(tree: &KinematicTree, cfg: &RewardConfig) -> f64 {
    let n = tree.n_nodes as f64;
    let depths = tree.depths();
    let mean_d2: f64 = depths.iter().map(|&d| (d as f64).powi(2)).sum::<f64>() / n;
    let mean_deg: f64 = tree
        .out_degrees()
        .iter()
        .map(|&d| (d as f64 - cfg.preferred_out_degree).powi(2))
        .sum::<f64>()
        / n;
    let denom = mean_d2 + mean_deg + cfg.edge_penalty * tree.edges.len() as f64;
    1.0 / denom.max(GUARD)
}

/// Magnitude of the gravitational torque of a subtree about its node:
/// `‖lever × (M·g·ẑ⁻)‖` with `ẑ⁻ = (0,0,−1)`.
pub fn gravitational_torque(lever: &Vector3<f64>, subtree_mass: f64, gravity: f64) -> f64 {
    lever
        .cross(&Vector3::new(0.0, 0.0, -subtree_mass * gravity))
        .norm()
}

/// Per-node gravitational torques for all non-root nodes, in ascending node
/// id order. Subtree masses and centers follow the usual bottom-up
/// recursion with `m_i = ρ·v_i`.
pub fn subtree_torques(tree: &KinematicTree, parts: &[PartNode], cfg: &RewardConfig) -> Vec<f64> {
    let n = tree.n_nodes;
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &tree.edges {
        children[e.parent].push(e.child);
    }

    // Post-order accumulation of subtree mass and center.
    let mut mass = vec![0.0f64; n];
    let mut center = vec![Vector3::zeros(); n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![(tree.root, false)];
    while let Some((u, expanded)) = stack.pop() {
        if expanded {
            order.push(u);
        } else {
            stack.push((u, true));
            for &c in &children[u] {
                stack.push((c, false));
            }
        }
    }
    for &u in &order {
        let m_u = cfg.density * parts[u].volume;
        let mut m = m_u;
        let mut weighted = parts[u].centroid.coords * m_u;
        for &c in &children[u] {
            m += mass[c];
            weighted += center[c] * mass[c];
        }
        mass[u] = m;
        center[u] = weighted / m.max(GUARD);
    }

    (0..n)
        .filter(|&i| i != tree.root)
        .map(|i| {
            let lever = center[i] - parts[i].centroid.coords;
            gravitational_torque(&lever, mass[i], cfg.gravity)
        })
        .collect()
}

/// Fold per-node torques into the static-support reward `1/(1 + τ/σ_τ)`, with
/// the MAD-based normalizer: `σ_τ = 1.4826 · MAD` floored at 1e-9, falling
/// back to the total torque when fewer than two torques are nonzero.
pub fn static_reward_from_torques(torques: &[f64]) -> f64 {
    let total: f64 = torques.iter().sum();
    let nonzero = torques.iter().filter(|&&t| t > 0.0).count();
    let sigma = if nonzero < 2 {
        total.max(GUARD)
    } else {
        let median = |xs: &mut Vec<f64>| -> f64 {
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = xs.len();
            if n % 2 == 1 {
                xs[n / 2]
            } else {
                0.5 * (xs[n / 2 - 1] + xs[n / 2])
            }
        };
        let mut xs = torques.to_vec();
        let med = median(&mut xs);
        let mut dev: Vec<f64> = torques.iter().map(|t| (t - med).abs()).collect();
        (1.4826 * median(&mut dev)).max(GUARD)
    };
    1.0 / (1.0 + total / sigma)
}

/// Static-support term over a completed tree.
pub fn reward_static(tree: &KinematicTree, parts: &[PartNode], cfg: &RewardConfig) -> f64 {
    static_reward_from_torques(&subtree_torques(tree, parts, cfg))
}

/// Contact term: mean contact strength over tree edges; virtual edges and
/// edges missing from the graph score zero.
pub fn reward_contact(tree: &KinematicTree, graph: &SearchGraph) -> f64 {
    if tree.edges.is_empty() {
        return 0.0;
    }
    let total: f64 = tree
        .edges
        .iter()
        .map(|e| graph.strength(e.parent, e.child).unwrap_or(0.0))
        .sum();
    total / tree.edges.len() as f64
}

/// Symmetry term: within each multi-member cluster, prefer equal depths and
/// a shared parent; neutral (1) when no multi-member cluster exists.
pub fn reward_sym(tree: &KinematicTree, clusters: &SymmetryClusters, cfg: &RewardConfig) -> f64 {
    let depths = tree.depths();
    let mut scores = Vec::new();
    for cluster in clusters.multi_clusters() {
        let ds: Vec<f64> = cluster.iter().map(|&i| depths[i] as f64).collect();
        let mean = ds.iter().sum::<f64>() / ds.len() as f64;
        let var = ds.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / ds.len() as f64;

        let mut parents: Vec<usize> = cluster
            .iter()
            .filter(|&&i| i != tree.root)
            .filter_map(|&i| tree.parent_of(i))
            .collect();
        parents.sort_unstable();
        parents.dedup();
        let shared =
            1.0 - (parents.len() as f64 - 1.0) / (cluster.len() as f64 - 1.0 + cfg.epsilon_sym);

        scores.push(1.0 / (1.0 + var).max(GUARD) + shared);
    }
    if scores.is_empty() {
        1.0
    } else {
        scores.iter().sum::<f64>() / scores.len() as f64
    }
}

/// Hierarchy term: discourage children much larger than their parents:
/// `1 / (1 + Σ max(0, v_child/(v_parent+ε) − 1))`.
pub fn reward_hier(tree: &KinematicTree, parts: &[PartNode], cfg: &RewardConfig) -> f64 {
    let penalty: f64 = tree
        .edges
        .iter()
        .map(|e| {
            (parts[e.child].volume / (parts[e.parent].volume + cfg.epsilon_hier) - 1.0).max(0.0)
        })
        .sum();
    1.0 / (1.0 + penalty).max(GUARD)
}

/// Weighted sum of the five terms.
pub fn reward(
    tree: &KinematicTree,
    graph: &SearchGraph,
    parts: &[PartNode],
    clusters: &SymmetryClusters,
    cfg: &RewardConfig,
) -> RewardBreakdown {
    let structural = reward_struct(tree, cfg);
    let static_support = reward_static(tree, parts, cfg);
    let contact = reward_contact(tree, graph);
    let symmetry = reward_sym(tree, clusters, cfg);
    let hierarchy = reward_hier(tree, parts, cfg);
    let [w_struct, w_static, w_contact, w_sym, w_hier] = cfg.weights;
    RewardBreakdown {
        structural,
        static_support,
        contact,
        symmetry,
        hierarchy,
        total: w_struct * structural
            + w_static * static_support
            + w_contact * contact
            + w_sym * symmetry
            + w_hier * hierarchy,
    }
}
