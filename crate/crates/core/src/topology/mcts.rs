//! UCT search over tree-growing actions, with a BFS-quality greedy rollout.

use std::collections::VecDeque;

use nalgebra::Point3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::reward::{reward, RewardBreakdown, RewardConfig};
use super::{
    apply_action, feasible_actions, KinematicTree, PartNode, SearchGraph, SearchState,
    TopologyError,
};
use crate::assembly::SymmetryClusters;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    /// UCT exploration constant `C`.
    pub exploration: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            exploration: std::f64::consts::SQRT_2,
            max_iterations: 2000,
            seed: 0,
        }
    }
}

struct Node {
    state: SearchState,
    actions: Vec<(usize, usize)>,
    children: Vec<Option<usize>>,
    untried: Vec<usize>,
    visits: f64,
    total_value: f64,
}

impl Node {
    fn new(state: SearchState, graph: &SearchGraph, clusters: &SymmetryClusters) -> Self {
        let actions = feasible_actions(&state, graph, clusters);
        let n = actions.len();
        Node {
            state,
            actions,
            children: vec![None; n],
            untried: (0..n).collect(),
            visits: 0.0,
            total_value: 0.0,
        }
    }
}

/// Per-edge surrogate score used by the greedy rollout: contact strength of
/// the added edge minus the hierarchy excess it introduces minus a depth
/// penalty for the child, all under the configured term weights.
fn immediate_score(
    state: &SearchState,
    action: (usize, usize),
    graph: &SearchGraph,
    parts: &[PartNode],
    cfg: &RewardConfig,
) -> f64 {
    let (u, v) = action;
    let strength = graph.strength(u, v).unwrap_or(0.0);
    let hier_excess = (parts[v].volume / (parts[u].volume + cfg.epsilon_hier) - 1.0).max(0.0);
    let child_depth = (state.depth[u] + 1) as f64;
    let [w_struct, _, w_contact, _, w_hier] = cfg.weights;
    w_contact * strength
        - w_hier * hier_excess
        - w_struct * child_depth * child_depth / state.visited.len() as f64
}

/// Greedily complete a partial state, always taking the feasible action with
/// the highest immediate score (ties to the lowest id pair).
fn greedy_rollout(
    mut state: SearchState,
    graph: &SearchGraph,
    parts: &[PartNode],
    clusters: &SymmetryClusters,
    cfg: &RewardConfig,
) -> Option<SearchState> {
    while !state.is_complete() {
        let actions = feasible_actions(&state, graph, clusters);
        let best = actions
            .iter()
            .map(|&a| (a, immediate_score(&state, a, graph, parts, cfg)))
            .fold(None::<((usize, usize), f64)>, |acc, (a, s)| match acc {
                None => Some((a, s)),
                Some((_, bs)) if s > bs => Some((a, s)),
                other => other,
            })?;
        state = apply_action(&state, best.0, graph).expect("greedy action feasible");
    }
    Some(state)
}

/// All nodes reachable from `base` over edges the search may use.
fn constrained_reachable(graph: &SearchGraph, base: usize, clusters: &SymmetryClusters) -> bool {
    let mut seen = vec![false; graph.n_nodes];
    seen[base] = true;
    let mut queue = VecDeque::from([base]);
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for v in graph.neighbors(u) {
            if !seen[v] && !clusters.same_multi_cluster(u, v) {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == graph.n_nodes
}

/// Monte Carlo tree search producing the best cached completed tree.
///
/// Selection follows UCT, untried actions are expanded before any UCT
/// comparison, rollouts complete greedily, and the terminal reward is
/// backed up along the path. Deterministic for a fixed seed.
pub fn mcts_search(
    graph: &SearchGraph,
    base: usize,
    parts: &[PartNode],
    clusters: &SymmetryClusters,
    reward_cfg: &RewardConfig,
    search_cfg: &SearchConfig,
) -> Result<(KinematicTree, RewardBreakdown), TopologyError> {
    let centroids: Vec<Point3<f64>> = parts.iter().map(|p| p.centroid).collect();
    if graph.n_nodes == 0 {
        return Err(TopologyError::EmptyGraph);
    }
    if !constrained_reachable(graph, base, clusters) {
        return Err(TopologyError::SearchFailed);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(search_cfg.seed);
    let mut arena: Vec<Node> = vec![Node::new(
        SearchState::initial(graph.n_nodes, base),
        graph,
        clusters,
    )];
    let mut best: Option<(f64, KinematicTree, RewardBreakdown)> = None;

    let consider =
        |state: &SearchState, best: &mut Option<(f64, KinematicTree, RewardBreakdown)>| -> f64 {
            let tree = state.to_tree(base, &centroids);
            let breakdown = reward(&tree, graph, parts, clusters, reward_cfg);
            if best.as_ref().is_none_or(|(b, _, _)| breakdown.total > *b) {
                *best = Some((breakdown.total, tree, breakdown));
            }
            breakdown.total
        };

    for _ in 0..search_cfg.max_iterations {
        // Selection / expansion.
        let mut path = vec![0usize];
        let mut node_idx = 0usize;
        loop {
            if arena[node_idx].state.is_complete() {
                break;
            }
            if !arena[node_idx].untried.is_empty() {
                // Expand one untried action, chosen uniformly at random.
                let pick = rng.random_range(0..arena[node_idx].untried.len());
                let action_idx = arena[node_idx].untried.swap_remove(pick);
                let action = arena[node_idx].actions[action_idx];
                let state = apply_action(&arena[node_idx].state, action, graph)
                    .expect("expansion action feasible");
                arena.push(Node::new(state, graph, clusters));
                let child_idx = arena.len() - 1;
                arena[node_idx].children[action_idx] = Some(child_idx);
                path.push(child_idx);
                break;
            }
            // UCT over expanded children; ties to the lowest action pair.
            let parent_visits = arena[node_idx].visits.max(1.0);
            let mut chosen: Option<(f64, (usize, usize), usize)> = None;
            for (ai, child) in arena[node_idx].children.iter().enumerate() {
                let Some(ci) = child else { continue };
                let child_node = &arena[*ci];
                let n = child_node.visits.max(1e-12);
                let uct = child_node.total_value / n
                    + search_cfg.exploration * (parent_visits.ln() / n).sqrt();
                let action = arena[node_idx].actions[ai];
                let better = match &chosen {
                    None => true,
                    Some((bu, ba, _)) => uct > *bu || (uct == *bu && action < *ba),
                };
                if better {
                    chosen = Some((uct, action, *ci));
                }
            }
            match chosen {
                Some((_, _, ci)) => {
                    node_idx = ci;
                    path.push(ci);
                }
                None => break, // dead end; cannot happen after the reachability check
            }
        }

        // Rollout from the frontier state and backup.
        let leaf_state = arena[*path.last().unwrap()].state.clone();
        let value = match greedy_rollout(leaf_state, graph, parts, clusters, reward_cfg) {
            Some(complete) => consider(&complete, &mut best),
            None => 0.0,
        };
        for &i in &path {
            arena[i].visits += 1.0;
            arena[i].total_value += value;
        }
    }

    match best {
        Some((_, tree, breakdown)) => Ok((tree, breakdown)),
        None => Err(TopologyError::SearchFailed),
    }
}
