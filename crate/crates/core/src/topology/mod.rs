//! Kinematic topology inference: orienting the contact graph into a rooted
//! tree by BFS warm start and Monte Carlo tree search.

mod mcts;
mod reward;

pub use mcts::{mcts_search, SearchConfig};
pub use reward::{
    gravitational_torque, reward, reward_contact, reward_hier, reward_static, reward_struct,
    reward_sym, static_reward_from_torques, subtree_torques, RewardBreakdown, RewardConfig,
};

use std::collections::{BTreeSet, VecDeque};

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::{PartRecord, SymmetryClusters};
use crate::contact::ConnectionGraph;
use crate::joints::{JointSpec, JointType};

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("empty graph")]
    EmptyGraph,
    #[error("component containing part {component_node} unreachable: nearest centroid {distance} exceeds d_max {d_max}")]
    UnreachableComponent {
        component_node: usize,
        distance: f64,
        d_max: f64,
    },
    #[error("infeasible action {parent}->{child}")]
    InfeasibleAction { parent: usize, child: usize },
    #[error("no spanning tree exists under the search constraints")]
    SearchFailed,
}

/// Node data the topology stage needs: centroid and robust volume.
#[derive(Debug, Clone, Copy)]
pub struct PartNode {
    pub centroid: Point3<f64>,
    pub volume: f64,
}

impl From<&PartRecord> for PartNode {
    fn from(p: &PartRecord) -> Self {
        PartNode {
            centroid: p.centroid,
            volume: p.robust_volume,
        }
    }
}

pub fn part_nodes(parts: &[PartRecord]) -> Vec<PartNode> {
    parts.iter().map(PartNode::from).collect()
}

/// An undirected edge of the searchable graph. Virtual edges attach
/// disconnected components and carry zero contact strength.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SearchEdge {
    pub u: usize,
    pub v: usize,
    pub strength: f64,
    pub is_virtual: bool,
}

/// The graph the search runs on: contact edges plus any virtual
/// attachment edges, with an adjacency index.
#[derive(Debug, Clone)]
pub struct SearchGraph {
    pub n_nodes: usize,
    pub edges: Vec<SearchEdge>,
    adjacency: Vec<Vec<(usize, usize)>>, // (neighbor, edge index), sorted by neighbor
}

impl SearchGraph {
    pub fn from_edge_list(n_nodes: usize, edges: Vec<SearchEdge>) -> Self {
        let mut edges = edges;
        for e in &mut edges {
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
        }
        edges.sort_by_key(|e| (e.u, e.v));
        edges.dedup_by_key(|e| (e.u, e.v));
        let mut adjacency = vec![Vec::new(); n_nodes];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.u].push((e.v, i));
            adjacency[e.v].push((e.u, i));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        SearchGraph {
            n_nodes,
            edges,
            adjacency,
        }
    }

    pub fn from_contact(graph: &ConnectionGraph) -> Self {
        let edges = graph
            .edges
            .iter()
            .map(|e| SearchEdge {
                u: e.u,
                v: e.v,
                strength: e.strength,
                is_virtual: false,
            })
            .collect();
        Self::from_edge_list(graph.n_nodes, edges)
    }

    /// Attach disconnected components with virtual edges between nearest
    /// centroids, nearest component first. Pairs inside one multi-member
    /// symmetry cluster are skipped when `clusters` is given, since the
    /// search could never use them.
    pub fn with_virtual_attachment(
        graph: &ConnectionGraph,
        centroids: &[Point3<f64>],
        d_max: f64,
        clusters: Option<&SymmetryClusters>,
    ) -> Result<Self, TopologyError> {
        let mut sg = Self::from_contact(graph);
        if sg.n_nodes == 0 {
            return Err(TopologyError::EmptyGraph);
        }
        loop {
            let comp = sg.component_labels();
            let n_comp = *comp.iter().max().unwrap() + 1;
            if n_comp == 1 {
                return Ok(sg);
            }
            // Candidate attachment: minimal centroid distance over all
            // cross-component pairs that the search is allowed to use.
            let mut best: Option<(f64, usize, usize)> = None;
            for u in 0..sg.n_nodes {
                for v in (u + 1)..sg.n_nodes {
                    if comp[u] == comp[v] {
                        continue;
                    }
                    if let Some(cl) = clusters {
                        if cl.same_multi_cluster(u, v) {
                            continue;
                        }
                    }
                    let d = (centroids[u] - centroids[v]).norm();
                    if best.is_none_or(|(bd, bu, bv)| d < bd || (d == bd && (u, v) < (bu, bv))) {
                        best = Some((d, u, v));
                    }
                }
            }
            match best {
                Some((d, u, v)) if d <= d_max => {
                    let mut edges = sg.edges.clone();
                    edges.push(SearchEdge {
                        u,
                        v,
                        strength: 0.0,
                        is_virtual: true,
                    });
                    sg = Self::from_edge_list(sg.n_nodes, edges);
                }
                Some((d, _, v)) => {
                    return Err(TopologyError::UnreachableComponent {
                        component_node: v,
                        distance: d,
                        d_max,
                    });
                }
                None => {
                    return Err(TopologyError::UnreachableComponent {
                        component_node: 0,
                        distance: f64::INFINITY,
                        d_max,
                    });
                }
            }
        }
    }

    fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n_nodes];
        let mut next = 0;
        for start in 0..self.n_nodes {
            if label[start] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([start]);
            label[start] = next;
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &self.adjacency[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[node].iter().map(|&(v, _)| v)
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].iter().any(|&(v, _)| v == b)
    }

    pub fn strength(&self, a: usize, b: usize) -> Option<f64> {
        self.adjacency[a]
            .iter()
            .find(|&&(v, _)| v == b)
            .map(|&(_, i)| self.edges[i].strength)
    }

    pub fn is_virtual(&self, a: usize, b: usize) -> Option<bool> {
        self.adjacency[a]
            .iter()
            .find(|&&(v, _)| v == b)
            .map(|&(_, i)| self.edges[i].is_virtual)
    }
}

/// One directed edge of a kinematic tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeEdge {
    pub parent: usize,
    pub child: usize,
    pub origin: [f64; 3],
    pub joint: JointSpec,
}

/// Directed rooted kinematic tree spanning the assembly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KinematicTree {
    pub root: usize,
    pub n_nodes: usize,
    pub edges: Vec<TreeEdge>,
}

impl KinematicTree {
    /// Build from directed (parent, child) pairs with centroid-difference
    /// origins and provisional fixed joints.
    pub fn from_pairs(
        root: usize,
        n_nodes: usize,
        pairs: &[(usize, usize)],
        centroids: &[Point3<f64>],
    ) -> Self {
        let mut pairs = pairs.to_vec();
        pairs.sort_unstable();
        let edges = pairs
            .into_iter()
            .map(|(parent, child)| {
                let o: Vector3<f64> = centroids[child] - centroids[parent];
                TreeEdge {
                    parent,
                    child,
                    origin: [o.x, o.y, o.z],
                    joint: JointSpec::fixed(),
                }
            })
            .collect();
        KinematicTree {
            root,
            n_nodes,
            edges,
        }
    }

    pub fn parent_of(&self, node: usize) -> Option<usize> {
        self.edges
            .iter()
            .find(|e| e.child == node)
            .map(|e| e.parent)
    }

    pub fn children(&self, node: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|e| e.parent == node)
            .map(|e| e.child)
            .collect()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n_nodes];
        for e in &self.edges {
            deg[e.parent] += 1;
        }
        deg
    }

    /// Depth of every node from the root; `usize::MAX` for unreachable nodes.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![usize::MAX; self.n_nodes];
        depth[self.root] = 0;
        let mut queue = VecDeque::from([self.root]);
        while let Some(u) = queue.pop_front() {
            for e in &self.edges {
                if e.parent == u && depth[e.child] == usize::MAX {
                    depth[e.child] = depth[u] + 1;
                    queue.push_back(e.child);
                }
            }
        }
        depth
    }

    /// True iff this is a spanning arborescence rooted at `root`.
    pub fn is_spanning_arborescence(&self) -> bool {
        if self.edges.len() + 1 != self.n_nodes {
            return false;
        }
        let mut seen_child = vec![false; self.n_nodes];
        for e in &self.edges {
            if e.child == self.root || seen_child[e.child] {
                return false;
            }
            seen_child[e.child] = true;
        }
        self.depths().iter().all(|&d| d != usize::MAX)
    }

    pub fn edge_mut(&mut self, parent: usize, child: usize) -> Option<&mut TreeEdge> {
        self.edges
            .iter_mut()
            .find(|e| e.parent == parent && e.child == child)
    }
}

/// One edge of the serialized tree dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeDumpEdge {
    pub parent: usize,
    pub child: usize,
    pub origin: [f64; 3],
    pub joint_type: JointType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

/// The tree-dump artifact: the directed tree with joint annotations and the
/// reward breakdown of the search result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeDump {
    pub root: usize,
    pub n_nodes: usize,
    pub edges: Vec<TreeDumpEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward_breakdown: Option<RewardBreakdown>,
}

impl TreeDump {
    pub fn from_tree(tree: &KinematicTree, breakdown: Option<RewardBreakdown>) -> Self {
        TreeDump {
            root: tree.root,
            n_nodes: tree.n_nodes,
            edges: tree
                .edges
                .iter()
                .map(|e| TreeDumpEdge {
                    parent: e.parent,
                    child: e.child,
                    origin: e.origin,
                    joint_type: e.joint.joint_type,
                    axis: e.joint.axis,
                    pivot: e.joint.pivot,
                    score: (e.joint.joint_type != JointType::Fixed).then_some(e.joint.score),
                })
                .collect(),
            reward_breakdown: breakdown,
        }
    }

    pub fn to_tree(&self) -> KinematicTree {
        KinematicTree {
            root: self.root,
            n_nodes: self.n_nodes,
            edges: self
                .edges
                .iter()
                .map(|e| TreeEdge {
                    parent: e.parent,
                    child: e.child,
                    origin: e.origin,
                    joint: JointSpec {
                        joint_type: e.joint_type,
                        axis: e.axis,
                        pivot: e.pivot,
                        score: e.score.unwrap_or(0.0),
                    },
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree dump serializes") + "\n"
    }
}

/// Base selection: the max-degree node, ties broken by lowest id.
pub fn select_base(graph: &SearchGraph) -> Result<usize, TopologyError> {
    if graph.n_nodes == 0 {
        return Err(TopologyError::EmptyGraph);
    }
    Ok((0..graph.n_nodes)
        .max_by(|&a, &b| graph.degree(a).cmp(&graph.degree(b)).then(b.cmp(&a)))
        .unwrap())
}

/// BFS orientation from the base: first reach defines the parent, and every
/// edge that would close a cycle is recorded as broken.
pub fn bfs_orient(
    graph: &SearchGraph,
    base: usize,
    centroids: &[Point3<f64>],
) -> (KinematicTree, Vec<(usize, usize)>) {
    let mut visited = vec![false; graph.n_nodes];
    visited[base] = true;
    let mut pairs = Vec::new();
    let mut broken = BTreeSet::new();
    let mut queue = VecDeque::from([base]);
    while let Some(u) = queue.pop_front() {
        for v in graph.neighbors(u) {
            if !visited[v] {
                visited[v] = true;
                pairs.push((u, v));
                queue.push_back(v);
            } else if Some(u) != pairs.iter().find(|&&(_, c)| c == v).map(|&(p, _)| p)
                && Some(v) != pairs.iter().find(|&&(_, c)| c == u).map(|&(p, _)| p)
            {
                broken.insert((u.min(v), u.max(v)));
            }
        }
    }
    (
        KinematicTree::from_pairs(base, graph.n_nodes, &pairs, centroids),
        broken.into_iter().collect(),
    )
}

/// Incremental search state: a partial directed tree, the visited set, and
/// the broken-edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchState {
    pub visited: Vec<bool>,
    pub n_visited: usize,
    pub tree_pairs: Vec<(usize, usize)>,
    pub broken: BTreeSet<(usize, usize)>,
    pub depth: Vec<usize>,
}

impl SearchState {
    pub fn initial(n_nodes: usize, base: usize) -> Self {
        let mut visited = vec![false; n_nodes];
        visited[base] = true;
        let mut depth = vec![0usize; n_nodes];
        depth[base] = 0;
        SearchState {
            visited,
            n_visited: 1,
            tree_pairs: Vec::new(),
            broken: BTreeSet::new(),
            depth,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.n_visited == self.visited.len()
    }

    pub fn to_tree(&self, base: usize, centroids: &[Point3<f64>]) -> KinematicTree {
        KinematicTree::from_pairs(base, self.visited.len(), &self.tree_pairs, centroids)
    }
}

/// All feasible oriented edges from a state: graph edges into unvisited
/// nodes, excluding broken edges and intra-cluster links. Deterministic
/// (parent id, child id) order.
pub fn feasible_actions(
    state: &SearchState,
    graph: &SearchGraph,
    clusters: &SymmetryClusters,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for u in 0..graph.n_nodes {
        if !state.visited[u] {
            continue;
        }
        for v in graph.neighbors(u) {
            if state.visited[v] {
                continue;
            }
            if state.broken.contains(&(u.min(v), u.max(v))) {
                continue;
            }
            if clusters.same_multi_cluster(u, v) {
                continue;
            }
            out.push((u, v));
        }
    }
    out.sort_unstable();
    out
}

/// Apply an oriented edge: the child joins the visited set with a
/// provisional fixed joint, and every graph edge from the child back into
/// the visited set (other than the one used) becomes broken.
pub fn apply_action(
    state: &SearchState,
    action: (usize, usize),
    graph: &SearchGraph,
) -> Result<SearchState, TopologyError> {
    let (u, v) = action;
    let feasible = state.visited[u]
        && !state.visited[v]
        && graph.has_edge(u, v)
        && !state.broken.contains(&(u.min(v), u.max(v)));
    if !feasible {
        return Err(TopologyError::InfeasibleAction {
            parent: u,
            child: v,
        });
    }
    let mut next = state.clone();
    next.visited[v] = true;
    next.n_visited += 1;
    next.tree_pairs.push((u, v));
    next.depth[v] = state.depth[u] + 1;
    for w in graph.neighbors(v) {
        if w != u && next.visited[w] {
            next.broken.insert((v.min(w), v.max(w)));
        }
    }
    Ok(next)
}
