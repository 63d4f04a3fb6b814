//! Connection graph construction from pairwise SDF proximity.

use nalgebra::Point3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::PartRecord;
use crate::geometry::sample_surface;
use crate::sdf::SdfField;

/// Seed for the contact-probe surface samples.
const CONTACT_SAMPLE_SEED: u64 = 0xc0a7;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContactConfig {
    /// Contact tolerance as a fraction of the assembly diagonal.
    pub epsilon_frac: f64,
    pub samples_per_part: usize,
    /// Virtual-attachment distance bound for disconnected components, as a
    /// fraction of the assembly diagonal.
    pub d_max_frac: f64,
}

impl Default for ContactConfig {
    fn default() -> Self {
        ContactConfig {
            epsilon_frac: 0.01,
            samples_per_part: 4096,
            d_max_frac: 0.25,
        }
    }
}

/// One undirected contact edge.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ContactEdge {
    pub u: usize,
    pub v: usize,
    pub distance: f64,
    pub strength: f64,
}

/// Undirected contact graph over part ids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConnectionGraph {
    pub n_nodes: usize,
    pub edges: Vec<ContactEdge>,
    pub epsilon: f64,
}

impl ConnectionGraph {
    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.u == node || e.v == node)
            .count()
    }

    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.u == node {
                    Some(e.v)
                } else if e.v == node {
                    Some(e.u)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge(a, b).is_some()
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<&ContactEdge> {
        let (a, b) = (a.min(b), a.max(b));
        self.edges.iter().find(|e| e.u == a && e.v == b)
    }

    pub fn strength(&self, a: usize, b: usize) -> Option<f64> {
        self.edge(a, b).map(|e| e.strength)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nodes": (0..self.n_nodes).collect::<Vec<_>>(),
            "epsilon": self.epsilon,
            "edges": self.edges.iter().map(|e| serde_json::json!({
                "u": e.u, "v": e.v, "distance": e.distance, "strength": e.strength,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Option<Self> {
        let n_nodes = value.get("nodes")?.as_array()?.len();
        let epsilon = value.get("epsilon")?.as_f64()?;
        let edges = value
            .get("edges")?
            .as_array()?
            .iter()
            .map(|e| {
                Some(ContactEdge {
                    u: e.get("u")?.as_u64()? as usize,
                    v: e.get("v")?.as_u64()? as usize,
                    distance: e.get("distance")?.as_f64()?,
                    strength: e.get("strength")?.as_f64()?,
                })
            })
            .collect::<Option<Vec<_>>>()?;
        Some(ConnectionGraph {
            n_nodes,
            edges,
            epsilon,
        })
    }
}

/// Minimum bidirectional surface distance between two parts under each
/// other's SDFs: `min(min_a |sdf_b(a)|, min_b |sdf_a(b)|)`.
pub fn bidirectional_min_distance(
    part_a: &PartRecord,
    sdf_a: &SdfField,
    part_b: &PartRecord,
    sdf_b: &SdfField,
    n_samples: usize,
) -> f64 {
    let samples_a = contact_samples(part_a, n_samples);
    let samples_b = contact_samples(part_b, n_samples);
    let a_to_b = samples_a
        .iter()
        .map(|p| sdf_b.query(p).abs())
        .fold(f64::INFINITY, f64::min);
    let b_to_a = samples_b
        .iter()
        .map(|p| sdf_a.query(p).abs())
        .fold(f64::INFINITY, f64::min);
    a_to_b.min(b_to_a)
}

fn contact_samples(part: &PartRecord, n: usize) -> Vec<Point3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(CONTACT_SAMPLE_SEED ^ part.id as u64);
    sample_surface(&part.mesh, n, &mut rng)
}

/// Linear-clamp contact strength: 1 at touching, 0 at the tolerance.
pub fn contact_strength(distance: f64, epsilon: f64) -> f64 {
    (1.0 - distance / epsilon).clamp(0.0, 1.0)
}

/// Build the connection graph: an edge wherever the bidirectional distance
/// is within `epsilon`, annotated with distance and strength.
pub fn build_connection_graph(
    parts: &[PartRecord],
    sdfs: &[SdfField],
    epsilon: f64,
    samples_per_part: usize,
) -> ConnectionGraph {
    assert_eq!(parts.len(), sdfs.len());
    let n = parts.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let mut edges: Vec<ContactEdge> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            // Cheap AABB reject: parts farther apart than epsilon at the
            // box level cannot touch.
            let bi = parts[i].mesh.aabb();
            let bj = parts[j].mesh.aabb();
            let mut gap2 = 0.0f64;
            for k in 0..3 {
                let d = (bj.min[k] - bi.max[k]).max(bi.min[k] - bj.max[k]).max(0.0);
                gap2 += d * d;
            }
            if gap2.sqrt() > epsilon * 2.0 {
                return None;
            }
            let d = bidirectional_min_distance(
                &parts[i],
                &sdfs[i],
                &parts[j],
                &sdfs[j],
                samples_per_part,
            );
            if d <= epsilon {
                Some(ContactEdge {
                    u: i,
                    v: j,
                    distance: d,
                    strength: contact_strength(d, epsilon),
                })
            } else {
                None
            }
        })
        .collect();
    edges.sort_by_key(|e| (e.u, e.v));
    ConnectionGraph {
        n_nodes: n,
        edges,
        epsilon,
    }
}
