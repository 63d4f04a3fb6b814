//! End-to-end orchestration: manifest → SDFs → contact graph → topology
//! search → joint estimation → URDF, with optional metrics against ground
//! truth.

use std::path::{Path, PathBuf};

use nalgebra::{Point3, Unit, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::{
    cluster_symmetric_parts, Assembly, AssemblyError, AssemblyManifest, GroundTruth,
    SymmetryClusters, ValidationConfig,
};
use crate::contact::{build_connection_graph, ConnectionGraph, ContactConfig};
use crate::eval::{evaluate, EvalSide, MetricsReport};
use crate::export::{write_urdf, MeshMode, UrdfError};
use crate::geometry::sample_surface;
use crate::joints::{
    classify_joint, extract_contact_region, fallback_region, generate_candidates, harmonize_types,
    AbstainPrior, DwCavlConfig, EdgeFeatures, EdgeJointEstimate, JointError, JointSpec, JointType,
    ObjectiveContext, TypePrior,
};
use crate::sdf::{build_sdf, SdfConfig, SdfError, SdfField};
use crate::topology::{
    bfs_orient, mcts_search, select_base, KinematicTree, PartNode, RewardBreakdown, RewardConfig,
    SearchConfig, SearchGraph, TopologyError, TreeDump,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("ingest: {0}")]
    Ingest(#[from] AssemblyError),
    #[error("sdf: {0}")]
    Sdf(#[from] SdfError),
    #[error("topology: {0}")]
    Topology(#[from] TopologyError),
    #[error("joints: {0}")]
    Joints(#[from] JointError),
    #[error("export: {0}")]
    Export(#[from] UrdfError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("config: {0}")]
    Config(String),
}

impl PipelineError {
    /// The failed stage, for error tagging.
    pub fn stage(&self) -> &'static str {
        match self {
            PipelineError::Ingest(_) => "ingest",
            PipelineError::Sdf(_) => "sdf",
            PipelineError::Topology(_) => "topology",
            PipelineError::Joints(_) => "joints",
            PipelineError::Export(_) => "export",
            PipelineError::Io(_) => "io",
            PipelineError::Config(_) => "config",
        }
    }

    /// True for errors caused by bad input rather than a failing stage.
    pub fn is_invalid_input(&self) -> bool {
        matches!(self, PipelineError::Ingest(_) | PipelineError::Config(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyMode {
    Mcts,
    Bfs,
}

impl std::str::FromStr for TopologyMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mcts" => Ok(TopologyMode::Mcts),
            "bfs" => Ok(TopologyMode::Bfs),
            other => Err(format!("unknown topology mode '{other}' (mcts|bfs)")),
        }
    }
}

/// Symmetry-clustering knobs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChamferSettings {
    pub samples_per_part: usize,
    /// Cluster threshold as a fraction of the squared median part diagonal.
    pub threshold_frac: f64,
}

impl Default for ChamferSettings {
    fn default() -> Self {
        ChamferSettings {
            samples_per_part: 2048,
            // Copies of one mesh score exactly 0 and rotated copies sit at
            // the sampling-noise floor (~5e-4 of the squared diagonal at
            // 2048 samples); genuinely distinct parts measure 2e-3 and up.
            threshold_frac: 0.001,
        }
    }
}

/// Scale-relative joint-objective knobs, resolved against the assembly
/// diagonal at run time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DwCavlSettings {
    pub m_vol_frac: f64,
    /// Logistic sharpness in units of inverse diagonals.
    pub k_sharp_scale: f64,
    pub sigma_c_frac: f64,
    pub epsilon_small: f64,
    /// Explicit loss weights; when absent they default to `1/(2σ_c²)`.
    pub lambda_cons: Option<f64>,
    pub lambda_coll: Option<f64>,
    pub lambda_pivot: f64,
    /// Virtual revolute angles in degrees (symmetrized to ±).
    pub theta_rev_deg: Vec<f64>,
    /// Virtual prismatic displacements as diagonal fractions (symmetrized).
    pub theta_pri_frac: Vec<f64>,
    pub n_random_axes: usize,
    pub n_slide: usize,
    pub slide_step_frac: f64,
    pub top_k: usize,
    pub zeta: f64,
    pub s_min: f64,
    pub p_conf: f64,
    pub coarse_samples: usize,
    /// Child surface samples used by the objective (and region extraction).
    pub full_samples: usize,
    pub opt_iterations: usize,
    pub step_axis: f64,
    pub step_pivot_frac: f64,
}

impl Default for DwCavlSettings {
    fn default() -> Self {
        DwCavlSettings {
            m_vol_frac: 0.005,
            k_sharp_scale: 200.0,
            sigma_c_frac: 0.01,
            epsilon_small: 1e-9,
            lambda_cons: None,
            lambda_coll: None,
            lambda_pivot: 0.1,
            theta_rev_deg: vec![5.0, 10.0, 20.0],
            theta_pri_frac: vec![0.02, 0.05],
            n_random_axes: 4,
            n_slide: 2,
            slide_step_frac: 0.02,
            top_k: 5,
            zeta: 1.1,
            s_min: 0.25,
            p_conf: 0.8,
            coarse_samples: 256,
            full_samples: 1024,
            opt_iterations: 120,
            step_axis: 0.05,
            step_pivot_frac: 0.02,
        }
    }
}

impl DwCavlSettings {
    pub fn resolve(&self, diagonal: f64, anchor: bool, seed: u64) -> DwCavlConfig {
        let d = diagonal.max(1e-9);
        let sigma_c = self.sigma_c_frac * d;
        let lambda_default = 1.0 / (2.0 * sigma_c * sigma_c);
        let symmetrize = |values: &[f64], scale: f64| -> Vec<f64> {
            let mut out: Vec<f64> = values
                .iter()
                .flat_map(|&v| [-v * scale, v * scale])
                .collect();
            out.sort_by(|a, b| a.partial_cmp(b).unwrap());
            out
        };
        let cfg = DwCavlConfig {
            m_vol: self.m_vol_frac * d,
            k_sharp: self.k_sharp_scale / d,
            sigma_c,
            epsilon_small: self.epsilon_small,
            lambda_cons: self.lambda_cons.unwrap_or(lambda_default),
            lambda_coll: self.lambda_coll.unwrap_or(lambda_default),
            lambda_pivot: self.lambda_pivot,
            theta_rev: symmetrize(&self.theta_rev_deg, std::f64::consts::PI / 180.0),
            theta_pri: symmetrize(&self.theta_pri_frac, d),
            distance_weighting: true,
            n_random_axes: self.n_random_axes,
            n_slide: self.n_slide,
            slide_step: self.slide_step_frac * d,
            top_k: self.top_k,
            zeta: self.zeta,
            s_min: self.s_min,
            p_conf: self.p_conf,
            coarse_samples: self.coarse_samples,
            opt_iterations: self.opt_iterations,
            step_axis: self.step_axis,
            step_pivot: self.step_pivot_frac * d,
            candidate_seed: seed,
        };
        if anchor {
            cfg
        } else {
            cfg.without_anchor()
        }
    }
}

/// The full pipeline configuration; every hyperparameter has a default and
/// is overridable from a JSON file or the command line.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub validation: ValidationConfig,
    pub sdf: SdfConfig,
    pub contact: ContactConfig,
    pub reward: RewardConfig,
    pub search: SearchConfig,
    pub dwcavl: DwCavlSettings,
    pub chamfer: ChamferSettings,
    pub topology_mode: TopologyModeDefault,
    pub anchor: AnchorDefault,
    pub threads: usize,
    pub mesh_mode: MeshModeDefault,
    /// Write per-part SDF caches next to the tree dump.
    pub cache_sdf: bool,
}

// Defaulted newtype wrappers keep serde defaults local to the config.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TopologyModeDefault(pub TopologyMode);
impl Default for TopologyModeDefault {
    fn default() -> Self {
        TopologyModeDefault(TopologyMode::Mcts)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnchorDefault(pub bool);
impl Default for AnchorDefault {
    fn default() -> Self {
        AnchorDefault(true)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeshModeDefault(pub MeshMode);
impl Default for MeshModeDefault {
    fn default() -> Self {
        MeshModeDefault(MeshMode::Copy)
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))
    }
}

/// Everything the pipeline produced, with paths to the written artifacts.
#[derive(Debug)]
pub struct PipelineOutput {
    pub tree: KinematicTree,
    pub breakdown: RewardBreakdown,
    pub tree_path: PathBuf,
    pub urdf_path: PathBuf,
    pub graph_path: PathBuf,
    pub joint_dump_paths: Vec<PathBuf>,
    pub metrics: Option<MetricsReport>,
    pub metrics_path: Option<PathBuf>,
}

/// Intermediate artifacts shared by pipeline stages; exposed so tests and
/// ablation studies can run stages independently.
pub struct StagePrep {
    pub assembly: Assembly,
    pub sdfs: Vec<SdfField>,
    pub clusters: SymmetryClusters,
    pub graph: ConnectionGraph,
    pub search_graph: SearchGraph,
    pub base: usize,
}

/// Ingest + SDFs + clustering + contact graph + virtual attachment.
pub fn prepare_stages(
    manifest: &AssemblyManifest,
    manifest_path: &Path,
    config: &PipelineConfig,
) -> Result<StagePrep, PipelineError> {
    let assembly = manifest.load_assembly(manifest_path, &config.validation)?;
    prepare_from_assembly(assembly, config)
}

/// Stage preparation when the assembly is already in memory.
pub fn prepare_from_assembly(
    assembly: Assembly,
    config: &PipelineConfig,
) -> Result<StagePrep, PipelineError> {
    let sdfs: Vec<SdfField> = assembly
        .parts
        .par_iter()
        .map(|p| build_sdf(&p.mesh, config.sdf.resolution, config.sdf.padding_frac))
        .collect::<Result<_, _>>()?;

    let mut diags: Vec<f64> = assembly
        .parts
        .iter()
        .map(|p| p.mesh.aabb().diagonal())
        .collect();
    diags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_diag = diags[diags.len() / 2];
    let threshold = config.chamfer.threshold_frac * median_diag * median_diag;
    let clusters =
        cluster_symmetric_parts(&assembly.parts, threshold, config.chamfer.samples_per_part);

    let epsilon = config.contact.epsilon_frac * assembly.diagonal;
    let graph = build_connection_graph(
        &assembly.parts,
        &sdfs,
        epsilon,
        config.contact.samples_per_part,
    );

    let centroids: Vec<Point3<f64>> = assembly.parts.iter().map(|p| p.centroid).collect();
    let d_max = config.contact.d_max_frac * assembly.diagonal;
    let search_graph =
        SearchGraph::with_virtual_attachment(&graph, &centroids, d_max, Some(&clusters))?;
    let base = select_base(&search_graph)?;

    Ok(StagePrep {
        assembly,
        sdfs,
        clusters,
        graph,
        search_graph,
        base,
    })
}

/// Topology stage: orient the graph per the configured mode.
pub fn infer_topology(
    prep: &StagePrep,
    config: &PipelineConfig,
    mode: TopologyMode,
) -> Result<(KinematicTree, RewardBreakdown), PipelineError> {
    let parts: Vec<PartNode> = prep.assembly.parts.iter().map(PartNode::from).collect();
    let centroids: Vec<Point3<f64>> = parts.iter().map(|p| p.centroid).collect();
    match mode {
        TopologyMode::Bfs => {
            let (tree, _broken) = bfs_orient(&prep.search_graph, prep.base, &centroids);
            let breakdown = crate::topology::reward(
                &tree,
                &prep.search_graph,
                &parts,
                &prep.clusters,
                &config.reward,
            );
            Ok((tree, breakdown))
        }
        TopologyMode::Mcts => {
            let (tree, breakdown) = mcts_search(
                &prep.search_graph,
                prep.base,
                &parts,
                &prep.clusters,
                &config.reward,
                &config.search,
            )?;
            Ok((tree, breakdown))
        }
    }
}

/// Per-edge diagnostic record of the joints stage.
#[derive(Debug, Serialize)]
struct JointDump<'a> {
    parent: usize,
    child: usize,
    s_rev: f64,
    s_pri: f64,
    chosen: &'a JointSpec,
    revolute: Option<&'a crate::joints::JointCandidate>,
    prismatic: Option<&'a crate::joints::JointCandidate>,
}

/// Joints stage: estimate type and parameters for every tree edge, then
/// harmonize types within symmetry clusters.
pub fn estimate_joints(
    prep: &StagePrep,
    tree: &mut KinematicTree,
    config: &PipelineConfig,
    anchor: bool,
    prior: &(dyn TypePrior + Sync),
) -> Result<Vec<EdgeJointEstimate>, PipelineError> {
    let dwcfg = config
        .dwcavl
        .resolve(prep.assembly.diagonal, anchor, config.search.seed);
    let epsilon = config.contact.epsilon_frac * prep.assembly.diagonal;
    let tau_c = 2.0 * epsilon;

    let edges: Vec<(usize, usize)> = tree.edges.iter().map(|e| (e.parent, e.child)).collect();
    let mut estimates: Vec<EdgeJointEstimate> = edges
        .par_iter()
        .map(
            |&(parent, child)| -> Result<EdgeJointEstimate, PipelineError> {
                let sample_part = |id: usize| {
                    let mut rng = ChaCha8Rng::seed_from_u64(
                        config.search.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(id as u64 + 1)),
                    );
                    sample_surface(
                        &prep.assembly.parts[id].mesh,
                        config.dwcavl.full_samples,
                        &mut rng,
                    )
                };
                let parent_samples = sample_part(parent);
                let child_samples = sample_part(child);

                let region =
                    match extract_contact_region(&parent_samples, &child_samples, tau_c, tau_c) {
                        Ok(r) => r,
                        Err(JointError::NoContact) => {
                            fallback_region(&parent_samples, &child_samples)
                        }
                        Err(e) => return Err(e.into()),
                    };

                let candidate_seed = dwcfg
                    .candidate_seed
                    .wrapping_add((parent as u64) << 20)
                    .wrapping_add(child as u64);
                let candidates = generate_candidates(
                    &region,
                    dwcfg.n_random_axes,
                    dwcfg.n_slide,
                    dwcfg.slide_step,
                    candidate_seed,
                );

                let ctx = ObjectiveContext::new(
                    &prep.sdfs[parent],
                    child_samples,
                    region.centroid,
                    &dwcfg,
                );
                let scores = crate::joints::rank_and_refine(&candidates, &ctx, &dwcfg)?;

                let features = EdgeFeatures {
                    parent,
                    child,
                    s_rev: scores.s_rev(),
                    s_pri: scores.s_pri(),
                    contact_point_count: region.points.len(),
                };
                let joint_type = classify_joint(
                    scores.s_rev(),
                    scores.s_pri(),
                    prior.predict(&features),
                    dwcfg.zeta,
                    dwcfg.s_min,
                    dwcfg.p_conf,
                );

                let mut estimate = EdgeJointEstimate {
                    parent,
                    child,
                    revolute: scores.revolute,
                    prismatic: scores.prismatic,
                    spec: JointSpec::fixed(),
                };
                estimate.spec = estimate
                    .spec_for(joint_type)
                    .unwrap_or_else(JointSpec::fixed);
                Ok(estimate)
            },
        )
        .collect::<Result<_, _>>()?;

    estimates.sort_by_key(|e| (e.parent, e.child));
    harmonize_types(&prep.clusters, &mut estimates);

    for est in &estimates {
        if let Some(edge) = tree.edge_mut(est.parent, est.child) {
            edge.joint = est.spec.clone();
        }
    }
    Ok(estimates)
}

/// Build the ground-truth kinematic tree declared in a manifest.
pub fn ground_truth_tree(gt: &GroundTruth, n_nodes: usize) -> KinematicTree {
    let edges = gt
        .edges
        .iter()
        .map(|e| crate::topology::TreeEdge {
            parent: e.parent,
            child: e.child,
            origin: e.origin,
            joint: match e.joint_type {
                JointType::Fixed => JointSpec::fixed(),
                JointType::Revolute => JointSpec::revolute(
                    Unit::new_normalize(Vector3::from(e.axis.unwrap_or([0.0, 0.0, 1.0]))),
                    Point3::from(e.pivot.unwrap_or([0.0; 3])),
                    1.0,
                ),
                JointType::Prismatic => JointSpec::prismatic(
                    Unit::new_normalize(Vector3::from(e.axis.unwrap_or([1.0, 0.0, 0.0]))),
                    1.0,
                ),
            },
        })
        .collect();
    KinematicTree {
        root: gt.root,
        n_nodes,
        edges,
    }
}

/// Run the whole pipeline and write artifacts under `out_dir`.
pub fn run_pipeline(
    manifest_path: &Path,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<PipelineOutput, PipelineError> {
    run_pipeline_with_prior(manifest_path, config, out_dir, &AbstainPrior)
}

pub fn run_pipeline_with_prior(
    manifest_path: &Path,
    config: &PipelineConfig,
    out_dir: &Path,
    prior: &(dyn TypePrior + Sync),
) -> Result<PipelineOutput, PipelineError> {
    let manifest = AssemblyManifest::load(manifest_path)?;
    std::fs::create_dir_all(out_dir)?;

    let prep = prepare_stages(&manifest, manifest_path, config)?;

    if config.cache_sdf {
        let sdf_dir = out_dir.join("sdf");
        std::fs::create_dir_all(&sdf_dir)?;
        for (i, sdf) in prep.sdfs.iter().enumerate() {
            sdf.write_cache(&sdf_dir.join(format!("part_{i}.sdf")))?;
        }
    }

    let graph_path = out_dir.join("contact_graph.json");
    std::fs::write(
        &graph_path,
        serde_json::to_string_pretty(&prep.graph.to_json()).expect("graph serializes") + "\n",
    )?;

    let (mut tree, breakdown) = infer_topology(&prep, config, config.topology_mode.0)?;
    let estimates = estimate_joints(&prep, &mut tree, config, config.anchor.0, prior)?;

    let joints_dir = out_dir.join("joints");
    std::fs::create_dir_all(&joints_dir)?;
    let mut joint_dump_paths = Vec::new();
    for est in &estimates {
        let dump = JointDump {
            parent: est.parent,
            child: est.child,
            s_rev: est.revolute.as_ref().map_or(0.0, |c| c.score()),
            s_pri: est.prismatic.as_ref().map_or(0.0, |c| c.score()),
            chosen: &est.spec,
            revolute: est.revolute.as_ref(),
            prismatic: est.prismatic.as_ref(),
        };
        let path = joints_dir.join(format!("edge_{}_{}.json", est.parent, est.child));
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&dump).expect("dump serializes") + "\n",
        )?;
        joint_dump_paths.push(path);
    }

    let tree_path = out_dir.join("tree.json");
    std::fs::write(
        &tree_path,
        TreeDump::from_tree(&tree, Some(breakdown)).to_json_string(),
    )?;

    let robot_name = manifest_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "assembly".into());
    let source_paths: Vec<PathBuf> = manifest
        .parts
        .iter()
        .map(|p| {
            let base = manifest_path.parent().unwrap_or(Path::new("."));
            if p.mesh.is_absolute() {
                p.mesh.clone()
            } else {
                base.join(&p.mesh)
            }
        })
        .collect();
    let urdf_path = write_urdf(
        &tree,
        &prep.assembly.parts,
        out_dir,
        &robot_name,
        config.reward.density,
        0.1 * prep.assembly.diagonal,
        config.mesh_mode.0,
        &source_paths,
    )?;

    let (metrics, metrics_path) = match &manifest.ground_truth {
        Some(gt) => {
            let gt_tree = ground_truth_tree(gt, prep.assembly.parts.len());
            let report = evaluate(
                &EvalSide {
                    tree: &tree,
                    diagonal: prep.assembly.diagonal,
                },
                &EvalSide {
                    tree: &gt_tree,
                    diagonal: prep.assembly.diagonal,
                },
            );
            let json_path = out_dir.join("metrics.json");
            std::fs::write(
                &json_path,
                serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
            )?;
            std::fs::write(out_dir.join("metrics.csv"), report.to_csv())?;
            (Some(report), Some(json_path))
        }
        None => (None, None),
    };

    Ok(PipelineOutput {
        tree,
        breakdown,
        tree_path,
        urdf_path,
        graph_path,
        joint_dump_paths,
        metrics,
        metrics_path,
    })
}

/// Human-readable summary of a pipeline artifact (tree dump, joint dump,
/// metrics report, contact graph, or URDF).
pub fn inspect(path: &Path) -> Result<String, PipelineError> {
    let text = std::fs::read_to_string(path)?;
    let mut out = String::new();
    if path.extension().and_then(|e| e.to_str()) == Some("urdf") {
        let robot = crate::export::parse_urdf_str(&text)
            .map_err(|e| PipelineError::Config(format!("not a readable artifact: {e}")))?;
        out.push_str(&format!(
            "urdf robot '{}': {} links, {} joints\n",
            robot.name,
            robot.links.len(),
            robot.joints.len()
        ));
        for j in &robot.joints {
            out.push_str(&format!(
                "  {} [{}] {} -> {}\n",
                j.name, j.joint_type, j.parent, j.child
            ));
        }
        return Ok(out);
    }

    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| PipelineError::Config(format!("not a readable artifact: {e}")))?;
    if let Ok(dump) = serde_json::from_value::<TreeDump>(value.clone()) {
        out.push_str(&format!(
            "tree dump: root {} over {} nodes, {} edges\n",
            dump.root,
            dump.n_nodes,
            dump.edges.len()
        ));
        for e in &dump.edges {
            out.push_str(&format!(
                "  {} -> {} [{}] origin ({:.4}, {:.4}, {:.4})\n",
                e.parent, e.child, e.joint_type, e.origin[0], e.origin[1], e.origin[2]
            ));
        }
        if let Some(b) = &dump.reward_breakdown {
            out.push_str(&format!(
                "reward: total {:.6} (struct {:.6}, static {:.6}, contact {:.6}, sym {:.6}, hier {:.6})\n",
                b.total, b.structural, b.static_support, b.contact, b.symmetry, b.hierarchy
            ));
        }
        return Ok(out);
    }
    if let Ok(report) = serde_json::from_value::<MetricsReport>(value.clone()) {
        out.push_str(&format!(
            "metrics: TED {}, mean axis angle {:?} deg, mean position error {:?}\n",
            report.tree_edit_distance, report.mean_axis_angle_deg, report.mean_position_error
        ));
        return Ok(out);
    }
    if let Some(edges) = value.get("edges").and_then(|e| e.as_array()) {
        if value.get("nodes").is_some() {
            out.push_str(&format!(
                "contact graph: {} nodes, {} edges\n",
                value["nodes"].as_array().map_or(0, |n| n.len()),
                edges.len()
            ));
            return Ok(out);
        }
    }
    if value.get("chosen").is_some() {
        out.push_str(&format!(
            "joint dump: edge {} -> {}, s_rev {:.4}, s_pri {:.4}, chosen {}\n",
            value["parent"],
            value["child"],
            value["s_rev"].as_f64().unwrap_or(0.0),
            value["s_pri"].as_f64().unwrap_or(0.0),
            value["chosen"]["joint_type"].as_str().unwrap_or("?"),
        ));
        return Ok(out);
    }
    Err(PipelineError::Config(
        "unrecognized artifact format".to_string(),
    ))
}
