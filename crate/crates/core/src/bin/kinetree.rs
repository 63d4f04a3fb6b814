//! Command-line front end: `build` runs the full pipeline, `eval` compares
//! a prediction against ground truth, `gen` emits synthetic fixtures, and
//! `inspect` summarizes artifacts.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kinetree::assembly::AssemblyManifest;
use kinetree::eval::{evaluate, generate_synthetic, write_synthetic, EvalSide, Template};
use kinetree::export::MeshMode;
use kinetree::pipeline::{
    ground_truth_tree, inspect, run_pipeline, AnchorDefault, MeshModeDefault, PipelineConfig,
    PipelineError, TopologyMode, TopologyModeDefault,
};
use kinetree::topology::TreeDump;

const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_STAGE_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "kinetree",
    version,
    about = "Kinematic tree and joint inference for segmented 3D assemblies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigOverrides {
    /// JSON configuration file; command-line flags win over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Search seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Topology inference mode.
    #[arg(long, value_parser = clap::value_parser!(TopologyMode))]
    topology: Option<TopologyMode>,
    /// MCTS iteration budget.
    #[arg(long)]
    mcts_iters: Option<usize>,
    /// Reward weights: struct,static,contact,sym,hier.
    #[arg(long, value_delimiter = ',')]
    reward_weights: Option<Vec<f64>>,
    /// Disable the contact anchor in joint optimization.
    #[arg(long)]
    no_anchor: bool,
    /// Worker thread cap (0 = library default).
    #[arg(long)]
    threads: Option<usize>,
    /// Mesh handling in the exported URDF bundle.
    #[arg(long)]
    mesh_mode: Option<String>,
}

impl ConfigOverrides {
    fn resolve(&self) -> Result<PipelineConfig, PipelineError> {
        let mut config = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.search.seed = seed;
        }
        if let Some(mode) = self.topology {
            config.topology_mode = TopologyModeDefault(mode);
        }
        if let Some(iters) = self.mcts_iters {
            config.search.max_iterations = iters;
        }
        if let Some(weights) = &self.reward_weights {
            if weights.len() != 5 {
                return Err(PipelineError::Config(format!(
                    "--reward-weights expects 5 comma-separated values, got {}",
                    weights.len()
                )));
            }
            config.reward.weights = [weights[0], weights[1], weights[2], weights[3], weights[4]];
        }
        if self.no_anchor {
            config.anchor = AnchorDefault(false);
        }
        if let Some(threads) = self.threads {
            config.threads = threads;
        }
        if let Some(mode) = &self.mesh_mode {
            let mode = match mode.as_str() {
                "copy" => MeshMode::Copy,
                "reference" => MeshMode::Reference,
                other => {
                    return Err(PipelineError::Config(format!(
                        "unknown mesh mode '{other}' (copy|reference)"
                    )))
                }
            };
            config.mesh_mode = MeshModeDefault(mode);
        }
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on a manifest and write the URDF bundle.
    Build {
        /// Assembly manifest (JSON).
        manifest: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Compare a predicted URDF or tree dump against manifest ground truth.
    Eval {
        /// Predicted artifact: a .urdf or a tree.json dump.
        prediction: PathBuf,
        /// Manifest carrying `ground_truth`.
        manifest: PathBuf,
        /// Optional report output path (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic ground-truth assembly.
    Gen {
        /// Fixture template.
        #[arg(value_parser = clap::value_parser!(Template))]
        template: Template,
        /// Output directory.
        #[arg(long, default_value = "fixture")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a summary of a pipeline artifact.
    Inspect { artifact: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_invalid_input() {
                ExitCode::from(EXIT_INVALID_INPUT)
            } else {
                ExitCode::from(EXIT_STAGE_FAILURE)
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Build {
            manifest,
            out,
            overrides,
        } => {
            let config = overrides.resolve()?;
            if config.threads > 0 {
                // Ignore failure: the global pool can only be set once.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(config.threads)
                    .build_global();
            }
            let output = run_pipeline(&manifest, &config, &out)?;
            println!("tree: {}", output.tree_path.display());
            println!("urdf: {}", output.urdf_path.display());
            println!(
                "reward: total {:.6} over {} edges",
                output.breakdown.total,
                output.tree.edges.len()
            );
            if let Some(metrics) = &output.metrics {
                println!(
                    "metrics: TED {}, mean axis angle {} deg",
                    metrics.tree_edit_distance,
                    metrics
                        .mean_axis_angle_deg
                        .map(|v| format!("{v:.3}"))
                        .unwrap_or_else(|| "n/a".into())
                );
            }
            Ok(())
        }
        Command::Eval {
            prediction,
            manifest,
            out,
        } => {
            let manifest_doc = AssemblyManifest::load(&manifest)?;
            let gt = manifest_doc.ground_truth.as_ref().ok_or_else(|| {
                PipelineError::Config("manifest carries no ground_truth".to_string())
            })?;
            let n = manifest_doc.parts.len();
            let gt_tree = ground_truth_tree(gt, n);

            let pred_tree = if prediction.extension().and_then(|e| e.to_str()) == Some("urdf") {
                let robot = kinetree::export::read_urdf(&prediction)?;
                kinetree::export::extract_kinematics(&robot)?.tree
            } else {
                let text = std::fs::read_to_string(&prediction)?;
                let dump: TreeDump = serde_json::from_str(&text)
                    .map_err(|e| PipelineError::Config(format!("bad tree dump: {e}")))?;
                dump.to_tree()
            };

            // Worst-case penalty scale from the declared origins.
            let diagonal = gt
                .edges
                .iter()
                .map(|e| {
                    let o = e.origin;
                    (o[0] * o[0] + o[1] * o[1] + o[2] * o[2]).sqrt()
                })
                .fold(1.0f64, f64::max);
            let report = evaluate(
                &EvalSide {
                    tree: &pred_tree,
                    diagonal,
                },
                &EvalSide {
                    tree: &gt_tree,
                    diagonal,
                },
            );
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| PipelineError::Config(e.to_string()))?
                + "\n";
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Gen {
            template,
            out,
            seed,
        } => {
            let assembly = generate_synthetic(template, seed);
            let manifest = write_synthetic(&assembly, &out)?;
            println!("manifest: {}", manifest.display());
            Ok(())
        }
        Command::Inspect { artifact } => {
            let summary = inspect(&artifact)?;
            print!("{summary}");
            Ok(())
        }
    }
}
