//! Evaluation: joint metrics, tree edit distance, and synthetic
//! ground-truth assemblies.

mod metrics;
mod synthetic;
mod ted;

pub use metrics::{
    axis_angle_error, axis_position_error, evaluate, EvalSide, JointErrorRow, MetricsError,
    MetricsReport, PositionErrorMode,
};
pub use synthetic::{generate_synthetic, write_synthetic, SyntheticAssembly, Template};
pub use ted::{tree_edit_distance, tree_edit_distance_nodes, tree_node_from_kinematic, TreeNode};
