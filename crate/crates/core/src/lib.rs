//! Kinematics of rigid foldable structures: multi-sheet origami and kirigami
//! models, facet–hinge graphs, loop-closure constraints and folding
//! trajectories.

pub mod constraint;
pub mod geometry;
pub mod graph;
pub mod liegroup;
pub mod patterns;
pub mod model;
pub mod pipeline;
pub mod policy;
pub mod screw;
pub mod solver;

pub use pipeline::{Analysis, AnalysisError};
pub use policy::NumericPolicy;
