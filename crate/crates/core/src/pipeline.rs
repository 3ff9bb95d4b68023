//! End-to-end analysis: validate → graph → cycle basis → screws → constraints.

use thiserror::Error;

use crate::constraint::{rank_and_dof, ConstraintSystem, RankInfo};
use crate::graph::{build_graph, minimum_cycle_basis, FacetHingeGraph, GraphError};
use crate::model::{validate_model, RfsModel, ValidationReport};
use crate::policy::NumericPolicy;
use crate::screw::{apply_sheet_polarity, establish_base_orientation, select_active, BaseOrientation, ScrewError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("model failed validation with {} errors", .0.errors.len())]
    Invalid(Box<ValidationReport>),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Screw(#[from] ScrewError),
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub model: RfsModel,
    pub report: ValidationReport,
    pub graph: FacetHingeGraph,
    pub base: BaseOrientation,
    pub system: ConstraintSystem,
    pub policy: NumericPolicy,
}

impl Analysis {
    pub fn new(model: RfsModel, policy: NumericPolicy) -> Result<Self, AnalysisError> {
        let report = validate_model(&model, &policy);
        if !report.is_valid() {
            return Err(AnalysisError::Invalid(Box::new(report)));
        }
        let graph = build_graph(&model, &report)?;
        let basis = minimum_cycle_basis(&graph);
        let base = establish_base_orientation(&model, &graph, &basis)?;
        let screws = apply_sheet_polarity(&model, &graph, &base)?;
        let active = select_active(&base.basis, &graph);
        let system = ConstraintSystem {
            basis: base.basis.clone(),
            screws,
            active,
            rank_tolerance: policy.rank_tol,
        };
        Ok(Self { model, report, graph, base, system, policy })
    }

    pub fn n_hinges(&self) -> usize {
        self.graph.edges.len()
    }

    pub fn rank_at(&self, theta: &[f64]) -> RankInfo {
        rank_and_dof(&self.system.pfaffian(theta))
    }
}
