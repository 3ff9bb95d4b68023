//! Shared numeric tolerances.
//!
//! Every geometric equality test and rank decision in the crate reads its
//! threshold from a [`NumericPolicy`], so tests and the solver agree on what
//! "coincident" or "zero" means.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericPolicy {
    /// Coordinate coincidence, relative to the model bounding-box diagonal.
    pub coincidence_rel: f64,
    /// Maximum vertex distance to the best-fit plane, relative to facet diameter.
    pub planarity_rel: f64,
    /// Singular values at or below `rank_tol * sigma_max` count as zero.
    pub rank_tol: f64,
    /// Tolerance for unit-length axes.
    pub unit_tol: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            coincidence_rel: 1e-9,
            planarity_rel: 1e-8,
            rank_tol: 1e-8,
            unit_tol: 1e-12,
        }
    }
}

impl NumericPolicy {
    pub fn with_rank_tol(mut self, rank_tol: f64) -> Self {
        self.rank_tol = rank_tol;
        self
    }
}
