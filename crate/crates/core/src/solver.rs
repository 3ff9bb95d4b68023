//! Trajectory tracing on the closure manifold: energetic step, null-space
//! projection, Newton correction.

use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraint::{null_space_basis, rank_and_dof, ConstraintSystem};
use crate::graph::FacetHingeGraph;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("initial configuration violates closure (residual {0:.3e})")]
    InfeasibleStart(f64),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub neutral_angles: Vec<f64>,
    pub stiffness: Vec<f64>,
    pub step_length: f64,
    pub steps: usize,
    pub tol_residual: f64,
    pub max_newton: usize,
    pub min_step: f64,
    pub rank_tolerance: f64,
}

impl SolverConfig {
    pub fn new(n_hinges: usize) -> Self {
        Self {
            neutral_angles: vec![0.0; n_hinges],
            stiffness: vec![1.0; n_hinges],
            step_length: 0.02,
            steps: 100,
            tol_residual: 1e-10,
            max_newton: 50,
            min_step: 1e-6,
            rank_tolerance: 1e-8,
        }
    }

    pub fn with_neutral(mut self, neutral: Vec<f64>) -> Self {
        self.neutral_angles = neutral;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn validate(&self, n_hinges: usize) -> Result<(), SolverError> {
        if self.neutral_angles.len() != n_hinges || self.stiffness.len() != n_hinges {
            return Err(SolverError::Config(format!(
                "expected {n_hinges} neutral angles and stiffnesses, got {} and {}",
                self.neutral_angles.len(),
                self.stiffness.len()
            )));
        }
        if let Some(i) = self.stiffness.iter().position(|&k| !(k > 0.0 && k.is_finite())) {
            return Err(SolverError::Config(format!("stiffness of hinge {i} must be positive")));
        }
        if !self.neutral_angles.iter().all(|t| t.is_finite()) {
            return Err(SolverError::Config("neutral angles must be finite".into()));
        }
        for (name, v) in [
            ("step_length", self.step_length),
            ("tol_residual", self.tol_residual),
            ("min_step", self.min_step),
            ("rank_tol", self.rank_tolerance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SolverError::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    pub fn energy(&self, theta: &[f64]) -> f64 {
        0.5 * theta
            .iter()
            .zip(&self.neutral_angles)
            .zip(&self.stiffness)
            .map(|((t, b), k)| k * (t - b) * (t - b))
            .sum::<f64>()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HingeValueFile {
    #[serde(default)]
    hinge: Option<usize>,
    #[serde(default)]
    sheet_edge: Option<[usize; 2]>,
    value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    neutral_angles: Vec<HingeValueFile>,
    #[serde(default)]
    stiffness: Vec<HingeValueFile>,
    step_length: Option<f64>,
    steps: Option<usize>,
    tol_residual: Option<f64>,
    max_newton: Option<usize>,
    min_step: Option<f64>,
    rank_tol: Option<f64>,
}

/// Parses a simulation config, resolving `sheet_edge` references against the graph.
pub fn parse_config_str(text: &str, graph: &FacetHingeGraph) -> Result<SolverConfig, SolverError> {
    let file: ConfigFile = serde_json::from_str(text)
        .map_err(|e| SolverError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let n = graph.edges.len();
    let mut cfg = SolverConfig::new(n);
    let resolve = |entry: &HingeValueFile| -> Result<usize, SolverError> {
        match (entry.hinge, entry.sheet_edge) {
            (Some(h), None) if h < n => Ok(h),
            (Some(h), None) => Err(SolverError::Config(format!("hinge {h} does not exist ({n} hinges)"))),
            (None, Some([s, e])) => graph
                .hinge_for_sheet_edge(s, e)
                .ok_or_else(|| SolverError::Config(format!("sheet {s} edge {e} is not a hinge"))),
            _ => Err(SolverError::Config("each entry needs exactly one of `hinge` or `sheet_edge`".into())),
        }
    };
    for entry in &file.neutral_angles {
        cfg.neutral_angles[resolve(entry)?] = entry.value;
    }
    for entry in &file.stiffness {
        cfg.stiffness[resolve(entry)?] = entry.value;
    }
    if let Some(v) = file.step_length {
        cfg.step_length = v;
    }
    if let Some(v) = file.steps {
        cfg.steps = v;
    }
    if let Some(v) = file.tol_residual {
        cfg.tol_residual = v;
    }
    if let Some(v) = file.max_newton {
        cfg.max_newton = v;
    }
    if let Some(v) = file.min_step {
        cfg.min_step = v;
    }
    if let Some(v) = file.rank_tol {
        cfg.rank_tolerance = v;
    }
    cfg.validate(n)?;
    Ok(cfg)
}

pub fn parse_config(path: impl AsRef<Path>, graph: &FacetHingeGraph) -> Result<SolverConfig, SolverError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| SolverError::Io { path: path.display().to_string(), source })?;
    parse_config_str(&text, graph)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryFrame {
    pub index: usize,
    pub theta: Vec<f64>,
    pub residual_norm: f64,
    pub dof_active: usize,
    pub newton_iterations: usize,
    /// DoF differs from the previous frame's.
    pub mode_change: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Completed,
    ConvergedToNeutral,
    StepUnderflow,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::ConvergedToNeutral => "converged_to_neutral",
            Termination::StepUnderflow => "step_underflow",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub frames: Vec<TrajectoryFrame>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryFrame {
        self.frames.last().expect("trajectory has a home frame")
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn residual_norm(sys: &ConstraintSystem, theta: &[f64]) -> (DVector<f64>, f64) {
    let r = sys.residual(theta);
    let n = max_norm(r.as_slice());
    (r, n)
}

/// Δθ¹ = N Nᵀ Δθ⁰ with N an orthonormal null-space basis of A(θ).
pub fn project_step(sys: &ConstraintSystem, theta: &[f64], delta0: &[f64]) -> Vec<f64> {
    let p = sys.pfaffian(theta);
    let n = null_space_basis(&p);
    let d = DVector::from_column_slice(delta0);
    let out = &n * (n.transpose() * d);
    out.iter().copied().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOutcome {
    pub theta: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// θ ← θ − A(θ)⁺ r(θ) until ‖r‖∞ ≤ tol or the iteration budget is spent.
pub fn newton_correct(sys: &ConstraintSystem, theta_guess: &[f64], cfg: &SolverConfig) -> NewtonOutcome {
    let mut theta = theta_guess.to_vec();
    let (mut r, mut norm) = residual_norm(sys, &theta);
    let start = norm;
    let mut it = 0;
    while norm > cfg.tol_residual && it < cfg.max_newton {
        let a = sys.pfaffian(&theta).a;
        let svd = a.svd(true, true);
        let smax = svd.singular_values.max();
        let Ok(delta) = svd.solve(&r, cfg.rank_tolerance * smax) else { break };
        for (t, d) in theta.iter_mut().zip(delta.iter()) {
            *t -= d;
        }
        it += 1;
        (r, norm) = residual_norm(sys, &theta);
        if !norm.is_finite() || norm > 1e3 * start.max(cfg.tol_residual) {
            break;
        }
    }
    NewtonOutcome { converged: norm <= cfg.tol_residual, theta, residual_norm: norm, iterations: it }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepResult {
    Accepted(NewtonOutcome),
    Neutral,
    Underflow,
}

/// One energetic step toward the neutral angles, projected and corrected.
pub fn step(sys: &ConstraintSystem, theta: &[f64], cfg: &SolverConfig) -> StepResult {
    let grad: Vec<f64> = (0..theta.len())
        .map(|i| cfg.stiffness[i] * (theta[i] - cfg.neutral_angles[i]))
        .collect();
    let gmax = max_norm(&grad);
    if gmax == 0.0 {
        return StepResult::Neutral;
    }
    let clip = (cfg.step_length / gmax).min(1.0);
    let delta0: Vec<f64> = grad.iter().map(|g| -g * clip).collect();
    let delta1 = project_step(sys, theta, &delta0);
    let d1max = max_norm(&delta1);
    if d1max < cfg.min_step {
        return StepResult::Neutral;
    }
    let e0 = cfg.energy(theta);
    let mut scale = 1.0;
    loop {
        let cand: Vec<f64> = theta.iter().zip(&delta1).map(|(t, d)| t + scale * d).collect();
        let out = newton_correct(sys, &cand, cfg);
        let correction = max_norm(&out.theta.iter().zip(&cand).map(|(a, b)| a - b).collect::<Vec<_>>());
        if out.converged && correction < scale * cfg.step_length / 4.0 && cfg.energy(&out.theta) < e0 {
            return StepResult::Accepted(out);
        }
        scale *= 0.5;
        if scale * d1max < cfg.min_step {
            return StepResult::Underflow;
        }
    }
}

/// Traces up to `cfg.steps` accepted frames from `theta0` (home when `None`).
pub fn simulate(
    sys: &ConstraintSystem,
    cfg: &SolverConfig,
    theta0: Option<&[f64]>,
) -> Result<Trajectory, SolverError> {
    let n = sys.n_hinges();
    cfg.validate(n)?;
    let theta: Vec<f64> = theta0.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; n]);
    if theta.len() != n {
        return Err(SolverError::Config(format!("initial θ has {} entries, expected {n}", theta.len())));
    }
    let res0 = residual_norm(sys, &theta).1;
    if res0 > cfg.tol_residual {
        return Err(SolverError::InfeasibleStart(res0));
    }
    let dof_at = |t: &[f64]| {
        let mut p = sys.pfaffian(t);
        p.rank_tolerance = cfg.rank_tolerance;
        rank_and_dof(&p).dof_active
    };
    let mut frames = vec![TrajectoryFrame {
        index: 0,
        dof_active: dof_at(&theta),
        theta,
        residual_norm: res0,
        newton_iterations: 0,
        mode_change: false,
    }];
    let mut termination = Termination::Completed;
    for k in 1..=cfg.steps {
        let prev = frames.last().unwrap();
        match step(sys, &prev.theta, cfg) {
            StepResult::Accepted(out) => {
                let dof = dof_at(&out.theta);
                log::debug!("frame {k}: residual {:.2e}, dof {dof}", out.residual_norm);
                let mode_change = dof != prev.dof_active;
                frames.push(TrajectoryFrame {
                    index: k,
                    theta: out.theta,
                    residual_norm: out.residual_norm,
                    dof_active: dof,
                    newton_iterations: out.iterations,
                    mode_change,
                });
            }
            StepResult::Neutral => {
                termination = Termination::ConvergedToNeutral;
                break;
            }
            StepResult::Underflow => {
                termination = Termination::StepUnderflow;
                break;
            }
        }
    }
    Ok(Trajectory { frames, termination })
}
