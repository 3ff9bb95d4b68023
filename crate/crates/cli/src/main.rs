use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rfs_core::geometry::{export_frame, export_trajectory_csv, fold_geometry, read_trajectory_csv, MeshFormat};
use rfs_core::model::{import_fold, parse_model, write_model, ModelError, RfsModel};
use rfs_core::solver::{parse_config, simulate, SolverConfig, SolverError, Termination};
use rfs_core::{Analysis, AnalysisError, NumericPolicy};

mod generate;
mod report;

/// Kinematic analysis and folding simulation of rigid foldable structures.
#[derive(Debug, Parser)]
#[command(name = "rfs", version)]
struct Cli {
    /// Relative singular-value threshold for rank decisions.
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model file and print the validation report.
    Validate { model: PathBuf },
    /// Print graph, loops, screws and constraint rank for a model.
    Analyze {
        model: PathBuf,
        /// Trajectory CSV to take the configuration from (default: home).
        #[arg(long)]
        theta: Option<PathBuf>,
        #[arg(long, default_value_t = 0, requires = "theta")]
        frame: usize,
    },
    /// Trace a folding trajectory and write it with per-frame geometry.
    Simulate {
        model: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Obj)]
        format: Format,
        /// Write geometry for every k-th frame (and the last).
        #[arg(long, default_value_t = 10)]
        every: usize,
        /// Override the number of steps from the config.
        #[arg(long)]
        steps: Option<usize>,
        /// Start from a frame of an earlier trajectory CSV.
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long, default_value_t = 0, requires = "from")]
        frame: usize,
    },
    /// Write a generated pattern as a model file.
    Generate {
        #[command(subcommand)]
        pattern: generate::Pattern,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Write the folded geometry of one trajectory frame.
    Export {
        model: PathBuf,
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long, default_value_t = 0)]
        frame: usize,
        #[arg(long, value_enum, default_value_t = Format::Obj)]
        format: Format,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Convert a FOLD crease pattern into a model file.
    ImportFold {
        fold: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Obj,
    Vtk,
}

impl From<Format> for MeshFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Obj => MeshFormat::Obj,
            Format::Vtk => MeshFormat::Vtk,
        }
    }
}

/// Failure classes, one exit code each.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Validation(String),
    Solver(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Solver(m) | Failure::Io(m) => m,
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Io { .. } => Failure::Io(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Invalid(r) => {
                let codes: Vec<String> = r.errors.iter().map(|f| f.to_string()).collect();
                Failure::Validation(format!("model failed validation:\n{}", codes.join("\n")))
            }
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Io { .. } => Failure::Io(e.to_string()),
            SolverError::Config(_) => Failure::Validation(e.to_string()),
            SolverError::InfeasibleStart(_) => Failure::Solver(e.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn policy(rank_tol: Option<f64>) -> NumericPolicy {
    rank_tol.map_or_else(NumericPolicy::default, |t| NumericPolicy::default().with_rank_tol(t))
}

fn analyze_model(path: &Path, rank_tol: Option<f64>) -> Result<Analysis, Failure> {
    let model = parse_model(path)?;
    Ok(Analysis::new(model, policy(rank_tol))?)
}

/// θ of frame `k` in a trajectory CSV, checked against the hinge count.
fn frame_theta(path: &Path, k: usize, n: usize) -> Result<Vec<f64>, Failure> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let frames = read_trajectory_csv(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    let f = frames
        .into_iter()
        .find(|f| f.index == k)
        .ok_or_else(|| Failure::Usage(format!("{} has no frame {k}", path.display())))?;
    if f.theta.len() != n {
        return Err(Failure::Validation(format!(
            "{} has {} angles per frame, model has {n} hinges",
            path.display(),
            f.theta.len()
        )));
    }
    Ok(f.theta)
}

fn write_model_file(model: &RfsModel, output: Option<&Path>) -> Result<(), Failure> {
    let path = output.ok_or_else(|| Failure::Usage("missing output file (-o)".into()))?;
    write_model(model, path)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { model } => {
            let m = parse_model(&model)?;
            let r = rfs_core::model::validate_model(&m, &policy(cli.rank_tol));
            print!("{}", report::validation(&r));
            if !r.is_valid() {
                let codes: Vec<&str> = r.errors.iter().map(|f| f.code.as_str()).collect();
                return Err(Failure::Validation(format!("model is invalid: {}", codes.join(", "))));
            }
        }
        Command::Analyze { model, theta, frame } => {
            let an = analyze_model(&model, cli.rank_tol)?;
            let t = match theta {
                Some(p) => frame_theta(&p, frame, an.n_hinges())?,
                None => vec![0.0; an.n_hinges()],
            };
            print!("{}", report::analysis(&an, &t));
        }
        Command::Simulate { model, config, out, format, every, steps, from, frame } => {
            if every == 0 {
                return Err(Failure::Usage("--every must be at least 1".into()));
            }
            let an = analyze_model(&model, cli.rank_tol)?;
            let mut cfg = match &config {
                Some(p) => parse_config(p, &an.graph)?,
                None => SolverConfig::new(an.n_hinges()),
            };
            if let Some(s) = steps {
                cfg.steps = s;
            }
            if let Some(t) = cli.rank_tol {
                cfg.rank_tolerance = t;
            }
            let start = match &from {
                Some(p) => Some(frame_theta(p, frame, an.n_hinges())?),
                None => None,
            };
            log::info!("simulating {} hinges, {} steps", an.n_hinges(), cfg.steps);
            let traj = simulate(&an.system, &cfg, start.as_deref())?;
            fs::create_dir_all(&out).map_err(io_err(&out))?;
            let csv = out.join("trajectory.csv");
            export_trajectory_csv(&traj, &csv).map_err(io_err(&csv))?;
            let fmt = MeshFormat::from(format);
            let last = traj.last().index;
            for f in traj.frames.iter().filter(|f| f.index % every == 0 || f.index == last) {
                let st = fold_geometry(&an.model, &an.graph, &an.system.screws, &f.theta);
                let path = out.join(format!("frame_{:04}.{}", f.index, fmt.extension()));
                export_frame(&st, fmt, &path).map_err(io_err(&path))?;
            }
            for f in traj.frames.iter().filter(|f| f.mode_change) {
                log::warn!("frame {}: dof changed to {}", f.index, f.dof_active);
            }
            log::info!("{} frames, {}", traj.frames.len(), traj.termination.as_str());
            if traj.termination == Termination::StepUnderflow {
                return Err(Failure::Solver(format!(
                    "step length underflow after frame {last}; results written to {}",
                    out.display()
                )));
            }
        }
        Command::Generate { pattern, output } => {
            let m = generate::generate(&pattern).map_err(|e| Failure::Usage(e.to_string()))?;
            write_model_file(&m, output.as_deref())?;
        }
        Command::Export { model, trajectory, frame, format, output } => {
            let an = analyze_model(&model, cli.rank_tol)?;
            let theta = frame_theta(&trajectory, frame, an.n_hinges())?;
            let st = fold_geometry(&an.model, &an.graph, &an.system.screws, &theta);
            export_frame(&st, format.into(), &output).map_err(io_err(&output))?;
            log::info!("wrote {}", output.display());
        }
        Command::ImportFold { fold, output } => {
            let m = import_fold(&fold)?;
            write_model_file(&m, Some(&output))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            log::error!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}
