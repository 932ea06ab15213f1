use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::json;
use sketchls::dataset::load_matrix_csv;
use sketchls::experiment::{
    emit_report, run_experiment, threads_from_env, ExperimentConfig, InputFamily, ReportFormat,
};
use sketchls::generators::RhsRecipe;
use sketchls::sketch::make_sketch;
use sketchls::solver::{check_embedding, sketch_and_solve, solve_exact};
use sketchls::{rng, DenseMatrix, Error, LlspProblem, SketchKind, Vector};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "sketchls", version, about = "Sketch-and-solve least squares")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one least-squares problem read from CSV.
    Solve(SolveArgs),
    /// Run the relative-residual experiment grid and write a report.
    Experiment(ExperimentArgs),
    /// Probe the subspace-embedding ratios of one operator.
    VerifyEmbedding(EmbeddingArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Numeric CSV holding A (optional header line).
    #[arg(long)]
    matrix: PathBuf,
    /// CSV holding b, or `last-column` to take b from the matrix file.
    #[arg(long)]
    rhs: String,
    #[arg(long)]
    multiplier: SketchKind,
    /// Sketch size factor: s = d * h.
    #[arg(long)]
    h: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also solve exactly and report the relative residual.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    input: InputFamily,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Dataset CSV for redwine or calihousing.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "gaussian,perm,block-perm,asph")]
    multipliers: Vec<SketchKind>,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
    h: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
    #[arg(long, default_value_t = RhsRecipe::default().noise_scale)]
    noise_scale: f64,
    /// Draw a fresh synthetic instance for every trial.
    #[arg(long)]
    refresh_input: bool,
    /// Keep per-trial records in JSON output.
    #[arg(long)]
    keep_trials: bool,
}

#[derive(Args)]
struct EmbeddingArgs {
    #[arg(long)]
    multiplier: SketchKind,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    cols: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    probes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report whether the observed distortion stays within this bound.
    #[arg(long)]
    gamma: Option<f64>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_numerical() => EXIT_NUMERICAL,
        Error::InvalidParameter(_) | Error::SizeGuard { .. } => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn read_problem(args: &SolveArgs) -> sketchls::Result<LlspProblem> {
    let m = load_matrix_csv(&args.matrix)?;
    let (a, b) = if args.rhs == "last-column" {
        if m.cols() < 2 {
            return Err(Error::Dataset("last-column needs at least two columns".into()));
        }
        let d = m.cols() - 1;
        (m.columns(0..d), m.column(d))
    } else {
        let raw = load_matrix_csv(&args.rhs)?;
        let b = match raw.shape() {
            (_, 1) | (1, _) => Vector::new(raw.into_vec())?,
            (r, c) => {
                return Err(Error::Dataset(format!(
                    "right-hand side must be a vector, got {r}x{c}"
                )))
            }
        };
        (m, b)
    };
    LlspProblem::new(a, b)
}

fn solve(args: SolveArgs) -> sketchls::Result<()> {
    let p = read_problem(&args)?;
    let exact = if args.exact { Some(solve_exact(&p)?) } else { None };
    let op = make_sketch(args.multiplier, p.d() * args.h, p.m(), args.seed)?;
    let sol = sketch_and_solve(&p, &op, exact.as_ref())?;
    let out = json!({
        "x": sol.x.as_slice(),
        "residual": sol.residual,
        "exact_residual": exact.as_ref().map(|e| e.residual),
        "exact_x": exact.as_ref().map(|e| e.x.as_slice()),
        "relative_residual": sol.relative_residual,
        "sketch": sol.sketch,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn experiment(args: ExperimentArgs) -> sketchls::Result<()> {
    let base = if args.input.is_synthetic() {
        let (Some(m), Some(d)) = (args.m, args.d) else {
            return Err(Error::InvalidParameter(format!(
                "--input {} needs --m and --d",
                args.input
            )));
        };
        ExperimentConfig::synthetic(args.input, m, d)
    } else {
        let Some(path) = args.data else {
            return Err(Error::InvalidParameter(format!(
                "--input {} needs --data",
                args.input
            )));
        };
        ExperimentConfig::dataset(args.input, path)
    };
    let cfg = ExperimentConfig {
        kinds: args.multipliers,
        h_values: args.h,
        trials: args.trials,
        master_seed: args.seed,
        noise_scale: RhsRecipe::new(args.noise_scale)?.noise_scale,
        refresh_input: args.refresh_input,
        keep_trials: args.keep_trials,
        threads: threads_from_env(),
        ..base
    };
    let report = run_experiment(&cfg)?;
    emit_report(&report, args.format, &args.out)?;
    let failures: usize = report.cells.iter().map(|c| c.failures.len()).sum();
    info!(
        "wrote {} cells to {} ({failures} failed trials)",
        report.cells.len(),
        args.out.display()
    );
    Ok(())
}

fn verify_embedding(args: EmbeddingArgs) -> sketchls::Result<()> {
    if args.m == 0 || args.cols == 0 {
        return Err(Error::InvalidParameter("--m and --cols must be positive".into()));
    }
    let draws = rng::gaussian_vec(&mut rng::stream(args.seed), args.m * args.cols);
    let m_in = DenseMatrix::new(args.m, args.cols, draws)?;
    let op = make_sketch(args.multiplier, args.s, args.m, args.seed.wrapping_add(1))?;
    let mut report = check_embedding(&op, &m_in, args.epsilon, args.probes, args.seed.wrapping_add(2))?;
    if let Some(g) = args.gamma {
        report = report.with_gamma(g);
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Experiment(a) => experiment(a),
        Command::VerifyEmbedding(a) => verify_embedding(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
