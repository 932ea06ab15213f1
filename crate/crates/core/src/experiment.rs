//! Seeded multi-trial experiments over (multiplier kind, oversampling ratio
//! `h`) grids, with CSV and JSON report output.
//!
//! Each cell sketches with `s = d * h` rows. A trial's multiplier seed depends
//! only on the master seed, the trial index and the multiplier kind, so the
//! same trial index draws related multipliers across `h` and reruns are
//! bit-identical whatever the thread count.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{load_dataset, DatasetName};
use crate::error::{Error, Result};
use crate::generators::{gen_gaussian_input, gen_illcond_input, gen_rhs, IllCondSpectrum, RhsRecipe};
use crate::rng;
use crate::sketch::{make_sketch, SketchKind};
use crate::solver::{sketch_and_solve, solve_exact, LlspProblem, Solution};
use crate::stats::summarize;

/// Environment variable capping trial parallelism (`0` = one thread per core).
pub const THREADS_ENV: &str = "SKETCHLS_THREADS";

pub const DEFAULT_H_VALUES: [usize; 5] = [2, 3, 4, 5, 6];
pub const DEFAULT_TRIALS: usize = 100;

pub const CSV_HEADER: [&str; 12] = [
    "input",
    "kind",
    "h",
    "s",
    "trials",
    "mean_rel_resid",
    "std_rel_resid",
    "min",
    "max",
    "mean_entries_read",
    "mean_scalar_ops",
    "wall_ms",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFamily {
    Gaussian,
    Illcond,
    Redwine,
    Calihousing,
}

impl InputFamily {
    pub fn name(self) -> &'static str {
        match self {
            InputFamily::Gaussian => "gaussian",
            InputFamily::Illcond => "illcond",
            InputFamily::Redwine => "redwine",
            InputFamily::Calihousing => "calihousing",
        }
    }

    pub fn is_synthetic(self) -> bool {
        matches!(self, InputFamily::Gaussian | InputFamily::Illcond)
    }

    fn dataset(self) -> Option<DatasetName> {
        match self {
            InputFamily::Redwine => Some(DatasetName::RedWine),
            InputFamily::Calihousing => Some(DatasetName::CaliHousing),
            _ => None,
        }
    }
}

impl fmt::Display for InputFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InputFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            InputFamily::Gaussian,
            InputFamily::Illcond,
            InputFamily::Redwine,
            InputFamily::Calihousing,
        ]
        .into_iter()
        .find(|f| f.name() == s)
        .ok_or_else(|| Error::param(format!("unknown input family {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub input: InputFamily,
    /// Synthetic inputs only; datasets report their own shape.
    pub m: usize,
    pub d: usize,
    pub kinds: Vec<SketchKind>,
    pub h_values: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub noise_scale: f64,
    pub data_path: Option<PathBuf>,
    /// Draw a fresh synthetic `(A, b)` for every trial index instead of one
    /// instance for the whole run.
    #[serde(default)]
    pub refresh_input: bool,
    /// Keep per-trial records in the report.
    #[serde(default)]
    pub keep_trials: bool,
    /// Worker threads, `0` for one per core. Not part of the results.
    #[serde(default, skip_serializing)]
    pub threads: usize,
}

impl ExperimentConfig {
    /// Synthetic run with the default grid: all kinds, `h = 2..=6`, 100 trials.
    pub fn synthetic(input: InputFamily, m: usize, d: usize) -> Self {
        ExperimentConfig {
            input,
            m,
            d,
            kinds: SketchKind::ALL.to_vec(),
            h_values: DEFAULT_H_VALUES.to_vec(),
            trials: DEFAULT_TRIALS,
            master_seed: 0,
            noise_scale: RhsRecipe::default().noise_scale,
            data_path: None,
            refresh_input: false,
            keep_trials: false,
            threads: 0,
        }
    }

    pub fn dataset(input: InputFamily, path: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            data_path: Some(path.into()),
            ..Self::synthetic(input, 0, 0)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        if self.kinds.is_empty() {
            return Err(Error::param("no multiplier kinds selected"));
        }
        if self.h_values.is_empty() || self.h_values.contains(&0) {
            return Err(Error::param("h values must be positive"));
        }
        if self.input.is_synthetic() && (self.d == 0 || self.d >= self.m) {
            return Err(Error::param(format!(
                "synthetic input needs 0 < d < m, got m = {}, d = {}",
                self.m, self.d
            )));
        }
        if !self.input.is_synthetic() && self.data_path.is_none() {
            return Err(Error::param(format!("{} input needs a data path", self.input)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub relative_residual: f64,
    pub entries_read: u64,
    pub scalar_ops: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub input: InputFamily,
    pub kind: SketchKind,
    pub h: usize,
    pub s: usize,
    /// Trials that produced a solution.
    pub trials: usize,
    pub skipped: Option<String>,
    pub mean_rel_resid: Option<f64>,
    pub std_rel_resid: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean_entries_read: Option<f64>,
    pub mean_scalar_ops: Option<f64>,
    pub wall_ms: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<TrialFailure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<TrialRecord>,
}

impl CellReport {
    fn skipped(input: InputFamily, kind: SketchKind, h: usize, s: usize, reason: String) -> Self {
        CellReport {
            input,
            kind,
            h,
            s,
            trials: 0,
            skipped: Some(reason),
            mean_rel_resid: None,
            std_rel_resid: None,
            min: None,
            max: None,
            mean_entries_read: None,
            mean_scalar_ops: None,
            wall_ms: 0.0,
            failures: Vec::new(),
            records: Vec::new(),
        }
    }

    pub fn is_skipped(&self) -> bool {
        self.skipped.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Shape of the problem actually solved.
    pub m: usize,
    pub d: usize,
    pub cells: Vec<CellReport>,
}

impl ExperimentReport {
    pub fn cell(&self, kind: SketchKind, h: usize) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.kind == kind && c.h == h)
    }

    /// The report with wall-times and the thread count cleared.
    pub fn without_timings(&self) -> ExperimentReport {
        let mut r = self.clone();
        r.config.threads = 0;
        r.cells.iter_mut().for_each(|c| c.wall_ms = 0.0);
        r
    }
}

struct Instance {
    problem: LlspProblem,
    exact: Solution,
}

fn synthetic_instance(cfg: &ExperimentConfig, index: u64) -> Result<Instance> {
    let seed = rng::derive_seed(
        cfg.master_seed,
        &[rng::tag("input"), rng::tag(cfg.input.name()), index],
    );
    let a = match cfg.input {
        InputFamily::Gaussian => gen_gaussian_input(cfg.m, cfg.d, seed)?,
        InputFamily::Illcond => gen_illcond_input(cfg.m, cfg.d, &IllCondSpectrum::standard(cfg.d), seed)?,
        _ => unreachable!("dataset inputs are loaded, not generated"),
    };
    let b = gen_rhs(
        &a,
        &RhsRecipe::new(cfg.noise_scale)?,
        rng::derive_seed(seed, &[rng::tag("rhs")]),
    )?;
    let problem = LlspProblem::new(a, b)?;
    let exact = solve_exact(&problem)?;
    Ok(Instance { problem, exact })
}

fn build_instances(cfg: &ExperimentConfig) -> Result<Vec<Instance>> {
    if let Some(name) = cfg.input.dataset() {
        let path = cfg.data_path.as_ref().expect("validated");
        let seed = rng::derive_seed(cfg.master_seed, &[rng::tag("input"), rng::tag(name.name())]);
        let problem = load_dataset(name, path, seed)?;
        let exact = solve_exact(&problem)?;
        return Ok(vec![Instance { problem, exact }]);
    }
    let count = if cfg.refresh_input { cfg.trials } else { 1 };
    (0..count as u64)
        .into_par_iter()
        .map(|i| synthetic_instance(cfg, i))
        .collect()
}

pub fn trial_seed(master: u64, trial: usize, kind: SketchKind) -> u64 {
    rng::derive_seed(master, &[trial as u64, rng::tag(kind.name())])
}

fn run_trial(
    inst: &Instance,
    kind: SketchKind,
    s: usize,
    trial: usize,
    seed: u64,
) -> std::result::Result<TrialRecord, TrialFailure> {
    let fail = |e: Error| TrialFailure {
        trial,
        seed,
        message: e.to_string(),
    };
    let op = make_sketch(kind, s, inst.problem.m(), seed).map_err(fail)?;
    let sol = sketch_and_solve(&inst.problem, &op, Some(&inst.exact)).map_err(fail)?;
    let cost = sol.sketch.as_ref().map(|m| m.cost).unwrap_or_default();
    Ok(TrialRecord {
        trial,
        seed,
        relative_residual: sol.relative_residual.expect("exact solution supplied"),
        entries_read: cost.entries_read,
        scalar_ops: cost.scalar_ops(),
    })
}

fn run_cell(cfg: &ExperimentConfig, instances: &[Instance], kind: SketchKind, h: usize) -> CellReport {
    let (m, d) = (instances[0].problem.m(), instances[0].problem.d());
    let s = d * h;
    if s > m {
        return CellReport::skipped(cfg.input, kind, h, s, format!("s = {s} exceeds m = {m}"));
    }
    let start = Instant::now();
    let outcomes: Vec<_> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let inst = &instances[t % instances.len()];
            run_trial(inst, kind, s, t, trial_seed(cfg.master_seed, t, kind))
        })
        .collect();
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut records = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => records.push(r),
            Err(f) => failures.push(f),
        }
    }
    let rel: Vec<f64> = records.iter().map(|r| r.relative_residual).collect();
    let reads: Vec<f64> = records.iter().map(|r| r.entries_read as f64).collect();
    let ops: Vec<f64> = records.iter().map(|r| r.scalar_ops as f64).collect();
    let summary = summarize(&rel);
    CellReport {
        input: cfg.input,
        kind,
        h,
        s,
        trials: records.len(),
        skipped: None,
        mean_rel_resid: summary.map(|s| s.mean),
        std_rel_resid: summary.map(|s| s.std),
        min: summary.map(|s| s.min),
        max: summary.map(|s| s.max),
        mean_entries_read: summarize(&reads).map(|s| s.mean),
        mean_scalar_ops: summarize(&ops).map(|s| s.mean),
        wall_ms,
        failures,
        records: if cfg.keep_trials { records } else { Vec::new() },
    }
}

/// Thread cap from `SKETCHLS_THREADS`; `0` when unset or unparsable.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

/// Runs every (kind, h) cell of `cfg`. Cells whose sketch would be taller than
/// the input are reported as skipped; trials whose reduced problem is
/// degenerate are recorded as failures.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::param(format!("thread pool: {e}")))?;
    pool.install(|| {
        let instances = build_instances(cfg)?;
        let (m, d) = (instances[0].problem.m(), instances[0].problem.d());
        let mut cells = Vec::with_capacity(cfg.kinds.len() * cfg.h_values.len());
        for &kind in &cfg.kinds {
            for &h in &cfg.h_values {
                cells.push(run_cell(cfg, &instances, kind, h));
            }
        }
        Ok(ExperimentReport {
            config: cfg.clone(),
            m,
            d,
            cells,
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::param(format!("unknown report format {s:?}"))),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(report: &ExperimentReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Csv(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for c in &report.cells {
        w.write_record([
            c.input.name().to_string(),
            c.kind.name().to_string(),
            c.h.to_string(),
            c.s.to_string(),
            c.trials.to_string(),
            opt(c.mean_rel_resid),
            opt(c.std_rel_resid),
            opt(c.min),
            opt(c.max),
            opt(c.mean_entries_read),
            opt(c.mean_scalar_ops),
            c.wall_ms.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}

pub fn to_csv_string(report: &ExperimentReport) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(report, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

pub fn to_json_string(report: &ExperimentReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn parse_json_report(text: &str) -> Result<ExperimentReport> {
    Ok(serde_json::from_str(text)?)
}

/// Writes the report to `path` in the requested format.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let body = match format {
        ReportFormat::Csv => to_csv_string(report)?,
        ReportFormat::Json => to_json_string(report)?,
    };
    std::fs::write(path, body).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })
}
