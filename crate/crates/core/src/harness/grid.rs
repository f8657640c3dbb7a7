//! Grid execution: budgets × strategies × seeds, one result row per cell.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::config::{EnsembleChoice, ExperimentConfig, StrategyChoice, StreamSource};
use crate::active::{QueryKind, QueryStrategy};
use crate::ensemble::{EnsembleMode, PairedEnsemble};
use crate::error::Result;
use crate::eval::{run_test_then_train, segment_average, EvalOptions, SegmentSchedule};
use crate::exploit::{ExploitConfig, ExploitingWrapper};
use crate::rng::SeededRng;
use crate::streams::{scan_shape, StreamFileReader};
use crate::types::{ActiveLearner, LabeledInstance};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "INSTEXP_OUTPUT_DIR";

pub const CSV_HEADER: [&str; 25] = [
    "config_id",
    "stream",
    "learner",
    "query",
    "seed",
    "budget",
    "strategy",
    "lambda_max",
    "window",
    "intensity",
    "ensemble",
    "instances",
    "kappa",
    "stable_kappa",
    "drift_kappa",
    "balanced_kappa",
    "accuracy",
    "spending",
    "labeled",
    "budget_violations",
    "updates",
    "elevations_tp",
    "elevations_fp",
    "elevations_unverified",
    "elapsed_ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub budget_index: usize,
    pub strategy_index: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub cell: Cell,
    pub config_id: String,
    pub stream: String,
    pub learner: String,
    pub query: String,
    pub budget: f64,
    pub strategy: String,
    pub lambda_max: usize,
    pub window: String,
    pub intensity: String,
    pub ensemble: String,
    pub instances: u64,
    pub kappa: Option<f64>,
    pub stable_kappa: Option<f64>,
    pub drift_kappa: Option<f64>,
    pub balanced_kappa: Option<f64>,
    pub accuracy: Option<f64>,
    pub spending: f64,
    pub labeled: u64,
    pub budget_violations: u64,
    pub updates: u64,
    pub elevations_tp: u64,
    pub elevations_fp: u64,
    pub elevations_unverified: u64,
    /// Only filled when timing is requested; wall time breaks byte-identical reruns.
    pub elapsed_ms: Option<u128>,
}

impl ResultRow {
    pub fn record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
        vec![
            self.config_id.clone(),
            self.stream.clone(),
            self.learner.clone(),
            self.query.clone(),
            self.cell.seed.to_string(),
            self.budget.to_string(),
            self.strategy.clone(),
            self.lambda_max.to_string(),
            self.window.clone(),
            self.intensity.clone(),
            self.ensemble.clone(),
            self.instances.to_string(),
            opt(self.kappa),
            opt(self.stable_kappa),
            opt(self.drift_kappa),
            opt(self.balanced_kappa),
            opt(self.accuracy),
            self.spending.to_string(),
            self.labeled.to_string(),
            self.budget_violations.to_string(),
            self.updates.to_string(),
            self.elevations_tp.to_string(),
            self.elevations_fp.to_string(),
            self.elevations_unverified.to_string(),
            self.elapsed_ms.map_or_else(String::new, |v| v.to_string()),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridOptions {
    pub jobs: usize,
    /// Replaces the configured seed list with a single seed.
    pub seed_override: Option<u64>,
    pub timing: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            jobs: 1,
            seed_override: None,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub cell: Cell,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridOutcome {
    /// Sorted by budget, strategy and seed.
    pub rows: Vec<ResultRow>,
    pub failures: Vec<CellFailure>,
}

pub fn expand_cells(config: &ExperimentConfig, options: &GridOptions) -> Vec<Cell> {
    let seeds = options
        .seed_override
        .map_or_else(|| config.seeds.clone(), |s| vec![s]);
    let mut cells =
        Vec::with_capacity(config.budgets.len() * config.strategies.len() * seeds.len());
    for budget_index in 0..config.budgets.len() {
        for strategy_index in 0..config.strategies.len() {
            for &seed in &seeds {
                cells.push(Cell {
                    budget_index,
                    strategy_index,
                    seed,
                });
            }
        }
    }
    cells
}

type Instances = Box<dyn Iterator<Item = Result<LabeledInstance>>>;

struct OpenedStream {
    instances: Instances,
    dim: usize,
    classes: usize,
    schedule: SegmentSchedule,
}

fn open_stream(config: &ExperimentConfig, seed: u64) -> Result<OpenedStream> {
    match &config.stream {
        StreamSource::Preset(p) => {
            let stream = p.build(seed, config.length)?;
            let schedule = SegmentSchedule::new(stream.drift_intervals(), stream.len())?;
            Ok(OpenedStream {
                dim: stream.dim(),
                classes: stream.classes(),
                schedule,
                instances: Box::new(stream),
            })
        }
        StreamSource::File { path, format } => {
            let (dim, classes) = scan_shape(path, format.clone())?;
            let reader = StreamFileReader::open(path, format.clone())?;
            let instances: Instances = match config.length {
                Some(n) => Box::new(reader.take(n as usize)),
                None => Box::new(reader),
            };
            Ok(OpenedStream {
                instances,
                dim,
                classes,
                schedule: SegmentSchedule::new(Vec::new(), 0)?,
            })
        }
    }
}

/// Builds the active learner for one cell.
pub fn build_learner(
    config: &ExperimentConfig,
    cell: Cell,
    dim: usize,
    classes: usize,
) -> Result<Box<dyn ActiveLearner>> {
    let budget = config.budgets[cell.budget_index];
    let alpha_theta = config.alpha_theta[cell.budget_index];
    let base = config.learner.build(dim, classes);
    let rng = SeededRng::new(cell.seed).derive("learner");
    let query = match config.query {
        QueryKind::Selective => QueryStrategy::selective(config.selective_slope),
        kind => QueryStrategy::from_kind(kind, budget),
    };
    let exploit = match config.strategies[cell.strategy_index] {
        StrategyChoice::Baseline => ExploitConfig::baseline(),
        StrategyChoice::Exploit(kind) => ExploitConfig::new(
            kind,
            config.lambda_max[cell.budget_index],
            config.dynamic_intensity,
            config.window,
        ),
    }
    .with_monitor_delta(alpha_theta);
    let mode = match config.ensemble {
        EnsembleChoice::None => {
            return Ok(Box::new(ExploitingWrapper::new(
                base, exploit, budget, query, &rng,
            )?));
        }
        EnsembleChoice::Switching => EnsembleMode::Switching,
        EnsembleChoice::Elevating { alpha } => EnsembleMode::Elevating { alpha },
    };
    Ok(Box::new(
        PairedEnsemble::new(base, exploit, mode, budget, query, alpha_theta, &rng)?.with_shadow(),
    ))
}

pub fn run_cell(config: &ExperimentConfig, cell: Cell, timing: bool) -> Result<ResultRow> {
    let opened = open_stream(config, cell.seed)?;
    let mut learner = build_learner(config, cell, opened.dim, opened.classes)?;
    let options = EvalOptions::global(opened.classes).with_series(config.series, config.stride);
    let report = run_test_then_train(learner.as_mut(), opened.instances, options)?;
    let segments = segment_average(&report.series, &opened.schedule);
    let strategy = config.strategies[cell.strategy_index];
    let e = report.elevations;
    Ok(ResultRow {
        cell,
        config_id: config.name.clone(),
        stream: config.stream.name(),
        learner: config.learner.kind.name().to_string(),
        query: config.query.name().to_string(),
        budget: config.budgets[cell.budget_index],
        strategy: strategy.name().to_string(),
        lambda_max: match strategy {
            StrategyChoice::Baseline => 0,
            StrategyChoice::Exploit(_) => config.lambda_max[cell.budget_index],
        },
        window: config.window.describe(),
        intensity: if config.dynamic_intensity {
            "dynamic"
        } else {
            "fixed"
        }
        .to_string(),
        ensemble: config.ensemble.describe(),
        instances: report.instances,
        kappa: report.kappa,
        stable_kappa: segments.stable,
        drift_kappa: segments.drift,
        balanced_kappa: segments.balanced,
        accuracy: report.accuracy,
        spending: report.spending,
        labeled: report.labeled,
        budget_violations: report.budget_violations,
        updates: report.updates,
        elevations_tp: e.risky_tp + e.standard_tp,
        elevations_fp: e.risky_fp + e.standard_fp,
        elevations_unverified: e.unverified,
        elapsed_ms: timing.then_some(report.elapsed.as_millis()),
    })
}

/// Runs every cell, up to `options.jobs` at a time. Failed cells are collected and the
/// rest still run. `progress` sees each finished cell with the running count.
pub fn run_grid(
    config: &ExperimentConfig,
    options: &GridOptions,
    progress: &(dyn Fn(&Cell, usize, usize) + Sync),
) -> GridOutcome {
    let cells = expand_cells(config, options);
    let total = cells.len();
    let next = AtomicUsize::new(0);
    let done = AtomicUsize::new(0);
    let results: Mutex<Vec<(Cell, Result<ResultRow>)>> = Mutex::new(Vec::with_capacity(total));
    let workers = options.jobs.max(1).min(total.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&cell) = cells.get(i) else { break };
                let outcome = run_cell(config, cell, options.timing);
                results
                    .lock()
                    .expect("no poisoned lock")
                    .push((cell, outcome));
                let n = done.fetch_add(1, Ordering::Relaxed) + 1;
                progress(&cell, n, total);
            });
        }
    });
    let mut results = results.into_inner().expect("no poisoned lock");
    results.sort_by_key(|(cell, _)| *cell);
    let mut outcome = GridOutcome::default();
    for (cell, r) in results {
        match r {
            Ok(row) => outcome.rows.push(row),
            Err(e) => outcome.failures.push(CellFailure {
                cell,
                message: e.to_string(),
            }),
        }
    }
    outcome
}

pub fn write_csv<W: Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Explicit path, else the config's `output`, else `<name>.csv` in the directory named
/// by [`OUTPUT_DIR_ENV`] or the working directory.
pub fn resolve_output(config: &ExperimentConfig, explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = &config.output {
        return p.clone();
    }
    let dir = std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from);
    dir.join(format!("{}.csv", config.name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::parse_config;

    fn small(extra: &str) -> ExperimentConfig {
        parse_config(&format!(
            "stream = SEA1\nlength = 3000\nlearner = NB\nbudgets = [0.5, 0.1]\nseeds = [1, 2, 3]\n{extra}"
        ))
        .unwrap()
    }

    fn csv_of(rows: &[ResultRow]) -> String {
        let mut buf = Vec::new();
        write_csv(rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn counts_rows() {
        let c = small("");
        let out = run_grid(&c, &GridOptions::default(), &|_, _, _| {});
        assert!(out.failures.is_empty());
        assert_eq!(out.rows.len(), 6);
        let text = csv_of(&out.rows);
        assert_eq!(text.lines().count(), 7);
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    }

    #[test]
    fn reruns_and_parallelism_are_byte_identical() {
        let c = small("strategy = [Baseline, UW]\nensemble = switching\n");
        let a = run_grid(&c, &GridOptions::default(), &|_, _, _| {});
        let b = run_grid(
            &c,
            &GridOptions {
                jobs: 4,
                ..Default::default()
            },
            &|_, _, _| {},
        );
        assert_eq!(csv_of(&a.rows), csv_of(&b.rows));
        assert!(a.rows.iter().all(|r| r.elapsed_ms.is_none()));
    }

    #[test]
    fn zero_intensity_uw_matches_baseline() {
        let c = small("strategy = [Baseline, UW]\nlambda_max = 0\n");
        let c = ExperimentConfig {
            learner: crate::learners::LearnerSpec::new(crate::learners::LearnerKind::HoeffdingTree),
            ..c
        };
        let out = run_grid(&c, &GridOptions::default(), &|_, _, _| {});
        for pair in out.rows.chunks(3).collect::<Vec<_>>().chunks(2) {
            for (base, uw) in pair[0].iter().zip(pair[1]) {
                assert_eq!(base.strategy, "Baseline");
                assert_eq!(uw.strategy, "UW");
                assert_eq!(base.kappa, uw.kappa);
                assert_eq!(base.stable_kappa, uw.stable_kappa);
                assert_eq!(base.drift_kappa, uw.drift_kappa);
            }
        }
    }

    #[test]
    fn seed_override_and_failures() {
        let c = small("");
        let cells = expand_cells(
            &c,
            &GridOptions {
                seed_override: Some(9),
                ..Default::default()
            },
        );
        assert_eq!(cells.len(), 2);
        assert!(cells.iter().all(|c| c.seed == 9));
        let broken =
            parse_config("stream = /nonexistent/data.csv\nlearner = NB\nbudgets = [0.5]\n")
                .unwrap();
        let out = run_grid(&broken, &GridOptions::default(), &|_, _, _| {});
        assert_eq!(out.rows.len(), 0);
        assert_eq!(out.failures.len(), 1);
    }

    #[test]
    fn output_resolution() {
        let c = small("");
        assert_eq!(
            resolve_output(&c, Some(Path::new("x.csv"))),
            PathBuf::from("x.csv")
        );
        let with_output = ExperimentConfig {
            output: Some(PathBuf::from("/tmp/y.csv")),
            ..c.clone()
        };
        assert_eq!(
            resolve_output(&with_output, None),
            PathBuf::from("/tmp/y.csv")
        );
        assert!(resolve_output(&c, None).ends_with("SEA1.csv"));
    }
}
