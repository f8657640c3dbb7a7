//! Test-then-train evaluation.
//!
//! The runner owns the ordering: every instance is predicted first, counted into the
//! metrics, and only then offered to the learner together with a label oracle.

use std::time::{Duration, Instant};

use super::kappa::{KappaAccumulator, KappaMode};
use crate::error::{contract, Error, Result};
use crate::types::{ActiveLearner, ClassLabel, ElevationStats, Instance, LabeledInstance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    /// Zero-based arrival index of the last instance included.
    pub t: u64,
    pub kappa: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub classes: usize,
    /// Horizon of the windowed series; `None` disables the series.
    pub series: Option<KappaMode>,
    pub stride: u64,
}

impl EvalOptions {
    pub fn global(classes: usize) -> Self {
        Self {
            classes,
            series: None,
            stride: 1,
        }
    }

    pub fn with_series(mut self, mode: KappaMode, stride: u64) -> Self {
        self.series = Some(mode);
        self.stride = stride;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub instances: u64,
    /// `None` for an empty stream.
    pub kappa: Option<f64>,
    pub accuracy: Option<f64>,
    pub labeled: u64,
    pub spending: f64,
    /// Prefixes at which spending exceeded `B + 1/seen`.
    pub budget_violations: u64,
    pub updates: u64,
    pub elevations: ElevationStats,
    pub elapsed: Duration,
    pub series: Vec<SeriesPoint>,
}

/// Browsers' wasm targets have no monotonic clock; elapsed time reads as zero there.
fn clock() -> Option<Instant> {
    if cfg!(target_family = "wasm") {
        None
    } else {
        Some(Instant::now())
    }
}

pub fn run_test_then_train<L, S>(
    learner: &mut L,
    stream: S,
    options: EvalOptions,
) -> Result<EvalReport>
where
    L: ActiveLearner + ?Sized,
    S: IntoIterator<Item = Result<LabeledInstance>>,
{
    if options.stride == 0 {
        return Err(contract("series stride must be at least 1"));
    }
    let start = clock();
    let mut global = KappaAccumulator::new(options.classes, KappaMode::Global)?;
    let mut windowed = options
        .series
        .map(|m| KappaAccumulator::new(options.classes, m))
        .transpose()?;
    let mut report = EvalReport::default();
    let mut last_t = None;
    let mut last_emitted = None;

    for inst in stream {
        let inst = inst?;
        let (truth, t) = (inst.label, inst.instance.arrival_index);
        if truth.0 >= options.classes {
            return Err(Error::LabelOutOfRange {
                label: truth.0,
                classes: options.classes,
            });
        }
        let prediction = learner.predict(&inst.instance);
        let predicted = prediction.argmax()?;
        global.add(truth.0, predicted.0)?;
        if let Some(w) = windowed.as_mut() {
            w.add(truth.0, predicted.0)?;
        }
        learner.record_ground_truth(&inst.instance, truth);
        let mut oracle = |_: &Instance| -> Result<ClassLabel> { Ok(truth) };
        learner.offer(&inst.instance, &prediction, &mut oracle)?;
        report.instances += 1;
        last_t = Some(t);

        if learner.budget().is_some_and(|b| !b.within_law()) {
            report.budget_violations += 1;
        }
        if let Some(w) = windowed.as_ref() {
            if report.instances % options.stride == 0 {
                report.series.push(point(w, t));
                last_emitted = Some(t);
            }
        }
    }

    if let (Some(w), Some(t)) = (windowed.as_ref(), last_t) {
        if last_emitted != Some(t) {
            report.series.push(point(w, t));
        }
    }
    report.kappa = global.kappa();
    report.accuracy = global.accuracy();
    if let Some(budget) = learner.budget() {
        report.labeled = budget.labeled();
        report.spending = budget.spending();
    }
    let counters = learner.counters();
    report.updates = counters.updates;
    report.elevations = counters.elevations;
    report.elapsed = start.map_or(Duration::ZERO, |s| s.elapsed());
    Ok(report)
}

fn point(acc: &KappaAccumulator, t: u64) -> SeriesPoint {
    SeriesPoint {
        t,
        kappa: acc.kappa().unwrap_or(0.0),
        accuracy: acc.accuracy().unwrap_or(0.0),
    }
}

/// Windowed kappa sampled every `stride` instances; the last instance always closes the
/// series.
pub fn prequential_series<L, S>(
    learner: &mut L,
    stream: S,
    classes: usize,
    mode: KappaMode,
    stride: u64,
) -> Result<Vec<SeriesPoint>>
where
    L: ActiveLearner + ?Sized,
    S: IntoIterator<Item = Result<LabeledInstance>>,
{
    let options = EvalOptions::global(classes).with_series(mode, stride);
    Ok(run_test_then_train(learner, stream, options)?.series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::active::BudgetTracker;
    use crate::types::{LabelOracle, PredictionDistribution, ProcessOutcome};

    /// Answers with a fixed rule and queries every label it can.
    struct Stub<F> {
        rule: F,
        budget: BudgetTracker,
        queried: Vec<u64>,
    }

    impl<F: Fn(&Instance) -> usize> Stub<F> {
        fn new(rule: F, budget: f64) -> Self {
            Self {
                rule,
                budget: BudgetTracker::new(budget).unwrap(),
                queried: Vec::new(),
            }
        }
    }

    impl<F: Fn(&Instance) -> usize> ActiveLearner for Stub<F> {
        fn predict(&self, x: &Instance) -> PredictionDistribution {
            PredictionDistribution::one_hot(2, ClassLabel((self.rule)(x)))
        }

        fn offer(
            &mut self,
            x: &Instance,
            p: &PredictionDistribution,
            oracle: &mut dyn LabelOracle,
        ) -> Result<ProcessOutcome> {
            self.budget.observe();
            let queried = self.budget.allows();
            if queried {
                self.budget.record_query();
                oracle.request_label(x)?;
                self.queried.push(x.arrival_index);
            }
            Ok(ProcessOutcome {
                queried,
                lambda: 0,
                prediction: p.argmax()?,
            })
        }

        fn budget(&self) -> Option<&BudgetTracker> {
            Some(&self.budget)
        }
    }

    fn balanced(n: u64) -> Vec<Result<LabeledInstance>> {
        (0..n)
            .map(|t| {
                Ok(LabeledInstance::new(
                    vec![(t % 2) as f64],
                    t,
                    (t % 2) as usize,
                ))
            })
            .collect()
    }

    #[test]
    fn empty_stream() {
        let mut stub = Stub::new(|_: &Instance| 0, 1.0);
        let r = run_test_then_train(&mut stub, Vec::new(), EvalOptions::global(2)).unwrap();
        assert_eq!(r.instances, 0);
        assert_eq!(r.kappa, None);
        let series =
            prequential_series(&mut stub, Vec::new(), 2, KappaMode::SlidingWindow(5), 3).unwrap();
        assert!(series.is_empty());
    }

    #[test]
    fn perfect_and_majority_learners() {
        let mut oracle = Stub::new(|x: &Instance| x.features[0] as usize, 0.5);
        let r = run_test_then_train(&mut oracle, balanced(1000), EvalOptions::global(2)).unwrap();
        assert_eq!(r.kappa, Some(1.0));
        assert_eq!(r.budget_violations, 0);
        assert!(r.spending <= 0.5 + 1e-3);
        let mut majority = Stub::new(|_: &Instance| 0, 0.5);
        let r = run_test_then_train(&mut majority, balanced(1000), EvalOptions::global(2)).unwrap();
        assert!(r.kappa.unwrap().abs() < 1e-12);
        assert_eq!(r.accuracy, Some(0.5));
    }

    #[test]
    fn series_stride_and_final_point() {
        let mut stub = Stub::new(|x: &Instance| x.features[0] as usize, 1.0);
        let series =
            prequential_series(&mut stub, balanced(10), 2, KappaMode::SlidingWindow(4), 100)
                .unwrap();
        assert_eq!(series.len(), 1);
        assert_eq!(series[0].t, 9);
        let mut stub = Stub::new(|x: &Instance| x.features[0] as usize, 1.0);
        let series =
            prequential_series(&mut stub, balanced(10), 2, KappaMode::SlidingWindow(4), 3).unwrap();
        assert_eq!(
            series.iter().map(|p| p.t).collect::<Vec<_>>(),
            vec![2, 5, 8, 9]
        );
        let mut stub = Stub::new(|x: &Instance| x.features[0] as usize, 1.0);
        let series =
            prequential_series(&mut stub, balanced(9), 2, KappaMode::SlidingWindow(4), 3).unwrap();
        assert_eq!(
            series.iter().map(|p| p.t).collect::<Vec<_>>(),
            vec![2, 5, 8]
        );
    }

    #[test]
    fn breaking_learner_dips_after_the_break() {
        let mut stub = Stub::new(
            |x: &Instance| {
                let truth = x.features[0] as usize;
                if x.arrival_index >= 500 {
                    1 - truth
                } else {
                    truth
                }
            },
            1.0,
        );
        let series = prequential_series(
            &mut stub,
            balanced(1000),
            2,
            KappaMode::SlidingWindow(50),
            10,
        )
        .unwrap();
        for p in &series {
            if p.t < 500 {
                assert_eq!(p.kappa, 1.0);
            } else if p.t >= 550 {
                assert_eq!(p.kappa, -1.0);
            }
        }
    }

    #[test]
    fn label_out_of_range_is_reported() {
        let mut stub = Stub::new(|_: &Instance| 0, 1.0);
        let bad = vec![Ok(LabeledInstance::new(vec![0.0], 0, 5))];
        assert!(matches!(
            run_test_then_train(&mut stub, bad, EvalOptions::global(2)),
            Err(Error::LabelOutOfRange {
                label: 5,
                classes: 2
            })
        ));
    }

    #[test]
    fn stub_sees_labels_only_through_the_oracle() {
        let mut stub = Stub::new(|_: &Instance| 1, 0.1);
        let r = run_test_then_train(&mut stub, balanced(1000), EvalOptions::global(2)).unwrap();
        assert_eq!(r.labeled, stub.queried.len() as u64);
        assert_eq!(r.labeled, 100);
    }
}
