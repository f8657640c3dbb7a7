use crate::active::{BudgetTracker, QueryStrategy};
use crate::adwin::AdwinEstimator;
use crate::error::Result;
use crate::exploit::control::{effective_window_cap, IntensityController, WindowPolicy};
use crate::exploit::sampling::{select_indices, StrategyKind};
use crate::exploit::window::LabeledWindow;
use crate::rng::SeededRng;
use crate::types::{
    ActiveLearner, Classifier, Instance, LabelOracle, LabeledInstance, LearnerCounters,
    PredictionDistribution, ProcessOutcome,
};

pub const DEFAULT_MONITOR_DELTA: f64 = 0.002;

#[derive(Debug, Clone, PartialEq)]
pub struct ExploitConfig {
    /// `None` is the plain active-learning baseline.
    pub strategy: Option<StrategyKind>,
    pub intensity: IntensityController,
    pub window: WindowPolicy,
    /// Confidence of the error monitor driving the dynamic controls.
    pub monitor_delta: f64,
}

impl ExploitConfig {
    pub fn baseline() -> Self {
        Self {
            strategy: None,
            intensity: IntensityController {
                lambda_max: 0,
                dynamic: false,
            },
            window: WindowPolicy::AdwinDriven,
            monitor_delta: DEFAULT_MONITOR_DELTA,
        }
    }

    pub fn new(
        strategy: StrategyKind,
        lambda_max: usize,
        dynamic: bool,
        window: WindowPolicy,
    ) -> Self {
        Self {
            strategy: Some(strategy),
            intensity: IntensityController {
                lambda_max,
                dynamic,
            },
            window,
            monitor_delta: DEFAULT_MONITOR_DELTA,
        }
    }

    pub fn with_monitor_delta(mut self, delta: f64) -> Self {
        self.monitor_delta = delta;
        self
    }

    pub fn name(&self) -> &'static str {
        self.strategy.map_or("Baseline", |s| s.name())
    }
}

/// Learner plus the replay machinery, without any labeling decisions.
#[derive(Debug, Clone)]
pub struct Exploiter<L> {
    learner: L,
    window: LabeledWindow,
    config: ExploitConfig,
    monitor: AdwinEstimator,
    rng: SeededRng,
    updates: u64,
    last_lambda: usize,
}

impl<L: Classifier> Exploiter<L> {
    pub fn new(learner: L, config: ExploitConfig, rng: SeededRng) -> Result<Self> {
        let monitor = AdwinEstimator::new(config.monitor_delta)?;
        let initial_cap = effective_window_cap(config.window, 0.0, 0);
        Ok(Self {
            learner,
            window: LabeledWindow::new(initial_cap),
            config,
            monitor,
            rng,
            updates: 0,
            last_lambda: 0,
        })
    }

    pub fn learner(&self) -> &L {
        &self.learner
    }

    pub fn learner_mut(&mut self) -> &mut L {
        &mut self.learner
    }

    pub fn replace_learner(&mut self, learner: L) {
        self.learner = learner;
    }

    pub fn window(&self) -> &LabeledWindow {
        &self.window
    }

    pub fn monitor(&self) -> &AdwinEstimator {
        &self.monitor
    }

    pub fn config(&self) -> &ExploitConfig {
        &self.config
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn last_lambda(&self) -> usize {
        self.last_lambda
    }

    /// Trains on a freshly labeled instance, then replays `λ` instances from the window.
    /// `prediction` is the learner's output for `inst` before this update.
    pub fn learn(
        &mut self,
        inst: LabeledInstance,
        prediction: &PredictionDistribution,
    ) -> Result<usize> {
        let wrong = prediction.argmax().map_or(true, |l| l != inst.label);
        self.monitor.update(if wrong { 1.0 } else { 0.0 })?;
        self.learner.update(&inst)?;
        self.updates += 1;

        let Some(strategy) = self.config.strategy else {
            self.last_lambda = 0;
            return Ok(0);
        };
        let error = self.monitor.mean();
        self.window.set_capacity(effective_window_cap(
            self.config.window,
            error,
            self.monitor.width(),
        ));
        self.window.push(inst);

        let lambda = self.config.intensity.intensity(error);
        let indices = select_indices(strategy, self.window.len(), lambda, &mut self.rng)?;
        for i in indices {
            let replay = self.window.get(i).expect("index within window");
            self.learner.update(replay)?;
            self.updates += 1;
        }
        self.last_lambda = lambda;
        Ok(lambda)
    }
}

/// Active learning with instance exploitation around a single learner.
#[derive(Debug, Clone)]
pub struct ExploitingWrapper<L> {
    exploiter: Exploiter<L>,
    budget: BudgetTracker,
    query: QueryStrategy,
    query_rng: SeededRng,
}

impl<L: Classifier> ExploitingWrapper<L> {
    /// Query and replay randomness come from sub-streams of `rng`.
    pub fn new(
        learner: L,
        config: ExploitConfig,
        budget: f64,
        query: QueryStrategy,
        rng: &SeededRng,
    ) -> Result<Self> {
        query.validate()?;
        Ok(Self {
            exploiter: Exploiter::new(learner, config, rng.derive("exploit"))?,
            budget: BudgetTracker::new(budget)?,
            query,
            query_rng: rng.derive("query"),
        })
    }

    pub fn learner(&self) -> &L {
        self.exploiter.learner()
    }

    pub fn exploiter(&self) -> &Exploiter<L> {
        &self.exploiter
    }

    pub fn budget_tracker(&self) -> &BudgetTracker {
        &self.budget
    }

    pub fn query(&self) -> &QueryStrategy {
        &self.query
    }

    pub fn process_instance(
        &mut self,
        x: &Instance,
        oracle: &mut dyn LabelOracle,
    ) -> Result<ProcessOutcome> {
        let prediction = self.exploiter.learner().predict(x);
        self.offer(x, &prediction, oracle)
    }
}

/// Shared active-learning gate: counts the arrival, then asks the strategy only when the
/// budget still allows a query.
pub(crate) fn gate(
    budget: &mut BudgetTracker,
    query: &mut QueryStrategy,
    rng: &mut SeededRng,
    prediction: &PredictionDistribution,
) -> bool {
    budget.observe();
    if budget.allows() && query.should_query(prediction, rng) {
        budget.record_query();
        true
    } else {
        false
    }
}

impl<L: Classifier> ActiveLearner for ExploitingWrapper<L> {
    fn predict(&self, x: &Instance) -> PredictionDistribution {
        self.exploiter.learner().predict(x)
    }

    fn offer(
        &mut self,
        x: &Instance,
        prediction: &PredictionDistribution,
        oracle: &mut dyn LabelOracle,
    ) -> Result<ProcessOutcome> {
        let predicted = prediction.argmax()?;
        if !gate(
            &mut self.budget,
            &mut self.query,
            &mut self.query_rng,
            prediction,
        ) {
            return Ok(ProcessOutcome {
                queried: false,
                lambda: 0,
                prediction: predicted,
            });
        }
        let label = oracle.request_label(x)?;
        let lambda = self.exploiter.learn(
            LabeledInstance {
                instance: x.clone(),
                label,
            },
            prediction,
        )?;
        Ok(ProcessOutcome {
            queried: true,
            lambda,
            prediction: predicted,
        })
    }

    fn budget(&self) -> Option<&BudgetTracker> {
        Some(&self.budget)
    }

    fn counters(&self) -> LearnerCounters {
        LearnerCounters {
            updates: self.exploiter.updates(),
            ..Default::default()
        }
    }
}
