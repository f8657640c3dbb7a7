//! Paired risky/standard learners.
//!
//! Both learners see the same labeled instances: one budget, one query stream, driven by
//! the ensemble's own prediction. The risky learner trains through the exploitation path,
//! the standard one with a single plain update. Predictions come from whichever learner
//! has the lower windowed error (ties go to the standard learner). In elevating mode, a
//! significant Welch test copies the better learner, and its error estimate, over the
//! worse one.

pub mod welch;

use std::collections::VecDeque;

pub use welch::{
    welch_satterthwaite_df, welch_significant, welch_statistic, welch_test, Better, WelchResult,
};

use crate::active::{BudgetTracker, QueryStrategy};
use crate::adwin::AdwinEstimator;
use crate::error::Result;
use crate::exploit::wrapper::{gate, ExploitConfig, Exploiter};
use crate::rng::SeededRng;
use crate::types::{
    ActiveLearner, ClassLabel, Classifier, ElevationStats, Instance, LabelOracle, LabeledInstance,
    LearnerCounters, PredictionDistribution, ProcessOutcome,
};

pub const DEFAULT_ALPHA_E: f64 = 0.05;
pub const DEFAULT_COOLDOWN: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnsembleMode {
    Switching,
    Elevating { alpha: f64 },
}

impl EnsembleMode {
    pub fn name(&self) -> &'static str {
        match self {
            EnsembleMode::Switching => "switching",
            EnsembleMode::Elevating { .. } => "elevating",
        }
    }
}

/// Full-label error bookkeeping used to judge elevations after the fact.
#[derive(Debug, Clone, Default)]
struct Shadow {
    /// `(arrival index, risky wrong, standard wrong)` for every instance in the error span.
    entries: VecDeque<(u64, bool, bool)>,
    errors_r: u64,
    errors_s: u64,
}

impl Shadow {
    fn push(&mut self, t: u64, wrong_r: bool, wrong_s: bool) {
        self.entries.push_back((t, wrong_r, wrong_s));
        self.errors_r += u64::from(wrong_r);
        self.errors_s += u64::from(wrong_s);
    }

    fn prune_before(&mut self, start: u64) {
        while let Some(&(t, r, s)) = self.entries.front() {
            if t >= start {
                break;
            }
            self.entries.pop_front();
            self.errors_r -= u64::from(r);
            self.errors_s -= u64::from(s);
        }
    }
}

#[derive(Debug, Clone)]
pub struct PairedEnsemble<L> {
    risky: Exploiter<L>,
    standard: L,
    err_r: AdwinEstimator,
    err_s: AdwinEstimator,
    mode: EnsembleMode,
    budget: BudgetTracker,
    query: QueryStrategy,
    query_rng: SeededRng,
    cooldown: u64,
    cooldown_left: u64,
    standard_updates: u64,
    elevations: ElevationStats,
    /// Arrival indices of labeled instances still covered by the error windows.
    labeled_times: VecDeque<u64>,
    shadow: Option<Shadow>,
}

impl<L: Classifier> PairedEnsemble<L> {
    pub fn new(
        learner: L,
        exploit: ExploitConfig,
        mode: EnsembleMode,
        budget: f64,
        query: QueryStrategy,
        error_delta: f64,
        rng: &SeededRng,
    ) -> Result<Self> {
        let risky = learner.clone_model();
        Self::from_pair(
            risky,
            learner,
            exploit,
            mode,
            budget,
            query,
            error_delta,
            rng,
        )
    }

    /// Starts from two possibly different models, e.g. warm-started ones.
    #[allow(clippy::too_many_arguments)]
    pub fn from_pair(
        risky: L,
        standard: L,
        exploit: ExploitConfig,
        mode: EnsembleMode,
        budget: f64,
        query: QueryStrategy,
        error_delta: f64,
        rng: &SeededRng,
    ) -> Result<Self> {
        query.validate()?;
        Ok(Self {
            risky: Exploiter::new(risky, exploit, rng.derive("exploit"))?,
            standard,
            err_r: AdwinEstimator::new(error_delta)?,
            err_s: AdwinEstimator::new(error_delta)?,
            mode,
            budget: BudgetTracker::new(budget)?,
            query,
            query_rng: rng.derive("query"),
            cooldown: DEFAULT_COOLDOWN,
            cooldown_left: 0,
            standard_updates: 0,
            elevations: ElevationStats::default(),
            labeled_times: VecDeque::new(),
            shadow: None,
        })
    }

    pub fn with_cooldown(mut self, cooldown: u64) -> Self {
        self.cooldown = cooldown;
        self
    }

    /// Enables ground-truth accounting of elevation correctness.
    pub fn with_shadow(mut self) -> Self {
        self.shadow = Some(Shadow::default());
        self
    }

    pub fn risky(&self) -> &L {
        self.risky.learner()
    }

    pub fn standard(&self) -> &L {
        &self.standard
    }

    pub fn risky_error(&self) -> &AdwinEstimator {
        &self.err_r
    }

    pub fn standard_error(&self) -> &AdwinEstimator {
        &self.err_s
    }

    pub fn elevations(&self) -> ElevationStats {
        self.elevations
    }

    pub fn mode(&self) -> EnsembleMode {
        self.mode
    }

    pub fn uses_risky(&self) -> bool {
        self.err_r.mean() < self.err_s.mean()
    }

    /// Trains both learners on a labeled instance, elevating first if warranted.
    pub fn train(&mut self, inst: LabeledInstance) -> Result<()> {
        let x = &inst.instance;
        let pred_r = self.risky.learner().predict(x);
        let pred_s = self.standard.predict(x);
        let wrong = |p: &PredictionDistribution| p.argmax().map_or(true, |l| l != inst.label);
        self.err_r.update(if wrong(&pred_r) { 1.0 } else { 0.0 })?;
        self.err_s.update(if wrong(&pred_s) { 1.0 } else { 0.0 })?;
        self.track_labeled(x.arrival_index);

        if let EnsembleMode::Elevating { alpha } = self.mode {
            if self.cooldown_left > 0 {
                self.cooldown_left -= 1;
            } else if let Some(better) = self.elevation_decision(alpha)? {
                self.elevate(better);
                self.cooldown_left = self.cooldown;
            }
        }

        self.standard.update(&inst)?;
        self.standard_updates += 1;
        self.risky.learn(inst, &pred_r)?;
        Ok(())
    }

    fn elevation_decision(&self, alpha: f64) -> Result<Option<Better>> {
        let (nr, ns) = (self.err_r.width(), self.err_s.width());
        if nr < 2 || ns < 2 {
            return Ok(None);
        }
        let r = welch_test(
            self.err_r.mean(),
            self.err_r.sample_variance(),
            nr,
            self.err_s.mean(),
            self.err_s.sample_variance(),
            ns,
            alpha,
        )?;
        Ok(r.significant.then_some(r.better))
    }

    fn elevate(&mut self, better: Better) {
        let verdict = self.shadow_verdict(better);
        match better {
            Better::Risky => {
                self.standard = self.risky.learner().clone_model();
                self.err_s = self.err_r.clone();
            }
            Better::Standard => {
                self.risky.replace_learner(self.standard.clone_model());
                self.err_r = self.err_s.clone();
            }
        }
        let e = &mut self.elevations;
        match (better, verdict) {
            (_, None) => e.unverified += 1,
            (Better::Risky, Some(true)) => e.risky_tp += 1,
            (Better::Risky, Some(false)) => e.risky_fp += 1,
            (Better::Standard, Some(true)) => e.standard_tp += 1,
            (Better::Standard, Some(false)) => e.standard_fp += 1,
        }
    }

    fn track_labeled(&mut self, t: u64) {
        self.labeled_times.push_back(t);
        let keep = self.err_r.width().max(self.err_s.width()).max(1) as usize;
        while self.labeled_times.len() > keep {
            self.labeled_times.pop_front();
        }
        if let (Some(shadow), Some(&start)) = (self.shadow.as_mut(), self.labeled_times.front()) {
            shadow.prune_before(start);
        }
    }

    /// Whether full-label error over the span of the error windows agrees that `better`
    /// is the better learner. Ties count against the elevation. `None` without shadow
    /// accounting.
    fn shadow_verdict(&self, better: Better) -> Option<bool> {
        let shadow = self.shadow.as_ref()?;
        if shadow.entries.is_empty() {
            return None;
        }
        Some(match better {
            Better::Risky => shadow.errors_r < shadow.errors_s,
            Better::Standard => shadow.errors_s < shadow.errors_r,
        })
    }

    fn predict_inner(&self, x: &Instance) -> PredictionDistribution {
        if self.uses_risky() {
            self.risky.learner().predict(x)
        } else {
            self.standard.predict(x)
        }
    }
}

impl<L: Classifier> ActiveLearner for PairedEnsemble<L> {
    fn predict(&self, x: &Instance) -> PredictionDistribution {
        self.predict_inner(x)
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
        self.train(LabeledInstance {
            instance: x.clone(),
            label,
        })?;
        Ok(ProcessOutcome {
            queried: true,
            lambda: self.risky.last_lambda(),
            prediction: predicted,
        })
    }

    fn budget(&self) -> Option<&BudgetTracker> {
        Some(&self.budget)
    }

    fn counters(&self) -> LearnerCounters {
        LearnerCounters {
            updates: self.risky.updates() + self.standard_updates,
            elevations: self.elevations,
        }
    }

    fn record_ground_truth(&mut self, x: &Instance, label: ClassLabel) {
        if self.shadow.is_none() {
            return;
        }
        let wrong_r = self
            .risky
            .learner()
            .predict(x)
            .argmax()
            .map_or(true, |l| l != label);
        let wrong_s = self
            .standard
            .predict(x)
            .argmax()
            .map_or(true, |l| l != label);
        if let Some(shadow) = self.shadow.as_mut() {
            shadow.push(x.arrival_index, wrong_r, wrong_s);
        }
    }
}
