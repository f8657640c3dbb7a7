//! Hoeffding tree that replaces itself when its error drifts.
//!
//! A single ADWIN monitor watches the tree's 0/1 prediction error. When the monitor
//! cuts with a rising error, a background tree starts learning alongside the current
//! one; once it has seen [`MATURITY`] instances and its own windowed error is lower,
//! it takes over.

use crate::adwin::AdwinEstimator;
use crate::error::Result;
use crate::learners::hoeffding::{HoeffdingTree, HoeffdingTreeConfig};
use crate::types::{Classifier, Instance, LabeledInstance, PredictionDistribution};

pub const MATURITY: u64 = 300;
pub const MONITOR_DELTA: f64 = 0.002;

#[derive(Debug, Clone)]
struct Background {
    tree: HoeffdingTree,
    monitor: AdwinEstimator,
    age: u64,
}

#[derive(Debug, Clone)]
pub struct AdaptiveHoeffdingTree {
    tree: HoeffdingTree,
    monitor: AdwinEstimator,
    background: Option<Background>,
    dim: usize,
    classes: usize,
    config: HoeffdingTreeConfig,
    swaps: u64,
}

impl AdaptiveHoeffdingTree {
    pub fn new(dim: usize, classes: usize) -> Self {
        Self::with_config(dim, classes, HoeffdingTreeConfig::default())
    }

    pub fn with_config(dim: usize, classes: usize, config: HoeffdingTreeConfig) -> Self {
        Self {
            tree: HoeffdingTree::with_config(dim, classes, config.clone()),
            monitor: AdwinEstimator::new(MONITOR_DELTA).expect("valid delta"),
            background: None,
            dim,
            classes,
            config,
            swaps: 0,
        }
    }

    pub fn tree(&self) -> &HoeffdingTree {
        &self.tree
    }

    pub fn monitor(&self) -> &AdwinEstimator {
        &self.monitor
    }

    pub fn has_background(&self) -> bool {
        self.background.is_some()
    }

    pub fn background_age(&self) -> Option<u64> {
        self.background.as_ref().map(|b| b.age)
    }

    pub fn swaps(&self) -> u64 {
        self.swaps
    }

    fn fresh_background(&self) -> Background {
        Background {
            tree: HoeffdingTree::with_config(self.dim, self.classes, self.config.clone()),
            monitor: AdwinEstimator::new(MONITOR_DELTA).expect("valid delta"),
            age: 0,
        }
    }
}

fn error_of(model: &HoeffdingTree, inst: &LabeledInstance) -> f64 {
    match model.predict(&inst.instance).argmax() {
        Ok(l) if l == inst.label => 0.0,
        _ => 1.0,
    }
}

impl Classifier for AdaptiveHoeffdingTree {
    fn num_classes(&self) -> usize {
        self.classes
    }

    fn update(&mut self, inst: &LabeledInstance) -> Result<()> {
        let err = error_of(&self.tree, inst);
        let before = self.monitor.mean();
        let cut = self.monitor.update(err)?;

        if let Some(bg) = self.background.as_mut() {
            let bg_err = error_of(&bg.tree, inst);
            bg.monitor.update(bg_err)?;
            bg.tree.update(inst)?;
            bg.age += 1;
        }
        self.tree.update(inst)?;

        if cut && self.monitor.mean() > before {
            let stale = self
                .background
                .as_ref()
                .is_some_and(|bg| bg.age >= MATURITY);
            if self.background.is_none() || stale {
                self.background = Some(self.fresh_background());
            }
        }

        let swap = self
            .background
            .as_ref()
            .is_some_and(|bg| bg.age >= MATURITY && bg.monitor.mean() < self.monitor.mean());
        if swap {
            let bg = self.background.take().expect("checked above");
            self.tree = bg.tree;
            self.monitor = bg.monitor;
            self.swaps += 1;
        }
        Ok(())
    }

    fn predict(&self, x: &Instance) -> PredictionDistribution {
        self.tree.predict(x)
    }
}
