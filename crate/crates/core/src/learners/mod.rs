//! Incremental base learners.

pub mod adaptive;
pub mod hoeffding;
pub mod naive_bayes;
pub mod sgd;

pub use adaptive::AdaptiveHoeffdingTree;
pub use hoeffding::{HoeffdingTree, HoeffdingTreeConfig, LeafPrediction};
pub use naive_bayes::NaiveBayes;
pub use sgd::{Loss, SgdClassifier};

use crate::error::Result;
use crate::types::{Classifier, Instance, LabeledInstance, PredictionDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerKind {
    NaiveBayes,
    Sgd,
    HoeffdingTree,
    AdaptiveTree,
}

impl LearnerKind {
    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::NaiveBayes => "NB",
            LearnerKind::Sgd => "SGD",
            LearnerKind::HoeffdingTree => "HT",
            LearnerKind::AdaptiveTree => "AHT",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NB" | "NAIVEBAYES" => Some(LearnerKind::NaiveBayes),
            "SGD" => Some(LearnerKind::Sgd),
            "HT" | "VFDT" => Some(LearnerKind::HoeffdingTree),
            "AHT" => Some(LearnerKind::AdaptiveTree),
            _ => None,
        }
    }
}

/// Everything needed to build a fresh learner once the stream shape is known.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    pub loss: Loss,
    pub learning_rate: f64,
    pub tree: HoeffdingTreeConfig,
}

impl LearnerSpec {
    pub fn new(kind: LearnerKind) -> Self {
        Self {
            kind,
            loss: Loss::Hinge,
            learning_rate: sgd::DEFAULT_LEARNING_RATE,
            tree: HoeffdingTreeConfig::default(),
        }
    }

    pub fn build(&self, dim: usize, classes: usize) -> Learner {
        match self.kind {
            LearnerKind::NaiveBayes => Learner::NaiveBayes(NaiveBayes::new(dim, classes)),
            LearnerKind::Sgd => Learner::Sgd(SgdClassifier::new(
                dim,
                classes,
                self.loss,
                self.learning_rate,
            )),
            LearnerKind::HoeffdingTree => {
                Learner::HoeffdingTree(HoeffdingTree::with_config(dim, classes, self.tree.clone()))
            }
            LearnerKind::AdaptiveTree => Learner::AdaptiveTree(AdaptiveHoeffdingTree::with_config(
                dim,
                classes,
                self.tree.clone(),
            )),
        }
    }
}

/// Runtime-selected learner.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Learner {
    NaiveBayes(NaiveBayes),
    Sgd(SgdClassifier),
    HoeffdingTree(HoeffdingTree),
    AdaptiveTree(AdaptiveHoeffdingTree),
}

impl Classifier for Learner {
    fn num_classes(&self) -> usize {
        match self {
            Learner::NaiveBayes(m) => m.num_classes(),
            Learner::Sgd(m) => m.num_classes(),
            Learner::HoeffdingTree(m) => m.num_classes(),
            Learner::AdaptiveTree(m) => m.num_classes(),
        }
    }

    fn update(&mut self, inst: &LabeledInstance) -> Result<()> {
        match self {
            Learner::NaiveBayes(m) => m.update(inst),
            Learner::Sgd(m) => m.update(inst),
            Learner::HoeffdingTree(m) => m.update(inst),
            Learner::AdaptiveTree(m) => m.update(inst),
        }
    }

    fn predict(&self, x: &Instance) -> PredictionDistribution {
        match self {
            Learner::NaiveBayes(m) => m.predict(x),
            Learner::Sgd(m) => m.predict(x),
            Learner::HoeffdingTree(m) => m.predict(x),
            Learner::AdaptiveTree(m) => m.predict(x),
        }
    }
}
