//! Instances, labels, prediction distributions and the incremental classifier contract.

use crate::error::{contract, Error, Result};

/// A class identifier in `0..C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassLabel(pub usize);

impl ClassLabel {
    pub fn index(self) -> usize {
        self.0
    }
}

/// An unlabeled feature vector together with its position in the stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub features: Vec<f64>,
    pub arrival_index: u64,
}

impl Instance {
    pub fn new(features: Vec<f64>, arrival_index: u64) -> Self {
        Self {
            features,
            arrival_index,
        }
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }

    /// Rejects NaN and infinite feature values.
    pub fn check_finite(&self) -> Result<()> {
        match self.features.iter().position(|v| !v.is_finite()) {
            Some(feature) => Err(Error::NonFinite { feature }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledInstance {
    pub instance: Instance,
    pub label: ClassLabel,
}

impl LabeledInstance {
    pub fn new(features: Vec<f64>, arrival_index: u64, label: usize) -> Self {
        Self {
            instance: Instance::new(features, arrival_index),
            label: ClassLabel(label),
        }
    }

    pub fn features(&self) -> &[f64] {
        &self.instance.features
    }
}

/// Per-class scores. Constructors normalise so the scores sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionDistribution {
    scores: Vec<f64>,
}

impl PredictionDistribution {
    /// Normalises non-negative scores. An all-zero (or non-finite) vector becomes uniform.
    pub fn from_scores(mut scores: Vec<f64>) -> Self {
        for s in scores.iter_mut() {
            if !s.is_finite() || *s < 0.0 {
                *s = 0.0;
            }
        }
        let total: f64 = scores.iter().sum();
        if total > 0.0 && total.is_finite() {
            scores.iter_mut().for_each(|s| *s /= total);
        } else if !scores.is_empty() {
            let u = 1.0 / scores.len() as f64;
            scores.iter_mut().for_each(|s| *s = u);
        }
        Self { scores }
    }

    pub fn uniform(classes: usize) -> Self {
        Self::from_scores(vec![1.0; classes])
    }

    pub fn one_hot(classes: usize, label: ClassLabel) -> Self {
        let mut scores = vec![0.0; classes];
        scores[label.0] = 1.0;
        Self { scores }
    }

    /// Softmax over log-scores, stable for large magnitudes.
    pub fn from_log_scores(logs: &[f64]) -> Self {
        let max = logs
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Self::uniform(logs.len());
        }
        Self::from_scores(logs.iter().map(|l| (l - max).exp()).collect())
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn max_score(&self) -> f64 {
        self.scores.iter().copied().fold(0.0, f64::max)
    }

    /// Difference between the two largest scores.
    pub fn margin(&self) -> f64 {
        let mut top1 = f64::NEG_INFINITY;
        let mut top2 = f64::NEG_INFINITY;
        for &s in &self.scores {
            if s > top1 {
                top2 = top1;
                top1 = s;
            } else if s > top2 {
                top2 = s;
            }
        }
        if top2.is_finite() {
            top1 - top2
        } else {
            1.0
        }
    }

    pub fn argmax(&self) -> Result<ClassLabel> {
        argmax_label(self)
    }
}

/// Index of the largest score; ties go to the smallest index.
pub fn argmax_label(dist: &PredictionDistribution) -> Result<ClassLabel> {
    let scores = dist.scores();
    if scores.is_empty() {
        return Err(contract("argmax of an empty distribution"));
    }
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    Ok(ClassLabel(best))
}

/// Behavioural contract shared by every incremental learner.
///
/// `Clone` is the deep copy: a clone never shares mutable state with its source.
pub trait Classifier: Clone + Send {
    fn num_classes(&self) -> usize;

    fn update(&mut self, inst: &LabeledInstance) -> Result<()>;

    /// Must not mutate model state.
    fn predict(&self, x: &Instance) -> PredictionDistribution;

    fn clone_model(&self) -> Self {
        self.clone()
    }
}

/// Source of true labels for queried instances.
pub trait LabelOracle {
    fn request_label(&mut self, x: &Instance) -> Result<ClassLabel>;
}

impl<F> LabelOracle for F
where
    F: FnMut(&Instance) -> Result<ClassLabel>,
{
    fn request_label(&mut self, x: &Instance) -> Result<ClassLabel> {
        self(x)
    }
}

/// What happened when an instance was offered for training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProcessOutcome {
    pub queried: bool,
    /// Exploitation updates applied on top of the fresh instance.
    pub lambda: usize,
    pub prediction: ClassLabel,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ElevationStats {
    /// The risky learner was copied over the standard one and full-label error agreed.
    pub risky_tp: u64,
    pub risky_fp: u64,
    pub standard_tp: u64,
    pub standard_fp: u64,
    /// Elevations made without ground-truth shadow accounting.
    pub unverified: u64,
}

impl ElevationStats {
    pub fn total(&self) -> u64 {
        self.risky_tp + self.risky_fp + self.standard_tp + self.standard_fp + self.unverified
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LearnerCounters {
    /// Calls to a base learner's `update`, exploitation included.
    pub updates: u64,
    pub elevations: ElevationStats,
}

/// A stream learner that decides for itself which labels to request.
///
/// The evaluation runner calls `predict` first and `offer` second for every instance,
/// so no learner ever sees a label before being tested on it.
pub trait ActiveLearner {
    fn predict(&self, x: &Instance) -> PredictionDistribution;

    fn offer(
        &mut self,
        x: &Instance,
        prediction: &PredictionDistribution,
        oracle: &mut dyn LabelOracle,
    ) -> Result<ProcessOutcome>;

    fn budget(&self) -> Option<&crate::active::BudgetTracker> {
        None
    }

    fn counters(&self) -> LearnerCounters {
        LearnerCounters::default()
    }

    /// Ground truth for accounting only (elevation correctness); never used for learning.
    fn record_ground_truth(&mut self, _x: &Instance, _label: ClassLabel) {}
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> PredictionDistribution {
        PredictionDistribution::from_scores(v.to_vec())
    }

    #[test]
    fn argmax_examples() {
        assert_eq!(
            argmax_label(&dist(&[0.1, 0.7, 0.2])).unwrap(),
            ClassLabel(1)
        );
        assert_eq!(argmax_label(&dist(&[0.5, 0.5])).unwrap(), ClassLabel(0));
        assert_eq!(
            argmax_label(&dist(&[0.0, 0.0, 1.0])).unwrap(),
            ClassLabel(2)
        );
    }

    #[test]
    fn argmax_empty_is_contract_error() {
        let empty = PredictionDistribution::from_scores(vec![]);
        assert!(matches!(argmax_label(&empty), Err(Error::Contract(_))));
    }

    #[test]
    fn normalisation() {
        let d = dist(&[2.0, 6.0]);
        assert!((d.scores().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(dist(&[0.0, 0.0]).scores(), &[0.5, 0.5]);
        let l = PredictionDistribution::from_log_scores(&[-1000.0, -1001.0]);
        assert!(l.scores()[0] > 0.7);
    }

    #[test]
    fn margin_of_top_two() {
        assert!((dist(&[0.1, 0.6, 0.3]).margin() - 0.3).abs() < 1e-12);
        assert_eq!(dist(&[0.5, 0.5]).margin(), 0.0);
    }
}
