//! Incremental Gaussian naive Bayes.

use crate::error::{Error, Result};
use crate::types::{Classifier, Instance, LabeledInstance, PredictionDistribution};

pub const DEFAULT_VARIANCE_FLOOR: f64 = 1e-6;

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GaussianEstimator {
    weight: f64,
    mean: f64,
    m2: f64,
}

impl GaussianEstimator {
    pub fn add(&mut self, value: f64, weight: f64) {
        if weight <= 0.0 {
            return;
        }
        let new_weight = self.weight + weight;
        let delta = value - self.mean;
        self.mean += weight * delta / new_weight;
        self.m2 += weight * delta * (value - self.mean);
        self.weight = new_weight;
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased variance; 0 below two observations.
    pub fn variance(&self) -> f64 {
        if self.weight > 1.0 {
            (self.m2 / (self.weight - 1.0)).max(0.0)
        } else {
            0.0
        }
    }

    pub fn log_density(&self, x: f64, floor: f64) -> f64 {
        let var = self.variance().max(floor);
        let d = x - self.mean;
        -0.5 * (2.0 * std::f64::consts::PI * var).ln() - d * d / (2.0 * var)
    }
}

#[derive(Debug, Clone)]
pub struct NaiveBayes {
    dim: usize,
    class_counts: Vec<f64>,
    /// `stats[class][feature]`
    stats: Vec<Vec<GaussianEstimator>>,
    variance_floor: f64,
}

impl NaiveBayes {
    pub fn new(dim: usize, classes: usize) -> Self {
        Self::with_variance_floor(dim, classes, DEFAULT_VARIANCE_FLOOR)
    }

    pub fn with_variance_floor(dim: usize, classes: usize, variance_floor: f64) -> Self {
        Self {
            dim,
            class_counts: vec![0.0; classes],
            stats: vec![vec![GaussianEstimator::default(); dim]; classes],
            variance_floor,
        }
    }

    pub fn class_counts(&self) -> &[f64] {
        &self.class_counts
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }
}

impl Classifier for NaiveBayes {
    fn num_classes(&self) -> usize {
        self.class_counts.len()
    }

    fn update(&mut self, inst: &LabeledInstance) -> Result<()> {
        self.check(inst.features())?;
        let c = inst.label.0;
        if c >= self.class_counts.len() {
            return Err(Error::LabelOutOfRange {
                label: c,
                classes: self.class_counts.len(),
            });
        }
        self.class_counts[c] += 1.0;
        for (est, &v) in self.stats[c].iter_mut().zip(inst.features()) {
            est.add(v, 1.0);
        }
        Ok(())
    }

    fn predict(&self, x: &Instance) -> PredictionDistribution {
        let classes = self.class_counts.len();
        let total: f64 = self.class_counts.iter().sum();
        if total == 0.0 || x.dim() != self.dim {
            return PredictionDistribution::uniform(classes);
        }
        let logs: Vec<f64> = (0..classes)
            .map(|c| {
                if self.class_counts[c] == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let prior = (self.class_counts[c] / total).ln();
                prior
                    + self.stats[c]
                        .iter()
                        .zip(&x.features)
                        .map(|(est, &v)| est.log_density(v, self.variance_floor))
                        .sum::<f64>()
            })
            .collect();
        PredictionDistribution::from_log_scores(&logs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::types::ClassLabel;

    #[test]
    fn single_class_prior_dominates() {
        let mut nb = NaiveBayes::new(2, 3);
        for i in 0..10 {
            nb.update(&LabeledInstance::new(vec![i as f64, 1.0], i, 0))
                .unwrap();
        }
        let p = nb.predict(&Instance::new(vec![100.0, -5.0], 0));
        assert_eq!(p.argmax().unwrap(), ClassLabel(0));
    }

    #[test]
    fn separated_gaussians() {
        let mut rng = SeededRng::new(1);
        let mut nb = NaiveBayes::new(1, 2);
        for t in 0..2000u64 {
            let c = (t % 2) as usize;
            let x = rng.normal(if c == 0 { -2.0 } else { 2.0 }, 1.0);
            nb.update(&LabeledInstance::new(vec![x], t, c)).unwrap();
        }
        // Bayes-optimal accuracy for means ±2, sd 1 is Φ(2) ≈ 0.977.
        let mut correct = 0;
        for t in 0..2000u64 {
            let c = (t % 2) as usize;
            let x = rng.normal(if c == 0 { -2.0 } else { 2.0 }, 1.0);
            if nb.predict(&Instance::new(vec![x], t)).argmax().unwrap().0 == c {
                correct += 1;
            }
        }
        assert!(correct as f64 / 2000.0 > 0.95);
    }

    #[test]
    fn zero_variance_feature_is_finite() {
        let mut nb = NaiveBayes::new(2, 2);
        for t in 0..20u64 {
            let c = (t % 2) as usize;
            nb.update(&LabeledInstance::new(vec![3.0, c as f64], t, c))
                .unwrap();
        }
        let p = nb.predict(&Instance::new(vec![3.5, 0.4], 0));
        assert!(p.scores().iter().all(|s| s.is_finite()));
        assert_eq!(p.argmax().unwrap(), ClassLabel(0));
    }

    #[test]
    fn dimension_mismatch() {
        let mut nb = NaiveBayes::new(2, 2);
        let err = nb
            .update(&LabeledInstance::new(vec![1.0], 0, 0))
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Dimension {
                expected: 2,
                found: 1
            }
        ));
    }
}
