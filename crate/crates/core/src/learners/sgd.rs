//! One-vs-rest linear classifier trained by stochastic gradient descent.

use crate::error::{Error, Result};
use crate::types::{Classifier, Instance, LabeledInstance, PredictionDistribution};

pub const DEFAULT_LEARNING_RATE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    Hinge,
    Logistic,
}

impl Loss {
    /// Loss for one class given its ±1 target and the raw margin.
    pub fn value(self, target: f64, margin: f64) -> f64 {
        let z = target * margin;
        match self {
            Loss::Hinge => (1.0 - z).max(0.0),
            Loss::Logistic => {
                if z > 0.0 {
                    (-z).exp().ln_1p()
                } else {
                    -z + z.exp().ln_1p()
                }
            }
        }
    }

    /// Derivative of the loss with respect to the margin.
    fn margin_gradient(self, target: f64, margin: f64) -> f64 {
        let z = target * margin;
        match self {
            Loss::Hinge => {
                if z < 1.0 {
                    -target
                } else {
                    0.0
                }
            }
            // d/dm log(1 + exp(-y m)) = -y σ(-y m)
            Loss::Logistic => -target / (1.0 + z.exp()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SgdClassifier {
    dim: usize,
    /// One row per class, `dim` weights followed by the bias.
    weights: Vec<Vec<f64>>,
    learning_rate: f64,
    loss: Loss,
}

impl SgdClassifier {
    pub fn new(dim: usize, classes: usize, loss: Loss, learning_rate: f64) -> Self {
        Self {
            dim,
            weights: vec![vec![0.0; dim + 1]; classes],
            learning_rate,
            loss,
        }
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn loss(&self) -> Loss {
        self.loss
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn margins(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| w[..self.dim].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[self.dim])
            .collect()
    }
}

impl Classifier for SgdClassifier {
    fn num_classes(&self) -> usize {
        self.weights.len()
    }

    fn update(&mut self, inst: &LabeledInstance) -> Result<()> {
        let x = inst.features();
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: x.len(),
            });
        }
        inst.instance.check_finite()?;
        let classes = self.weights.len();
        if inst.label.0 >= classes {
            return Err(Error::LabelOutOfRange {
                label: inst.label.0,
                classes,
            });
        }
        let margins = self.margins(x);
        for (k, w) in self.weights.iter_mut().enumerate() {
            let target = if k == inst.label.0 { 1.0 } else { -1.0 };
            let g = self.loss.margin_gradient(target, margins[k]);
            if g == 0.0 {
                continue;
            }
            let step = self.learning_rate * g;
            for (i, (wi, xi)) in w.iter_mut().zip(x).enumerate() {
                *wi -= step * xi;
                if !wi.is_finite() {
                    return Err(Error::NonFinite { feature: i });
                }
            }
            w[self.dim] -= step;
            if !w[self.dim].is_finite() {
                return Err(Error::NonFinite { feature: self.dim });
            }
        }
        Ok(())
    }

    /// Logistic: softmax of margins. Hinge: margins shifted so the smallest is 1, then
    /// normalised, which keeps near-boundary instances close to uniform.
    fn predict(&self, x: &Instance) -> PredictionDistribution {
        if x.dim() != self.dim {
            return PredictionDistribution::uniform(self.weights.len());
        }
        let margins = self.margins(&x.features);
        match self.loss {
            Loss::Logistic => PredictionDistribution::from_log_scores(&margins),
            Loss::Hinge => {
                let min = margins.iter().copied().fold(f64::INFINITY, f64::min);
                PredictionDistribution::from_scores(margins.iter().map(|m| m - min + 1.0).collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    #[test]
    fn zero_learning_rate_is_a_no_op() {
        let mut m = SgdClassifier::new(3, 2, Loss::Hinge, 0.0);
        let before = m.weights().to_vec();
        m.update(&LabeledInstance::new(vec![1.0, -2.0, 3.0], 0, 1))
            .unwrap();
        assert_eq!(m.weights(), &before[..]);
    }

    #[test]
    fn separable_blobs_hinge() {
        let mut rng = SeededRng::new(9);
        let mut data = Vec::new();
        for t in 0..5000u64 {
            let c = rng.below(2);
            let centre = if c == 0 { (-2.0, -2.0) } else { (2.0, 2.0) };
            let x = vec![rng.normal(centre.0, 0.5), rng.normal(centre.1, 0.5)];
            data.push(LabeledInstance::new(x, t, c));
        }
        let mut m = SgdClassifier::new(2, 2, Loss::Hinge, 0.01);
        for inst in &data {
            m.update(inst).unwrap();
        }
        let acc = data
            .iter()
            .filter(|i| m.predict(&i.instance).argmax().unwrap() == i.label)
            .count() as f64
            / data.len() as f64;
        assert!(acc > 0.98, "accuracy {acc}");
    }

    /// Total one-vs-rest loss, written out independently of the update path.
    fn total_loss(weights: &[Vec<f64>], x: &[f64], label: usize) -> f64 {
        weights
            .iter()
            .enumerate()
            .map(|(k, w)| {
                let m: f64 =
                    w[..x.len()].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[x.len()];
                let y = if k == label { 1.0 } else { -1.0 };
                (1.0 + (-y * m).exp()).ln()
            })
            .sum()
    }

    #[test]
    fn logistic_step_matches_finite_difference_gradient() {
        let eta = 0.05;
        let mut m = SgdClassifier::new(3, 3, Loss::Logistic, eta);
        let warm = LabeledInstance::new(vec![0.3, -1.2, 0.7], 0, 2);
        m.update(&warm).unwrap();
        let before = m.weights().to_vec();
        let inst = LabeledInstance::new(vec![1.5, 0.2, -0.4], 1, 1);
        m.update(&inst).unwrap();
        let after = m.weights();
        let h = 1e-6;
        for k in 0..3 {
            for j in 0..4 {
                let mut plus = before.clone();
                let mut minus = before.clone();
                plus[k][j] += h;
                minus[k][j] -= h;
                let grad = (total_loss(&plus, inst.features(), 1)
                    - total_loss(&minus, inst.features(), 1))
                    / (2.0 * h);
                let delta = after[k][j] - before[k][j];
                assert!(
                    (delta + eta * grad).abs() < 1e-9,
                    "k={k} j={j}: {delta} vs {}",
                    -eta * grad
                );
            }
        }
    }

    #[test]
    fn non_finite_input_rejected() {
        let mut m = SgdClassifier::new(2, 2, Loss::Hinge, 0.01);
        let err = m
            .update(&LabeledInstance::new(vec![1.0, f64::NAN], 0, 0))
            .unwrap_err();
        assert!(matches!(err, Error::NonFinite { feature: 1 }));
    }

    #[test]
    fn overflowing_step_reports_feature() {
        let mut m = SgdClassifier::new(2, 2, Loss::Hinge, 1e308);
        let err = m
            .update(&LabeledInstance::new(vec![1.0, 1e308], 0, 0))
            .unwrap_err();
        assert!(matches!(err, Error::NonFinite { feature: 1 }));
    }
}
