//! Confusion matrices and Cohen's kappa over global, sliding and adaptive horizons.

use std::collections::VecDeque;

use crate::adwin::AdwinEstimator;
use crate::error::{contract, Result};

/// Rows are true classes, columns predictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: usize,
    cells: Vec<u64>,
    total: u64,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        Self {
            classes,
            cells: vec![0; classes * classes],
            total: 0,
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let classes = rows.len();
        if rows.iter().any(|r| r.len() != classes) {
            return Err(contract("confusion matrix must be square"));
        }
        let mut m = Self::new(classes);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.cells[i * classes + j] = v;
                m.total += v;
            }
        }
        Ok(m)
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.cells[truth * self.classes + predicted]
    }

    pub fn add(&mut self, truth: usize, predicted: usize) {
        self.cells[truth * self.classes + predicted] += 1;
        self.total += 1;
    }

    pub fn remove(&mut self, truth: usize, predicted: usize) {
        let cell = &mut self.cells[truth * self.classes + predicted];
        debug_assert!(*cell > 0, "removing an absent observation");
        *cell -= 1;
        self.total -= 1;
    }

    pub fn correct(&self) -> u64 {
        (0..self.classes).map(|k| self.get(k, k)).sum()
    }

    pub fn accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| self.correct() as f64 / self.total as f64)
    }

    pub fn kappa(&self) -> Result<f64> {
        kappa(self)
    }
}

/// `(p_o − p_e) / (1 − p_e)`, and 0 when `p_e = 1`.
pub fn kappa(m: &ConfusionMatrix) -> Result<f64> {
    if m.total == 0 {
        return Err(contract("kappa of an empty confusion matrix"));
    }
    let n = m.total as f64;
    let c = m.classes;
    let p_o = m.correct() as f64 / n;
    let mut p_e = 0.0;
    for k in 0..c {
        let row: u64 = (0..c).map(|j| m.get(k, j)).sum();
        let col: u64 = (0..c).map(|i| m.get(i, k)).sum();
        p_e += row as f64 * col as f64;
    }
    p_e /= n * n;
    if p_e >= 1.0 {
        return Ok(0.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaMode {
    Global,
    SlidingWindow(usize),
    /// Window sized by ADWIN on the correctness signal.
    Adwin {
        delta: f64,
    },
}

#[derive(Debug, Clone)]
pub struct KappaAccumulator {
    mode: KappaMode,
    confusion: ConfusionMatrix,
    recent: VecDeque<(usize, usize)>,
    adwin: Option<AdwinEstimator>,
}

impl KappaAccumulator {
    pub fn new(classes: usize, mode: KappaMode) -> Result<Self> {
        let adwin = match mode {
            KappaMode::SlidingWindow(0) => return Err(contract("window width must be at least 1")),
            KappaMode::Adwin { delta } => Some(AdwinEstimator::new(delta)?),
            _ => None,
        };
        Ok(Self {
            mode,
            confusion: ConfusionMatrix::new(classes),
            recent: VecDeque::new(),
            adwin,
        })
    }

    pub fn mode(&self) -> KappaMode {
        self.mode
    }

    pub fn confusion(&self) -> &ConfusionMatrix {
        &self.confusion
    }

    /// Observations currently inside the horizon.
    pub fn horizon(&self) -> u64 {
        self.confusion.total()
    }

    pub fn add(&mut self, truth: usize, predicted: usize) -> Result<()> {
        self.confusion.add(truth, predicted);
        let limit = match self.mode {
            KappaMode::Global => return Ok(()),
            KappaMode::SlidingWindow(w) => w,
            KappaMode::Adwin { .. } => {
                let adwin = self.adwin.as_mut().expect("adwin mode owns an estimator");
                adwin.update(if truth == predicted { 1.0 } else { 0.0 })?;
                adwin.width() as usize
            }
        };
        self.recent.push_back((truth, predicted));
        while self.recent.len() > limit.max(1) {
            let (t, p) = self.recent.pop_front().expect("non-empty");
            self.confusion.remove(t, p);
        }
        Ok(())
    }

    pub fn kappa(&self) -> Option<f64> {
        kappa(&self.confusion).ok()
    }

    pub fn accuracy(&self) -> Option<f64> {
        self.confusion.accuracy()
    }
}
