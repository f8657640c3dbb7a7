//! Adaptive windowing (ADWIN) over a bounded signal in `[0, 1]`.
//!
//! The window is compressed into an exponential histogram: row `k` holds buckets of
//! `2^k` values, at most [`MAX_BUCKETS_PER_ROW`] per row. Each bucket keeps its sum and
//! its sum of squared deviations, so the window mean and variance are exact. After each
//! insertion every split at a bucket boundary is tested, and the oldest bucket is
//! dropped while some split violates the variance-sensitive Hoeffding threshold.

use std::collections::VecDeque;

use crate::error::{contract, Result};

pub const MAX_BUCKETS_PER_ROW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bucket {
    pub count: u64,
    pub total: f64,
    /// Sum of squared deviations from the bucket mean.
    pub m2: f64,
}

impl Bucket {
    fn single(value: f64) -> Self {
        Self {
            count: 1,
            total: value,
            m2: 0.0,
        }
    }

    fn merge(a: Bucket, b: Bucket) -> Bucket {
        let (na, nb) = (a.count as f64, b.count as f64);
        let diff = a.total / na - b.total / nb;
        Bucket {
            count: a.count + b.count,
            total: a.total + b.total,
            m2: a.m2 + b.m2 + na * nb / (na + nb) * diff * diff,
        }
    }
}

/// Threshold a split of `n0` older and `n1` newer values must exceed to count as a change.
///
/// With harmonic mean `m = 1 / (1/n0 + 1/n1)` and `δ' = δ / ln(n0 + n1)` (log floored at 1):
/// `sqrt(2/m · σ² · ln(2/δ')) + 2/(3m) · ln(2/δ')`.
pub fn hoeffding_cut_threshold(n0: u64, n1: u64, variance: f64, delta: f64) -> Result<f64> {
    if n0 == 0 || n1 == 0 {
        return Err(contract("cut threshold needs two non-empty sub-windows"));
    }
    let (a, b) = (n0 as f64, n1 as f64);
    let m = 1.0 / (1.0 / a + 1.0 / b);
    let log_width = (a + b).ln().max(1.0);
    let delta_prime = delta / log_width;
    let log_term = (2.0 / delta_prime).ln();
    Ok((2.0 / m * variance.max(0.0) * log_term).sqrt() + 2.0 / (3.0 * m) * log_term)
}

#[derive(Debug, Clone)]
pub struct AdwinEstimator {
    delta: f64,
    /// `rows[k]` holds buckets of size `2^k`, oldest at the front.
    rows: Vec<VecDeque<Bucket>>,
    width: u64,
    total: f64,
    m2: f64,
    cuts: u64,
}

impl AdwinEstimator {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(contract(format!("ADWIN delta {delta} outside (0, 1)")));
        }
        Ok(Self {
            delta,
            rows: Vec::new(),
            width: 0,
            total: 0.0,
            m2: 0.0,
            cuts: 0,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn set_delta(&mut self, delta: f64) -> Result<()> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(contract(format!("ADWIN delta {delta} outside (0, 1)")));
        }
        self.delta = delta;
        Ok(())
    }

    /// Window mean; 0 when empty.
    pub fn mean(&self) -> f64 {
        if self.width == 0 {
            0.0
        } else {
            self.total / self.width as f64
        }
    }

    pub fn width(&self) -> u64 {
        self.width
    }

    pub fn sum(&self) -> f64 {
        self.total
    }

    /// Population variance of the window; 0 when empty.
    pub fn variance(&self) -> f64 {
        if self.width == 0 {
            0.0
        } else {
            (self.m2 / self.width as f64).max(0.0)
        }
    }

    /// Unbiased variance; 0 for fewer than two values.
    pub fn sample_variance(&self) -> f64 {
        if self.width < 2 {
            0.0
        } else {
            (self.m2 / (self.width - 1) as f64).max(0.0)
        }
    }

    /// Number of cuts performed so far.
    pub fn cuts(&self) -> u64 {
        self.cuts
    }

    /// Buckets from oldest to newest.
    pub fn buckets(&self) -> impl Iterator<Item = &Bucket> + '_ {
        self.rows.iter().rev().flat_map(|row| row.iter())
    }

    pub fn bucket_count(&self) -> usize {
        self.rows.iter().map(VecDeque::len).sum()
    }

    /// Appends `value` and shrinks the window while any split is significant.
    /// Returns whether anything was dropped.
    pub fn update(&mut self, value: f64) -> Result<bool> {
        if !(0.0..=1.0).contains(&value) {
            return Err(contract(format!("ADWIN input {value} outside [0, 1]")));
        }
        self.insert(value);
        let mut cut = false;
        while self.width > 1 && self.find_cut() {
            self.drop_oldest();
            cut = true;
        }
        if cut {
            self.cuts += 1;
        }
        Ok(cut)
    }

    fn insert(&mut self, value: f64) {
        if self.width > 0 {
            let n = self.width as f64;
            let d = value - self.total / n;
            self.m2 += n * d * d / (n + 1.0);
        }
        self.width += 1;
        self.total += value;
        if self.rows.is_empty() {
            self.rows.push(VecDeque::new());
        }
        self.rows[0].push_back(Bucket::single(value));
        self.compress();
    }

    fn compress(&mut self) {
        let mut k = 0;
        while k < self.rows.len() {
            if self.rows[k].len() <= MAX_BUCKETS_PER_ROW {
                break;
            }
            let a = self.rows[k]
                .pop_front()
                .expect("row overflow implies buckets");
            let b = self.rows[k]
                .pop_front()
                .expect("row overflow implies buckets");
            if k + 1 == self.rows.len() {
                self.rows.push(VecDeque::new());
            }
            self.rows[k + 1].push_back(Bucket::merge(a, b));
            k += 1;
        }
    }

    fn drop_oldest(&mut self) {
        let Some(k) = self.rows.iter().rposition(|r| !r.is_empty()) else {
            return;
        };
        let b = self.rows[k].pop_front().expect("non-empty row");
        let n = self.width as f64;
        let nb = b.count as f64;
        let rest = n - nb;
        self.width -= b.count;
        self.total -= b.total;
        if self.width == 0 {
            self.total = 0.0;
            self.m2 = 0.0;
        } else {
            let mean_b = b.total / nb;
            let mean_rest = self.total / rest;
            let d = mean_b - mean_rest;
            self.m2 = (self.m2 - b.m2 - nb * rest / n * d * d).max(0.0);
        }
        while self.rows.last().is_some_and(VecDeque::is_empty) {
            self.rows.pop();
        }
    }

    fn find_cut(&self) -> bool {
        let variance = self.variance();
        let mut n0 = 0u64;
        let mut s0 = 0.0;
        for b in self.buckets() {
            n0 += b.count;
            s0 += b.total;
            let n1 = self.width - n0;
            if n1 == 0 {
                break;
            }
            let diff = s0 / n0 as f64 - (self.total - s0) / n1 as f64;
            let threshold = hoeffding_cut_threshold(n0, n1, variance, self.delta)
                .expect("both sub-windows non-empty");
            if diff.abs() > threshold {
                return true;
            }
        }
        false
    }
}
