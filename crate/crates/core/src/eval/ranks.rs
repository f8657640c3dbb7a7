//! Friedman ranking with the Bonferroni-Dunn post-hoc comparison against a control.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{contract, Result};
use crate::stats::normal_quantile;

/// Scores per dataset (rows) and method (columns); higher is better.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub methods: Vec<String>,
    pub scores: Vec<Vec<f64>>,
}

impl RankTable {
    pub fn new(methods: Vec<String>, scores: Vec<Vec<f64>>) -> Result<Self> {
        let m = methods.len();
        if m < 2 || scores.len() < 2 {
            return Err(contract(
                "rank test needs at least two methods and two datasets",
            ));
        }
        if scores
            .iter()
            .any(|row| row.len() != m || row.iter().any(|v| !v.is_finite()))
        {
            return Err(contract("every dataset needs one finite score per method"));
        }
        Ok(Self { methods, scores })
    }

    /// Rank 1 is best; tied scores share the mean of their ranks.
    pub fn ranks(&self) -> Vec<Vec<f64>> {
        self.scores.iter().map(|row| rank_row(row)).collect()
    }

    pub fn average_ranks(&self) -> Vec<f64> {
        let ranks = self.ranks();
        let n = ranks.len() as f64;
        (0..self.methods.len())
            .map(|j| ranks.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect()
    }
}

fn rank_row(row: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[b].total_cmp(&row[a]));
    let mut ranks = vec![0.0; row.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && row[order[j + 1]] == row[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided Bonferroni-Dunn critical value for `methods − 1` comparisons with a
/// control: `z_{1 − α / (2(M − 1))}`.
pub fn bonferroni_dunn_q(alpha: f64, methods: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) || methods < 2 {
        return Err(contract(
            "Bonferroni-Dunn needs alpha in (0, 1) and at least two methods",
        ));
    }
    Ok(normal_quantile(
        1.0 - alpha / (2.0 * (methods as f64 - 1.0)),
    ))
}

/// `q_α · sqrt(M(M+1) / (6N))`.
pub fn critical_difference(alpha: f64, methods: usize, datasets: usize) -> Result<f64> {
    let m = methods as f64;
    Ok(bonferroni_dunn_q(alpha, methods)? * (m * (m + 1.0) / (6.0 * datasets as f64)).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTestResult {
    pub average_ranks: Vec<f64>,
    pub critical_difference: f64,
    pub friedman_statistic: f64,
    pub friedman_p: f64,
    /// Methods whose average rank differs from the control's by more than the CD.
    pub significant: Vec<usize>,
}

pub fn friedman_bonferroni_dunn(
    table: &RankTable,
    alpha: f64,
    control: usize,
) -> Result<RankTestResult> {
    let m = table.methods.len();
    if control >= m {
        return Err(contract(format!(
            "control index {control} out of range for {m} methods"
        )));
    }
    let n = table.scores.len();
    let avg = table.average_ranks();
    let cd = critical_difference(alpha, m, n)?;
    let (mf, nf) = (m as f64, n as f64);
    let sum_sq: f64 = avg.iter().map(|r| r * r).sum();
    let chi2 = (12.0 * nf / (mf * (mf + 1.0)) * (sum_sq - mf * (mf + 1.0).powi(2) / 4.0)).max(0.0);
    let dist = ChiSquared::new(mf - 1.0).map_err(|e| contract(e.to_string()))?;
    let significant = (0..m)
        .filter(|&j| j != control && (avg[j] - avg[control]).abs() > cd)
        .collect();
    Ok(RankTestResult {
        critical_difference: cd,
        friedman_statistic: chi2,
        friedman_p: 1.0 - dist.cdf(chi2),
        significant,
        average_ranks: avg,
    })
}
