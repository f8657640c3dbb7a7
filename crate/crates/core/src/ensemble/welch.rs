//! Welch's unequal-variance t-test.

use crate::error::{contract, Result};
use crate::stats::student_t_two_sided_p;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Better {
    Risky,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchResult {
    pub t_statistic: f64,
    /// Infinite when both variances vanish.
    pub degrees_of_freedom: f64,
    pub p_value: f64,
    pub significant: bool,
    /// Learner with the lower mean error.
    pub better: Better,
}

/// `t = (ε_r − ε_s) / sqrt(σ_r²/N_r + σ_s²/N_s)`. Zero variances give `0` for equal
/// means and `±∞` otherwise.
pub fn welch_statistic(
    mean_r: f64,
    var_r: f64,
    n_r: u64,
    mean_s: f64,
    var_s: f64,
    n_s: u64,
) -> Result<f64> {
    if n_r < 2 || n_s < 2 {
        return Err(contract(
            "Welch statistic needs at least two samples per group",
        ));
    }
    let se2 = var_r / n_r as f64 + var_s / n_s as f64;
    let diff = mean_r - mean_s;
    if se2 <= 0.0 {
        return Ok(if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        });
    }
    Ok(diff / se2.sqrt())
}

/// Welch–Satterthwaite degrees of freedom.
pub fn welch_satterthwaite_df(var_r: f64, n_r: u64, var_s: f64, n_s: u64) -> Result<f64> {
    if n_r < 2 || n_s < 2 {
        return Err(contract(
            "degrees of freedom need at least two samples per group",
        ));
    }
    if var_r <= 0.0 && var_s <= 0.0 {
        return Err(contract(
            "degrees of freedom undefined when both variances are zero",
        ));
    }
    let (nr, ns) = (n_r as f64, n_s as f64);
    let a = var_r / nr;
    let b = var_s / ns;
    Ok((a + b).powi(2) / (a * a / (nr - 1.0) + b * b / (ns - 1.0)))
}

/// Two-sided test at level `alpha`: significant iff `p < alpha`.
pub fn welch_significant(t: f64, df: f64, alpha: f64) -> bool {
    welch_p_value(t, df) < alpha
}

pub fn welch_p_value(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    if t == 0.0 {
        return 1.0;
    }
    student_t_two_sided_p(t, df)
}

pub fn welch_test(
    mean_r: f64,
    var_r: f64,
    n_r: u64,
    mean_s: f64,
    var_s: f64,
    n_s: u64,
    alpha: f64,
) -> Result<WelchResult> {
    let t = welch_statistic(mean_r, var_r, n_r, mean_s, var_s, n_s)?;
    let df = if var_r <= 0.0 && var_s <= 0.0 {
        f64::INFINITY
    } else {
        welch_satterthwaite_df(var_r, n_r, var_s, n_s)?
    };
    let p = welch_p_value(t, df);
    Ok(WelchResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value: p,
        significant: p < alpha,
        better: if mean_r < mean_s {
            Better::Risky
        } else {
            Better::Standard
        },
    })
}
