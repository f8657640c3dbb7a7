//! Index sampling over the labeled window.
//!
//! A single index is `⌈r·ω⌉` for a random `r` in `(0, 1]`, clamped into `[1, ω]`.
//! Uniform window draws `r` uniformly; exponential window draws `e` from an exponential
//! with rate `γ` truncated to `[0, 1]` and uses `r = 1 − e`, so small `e` lands on the
//! newest instances; single exposition always returns `ω`.

use crate::error::{contract, Result};
use crate::rng::SeededRng;

pub const DEFAULT_GAMMA: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyKind {
    UniformWindow,
    ExponentialWindow { gamma: f64 },
    SingleExposition,
}

impl StrategyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::UniformWindow => "UW",
            StrategyKind::ExponentialWindow { .. } => "EW",
            StrategyKind::SingleExposition => "SE",
        }
    }
}

pub fn sample_index(omega: usize, r: f64) -> Result<usize> {
    if omega == 0 {
        return Err(contract("index sampling from an empty window"));
    }
    let i = (r * omega as f64).ceil();
    Ok((i.max(1.0) as usize).min(omega))
}

/// Draws `e = −ln(u)/γ`, redrawing while `e > 1`.
pub fn draw_truncated_exponential(rng: &mut SeededRng, gamma: f64) -> f64 {
    loop {
        let e = truncated_exponential_transform(rng.uniform(), gamma);
        if e <= 1.0 {
            return e;
        }
    }
}

pub fn truncated_exponential_transform(u: f64, gamma: f64) -> f64 {
    -u.ln() / gamma
}

/// `λ` 1-based indices into a window of size `ω`.
pub fn select_indices(
    strategy: StrategyKind,
    omega: usize,
    lambda: usize,
    rng: &mut SeededRng,
) -> Result<Vec<usize>> {
    if omega == 0 {
        return Err(contract("index sampling from an empty window"));
    }
    (0..lambda)
        .map(|_| match strategy {
            StrategyKind::UniformWindow => sample_index(omega, rng.uniform()),
            StrategyKind::ExponentialWindow { gamma } => {
                sample_index(omega, 1.0 - draw_truncated_exponential(rng, gamma))
            }
            StrategyKind::SingleExposition => Ok(omega),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_formula() {
        assert_eq!(sample_index(10, 0.05).unwrap(), 1);
        assert_eq!(sample_index(10, 1.0).unwrap(), 10);
        assert_eq!(sample_index(7, 0.999).unwrap(), 7);
        assert_eq!(sample_index(7, 0.0).unwrap(), 1);
        assert!(sample_index(0, 0.5).is_err());
    }

    #[test]
    fn transform_boundary() {
        assert_eq!(truncated_exponential_transform(1.0, 4.0), 0.0);
        assert_eq!(sample_index(10, 1.0 - 0.0).unwrap(), 10);
    }

    #[test]
    fn first_draw_acceptance_rate() {
        // P(e <= 1) = P(u >= e^-γ) = 1 - e^-4 ≈ 0.9817
        let expected = 1.0 - (-4.0f64).exp();
        let mut rng = SeededRng::new(1);
        let n = 200_000;
        let accepted = (0..n)
            .filter(|_| truncated_exponential_transform(rng.uniform(), 4.0) <= 1.0)
            .count();
        assert!((accepted as f64 / n as f64 - expected).abs() < 0.002);
    }

    #[test]
    fn single_exposition_repeats_newest() {
        let mut rng = SeededRng::new(2);
        assert_eq!(
            select_indices(StrategyKind::SingleExposition, 5, 3, &mut rng).unwrap(),
            vec![5, 5, 5]
        );
    }

    #[test]
    fn zero_intensity_draws_nothing() {
        let mut rng = SeededRng::new(3);
        let before = rng.clone().uniform();
        assert!(select_indices(StrategyKind::UniformWindow, 9, 0, &mut rng)
            .unwrap()
            .is_empty());
        assert_eq!(rng.uniform(), before);
    }
}
