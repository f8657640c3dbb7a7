//! Stable versus drift periods.

use super::runner::SeriesPoint;
use crate::error::{contract, Result};

/// Merged, sorted half-open drift intervals `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentSchedule {
    intervals: Vec<(u64, u64)>,
    length: u64,
}

impl SegmentSchedule {
    pub fn new(mut intervals: Vec<(u64, u64)>, length: u64) -> Result<Self> {
        if intervals.iter().any(|&(a, b)| a >= b || b > length) {
            return Err(contract(format!(
                "drift intervals must be non-empty and lie within 0..{length}"
            )));
        }
        intervals.sort_unstable();
        let mut merged: Vec<(u64, u64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(Self {
            intervals: merged,
            length,
        })
    }

    pub fn intervals(&self) -> &[(u64, u64)] {
        &self.intervals
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn in_drift(&self, t: u64) -> bool {
        let i = self.intervals.partition_point(|&(_, end)| end <= t);
        self.intervals.get(i).is_some_and(|&(start, _)| start <= t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentSummary {
    pub stable: Option<f64>,
    pub drift: Option<f64>,
    /// Mean of the two components; absent unless both are present.
    pub balanced: Option<f64>,
    pub stable_points: usize,
    pub drift_points: usize,
}

pub fn segment_average(series: &[SeriesPoint], schedule: &SegmentSchedule) -> SegmentSummary {
    let (mut s_sum, mut s_n, mut d_sum, mut d_n) = (0.0, 0usize, 0.0, 0usize);
    for p in series {
        if schedule.in_drift(p.t) {
            d_sum += p.kappa;
            d_n += 1;
        } else {
            s_sum += p.kappa;
            s_n += 1;
        }
    }
    let stable = (s_n > 0).then(|| s_sum / s_n as f64);
    let drift = (d_n > 0).then(|| d_sum / d_n as f64);
    SegmentSummary {
        stable,
        drift,
        balanced: stable.zip(drift).map(|(s, d)| (s + d) / 2.0),
        stable_points: s_n,
        drift_points: d_n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: &[(u64, f64)]) -> Vec<SeriesPoint> {
        values
            .iter()
            .map(|&(t, kappa)| SeriesPoint {
                t,
                kappa,
                accuracy: 0.0,
            })
            .collect()
    }

    #[test]
    fn merges_and_validates() {
        let s = SegmentSchedule::new(vec![(50, 70), (10, 20), (15, 30)], 100).unwrap();
        assert_eq!(s.intervals(), &[(10, 30), (50, 70)]);
        assert!(
            s.in_drift(10) && s.in_drift(29) && !s.in_drift(30) && !s.in_drift(5) && s.in_drift(69)
        );
        assert!(SegmentSchedule::new(vec![(10, 10)], 100).is_err());
        assert!(SegmentSchedule::new(vec![(90, 101)], 100).is_err());
    }

    #[test]
    fn all_stable() {
        let s = SegmentSchedule::new(vec![], 10).unwrap();
        let r = segment_average(&series(&[(0, 0.5), (5, 0.7)]), &s);
        assert!((r.stable.unwrap() - 0.6).abs() < 1e-12);
        assert_eq!((r.drift, r.balanced), (None, None));
    }

    #[test]
    fn all_drift() {
        let s = SegmentSchedule::new(vec![(0, 10)], 10).unwrap();
        let r = segment_average(&series(&[(0, 0.5), (9, 0.7)]), &s);
        assert_eq!(r.stable, None);
        assert!(r.drift.is_some());
    }

    #[test]
    fn balanced_average() {
        let s = SegmentSchedule::new(vec![(4, 6)], 10).unwrap();
        let pts = series(&[(0, 0.8), (1, 0.8), (2, 0.8), (4, 0.4), (5, 0.4), (8, 0.8)]);
        let r = segment_average(&pts, &s);
        assert!((r.balanced.unwrap() - 0.6).abs() < 1e-12);
        let mean = pts.iter().map(|p| p.kappa).sum::<f64>() / pts.len() as f64;
        let recombined = (r.stable.unwrap() * r.stable_points as f64
            + r.drift.unwrap() * r.drift_points as f64)
            / pts.len() as f64;
        assert!((mean - recombined).abs() < 1e-12);
    }
}
