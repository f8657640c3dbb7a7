//! Labeling budget accounting and online query strategies.

use crate::error::{contract, Result};
use crate::rng::SeededRng;
use crate::types::PredictionDistribution;

/// Running labeling spend: `labeled / max(seen, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetTracker {
    budget: f64,
    labeled: u64,
    seen: u64,
}

impl BudgetTracker {
    pub fn new(budget: f64) -> Result<Self> {
        if !(budget > 0.0 && budget <= 1.0) {
            return Err(contract(format!("budget {budget} outside (0, 1]")));
        }
        Ok(Self {
            budget,
            labeled: 0,
            seen: 0,
        })
    }

    /// Tracker with explicit counts, mainly for tests.
    pub fn with_counts(budget: f64, labeled: u64, seen: u64) -> Result<Self> {
        if labeled > seen {
            return Err(contract("labeled count exceeds seen count"));
        }
        let mut t = Self::new(budget)?;
        t.labeled = labeled;
        t.seen = seen;
        Ok(t)
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn labeled(&self) -> u64 {
        self.labeled
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }

    pub fn spending(&self) -> f64 {
        self.labeled as f64 / self.seen.max(1) as f64
    }

    /// Whether another query is admissible: `spending < budget`.
    pub fn allows(&self) -> bool {
        self.spending() < self.budget
    }

    /// Counts an arriving instance.
    pub fn observe(&mut self) {
        self.seen += 1;
    }

    pub fn record_query(&mut self) {
        debug_assert!(self.labeled < self.seen);
        self.labeled += 1;
    }

    /// The hard budget law: `spending <= budget + 1/seen`.
    pub fn within_law(&self) -> bool {
        self.seen == 0 || self.spending() <= self.budget + 1.0 / self.seen as f64 + 1e-12
    }
}

pub fn budget_allows(tracker: &BudgetTracker) -> bool {
    tracker.allows()
}

pub const RANDVAR_STEP: f64 = 0.01;
pub const RANDVAR_SPREAD: f64 = 1.0;
pub const SELECTIVE_SLOPE: f64 = 0.1;
const MIN_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    Random,
    RandVar,
    Selective,
}

impl QueryKind {
    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Random => "ALR",
            QueryKind::RandVar => "RandVar",
            QueryKind::Selective => "ALS",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alr" | "random" => Some(QueryKind::Random),
            "randvar" | "rand-var" => Some(QueryKind::RandVar),
            "als" | "selective" => Some(QueryKind::Selective),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QueryStrategy {
    /// Queries each instance with probability equal to the budget.
    Random { budget: f64 },
    /// Variable-uncertainty threshold with a randomised multiplier.
    RandVar {
        threshold: f64,
        step: f64,
        spread: f64,
    },
    /// Queries with probability `slope / (slope + margin)`.
    Selective { slope: f64 },
}

impl QueryStrategy {
    pub fn random(budget: f64) -> Self {
        QueryStrategy::Random { budget }
    }

    pub fn randvar() -> Self {
        QueryStrategy::RandVar {
            threshold: 1.0,
            step: RANDVAR_STEP,
            spread: RANDVAR_SPREAD,
        }
    }

    pub fn selective(slope: f64) -> Self {
        QueryStrategy::Selective { slope }
    }

    pub fn from_kind(kind: QueryKind, budget: f64) -> Self {
        match kind {
            QueryKind::Random => Self::random(budget),
            QueryKind::RandVar => Self::randvar(),
            QueryKind::Selective => Self::selective(SELECTIVE_SLOPE),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            QueryStrategy::Random { budget } => (0.0..=1.0).contains(&budget),
            QueryStrategy::RandVar {
                threshold,
                step,
                spread,
            } => threshold > 0.0 && threshold <= 1.0 && step > 0.0 && step < 1.0 && spread > 0.0,
            QueryStrategy::Selective { slope } => slope > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(contract(format!(
                "invalid query strategy parameters: {self:?}"
            )))
        }
    }

    pub fn threshold(&self) -> Option<f64> {
        match *self {
            QueryStrategy::RandVar { threshold, .. } => Some(threshold),
            _ => None,
        }
    }

    /// Decides whether to request the label of an instance with posterior `dist`.
    pub fn should_query(&mut self, dist: &PredictionDistribution, rng: &mut SeededRng) -> bool {
        match self {
            QueryStrategy::Random { budget } => should_query_random(rng, *budget),
            QueryStrategy::RandVar { .. } => should_query_randvar(self, dist, rng),
            QueryStrategy::Selective { .. } => should_query_selective(self, dist, rng),
        }
    }
}

pub fn should_query_random(rng: &mut SeededRng, budget: f64) -> bool {
    rng.bernoulli(budget)
}

/// Queries when the top posterior falls under the randomised threshold; the threshold
/// shrinks after a query and grows otherwise, staying within `(0, 1]`.
pub fn should_query_randvar(
    strategy: &mut QueryStrategy,
    dist: &PredictionDistribution,
    rng: &mut SeededRng,
) -> bool {
    let QueryStrategy::RandVar {
        threshold,
        step,
        spread,
    } = strategy
    else {
        return false;
    };
    let multiplier = loop {
        let m = rng.normal(1.0, *spread);
        if m > 0.0 {
            break m;
        }
    };
    let query = dist.max_score() < *threshold * multiplier;
    if query {
        *threshold *= 1.0 - *step;
    } else {
        *threshold *= 1.0 + *step;
    }
    *threshold = threshold.clamp(MIN_THRESHOLD, 1.0);
    query
}

pub fn selective_probability(slope: f64, margin: f64) -> f64 {
    slope / (slope + margin.abs())
}

pub fn should_query_selective(
    strategy: &mut QueryStrategy,
    dist: &PredictionDistribution,
    rng: &mut SeededRng,
) -> bool {
    let QueryStrategy::Selective { slope } = strategy else {
        return false;
    };
    rng.bernoulli(selective_probability(*slope, dist.margin()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_gate_boundaries() {
        assert!(!budget_allows(
            &BudgetTracker::with_counts(0.10, 10, 100).unwrap()
        ));
        assert!(budget_allows(
            &BudgetTracker::with_counts(0.10, 9, 100).unwrap()
        ));
        assert!(budget_allows(&BudgetTracker::new(0.10).unwrap()));
        assert!(BudgetTracker::new(0.0).is_err());
        assert!(BudgetTracker::with_counts(0.5, 3, 2).is_err());
    }

    #[test]
    fn random_query_rates() {
        let mut rng = SeededRng::new(1);
        assert!((0..1000).all(|_| should_query_random(&mut rng, 1.0)));
        assert!((0..1000).all(|_| !should_query_random(&mut rng, 0.0)));
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| should_query_random(&mut rng, 0.1))
            .count();
        assert!((hits as f64 / n as f64 - 0.1).abs() < 0.005);
    }

    #[test]
    fn randvar_extremes() {
        let mut rng = SeededRng::new(2);
        let uniform = PredictionDistribution::uniform(4);
        // Max posterior 0.25 against threshold 1: skipped only when the truncated
        // N(1, 1) multiplier lands below 0.25 (about 8% of draws).
        let queried = (0..200)
            .filter(|_| {
                let mut s = QueryStrategy::randvar();
                should_query_randvar(&mut s, &uniform, &mut rng)
            })
            .count();
        assert!(queried > 140);

        let one_hot = PredictionDistribution::one_hot(3, crate::ClassLabel(1));
        let mut s = QueryStrategy::RandVar {
            threshold: 0.01,
            step: 0.01,
            spread: 1.0,
        };
        let mut rng = SeededRng::new(3);
        // Needs a multiplier above 100, i.e. ~99 standard deviations out.
        assert!(!should_query_randvar(&mut s, &one_hot, &mut rng));
    }

    #[test]
    fn randvar_threshold_stays_in_unit_interval() {
        let mut rng = SeededRng::new(4);
        let mut s = QueryStrategy::randvar();
        let sharp = PredictionDistribution::from_scores(vec![0.99, 0.01]);
        let flat = PredictionDistribution::uniform(2);
        for i in 0..20_000 {
            let d = if i % 3 == 0 { &flat } else { &sharp };
            s.should_query(d, &mut rng);
            let th = s.threshold().unwrap();
            assert!(th > 0.0 && th <= 1.0);
        }
    }

    #[test]
    fn randvar_with_budget_gate_regulates_spending() {
        let mut rng = SeededRng::new(5);
        let mut s = QueryStrategy::randvar();
        let mut budget = BudgetTracker::new(0.2).unwrap();
        for _ in 0..50_000 {
            let a = rng.uniform();
            let dist = PredictionDistribution::from_scores(vec![a, 1.0 - a]);
            budget.observe();
            if budget.allows() && s.should_query(&dist, &mut rng) {
                budget.record_query();
            }
            assert!(budget.within_law());
        }
        assert!(
            (budget.spending() - 0.2).abs() < 0.02,
            "spending {}",
            budget.spending()
        );
    }

    #[test]
    fn selective_probability_formula() {
        assert_eq!(selective_probability(0.01, 0.0), 1.0);
        assert!((selective_probability(0.01, 1.0) - 0.01 / 1.01).abs() < 1e-15);
    }

    /// Bisection on the slope to hit a target spending rate on a fixed posterior trace.
    #[test]
    fn selective_slope_calibrates_to_budget() {
        let mut trace_rng = SeededRng::new(6);
        let trace: Vec<PredictionDistribution> = (0..20_000)
            .map(|_| {
                let a = trace_rng.uniform();
                PredictionDistribution::from_scores(vec![a, 1.0 - a])
            })
            .collect();
        let rate = |slope: f64| {
            let mut rng = SeededRng::new(7);
            let mut s = QueryStrategy::selective(slope);
            trace.iter().filter(|d| s.should_query(d, &mut rng)).count() as f64 / trace.len() as f64
        };
        let (mut lo, mut hi) = (1e-6f64, 10.0f64);
        for _ in 0..40 {
            let mid = (lo * hi).sqrt();
            if rate(mid) < 0.1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((rate(hi) - 0.1).abs() < 0.02);
    }
}
