use instexp::active::{BudgetTracker, QueryStrategy};
use instexp::adwin::AdwinEstimator;
use instexp::eval::ConfusionMatrix;
use instexp::exploit::{
    sample_index, select_indices, ExploitConfig, ExploitingWrapper, StrategyKind, WindowPolicy,
};
use instexp::learners::{LearnerKind, LearnerSpec};
use instexp::streams::preset;
use instexp::types::{ActiveLearner, LabelOracle};
use instexp::{ClassLabel, Instance, Result, SeededRng};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adwin_window_is_a_suffix(values in prop::collection::vec(0.0f64..=1.0, 1..400), delta in 0.001f64..0.5) {
        let mut a = AdwinEstimator::new(delta).unwrap();
        for (i, &v) in values.iter().enumerate() {
            a.update(v).unwrap();
            let width = a.width() as usize;
            prop_assert!(width >= 1 && width <= i + 1);
            let kept = &values[i + 1 - width..=i];
            let mean = kept.iter().sum::<f64>() / width as f64;
            prop_assert!((a.mean() - mean).abs() < 1e-9);
            prop_assert_eq!(a.buckets().map(|b| b.count).sum::<u64>(), a.width());
        }
    }

    #[test]
    fn sampled_indices_stay_in_window(omega in 1usize..500, r in 0.0f64..=1.0) {
        let i = sample_index(omega, r).unwrap();
        prop_assert!((1..=omega).contains(&i));
    }

    #[test]
    fn every_strategy_samples_inside_the_window(omega in 1usize..200, lambda in 0usize..50, seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        for s in [StrategyKind::UniformWindow, StrategyKind::ExponentialWindow { gamma: 4.0 }, StrategyKind::SingleExposition] {
            let idx = select_indices(s, omega, lambda, &mut rng).unwrap();
            prop_assert_eq!(idx.len(), lambda);
            prop_assert!(idx.iter().all(|&i| (1..=omega).contains(&i)));
        }
    }

    #[test]
    fn kappa_never_exceeds_one(rows in prop::collection::vec(prop::collection::vec(0u64..50, 3), 3)) {
        let m = ConfusionMatrix::from_rows(&rows).unwrap();
        if m.total() > 0 {
            let k = m.kappa().unwrap();
            prop_assert!(k <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn tracker_alone_obeys_the_law(budget in 0.001f64..=1.0, greedy in prop::collection::vec(any::<bool>(), 1..500)) {
        let mut t = BudgetTracker::new(budget).unwrap();
        for want in greedy {
            t.observe();
            if want && t.allows() {
                t.record_query();
            }
            prop_assert!(t.within_law());
        }
    }
}

fn run_budget(
    kind: LearnerKind,
    budget: f64,
    strategy: Option<StrategyKind>,
    seed: u64,
) -> Result<()> {
    let p = preset("SEA2").unwrap();
    let stream = p.build(seed, Some(5_000))?;
    let config = strategy.map_or_else(ExploitConfig::baseline, |s| {
        ExploitConfig::new(s, 20, true, WindowPolicy::AdwinDriven)
    });
    let mut learner = ExploitingWrapper::new(
        LearnerSpec::new(kind).build(p.dim, p.classes),
        config,
        budget,
        QueryStrategy::randvar(),
        &SeededRng::new(seed),
    )?;
    for inst in stream {
        let inst = inst?;
        let pred = learner.predict(&inst.instance);
        let label = inst.label;
        let mut oracle = move |_: &Instance| -> Result<ClassLabel> { Ok(label) };
        learner.offer(&inst.instance, &pred, &mut oracle as &mut dyn LabelOracle)?;
        assert!(
            learner.budget_tracker().within_law(),
            "budget {budget} exceeded at {}",
            inst.instance.arrival_index
        );
    }
    Ok(())
}

#[test]
fn exploiting_learners_respect_the_budget() {
    for budget in [1.0, 0.5, 0.05, 0.01] {
        for strategy in [
            None,
            Some(StrategyKind::UniformWindow),
            Some(StrategyKind::SingleExposition),
        ] {
            run_budget(LearnerKind::NaiveBayes, budget, strategy, 3).unwrap();
        }
    }
}
