//! Browser bindings for the demo page in `www/`.

use instexp::active::QueryStrategy;
use instexp::eval::{run_test_then_train, EvalOptions, KappaMode};
use instexp::exploit::{
    select_indices, ExploitConfig, ExploitingWrapper, StrategyKind, WindowPolicy, DEFAULT_GAMMA,
};
use instexp::learners::{LearnerKind, LearnerSpec};
use instexp::streams::{preset, DriftTransition};
use instexp::SeededRng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn strategy(name: &str) -> Result<Option<StrategyKind>, JsError> {
    match name.to_ascii_uppercase().as_str() {
        "BASELINE" => Ok(None),
        "UW" => Ok(Some(StrategyKind::UniformWindow)),
        "EW" => Ok(Some(StrategyKind::ExponentialWindow {
            gamma: DEFAULT_GAMMA,
        })),
        "SE" => Ok(Some(StrategyKind::SingleExposition)),
        _ => Err(JsError::new(&format!("unknown strategy `{name}`"))),
    }
}

/// How often each window position (1 = oldest) gets picked for replay.
#[wasm_bindgen]
pub fn sampler_histogram(
    strategy_name: &str,
    omega: usize,
    draws: usize,
    seed: u32,
) -> Result<Vec<u32>, JsError> {
    let kind =
        strategy(strategy_name)?.ok_or_else(|| JsError::new("the baseline does not replay"))?;
    let mut rng = SeededRng::new(u64::from(seed));
    let mut counts = vec![0u32; omega];
    for i in
        select_indices(kind, omega, draws, &mut rng).map_err(|e| JsError::new(&e.to_string()))?
    {
        counts[i - 1] += 1;
    }
    Ok(counts)
}

/// Probability that the successor concept generates instance `t`, at `points` evenly
/// spaced positions of `[0, length)`.
#[wasm_bindgen]
pub fn drift_curve(
    center: u32,
    width: u32,
    length: u32,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let d = DriftTransition::with_width(u64::from(center), u64::from(width.max(1)))
        .map_err(|e| JsError::new(&e.to_string()))?;
    let step = f64::from(length) / points.max(1) as f64;
    Ok((0..points)
        .map(|i| d.probability(i as f64 * step))
        .collect())
}

#[derive(Serialize)]
struct Curve {
    name: String,
    kappa: Option<f64>,
    labeled: u64,
    updates: u64,
    /// `(t, windowed kappa)` pairs.
    series: Vec<(u64, f64)>,
}

/// Runs the baseline and one exploitation strategy on a preset and returns both kappa
/// curves as JSON.
#[wasm_bindgen]
pub fn compare_budget(
    preset_name: &str,
    learner: &str,
    strategy_name: &str,
    lambda_max: usize,
    budget: f64,
    length: u32,
    seed: u32,
) -> Result<String, JsError> {
    let p = preset(preset_name)
        .ok_or_else(|| JsError::new(&format!("unknown preset `{preset_name}`")))?;
    let kind = LearnerKind::parse(learner)
        .ok_or_else(|| JsError::new(&format!("unknown learner `{learner}`")))?;
    let exploit = strategy(strategy_name)?;
    let err = |e: instexp::Error| JsError::new(&e.to_string());
    let stride = (u64::from(length) / 200).max(1);

    let mut curves = Vec::new();
    for s in [None, exploit] {
        let config = s.map_or_else(ExploitConfig::baseline, |k| {
            ExploitConfig::new(k, lambda_max, true, WindowPolicy::AdwinDriven)
        });
        let name = config.name().to_string();
        let rng = SeededRng::new(u64::from(seed));
        let mut model = ExploitingWrapper::new(
            LearnerSpec::new(kind).build(p.dim, p.classes),
            config,
            budget,
            QueryStrategy::randvar(),
            &rng.derive("learner"),
        )
        .map_err(err)?;
        let stream = p
            .build(u64::from(seed), Some(u64::from(length)))
            .map_err(err)?;
        let options =
            EvalOptions::global(p.classes).with_series(KappaMode::SlidingWindow(1000), stride);
        let report = run_test_then_train(&mut model, stream, options).map_err(err)?;
        curves.push(Curve {
            name,
            kappa: report.kappa,
            labeled: report.labeled,
            updates: report.updates,
            series: report.series.iter().map(|pt| (pt.t, pt.kappa)).collect(),
        });
    }
    serde_json::to_string(&curves).map_err(|e| JsError::new(&e.to_string()))
}
