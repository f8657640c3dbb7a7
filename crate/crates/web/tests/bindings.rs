use instexp_web::{compare_budget, drift_curve, sampler_histogram};

#[test]
fn histogram_counts_every_draw() {
    let uw = sampler_histogram("UW", 50, 10_000, 3).unwrap();
    assert_eq!(uw.len(), 50);
    assert_eq!(uw.iter().sum::<u32>(), 10_000);

    let se = sampler_histogram("se", 20, 500, 3).unwrap();
    assert_eq!(se[19], 500);

    let ew = sampler_histogram("EW", 100, 50_000, 3).unwrap();
    let newest: u32 = ew[50..].iter().sum();
    assert!(
        newest > 40_000,
        "exponential weighting favours recent instances"
    );
}

#[test]
fn drift_curve_crosses_half_at_center() {
    let c = drift_curve(500, 100, 1000, 1000).unwrap();
    assert_eq!(c.len(), 1000);
    assert_eq!(c[500], 0.5);
    assert!(c.windows(2).all(|w| w[0] <= w[1]));
    assert!(c[0] < 1e-6 && c[999] > 1.0 - 1e-6);
}

#[test]
fn comparison_returns_two_curves() {
    let json = compare_budget("SEA1", "NB", "UW", 10, 0.2, 5000, 1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let curves = v.as_array().unwrap();
    assert_eq!(curves.len(), 2);
    assert_eq!(curves[0]["name"], "Baseline");
    assert_eq!(curves[1]["name"], "UW");
    assert!(curves[1]["updates"].as_u64() > curves[0]["updates"].as_u64());
    assert!(!curves[0]["series"].as_array().unwrap().is_empty());
}
