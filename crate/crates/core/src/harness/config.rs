//! Line-oriented experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! [stream]
//! stream = SEA1
//! length = 100000
//!
//! [learner]
//! learner = AHT
//!
//! [active]
//! budgets = [0.5, 0.05]
//!
//! [exploit]
//! strategy = [Baseline, EW]
//! lambda_max = risky
//! ```
//!
//! Keys may also appear before any section header. Inside a section only that section's
//! keys are accepted.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::active::{QueryKind, SELECTIVE_SLOPE};
use crate::error::{Error, Result};
use crate::eval::KappaMode;
use crate::exploit::{StrategyKind, WindowPolicy, DEFAULT_GAMMA};
use crate::learners::{LearnerKind, LearnerSpec, Loss};
use crate::streams::{preset, FileFormat, Preset};

pub const DEFAULT_BUDGETS: [f64; 6] = [1.0, 0.5, 0.2, 0.1, 0.05, 0.01];
/// ADWIN confidence per default budget.
pub const DEFAULT_ALPHA_THETA: [f64; 6] = [0.002, 0.05, 0.1, 0.1, 0.2, 0.2];
pub const AHT_SAFE_LAMBDA: [usize; 6] = [1, 1, 1, 1, 1, 10];
pub const AHT_RISKY_LAMBDA: [usize; 6] = [100, 100, 100, 1000, 1000, 1000];
pub const SGD_SAFE_LAMBDA: usize = 10;
pub const SGD_RISKY_LAMBDA: usize = 1000;
pub const DEFAULT_ALPHA_E: f64 = 0.05;
pub const DEFAULT_SERIES_DELTA: f64 = 0.002;
pub const DEFAULT_STRIDE: u64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub enum StreamSource {
    Preset(Preset),
    File { path: PathBuf, format: FileFormat },
}

impl StreamSource {
    pub fn name(&self) -> String {
        match self {
            StreamSource::Preset(p) => p.name.to_string(),
            StreamSource::File { path, .. } => path.file_stem().map_or_else(
                || path.display().to_string(),
                |s| s.to_string_lossy().into_owned(),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyChoice {
    Baseline,
    Exploit(StrategyKind),
}

impl StrategyChoice {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyChoice::Baseline => "Baseline",
            StrategyChoice::Exploit(k) => k.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnsembleChoice {
    None,
    Switching,
    Elevating { alpha: f64 },
}

impl EnsembleChoice {
    pub fn describe(&self) -> String {
        match self {
            EnsembleChoice::None => "none".into(),
            EnsembleChoice::Switching => "switching".into(),
            EnsembleChoice::Elevating { alpha } => format!("elevating({alpha})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub stream: StreamSource,
    pub length: Option<u64>,
    pub learner: LearnerSpec,
    pub query: QueryKind,
    pub selective_slope: f64,
    pub budgets: Vec<f64>,
    /// ADWIN confidence per budget.
    pub alpha_theta: Vec<f64>,
    pub strategies: Vec<StrategyChoice>,
    /// Intensity per budget.
    pub lambda_max: Vec<usize>,
    /// How `lambda_max` was written: `risky`, `safe`, or the numbers themselves.
    pub lambda_label: String,
    pub window: WindowPolicy,
    pub dynamic_intensity: bool,
    pub gamma: f64,
    pub ensemble: EnsembleChoice,
    pub seeds: Vec<u64>,
    pub output: Option<PathBuf>,
    pub series: KappaMode,
    pub stride: u64,
}

/// Which section owns each key.
const KEYS: &[(&str, &str)] = &[
    ("name", "run"),
    ("seeds", "run"),
    ("output", "run"),
    ("series", "run"),
    ("stride", "run"),
    ("stream", "stream"),
    ("length", "stream"),
    ("delimiter", "stream"),
    ("label_column", "stream"),
    ("header", "stream"),
    ("classes", "stream"),
    ("learner", "learner"),
    ("loss", "learner"),
    ("learning_rate", "learner"),
    ("grace_period", "learner"),
    ("query", "active"),
    ("budgets", "active"),
    ("alpha_theta", "active"),
    ("selective_slope", "active"),
    ("strategy", "exploit"),
    ("lambda_max", "exploit"),
    ("window", "exploit"),
    ("intensity", "exploit"),
    ("gamma", "exploit"),
    ("ensemble", "ensemble"),
    ("alpha_e", "ensemble"),
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(head, _)| head).trim()
}

fn tokenize(text: &str) -> Result<HashMap<String, Entry>> {
    let mut entries: HashMap<String, Entry> = HashMap::new();
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = strip_comment(raw);
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') && !content.contains('=') {
            let name = content
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| err(line, format!("malformed section header `{content}`")))?
                .trim()
                .to_ascii_lowercase();
            if !KEYS.iter().any(|(_, s)| *s == name) {
                return Err(err(line, format!("unknown section `[{name}]`")));
            }
            section = Some(name);
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key = value`, found `{content}`")))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        let Some((_, owner)) = KEYS.iter().find(|(k, _)| *k == key) else {
            return Err(err(line, format!("unknown key `{key}`")));
        };
        if let Some(s) = &section {
            if s != owner {
                return Err(err(
                    line,
                    format!("key `{key}` belongs in section [{owner}], not [{s}]"),
                ));
            }
        }
        if value.is_empty() {
            return Err(err(line, format!("key `{key}` has no value")));
        }
        if let Some(prev) = entries.get(&key) {
            return Err(err(
                line,
                format!("duplicate key `{key}` (first set on line {})", prev.line),
            ));
        }
        entries.insert(
            key,
            Entry {
                value: value.to_string(),
                line,
            },
        );
    }
    Ok(entries)
}

fn list(entry: &Entry) -> Vec<String> {
    let v = entry.value.trim();
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .unwrap_or(v);
    inner
        .split(',')
        .map(|s| s.trim().trim_matches('"').to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn scalar(entry: &Entry) -> String {
    entry.value.trim().trim_matches('"').to_string()
}

fn number<T: std::str::FromStr>(entry: &Entry, key: &str, token: &str) -> Result<T> {
    token.parse().map_err(|_| {
        err(
            entry.line,
            format!("`{key}`: `{token}` is not a valid number"),
        )
    })
}

fn numbers<T: std::str::FromStr>(entry: &Entry, key: &str) -> Result<Vec<T>> {
    list(entry).iter().map(|t| number(entry, key, t)).collect()
}

/// Argument of `name(value)`, if the token has that shape.
fn call<'a>(token: &'a str, name: &str) -> Option<&'a str> {
    let lower = token.to_ascii_lowercase();
    if lower.starts_with(name) {
        let rest = token[name.len()..].trim();
        return rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .map(str::trim);
    }
    None
}

/// Index of the default budget closest to `b`.
fn nearest_default(b: f64) -> usize {
    (0..DEFAULT_BUDGETS.len())
        .min_by(|&i, &j| {
            (DEFAULT_BUDGETS[i] - b)
                .abs()
                .total_cmp(&(DEFAULT_BUDGETS[j] - b).abs())
        })
        .expect("non-empty table")
}

fn lambda_schedule(kind: LearnerKind, risky: bool, budgets: &[f64]) -> Vec<usize> {
    budgets
        .iter()
        .map(|&b| match (kind, risky) {
            (LearnerKind::Sgd, true) => SGD_RISKY_LAMBDA,
            (LearnerKind::Sgd, false) => SGD_SAFE_LAMBDA,
            (_, true) => AHT_RISKY_LAMBDA[nearest_default(b)],
            (_, false) => AHT_SAFE_LAMBDA[nearest_default(b)],
        })
        .collect()
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let entries = tokenize(text)?;
    let get = |k: &str| entries.get(k);
    let last_line = text.lines().count().max(1);

    let stream_entry =
        get("stream").ok_or_else(|| err(last_line, "missing required key `stream`"))?;
    let stream_token = scalar(stream_entry);
    let stream = match preset(&stream_token) {
        Some(p) => StreamSource::Preset(p),
        None => {
            let path = PathBuf::from(&stream_token);
            let format = match FileFormat::from_path(&path) {
                FileFormat::Arff => FileFormat::Arff,
                FileFormat::Delimited(mut o) => {
                    if let Some(e) = get("delimiter") {
                        let d = scalar(e);
                        o.delimiter = match d.as_str() {
                            "tab" | "\\t" => b'\t',
                            "space" => b' ',
                            s if s.len() == 1 => s.as_bytes()[0],
                            _ => {
                                return Err(err(
                                    e.line,
                                    format!("`delimiter`: expected one character, got `{d}`"),
                                ))
                            }
                        };
                    }
                    if let Some(e) = get("label_column") {
                        let v = scalar(e);
                        o.label_column = if v.eq_ignore_ascii_case("last") {
                            None
                        } else {
                            Some(number(e, "label_column", &v)?)
                        };
                    }
                    if let Some(e) = get("header") {
                        o.has_header = parse_bool(e, "header")?;
                    }
                    if let Some(e) = get("classes") {
                        o.classes = Some(list(e));
                    }
                    FileFormat::Delimited(o)
                }
            };
            StreamSource::File { path, format }
        }
    };
    if matches!(stream, StreamSource::Preset(_)) {
        for key in ["delimiter", "label_column", "header", "classes"] {
            if let Some(e) = get(key) {
                return Err(err(e.line, format!("`{key}` only applies to stream files")));
            }
        }
    }
    let length = match get("length") {
        Some(e) => {
            let n: u64 = number(e, "length", &scalar(e))?;
            if n == 0 {
                return Err(err(e.line, "`length` must be positive"));
            }
            Some(n)
        }
        None => None,
    };

    let learner_entry =
        get("learner").ok_or_else(|| err(last_line, "missing required key `learner`"))?;
    let kind = LearnerKind::parse(&scalar(learner_entry)).ok_or_else(|| {
        err(
            learner_entry.line,
            format!(
                "unknown learner `{}` (NB, SGD, HT, AHT)",
                scalar(learner_entry)
            ),
        )
    })?;
    let mut learner = LearnerSpec::new(kind);
    if let Some(e) = get("loss") {
        learner.loss = match scalar(e).to_ascii_lowercase().as_str() {
            "hinge" => Loss::Hinge,
            "logistic" | "log" => Loss::Logistic,
            other => return Err(err(e.line, format!("unknown loss `{other}`"))),
        };
    }
    if let Some(e) = get("learning_rate") {
        let lr: f64 = number(e, "learning_rate", &scalar(e))?;
        if !(lr >= 0.0 && lr.is_finite()) {
            return Err(err(
                e.line,
                "`learning_rate` must be finite and non-negative",
            ));
        }
        learner.learning_rate = lr;
    }
    if let Some(e) = get("grace_period") {
        let g: u64 = number(e, "grace_period", &scalar(e))?;
        if g == 0 {
            return Err(err(e.line, "`grace_period` must be positive"));
        }
        learner.tree.grace_period = g as f64;
    }

    let query = match get("query") {
        Some(e) => QueryKind::parse(&scalar(e)).ok_or_else(|| {
            err(
                e.line,
                format!("unknown query strategy `{}` (ALR, RandVar, ALS)", scalar(e)),
            )
        })?,
        None => QueryKind::RandVar,
    };
    let selective_slope = match get("selective_slope") {
        Some(e) => {
            let c: f64 = number(e, "selective_slope", &scalar(e))?;
            if !(c > 0.0 && c.is_finite()) {
                return Err(err(e.line, "`selective_slope` must be positive"));
            }
            c
        }
        None => SELECTIVE_SLOPE,
    };

    let budgets = match get("budgets") {
        Some(e) => {
            let b: Vec<f64> = numbers(e, "budgets")?;
            if b.is_empty() {
                return Err(err(e.line, "`budgets` must not be empty"));
            }
            if let Some(bad) = b.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
                return Err(err(e.line, format!("budget {bad} outside (0, 1]")));
            }
            b
        }
        None => DEFAULT_BUDGETS.to_vec(),
    };
    let budget_line = get("budgets").map_or(0, |e| e.line);
    let alpha_theta = match get("alpha_theta") {
        Some(e) => {
            let a: Vec<f64> = numbers(e, "alpha_theta")?;
            if a.len() != budgets.len() {
                return Err(err(
                    e.line,
                    format!(
                        "`alpha_theta` has {} entries but `budgets` (line {budget_line}) has {}",
                        a.len(),
                        budgets.len()
                    ),
                ));
            }
            if let Some(bad) = a.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
                return Err(err(e.line, format!("alpha_theta {bad} outside (0, 1)")));
            }
            a
        }
        None => budgets
            .iter()
            .map(|&b| DEFAULT_ALPHA_THETA[nearest_default(b)])
            .collect(),
    };

    let gamma = match get("gamma") {
        Some(e) => {
            let g: f64 = number(e, "gamma", &scalar(e))?;
            if !(g > 0.0 && g.is_finite()) {
                return Err(err(e.line, "`gamma` must be positive"));
            }
            g
        }
        None => DEFAULT_GAMMA,
    };
    let strategies = match get("strategy") {
        Some(e) => {
            let tokens = list(e);
            if tokens.is_empty() {
                return Err(err(e.line, "`strategy` must not be empty"));
            }
            tokens
                .iter()
                .map(|t| match t.to_ascii_lowercase().as_str() {
                    "baseline" | "base" => Ok(StrategyChoice::Baseline),
                    "uw" => Ok(StrategyChoice::Exploit(StrategyKind::UniformWindow)),
                    "ew" => Ok(StrategyChoice::Exploit(StrategyKind::ExponentialWindow {
                        gamma,
                    })),
                    "se" => Ok(StrategyChoice::Exploit(StrategyKind::SingleExposition)),
                    other => Err(err(
                        e.line,
                        format!("unknown strategy `{other}` (Baseline, UW, EW, SE)"),
                    )),
                })
                .collect::<Result<Vec<_>>>()?
        }
        None => vec![StrategyChoice::Baseline],
    };

    let (lambda_max, lambda_label) = match get("lambda_max") {
        None => (lambda_schedule(kind, true, &budgets), "risky".to_string()),
        Some(e) => {
            let v = scalar(e).to_ascii_lowercase();
            match v.as_str() {
                "risky" => (lambda_schedule(kind, true, &budgets), v),
                "safe" => (lambda_schedule(kind, false, &budgets), v),
                _ => {
                    let values: Vec<usize> = numbers(e, "lambda_max")?;
                    let per_budget = match values.len() {
                        1 => vec![values[0]; budgets.len()],
                        n if n == budgets.len() => values,
                        n => {
                            return Err(err(
                                e.line,
                                format!(
                                    "`lambda_max` has {n} entries but `budgets` (line {budget_line}) has {}",
                                    budgets.len()
                                ),
                            ))
                        }
                    };
                    let label = per_budget
                        .iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join(" ");
                    (per_budget, label)
                }
            }
        }
    };

    let window = match get("window") {
        None => WindowPolicy::AdwinDriven,
        Some(e) => {
            let v = scalar(e);
            let size = |arg: &str| -> Result<usize> {
                let n: usize = number(e, "window", arg)?;
                if n == 0 {
                    return Err(err(e.line, "window size must be positive"));
                }
                Ok(n)
            };
            if v.eq_ignore_ascii_case("adwin") {
                WindowPolicy::AdwinDriven
            } else if let Some(arg) = call(&v, "fixed") {
                WindowPolicy::Fixed(size(arg)?)
            } else if let Some(arg) = call(&v, "dynamic") {
                WindowPolicy::DynamicShrink(size(arg)?)
            } else {
                return Err(err(
                    e.line,
                    format!("unknown window policy `{v}` (fixed(N), dynamic(N), adwin)"),
                ));
            }
        }
    };
    let dynamic_intensity = match get("intensity") {
        None => true,
        Some(e) => match scalar(e).to_ascii_lowercase().as_str() {
            "dynamic" => true,
            "fixed" => false,
            other => {
                return Err(err(
                    e.line,
                    format!("unknown intensity mode `{other}` (fixed, dynamic)"),
                ))
            }
        },
    };

    let alpha_e = match get("alpha_e") {
        Some(e) => {
            let a: f64 = number(e, "alpha_e", &scalar(e))?;
            if !(a > 0.0 && a < 1.0) {
                return Err(err(e.line, "`alpha_e` must lie in (0, 1)"));
            }
            Some(a)
        }
        None => None,
    };
    let ensemble = match get("ensemble") {
        None => EnsembleChoice::None,
        Some(e) => {
            let v = scalar(e);
            match v.to_ascii_lowercase().as_str() {
                "none" => EnsembleChoice::None,
                "switching" => EnsembleChoice::Switching,
                "elevating" => EnsembleChoice::Elevating {
                    alpha: alpha_e.unwrap_or(DEFAULT_ALPHA_E),
                },
                _ => match call(&v, "elevating") {
                    Some(arg) => {
                        let a: f64 = number(e, "ensemble", arg)?;
                        if !(a > 0.0 && a < 1.0) {
                            return Err(err(e.line, "elevating significance must lie in (0, 1)"));
                        }
                        EnsembleChoice::Elevating { alpha: a }
                    }
                    None => {
                        return Err(err(
                            e.line,
                            format!("unknown ensemble `{v}` (none, switching, elevating(α))"),
                        ))
                    }
                },
            }
        }
    };
    if let (Some(_), Some(e)) = (alpha_e, get("alpha_e")) {
        if !matches!(ensemble, EnsembleChoice::Elevating { .. }) {
            return Err(err(e.line, "`alpha_e` requires `ensemble = elevating`"));
        }
    }

    let seeds = match get("seeds") {
        Some(e) => {
            let s: Vec<u64> = numbers(e, "seeds")?;
            if s.is_empty() {
                return Err(err(e.line, "`seeds` must not be empty"));
            }
            s
        }
        None => vec![1],
    };
    let output = get("output").map(|e| PathBuf::from(scalar(e)));
    let series = match get("series") {
        None => KappaMode::Adwin {
            delta: DEFAULT_SERIES_DELTA,
        },
        Some(e) => {
            let v = scalar(e);
            if v.eq_ignore_ascii_case("adwin") {
                KappaMode::Adwin {
                    delta: DEFAULT_SERIES_DELTA,
                }
            } else if let Some(arg) = call(&v, "window") {
                let n: usize = number(e, "series", arg)?;
                if n == 0 {
                    return Err(err(e.line, "series window must be positive"));
                }
                KappaMode::SlidingWindow(n)
            } else {
                return Err(err(
                    e.line,
                    format!("unknown series mode `{v}` (adwin, window(N))"),
                ));
            }
        }
    };
    let stride = match get("stride") {
        Some(e) => {
            let s: u64 = number(e, "stride", &scalar(e))?;
            if s == 0 {
                return Err(err(e.line, "`stride` must be positive"));
            }
            s
        }
        None => DEFAULT_STRIDE,
    };
    let name = get("name").map_or_else(|| stream.name(), scalar);

    Ok(ExperimentConfig {
        name,
        stream,
        length,
        learner,
        query,
        selective_slope,
        budgets,
        alpha_theta,
        strategies,
        lambda_max,
        lambda_label,
        window,
        dynamic_intensity,
        gamma,
        ensemble,
        seeds,
        output,
        series,
        stride,
    })
}

fn parse_bool(e: &Entry, key: &str) -> Result<bool> {
    match scalar(e).to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(err(
            e.line,
            format!("`{key}`: expected true or false, got `{other}`"),
        )),
    }
}

/// Reads a config file; relative stream and output paths resolve against its directory.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut config = parse_config(&text)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    if let StreamSource::File { path: p, .. } = &mut config.stream {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    if let Some(out) = &mut config.output {
        if out.is_relative() {
            *out = base.join(&*out);
        }
    }
    Ok(config)
}
