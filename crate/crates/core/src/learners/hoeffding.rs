//! Hoeffding tree (VFDT) over numeric features.
//!
//! Each leaf keeps, per feature and class, a Gaussian estimate plus the observed range.
//! Split candidates are equally spaced points inside the observed range of a feature;
//! the class mass on each side of a candidate comes from the Gaussian CDFs. A leaf is
//! split once the information-gain lead of its best feature exceeds the Hoeffding bound
//! `sqrt(R² ln(1/δ) / 2n)`, or the bound itself drops below the tie threshold.

use crate::error::{Error, Result};
use crate::learners::naive_bayes::GaussianEstimator;
use crate::stats::normal_cdf;
use crate::types::{argmax_label, Classifier, Instance, LabeledInstance, PredictionDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafPrediction {
    MajorityClass,
    NaiveBayes,
    /// Naive Bayes or majority class, whichever has been more accurate at the leaf.
    NaiveBayesAdaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoeffdingTreeConfig {
    pub grace_period: f64,
    pub split_confidence: f64,
    pub tie_threshold: f64,
    pub candidate_points: usize,
    pub min_branch_fraction: f64,
    pub variance_floor: f64,
    pub leaf_prediction: LeafPrediction,
}

impl Default for HoeffdingTreeConfig {
    fn default() -> Self {
        Self {
            grace_period: 200.0,
            split_confidence: 1e-7,
            tie_threshold: 0.05,
            candidate_points: 10,
            min_branch_fraction: 0.01,
            variance_floor: 1e-6,
            leaf_prediction: LeafPrediction::NaiveBayesAdaptive,
        }
    }
}

#[derive(Debug, Clone)]
struct FeatureObserver {
    per_class: Vec<GaussianEstimator>,
    min: Vec<f64>,
    max: Vec<f64>,
}

impl FeatureObserver {
    fn new(classes: usize) -> Self {
        Self {
            per_class: vec![GaussianEstimator::default(); classes],
            min: vec![f64::INFINITY; classes],
            max: vec![f64::NEG_INFINITY; classes],
        }
    }

    fn add(&mut self, class: usize, value: f64, weight: f64) {
        self.per_class[class].add(value, weight);
        self.min[class] = self.min[class].min(value);
        self.max[class] = self.max[class].max(value);
    }

    /// Estimated weight of `class` at or below `threshold`.
    fn weight_below(&self, class: usize, threshold: f64) -> f64 {
        let est = &self.per_class[class];
        let w = est.weight();
        if w == 0.0 || threshold < self.min[class] {
            return 0.0;
        }
        if threshold >= self.max[class] {
            return w;
        }
        let sd = est.variance().sqrt();
        if sd <= 0.0 {
            return if threshold >= est.mean() { w } else { 0.0 };
        }
        w * normal_cdf((threshold - est.mean()) / sd)
    }
}

#[derive(Debug, Clone)]
pub struct Leaf {
    class_counts: Vec<f64>,
    observers: Vec<FeatureObserver>,
    weight_at_last_eval: f64,
    /// Class distribution estimated when the leaf was created; used only while empty.
    prior: Vec<f64>,
    mc_correct: f64,
    nb_correct: f64,
}

impl Leaf {
    fn new(dim: usize, classes: usize, prior: Vec<f64>) -> Self {
        Self {
            class_counts: vec![0.0; classes],
            observers: vec![FeatureObserver::new(classes); dim],
            weight_at_last_eval: 0.0,
            prior,
            mc_correct: 0.0,
            nb_correct: 0.0,
        }
    }

    pub fn class_counts(&self) -> &[f64] {
        &self.class_counts
    }

    pub fn weight(&self) -> f64 {
        self.class_counts.iter().sum()
    }

    fn majority(&self) -> PredictionDistribution {
        if self.weight() > 0.0 {
            PredictionDistribution::from_scores(self.class_counts.clone())
        } else {
            PredictionDistribution::from_scores(self.prior.clone())
        }
    }

    fn naive_bayes(&self, x: &[f64], floor: f64) -> PredictionDistribution {
        let total = self.weight();
        if total == 0.0 {
            return self.majority();
        }
        let logs: Vec<f64> = (0..self.class_counts.len())
            .map(|c| {
                if self.class_counts[c] == 0.0 {
                    return f64::NEG_INFINITY;
                }
                (self.class_counts[c] / total).ln()
                    + self
                        .observers
                        .iter()
                        .zip(x)
                        .map(|(o, &v)| o.per_class[c].log_density(v, floor))
                        .sum::<f64>()
            })
            .collect();
        PredictionDistribution::from_log_scores(&logs)
    }

    fn predict(&self, x: &[f64], cfg: &HoeffdingTreeConfig) -> PredictionDistribution {
        match cfg.leaf_prediction {
            LeafPrediction::MajorityClass => self.majority(),
            LeafPrediction::NaiveBayes => self.naive_bayes(x, cfg.variance_floor),
            LeafPrediction::NaiveBayesAdaptive => {
                if self.nb_correct > self.mc_correct {
                    self.naive_bayes(x, cfg.variance_floor)
                } else {
                    self.majority()
                }
            }
        }
    }

    fn learn(&mut self, x: &[f64], class: usize, cfg: &HoeffdingTreeConfig) {
        if cfg.leaf_prediction == LeafPrediction::NaiveBayesAdaptive && self.weight() > 0.0 {
            if argmax_label(&self.majority()).ok().map(|l| l.0) == Some(class) {
                self.mc_correct += 1.0;
            }
            if argmax_label(&self.naive_bayes(x, cfg.variance_floor))
                .ok()
                .map(|l| l.0)
                == Some(class)
            {
                self.nb_correct += 1.0;
            }
        }
        self.class_counts[class] += 1.0;
        for (o, &v) in self.observers.iter_mut().zip(x) {
            o.add(class, v, 1.0);
        }
    }

    fn best_split_for(&self, feature: usize, cfg: &HoeffdingTreeConfig) -> Option<SplitSuggestion> {
        let obs = &self.observers[feature];
        let lo = obs.min.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = obs.max.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
            return None;
        }
        let total = self.weight();
        let parent = entropy(&self.class_counts);
        let mut best: Option<SplitSuggestion> = None;
        let step = (hi - lo) / (cfg.candidate_points + 1) as f64;
        for i in 1..=cfg.candidate_points {
            let threshold = lo + step * i as f64;
            let left: Vec<f64> = (0..self.class_counts.len())
                .map(|c| obs.weight_below(c, threshold).min(self.class_counts[c]))
                .collect();
            let right: Vec<f64> = self
                .class_counts
                .iter()
                .zip(&left)
                .map(|(t, l)| (t - l).max(0.0))
                .collect();
            let (wl, wr) = (left.iter().sum::<f64>(), right.iter().sum::<f64>());
            if wl < cfg.min_branch_fraction * total || wr < cfg.min_branch_fraction * total {
                continue;
            }
            let merit = parent - (wl * entropy(&left) + wr * entropy(&right)) / total;
            if best.as_ref().is_none_or(|b| merit > b.merit) {
                best = Some(SplitSuggestion {
                    feature,
                    threshold,
                    merit,
                    left,
                    right,
                });
            }
        }
        best
    }
}

#[derive(Debug, Clone)]
struct SplitSuggestion {
    feature: usize,
    threshold: f64,
    merit: f64,
    left: Vec<f64>,
    right: Vec<f64>,
}

/// Shannon entropy in bits of an unnormalised distribution.
pub fn entropy(counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    -counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            p * p.log2()
        })
        .sum::<f64>()
}

pub fn hoeffding_bound(range: f64, confidence: f64, n: f64) -> f64 {
    (range * range * (1.0 / confidence).ln() / (2.0 * n)).sqrt()
}

#[derive(Debug, Clone)]
enum Node {
    Leaf(Leaf),
    Split {
        feature: usize,
        threshold: f64,
        /// `[x <= threshold, x > threshold]`
        children: Box<[Node; 2]>,
    },
}

#[derive(Debug, Clone)]
pub struct HoeffdingTree {
    dim: usize,
    classes: usize,
    config: HoeffdingTreeConfig,
    root: Node,
}

impl HoeffdingTree {
    pub fn new(dim: usize, classes: usize) -> Self {
        Self::with_config(dim, classes, HoeffdingTreeConfig::default())
    }

    pub fn with_config(dim: usize, classes: usize, config: HoeffdingTreeConfig) -> Self {
        Self {
            dim,
            classes,
            root: Node::Leaf(Leaf::new(dim, classes, vec![0.0; classes])),
            config,
        }
    }

    pub fn config(&self) -> &HoeffdingTreeConfig {
        &self.config
    }

    /// Feature and threshold of the root split, if the root has split.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match &self.root {
            Node::Split {
                feature, threshold, ..
            } => Some((*feature, *threshold)),
            Node::Leaf(_) => None,
        }
    }

    pub fn num_leaves(&self) -> usize {
        fn count(n: &Node) -> usize {
            match n {
                Node::Leaf(_) => 1,
                Node::Split { children, .. } => count(&children[0]) + count(&children[1]),
            }
        }
        count(&self.root)
    }

    pub fn depth(&self) -> usize {
        fn depth(n: &Node) -> usize {
            match n {
                Node::Leaf(_) => 0,
                Node::Split { children, .. } => 1 + depth(&children[0]).max(depth(&children[1])),
            }
        }
        depth(&self.root)
    }

    /// Leaf that `x` is routed to.
    pub fn leaf_for(&self, x: &[f64]) -> &Leaf {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf(l) => return l,
                Node::Split {
                    feature,
                    threshold,
                    children,
                } => node = &children[usize::from(x[*feature] > *threshold)],
            }
        }
    }

    fn leaf_for_mut(&mut self, x: &[f64]) -> &mut Leaf {
        let mut node = &mut self.root;
        loop {
            match node {
                Node::Leaf(l) => return l,
                Node::Split {
                    feature,
                    threshold,
                    children,
                } => node = &mut children[usize::from(x[*feature] > *threshold)],
            }
        }
    }

    fn node_for_mut(&mut self, x: &[f64]) -> &mut Node {
        let mut node = &mut self.root;
        while let Node::Split {
            feature,
            threshold,
            children,
        } = node
        {
            node = &mut children[usize::from(x[*feature] > *threshold)];
        }
        node
    }

    fn attempt_split(&mut self, x: &[f64]) {
        let cfg = self.config.clone();
        let dim = self.dim;
        let classes = self.classes;
        let node = self.node_for_mut(x);
        let Node::Leaf(leaf) = node else { return };
        leaf.weight_at_last_eval = leaf.weight();
        if leaf.class_counts.iter().filter(|&&c| c > 0.0).count() < 2 {
            return;
        }
        let mut suggestions: Vec<SplitSuggestion> = (0..dim)
            .filter_map(|f| leaf.best_split_for(f, &cfg))
            .collect();
        if suggestions.is_empty() {
            return;
        }
        suggestions.sort_by(|a, b| b.merit.total_cmp(&a.merit));
        let best = &suggestions[0];
        let second = suggestions.get(1).map_or(0.0, |s| s.merit.max(0.0));
        let range = (classes.max(2) as f64).log2();
        let eps = hoeffding_bound(range, cfg.split_confidence, leaf.weight());
        if best.merit > 0.0 && (best.merit - second > eps || eps < cfg.tie_threshold) {
            let best = suggestions.swap_remove(0);
            *node = Node::Split {
                feature: best.feature,
                threshold: best.threshold,
                children: Box::new([
                    Node::Leaf(Leaf::new(dim, classes, best.left)),
                    Node::Leaf(Leaf::new(dim, classes, best.right)),
                ]),
            };
        }
    }
}

impl Classifier for HoeffdingTree {
    fn num_classes(&self) -> usize {
        self.classes
    }

    fn update(&mut self, inst: &LabeledInstance) -> Result<()> {
        let x = inst.features();
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: x.len(),
            });
        }
        if inst.label.0 >= self.classes {
            return Err(Error::LabelOutOfRange {
                label: inst.label.0,
                classes: self.classes,
            });
        }
        let cfg = self.config.clone();
        let leaf = self.leaf_for_mut(x);
        leaf.learn(x, inst.label.0, &cfg);
        if leaf.weight() - leaf.weight_at_last_eval >= cfg.grace_period {
            self.attempt_split(x);
        }
        Ok(())
    }

    fn predict(&self, x: &Instance) -> PredictionDistribution {
        if x.dim() != self.dim {
            return PredictionDistribution::uniform(self.classes);
        }
        self.leaf_for(&x.features)
            .predict(&x.features, &self.config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn threshold_stream(n: u64, seed: u64) -> Vec<LabeledInstance> {
        let mut rng = SeededRng::new(seed);
        (0..n)
            .map(|t| {
                let x = vec![rng.uniform(), rng.uniform()];
                let y = usize::from(x[0] > 0.5);
                LabeledInstance::new(x, t, y)
            })
            .collect()
    }

    /// Best empirical information-gain threshold on a feature, by exhaustive scan.
    fn empirical_best_threshold(data: &[LabeledInstance], feature: usize) -> (f64, f64) {
        let mut pts: Vec<(f64, usize)> = data
            .iter()
            .map(|d| (d.features()[feature], d.label.0))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut total = [0.0; 2];
        for p in &pts {
            total[p.1] += 1.0;
        }
        let parent = entropy(&total);
        let mut left = [0.0; 2];
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..pts.len() - 1 {
            left[pts[i].1] += 1.0;
            let right = [total[0] - left[0], total[1] - left[1]];
            let n = pts.len() as f64;
            let gain = parent
                - (i + 1) as f64 / n * entropy(&left)
                - (n - (i + 1) as f64) / n * entropy(&right);
            if gain > best.0 {
                best = (gain, 0.5 * (pts[i].0 + pts[i + 1].0));
            }
        }
        best
    }

    #[test]
    fn splits_on_the_informative_feature() {
        let data = threshold_stream(20_000, 4);
        let (gain0, thr0) = empirical_best_threshold(&data, 0);
        let (gain1, _) = empirical_best_threshold(&data, 1);
        assert!(gain0 > gain1);
        assert!((thr0 - 0.5).abs() < 0.01);

        let mut tree = HoeffdingTree::new(2, 2);
        for inst in &data {
            tree.update(inst).unwrap();
        }
        let (feature, threshold) = tree.root_split().expect("tree should split");
        assert_eq!(feature, 0);
        assert!((0.45..=0.55).contains(&threshold), "threshold {threshold}");
    }

    #[test]
    fn grace_period_keeps_single_leaf() {
        let mut tree = HoeffdingTree::new(2, 2);
        for inst in threshold_stream(199, 1) {
            tree.update(&inst).unwrap();
        }
        assert_eq!(tree.num_leaves(), 1);
        assert!(tree.root_split().is_none());
    }

    #[test]
    fn pure_stream_never_splits() {
        let mut rng = SeededRng::new(2);
        let mut tree = HoeffdingTree::new(3, 3);
        for t in 0..10_000 {
            let x = vec![rng.uniform(), rng.uniform(), rng.uniform()];
            tree.update(&LabeledInstance::new(x, t, 2)).unwrap();
        }
        assert_eq!(tree.num_leaves(), 1);
    }

    #[test]
    fn fresh_leaves_count_only_their_own_instances() {
        let data = threshold_stream(5000, 8);
        let mut tree = HoeffdingTree::new(2, 2);
        let mut it = data.iter();
        for inst in it.by_ref() {
            tree.update(inst).unwrap();
            if tree.root_split().is_some() {
                break;
            }
        }
        assert_eq!(tree.num_leaves(), 2);
        for inst in it.by_ref().take(300) {
            tree.update(inst).unwrap();
        }
        assert_eq!(tree.num_leaves(), 2);
        let w = tree.leaf_for(&[0.0, 0.5]).weight() + tree.leaf_for(&[1.0, 0.5]).weight();
        assert_eq!(w, 300.0);
    }

    #[test]
    fn majority_prediction_matches_leaf_counts() {
        let cfg = HoeffdingTreeConfig {
            leaf_prediction: LeafPrediction::MajorityClass,
            ..Default::default()
        };
        let mut tree = HoeffdingTree::with_config(2, 2, cfg);
        let data = threshold_stream(3000, 12);
        for inst in &data {
            tree.update(inst).unwrap();
        }
        for inst in data.iter().take(200) {
            let leaf = tree.leaf_for(inst.features());
            let p = tree.predict(&inst.instance);
            let expected = PredictionDistribution::from_scores(leaf.class_counts().to_vec());
            if leaf.weight() > 0.0 {
                assert_eq!(p, expected);
            }
        }
    }

    #[test]
    fn hoeffding_bound_value() {
        let eps = hoeffding_bound(1.0, 1e-7, 200.0);
        assert!((eps - (16.118_095_650_958_32_f64 / 400.0).sqrt()).abs() < 1e-12);
    }
}
