//! Concept families for synthetic streams.

use crate::error::{contract, Result};
use crate::rng::SeededRng;
use crate::stats::normal_quantile;

/// Thresholds cycled through by successive SEA concepts.
pub const SEA_THRESHOLDS: [f64; 4] = [8.0, 9.0, 7.0, 9.5];
pub const RBF_CENTROIDS: usize = 50;
pub const RBF_SPREAD: f64 = 0.1;
pub const TREE_DEPTH: usize = 5;
/// Per-instance probability that a hyperplane weight reverses its drift direction.
pub const HYPERPLANE_FLIP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaggerRule {
    /// size = small and color = red
    SmallRed,
    /// color = green or shape = circular
    GreenOrCircular,
    /// size = medium or size = large
    MediumOrLarge,
}

impl StaggerRule {
    pub const ALL: [StaggerRule; 3] = [
        StaggerRule::SmallRed,
        StaggerRule::GreenOrCircular,
        StaggerRule::MediumOrLarge,
    ];

    /// Attributes are coded size {small, medium, large}, color {red, green, blue},
    /// shape {square, circular, triangular} as 0, 1, 2.
    pub fn label(self, x: &[f64]) -> usize {
        let (size, color, shape) = (x[0] as u8, x[1] as u8, x[2] as u8);
        let hit = match self {
            StaggerRule::SmallRed => size == 0 && color == 0,
            StaggerRule::GreenOrCircular => color == 1 || shape == 1,
            StaggerRule::MediumOrLarge => size >= 1,
        };
        usize::from(hit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    pub center: Vec<f64>,
    pub class: usize,
    pub weight: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf(usize),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn label(&self, x: &[f64]) -> usize {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf(c) => return *c,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    fn random(
        rng: &mut SeededRng,
        depth: usize,
        dim: usize,
        classes: usize,
        lo: &mut [f64],
        hi: &mut [f64],
    ) -> Self {
        if depth == 0 {
            return TreeNode::Leaf(rng.below(classes));
        }
        let feature = rng.below(dim);
        let (a, b) = (lo[feature], hi[feature]);
        let threshold = rng.uniform_range(a, b);
        hi[feature] = threshold;
        let left = Box::new(Self::random(rng, depth - 1, dim, classes, lo, hi));
        hi[feature] = b;
        lo[feature] = threshold;
        let right = Box::new(Self::random(rng, depth - 1, dim, classes, lo, hi));
        lo[feature] = a;
        TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub weights: Vec<f64>,
    /// +1 or −1 per coordinate.
    pub directions: Vec<f64>,
    pub rate: f64,
    /// Standard-normal quantiles splitting the normalized score into classes.
    cut_points: Vec<f64>,
}

impl Hyperplane {
    fn new(rng: &mut SeededRng, dim: usize, classes: usize, rate: f64) -> Self {
        let cut_points = (1..classes)
            .map(|k| normal_quantile(k as f64 / classes as f64))
            .collect();
        Self {
            weights: (0..dim).map(|_| rng.uniform()).collect(),
            directions: (0..dim)
                .map(|_| if rng.bernoulli(0.5) { 1.0 } else { -1.0 })
                .collect(),
            rate,
            cut_points,
        }
    }

    /// `w·x − w_0` with `w_0 = Σw/2`.
    pub fn score(&self, x: &[f64]) -> f64 {
        let dot: f64 = self.weights.iter().zip(x).map(|(w, v)| w * v).sum();
        dot - self.weights.iter().sum::<f64>() / 2.0
    }

    /// Two classes use the sign of the score. More classes bin the score, scaled by its
    /// standard deviation under uniform inputs, at equiprobable normal quantiles.
    pub fn label(&self, x: &[f64]) -> usize {
        let score = self.score(x);
        if self.cut_points.len() == 1 {
            return usize::from(score >= 0.0);
        }
        let sd = (self.weights.iter().map(|w| w * w).sum::<f64>() / 12.0).sqrt();
        let z = if sd > 0.0 { score / sd } else { 0.0 };
        self.cut_points.iter().filter(|&&q| z >= q).count()
    }

    pub fn advance(&mut self, rng: &mut SeededRng) {
        for (w, d) in self.weights.iter_mut().zip(self.directions.iter_mut()) {
            *w += *d * self.rate;
            if rng.bernoulli(HYPERPLANE_FLIP) {
                *d = -*d;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConceptKind {
    Sea { threshold: f64 },
    Stagger { rule: StaggerRule },
    Rbf { centroids: Vec<Centroid> },
    RandomTree { root: TreeNode },
    Hyperplane(Hyperplane),
}

/// A single stationary concept (or, for the hyperplane, a continuously rotating one)
/// with its own random sub-stream.
#[derive(Debug, Clone)]
pub struct ConceptGenerator {
    kind: ConceptKind,
    dim: usize,
    classes: usize,
    rng: SeededRng,
    last_source: Option<usize>,
}

impl ConceptGenerator {
    pub fn sea(threshold: f64, rng: SeededRng) -> Self {
        Self::from_kind(ConceptKind::Sea { threshold }, 3, 2, rng)
    }

    pub fn stagger(rule: StaggerRule, rng: SeededRng) -> Self {
        Self::from_kind(ConceptKind::Stagger { rule }, 3, 2, rng)
    }

    pub fn rbf(dim: usize, classes: usize, mut rng: SeededRng) -> Result<Self> {
        check_shape(dim, classes)?;
        let centroids = (0..RBF_CENTROIDS)
            .map(|_| Centroid {
                center: (0..dim).map(|_| rng.uniform()).collect(),
                class: rng.below(classes),
                weight: rng.uniform(),
                spread: RBF_SPREAD,
            })
            .collect();
        Ok(Self::from_kind(
            ConceptKind::Rbf { centroids },
            dim,
            classes,
            rng,
        ))
    }

    pub fn random_tree(dim: usize, classes: usize, mut rng: SeededRng) -> Result<Self> {
        check_shape(dim, classes)?;
        let mut lo = vec![0.0; dim];
        let mut hi = vec![1.0; dim];
        let root = TreeNode::random(&mut rng, TREE_DEPTH, dim, classes, &mut lo, &mut hi);
        Ok(Self::from_kind(
            ConceptKind::RandomTree { root },
            dim,
            classes,
            rng,
        ))
    }

    pub fn hyperplane(dim: usize, classes: usize, rate: f64, mut rng: SeededRng) -> Result<Self> {
        check_shape(dim, classes)?;
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(contract(
                "hyperplane rotation rate must be finite and non-negative",
            ));
        }
        let plane = Hyperplane::new(&mut rng, dim, classes, rate);
        Ok(Self::from_kind(
            ConceptKind::Hyperplane(plane),
            dim,
            classes,
            rng,
        ))
    }

    fn from_kind(kind: ConceptKind, dim: usize, classes: usize, rng: SeededRng) -> Self {
        Self {
            kind,
            dim,
            classes,
            rng,
            last_source: None,
        }
    }

    pub fn kind(&self) -> &ConceptKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    /// Centroid index behind the most recent RBF sample.
    pub fn last_source(&self) -> Option<usize> {
        self.last_source
    }

    /// The concept's labeling rule, where one exists independently of sampling.
    pub fn rule_label(&self, x: &[f64]) -> Option<usize> {
        match &self.kind {
            ConceptKind::Sea { threshold } => Some(usize::from(x[0] + x[1] <= *threshold)),
            ConceptKind::Stagger { rule } => Some(rule.label(x)),
            ConceptKind::RandomTree { root } => Some(root.label(x)),
            ConceptKind::Hyperplane(h) => Some(h.label(x)),
            ConceptKind::Rbf { .. } => None,
        }
    }

    /// Draws features and their noise-free label. The hyperplane rotates after each draw.
    pub fn sample(&mut self) -> (Vec<f64>, usize) {
        let rng = &mut self.rng;
        match &mut self.kind {
            ConceptKind::Sea { threshold } => {
                let x: Vec<f64> = (0..3).map(|_| rng.uniform_range(0.0, 10.0)).collect();
                let y = usize::from(x[0] + x[1] <= *threshold);
                (x, y)
            }
            ConceptKind::Stagger { rule } => {
                let x: Vec<f64> = (0..3).map(|_| rng.below(3) as f64).collect();
                let y = rule.label(&x);
                (x, y)
            }
            ConceptKind::Rbf { centroids } => {
                let total: f64 = centroids.iter().map(|c| c.weight).sum();
                let mut pick = rng.uniform() * total;
                let mut idx = centroids.len() - 1;
                for (i, c) in centroids.iter().enumerate() {
                    if pick < c.weight {
                        idx = i;
                        break;
                    }
                    pick -= c.weight;
                }
                let c = &centroids[idx];
                let mut dir: Vec<f64> = (0..self.dim).map(|_| rng.standard_normal()).collect();
                let norm = dir
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
                    .max(f64::MIN_POSITIVE);
                let magnitude = rng.standard_normal() * c.spread;
                for (d, center) in dir.iter_mut().zip(&c.center) {
                    *d = center + *d / norm * magnitude;
                }
                self.last_source = Some(idx);
                (dir, c.class)
            }
            ConceptKind::RandomTree { root } => {
                let x: Vec<f64> = (0..self.dim).map(|_| rng.uniform()).collect();
                let y = root.label(&x);
                (x, y)
            }
            ConceptKind::Hyperplane(h) => {
                let x: Vec<f64> = (0..self.dim).map(|_| rng.uniform()).collect();
                let y = h.label(&x);
                h.advance(rng);
                (x, y)
            }
        }
    }
}

fn check_shape(dim: usize, classes: usize) -> Result<()> {
    if dim == 0 || classes < 2 {
        return Err(contract(format!(
            "generator needs at least one feature and two classes (got {dim} and {classes})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sea_rule_agreement() {
        let mut g = ConceptGenerator::sea(8.0, SeededRng::new(1));
        for _ in 0..10_000 {
            let (x, y) = g.sample();
            assert!(x.iter().all(|v| (0.0..10.0).contains(v)));
            assert_eq!(y, usize::from(x[0] + x[1] <= 8.0));
        }
    }

    #[test]
    fn stagger_rules() {
        assert_eq!(StaggerRule::SmallRed.label(&[0.0, 0.0, 2.0]), 1);
        assert_eq!(StaggerRule::SmallRed.label(&[1.0, 0.0, 2.0]), 0);
        assert_eq!(StaggerRule::GreenOrCircular.label(&[2.0, 2.0, 1.0]), 1);
        assert_eq!(StaggerRule::GreenOrCircular.label(&[2.0, 2.0, 0.0]), 0);
        assert_eq!(StaggerRule::MediumOrLarge.label(&[2.0, 0.0, 0.0]), 1);
        assert_eq!(StaggerRule::MediumOrLarge.label(&[0.0, 1.0, 1.0]), 0);
    }

    #[test]
    fn rbf_labels_follow_source_centroid() {
        let mut g = ConceptGenerator::rbf(5, 4, SeededRng::new(2)).unwrap();
        let ConceptKind::Rbf { centroids } = g.kind().clone() else {
            unreachable!()
        };
        for _ in 0..5000 {
            let (x, y) = g.sample();
            let c = &centroids[g.last_source().unwrap()];
            assert_eq!(y, c.class);
            let dist: f64 = x
                .iter()
                .zip(&c.center)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(dist < 8.0 * RBF_SPREAD);
        }
    }

    #[test]
    fn tree_has_full_depth_and_consistent_labels() {
        let mut g = ConceptGenerator::random_tree(6, 3, SeededRng::new(3)).unwrap();
        fn depth(n: &TreeNode) -> usize {
            match n {
                TreeNode::Leaf(_) => 0,
                TreeNode::Split { left, right, .. } => 1 + depth(left).max(depth(right)),
            }
        }
        let ConceptKind::RandomTree { root } = g.kind().clone() else {
            unreachable!()
        };
        assert_eq!(depth(&root), TREE_DEPTH);
        for _ in 0..2000 {
            let (x, y) = g.sample();
            assert_eq!(root.label(&x), y);
        }
    }

    #[test]
    fn hyperplane_still_when_rate_is_zero() {
        let mut g = ConceptGenerator::hyperplane(4, 2, 0.0, SeededRng::new(4)).unwrap();
        let ConceptKind::Hyperplane(before) = g.kind().clone() else {
            unreachable!()
        };
        for _ in 0..1000 {
            g.sample();
        }
        let ConceptKind::Hyperplane(after) = g.kind() else {
            unreachable!()
        };
        assert_eq!(before.weights, after.weights);
    }

    #[test]
    fn hyperplane_displacement_is_bounded() {
        let rate = 0.01;
        let mut g = ConceptGenerator::hyperplane(5, 2, rate, SeededRng::new(5)).unwrap();
        let ConceptKind::Hyperplane(before) = g.kind().clone() else {
            unreachable!()
        };
        for _ in 0..10_000 {
            g.sample();
        }
        let ConceptKind::Hyperplane(after) = g.kind() else {
            unreachable!()
        };
        for (a, b) in before.weights.iter().zip(&after.weights) {
            let moved = (a - b).abs();
            assert!(moved <= 10_000.0 * rate + 1e-9);
            assert!(moved > 0.0);
        }
    }

    #[test]
    fn hyperplane_angle_is_monotone_between_flips() {
        let mut g = ConceptGenerator::hyperplane(2, 2, 0.001, SeededRng::new(6)).unwrap();
        let state = |g: &ConceptGenerator| match g.kind() {
            ConceptKind::Hyperplane(h) => (h.weights.clone(), h.directions.clone()),
            _ => unreachable!(),
        };
        let (mut w, mut d) = state(&g);
        let mut sign = 0.0;
        for _ in 0..20_000 {
            g.sample();
            let (w2, d2) = state(&g);
            let step = (w2[1].atan2(w2[0]) - w[1].atan2(w[0]) + std::f64::consts::PI)
                .rem_euclid(2.0 * std::f64::consts::PI)
                - std::f64::consts::PI;
            if step != 0.0 {
                if sign != 0.0 {
                    assert_eq!(
                        step.signum(),
                        sign,
                        "angle reversed without a direction flip"
                    );
                }
                sign = step.signum();
            }
            if d2 != d {
                sign = 0.0;
            }
            w = w2;
            d = d2;
        }
    }

    #[test]
    fn multiclass_hyperplane_uses_every_class() {
        let mut g = ConceptGenerator::hyperplane(15, 5, 0.0, SeededRng::new(7)).unwrap();
        let mut counts = [0usize; 5];
        for _ in 0..20_000 {
            let (x, y) = g.sample();
            assert_eq!(g.rule_label(&x), Some(y));
            counts[y] += 1;
        }
        for c in counts {
            assert!(c > 2000, "{counts:?}");
        }
    }
}
