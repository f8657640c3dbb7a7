//! Named benchmark streams.
//!
//! Drift widths are kept in instances when the length is overridden, so a shortened
//! SEA1 still has sharp width-100 drifts. Centers sit at `k·N/(drifts+1)`.

use super::concepts::{ConceptGenerator, StaggerRule, SEA_THRESHOLDS};
use super::{DriftTransition, DriftingStream};
use crate::error::{contract, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Rbf,
    Tree,
    Sea,
    Stagger,
    Hyperplane,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub family: Family,
    pub length: u64,
    pub dim: usize,
    pub classes: usize,
    /// Drift width in instances; zero for the hyperplane.
    pub width: u64,
    pub drifts: usize,
    pub noise: f64,
    /// Hyperplane rotation rate.
    pub rate: f64,
}

#[allow(clippy::too_many_arguments)]
const fn p(
    name: &'static str,
    family: Family,
    length: u64,
    dim: usize,
    classes: usize,
    width: u64,
    drifts: usize,
    noise: f64,
) -> Preset {
    Preset {
        name,
        family,
        length,
        dim,
        classes,
        width,
        drifts,
        noise,
        rate: 0.0,
    }
}

pub const PRESETS: [Preset; 14] = [
    p("RBF1", Family::Rbf, 1_000_000, 15, 5, 100, 3, 0.05),
    p("RBF2", Family::Rbf, 1_000_000, 15, 5, 10_000, 3, 0.05),
    p("RBF3", Family::Rbf, 1_200_000, 15, 5, 50_000, 2, 0.05),
    p("RBF4", Family::Rbf, 1_200_000, 15, 5, 100_000, 2, 0.05),
    p("TREE1", Family::Tree, 1_000_000, 15, 5, 100, 3, 0.0),
    p("TREE2", Family::Tree, 1_000_000, 15, 5, 10_000, 3, 0.0),
    p("TREE3", Family::Tree, 1_200_000, 15, 5, 50_000, 2, 0.0),
    p("TREE4", Family::Tree, 1_200_000, 15, 5, 100_000, 2, 0.0),
    p("SEA1", Family::Sea, 600_000, 3, 2, 100, 3, 0.05),
    p("SEA2", Family::Sea, 600_000, 3, 2, 10_000, 3, 0.05),
    p("STAG1", Family::Stagger, 600_000, 3, 2, 100, 3, 0.0),
    p("STAG2", Family::Stagger, 600_000, 3, 2, 10_000, 3, 0.0),
    Preset {
        rate: 0.001,
        ..p("HYPER1", Family::Hyperplane, 500_000, 15, 5, 0, 0, 0.05)
    },
    Preset {
        rate: 0.01,
        ..p("HYPER2", Family::Hyperplane, 500_000, 15, 5, 0, 0, 0.05)
    },
];

/// Case-insensitive lookup.
pub fn preset(name: &str) -> Option<Preset> {
    PRESETS
        .iter()
        .copied()
        .find(|p| p.name.eq_ignore_ascii_case(name))
}

impl Preset {
    fn concept(&self, index: usize, rng: SeededRng) -> Result<ConceptGenerator> {
        match self.family {
            Family::Sea => Ok(ConceptGenerator::sea(
                SEA_THRESHOLDS[index % SEA_THRESHOLDS.len()],
                rng,
            )),
            Family::Stagger => Ok(ConceptGenerator::stagger(StaggerRule::ALL[index % 3], rng)),
            Family::Rbf => ConceptGenerator::rbf(self.dim, self.classes, rng),
            Family::Tree => ConceptGenerator::random_tree(self.dim, self.classes, rng),
            Family::Hyperplane => {
                ConceptGenerator::hyperplane(self.dim, self.classes, self.rate, rng)
            }
        }
    }

    pub fn drift_centers(&self, length: u64) -> Vec<u64> {
        let k = self.drifts as u64 + 1;
        (1..k).map(|i| i * length / k).collect()
    }

    /// Builds the stream; `length` overrides the preset's instance count.
    pub fn build(&self, seed: u64, length: Option<u64>) -> Result<DriftingStream> {
        let length = length.unwrap_or(self.length);
        if length == 0 {
            return Err(contract(format!(
                "{}: stream length must be positive",
                self.name
            )));
        }
        let root = SeededRng::new(seed);
        let base = self.concept(0, root.derive("concept0"))?;
        let drifts = self
            .drift_centers(length)
            .into_iter()
            .enumerate()
            .map(|(j, t0)| {
                let tr = DriftTransition::with_width(t0, self.width)?;
                Ok((
                    tr,
                    self.concept(j + 1, root.derive(&format!("concept{}", j + 1)))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        DriftingStream::new(base, drifts, self.noise, length, root.derive("stream"))
    }
}
