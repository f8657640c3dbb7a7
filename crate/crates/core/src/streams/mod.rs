//! Synthetic drifting streams and stream files.
//!
//! A [`DriftingStream`] strings concepts together with sigmoid transitions. At time `t`
//! the stream walks the drift list in order and moves on to drift `j`'s successor with
//! probability `f_j(t)`, stopping at the first failed draw; the chosen concept samples the
//! instance, and label noise is applied last.

pub mod concepts;
pub mod presets;
pub mod reader;

pub use concepts::{ConceptGenerator, ConceptKind, StaggerRule};
pub use presets::{preset, Family, Preset, PRESETS};
pub use reader::{scan_shape, DelimitedOptions, FileFormat, StreamFileReader};

use crate::error::{contract, Error, Result};
use crate::rng::SeededRng;
use crate::types::LabeledInstance;

/// `f(t) = 1 / (1 + e^{−s(t − t_0)})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftTransition {
    pub s: f64,
    pub t0: u64,
}

impl DriftTransition {
    pub fn new(s: f64, t0: u64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(contract(format!(
                "transition steepness must be positive, got {s}"
            )));
        }
        Ok(Self { s, t0 })
    }

    /// `s = 4 / width`, so `f` climbs from about 0.018 to 0.982 over `t_0 ± width`.
    pub fn with_width(t0: u64, width: u64) -> Result<Self> {
        if width == 0 {
            return Err(contract("drift width must be positive"));
        }
        Self::new(4.0 / width as f64, t0)
    }

    pub fn width(&self) -> f64 {
        4.0 / self.s
    }

    pub fn probability(&self, t: f64) -> f64 {
        sigmoid_probability(self.s, self.t0 as f64, t)
    }
}

/// Numerically stable logistic transition.
pub fn sigmoid_probability(s: f64, t0: f64, t: f64) -> f64 {
    let z = s * (t - t0);
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone)]
pub struct DriftingStream {
    concepts: Vec<ConceptGenerator>,
    transitions: Vec<DriftTransition>,
    noise_rate: f64,
    length: u64,
    t: u64,
    rng: SeededRng,
    last_concept: usize,
}

impl DriftingStream {
    /// `successors[j]` takes over through `transitions[j]`; centers must strictly increase.
    pub fn new(
        base: ConceptGenerator,
        drifts: Vec<(DriftTransition, ConceptGenerator)>,
        noise_rate: f64,
        length: u64,
        rng: SeededRng,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&noise_rate) {
            return Err(contract(format!(
                "noise rate must lie in [0, 1), got {noise_rate}"
            )));
        }
        if drifts.windows(2).any(|w| w[0].0.t0 >= w[1].0.t0) {
            return Err(contract("drift centers must strictly increase"));
        }
        let (dim, classes) = (base.dim(), base.classes());
        if drifts
            .iter()
            .any(|(_, g)| g.dim() != dim || g.classes() != classes)
        {
            return Err(contract(
                "all concepts of a stream must share dimension and class count",
            ));
        }
        let (transitions, successors): (Vec<_>, Vec<_>) = drifts.into_iter().unzip();
        let mut concepts = vec![base];
        concepts.extend(successors);
        Ok(Self {
            concepts,
            transitions,
            noise_rate,
            length,
            t: 0,
            rng,
            last_concept: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.concepts[0].dim()
    }

    pub fn classes(&self) -> usize {
        self.concepts[0].classes()
    }

    pub fn len(&self) -> u64 {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    pub fn position(&self) -> u64 {
        self.t
    }

    pub fn noise_rate(&self) -> f64 {
        self.noise_rate
    }

    pub fn transitions(&self) -> &[DriftTransition] {
        &self.transitions
    }

    pub fn concepts(&self) -> &[ConceptGenerator] {
        &self.concepts
    }

    /// Index of the concept that produced the most recent instance.
    pub fn last_concept(&self) -> usize {
        self.last_concept
    }

    /// `t_0 ± width` for every drift, clipped to the stream.
    pub fn drift_intervals(&self) -> Vec<(u64, u64)> {
        self.transitions
            .iter()
            .map(|tr| {
                let w = tr.width().round() as u64;
                (tr.t0.saturating_sub(w), (tr.t0 + w).min(self.length))
            })
            .collect()
    }

    pub fn next_instance(&mut self) -> Result<LabeledInstance> {
        if self.t >= self.length {
            return Err(Error::StreamExhausted {
                requested: self.t,
                length: self.length,
            });
        }
        let t = self.t;
        let mut active = 0;
        for (j, tr) in self.transitions.iter().enumerate() {
            if self.rng.bernoulli(tr.probability(t as f64)) {
                active = j + 1;
            } else {
                break;
            }
        }
        let (x, mut y) = self.concepts[active].sample();
        let classes = self.classes();
        if self.noise_rate > 0.0 && self.rng.bernoulli(self.noise_rate) {
            let shift = 1 + self.rng.below(classes - 1);
            y = (y + shift) % classes;
        }
        self.last_concept = active;
        self.t += 1;
        Ok(LabeledInstance::new(x, t, y))
    }
}

impl Iterator for DriftingStream {
    type Item = Result<LabeledInstance>;

    fn next(&mut self) -> Option<Self::Item> {
        (self.t < self.length).then(|| self.next_instance())
    }
}
