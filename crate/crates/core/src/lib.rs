//! Online active learning on a labeling budget, with instance exploitation.
//!
//! A stream learner queries only a fraction of labels; every queried instance is kept
//! in a sliding window and replayed to the learner several times, selected by one of
//! three index-sampling strategies. A paired-learner ensemble guards against the
//! overfitting that aggressive replay can cause.

pub mod active;
pub mod adwin;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod exploit;
pub mod harness;
pub mod learners;
pub mod rng;
pub mod stats;
pub mod streams;
pub mod types;

pub use error::{Error, Result};
pub use rng::SeededRng;
pub use types::{
    argmax_label, ClassLabel, Classifier, Instance, LabeledInstance, PredictionDistribution,
};
