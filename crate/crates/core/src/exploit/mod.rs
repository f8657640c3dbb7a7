//! Instance exploitation: a window of labeled instances replayed to the learner.

pub mod control;
pub mod sampling;
pub mod window;
pub mod wrapper;

pub use control::{effective_intensity, effective_window_cap, IntensityController, WindowPolicy};
pub use sampling::{
    draw_truncated_exponential, sample_index, select_indices, StrategyKind, DEFAULT_GAMMA,
};
pub use window::{window_push, LabeledWindow};
pub use wrapper::{ExploitConfig, Exploiter, ExploitingWrapper};
