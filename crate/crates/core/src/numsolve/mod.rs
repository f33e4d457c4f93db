//! Root finding, small polynomial systems and path tracking.

mod roots;
mod solve2;
mod track;

pub use roots::{relative_residual, uni_roots, RootSet};
pub use solve2::{bi_relative_residual, newton2, solve2};
pub use track::{circle, match_roots, min_separation, track, track_samples, PathTrace, StepLog, TrackerConfig};
