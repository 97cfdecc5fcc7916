//! Multi-layer normalized multi-dimensional dynamic time warping (mnmDTW).
//!
//! A recording of an exercise is a sequence of 33-landmark pose frames. To
//! score it against a gold-standard recording we
//!
//! 1. normalize both recordings ([`pose::normalize`]),
//! 2. warp the test onto the gold timeline with one DTW over all 66 x/y
//!    channels ([`pipeline::synchronize`]),
//! 3. run a second DTW per limb group and per axis ([`pipeline::score`]),
//! 4. divide each raw distance by the mean distance of a control cohort of
//!    correct executions ([`pipeline::compute_baseline`]).
//!
//! Scores of 1 or below read as "good"; larger values point at the limb and
//! axis where the execution deviates.
//!
//! The [`synth`] module generates stick-figure squats so the whole pipeline
//! can be exercised without video input.

pub mod dtw;
pub mod error;
pub mod io;
pub mod limbs;
pub mod pipeline;
pub mod pose;
pub mod series;
pub mod synth;

pub use dtw::{brute_force_dtw, dtw, ground_distance, project_onto_reference, AlignmentPath, DtwResult};
pub use error::{Error, Result};
pub use limbs::{LimbGroup, LimbGroupMap};
pub use pipeline::{
    compute_baseline, evaluate, score, synchronize, BaselineTable, LimbAxis, PipelineConfig, RawScores, ScoreReport,
};
pub use pose::{
    flatten, normalize, select_group, z_normalize, Axis, AxisSelection, Landmark, LandmarkFrame, Normalization,
    PoseSequence, LANDMARK_COUNT,
};
pub use series::MultiSeries;
pub use synth::{generate_cohort, generate_squat, SquatParams};
