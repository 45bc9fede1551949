//! Biomechanics-grounded scoring of fitted human motion.
//!
//! A [`MotionBundle`](motion::MotionBundle) carries everything fitted from one video: joint
//! angles, keypoints, body meshes and limb-detector confidences. The [`Engine`](engine::Engine)
//! turns it into six metric scores in `[0, 100]`:
//!
//! | metric | dimension | signal |
//! |---|---|---|
//! | I | anatomy | extra-limb detector confidence |
//! | II | anatomy | bone-length drift |
//! | III | kinematic | joint range-of-motion violation |
//! | IV | kinematic | mesh self-collision |
//! | V | kinetic | joint and segment velocity extremes |
//! | VI | kinetic | acceleration and jerk |
//!
//! Per-frame signals are aggregated by frequency, severity and persistence; dimensions are
//! the mean of their two metrics and the overall score the mean of the dimensions.
//!
//! Every numeric routine is generic over [`Real`](scalar::Real) (`f32` or `f64`). The aliases
//! below fix the scalar to `f64`; the `*32` variants use `f32`.

// Negated comparisons are deliberate: NaN has to fail every range check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregation;
pub mod analysis;
pub mod anatomy;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod kinematic;
pub mod kinetic;
pub mod linalg;
pub mod motion;
pub mod scalar;
pub mod synthetic;

pub use error::{Error, Result};

pub type Skeleton = motion::SkeletonDefinition<f64>;
pub type Limits = motion::LimitTable<f64>;
pub type Bundle = motion::MotionBundle<f64>;
pub type Mesh = motion::MeshFrame<f64>;
pub type Signals = aggregation::FrameSignals<f64>;
pub type Score = aggregation::MetricScore<f64>;
pub type Config = engine::ScoringConfig<f64>;
pub type Scorer = engine::Engine<f64>;
pub type Record = engine::VideoScore<f64>;
pub type Synth = synthetic::Synthesizer<f64>;
pub type Entry = analysis::LeaderboardEntry<f64>;

pub type Skeleton32 = motion::SkeletonDefinition<f32>;
pub type Limits32 = motion::LimitTable<f32>;
pub type Bundle32 = motion::MotionBundle<f32>;
pub type Mesh32 = motion::MeshFrame<f32>;
pub type Config32 = engine::ScoringConfig<f32>;
pub type Scorer32 = engine::Engine<f32>;
pub type Record32 = engine::VideoScore<f32>;
