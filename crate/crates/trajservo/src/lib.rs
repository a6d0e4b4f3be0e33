//! Closed-loop simulation and benchmarking of trajectory servoing for a
//! non-holonomic mobile robot with a forward-facing stereo camera.
//!
//! The crate compares feature-space trajectory tracking (steering computed
//! directly from image-feature errors) against pose-space tracking fed by
//! an emulated drifting localization stack, under identical sensing.

pub mod bench;
pub mod camera;
pub mod config;
pub mod control;
pub mod engine;
pub mod error;
pub mod feattraj;
pub mod reftraj;
pub mod scene;
pub mod metrics;
pub mod runlog;
pub mod se2;
pub mod stats;
pub mod slam;

pub use error::{Result, TsError};
