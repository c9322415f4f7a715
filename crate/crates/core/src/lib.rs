//! Placement of directional plate landmarks for camera-based pose observers.
//!
//! The crate evaluates how often a camera moving through a room sees at least
//! `n` landmarks (the multiple coverage probability), optimizes landmark
//! positions and orientations with an elimination genetic algorithm, and
//! simulates an SE(3) pose observer whose measurements pass through the
//! camera visibility model.

pub mod coverage;
pub mod deployment;
pub mod ega;
pub mod error;
pub mod geometry;
pub mod observer;
pub mod pdf_estimation;

pub use error::{Error, Result};
