//! Finite metric spaces in truncation towers, metric validation, ball
//! geometry and the empirical coarse-equivalence engine.

mod coarse;
mod geometry;
mod tower;
mod validate;

pub use coarse::{
    coarse_compare, compare_levels, default_grid, distortion_profile, tower_samples, CoarseConfig, CoarseVerdict,
    ControlFunction, Diagnostics, Direction, DistortionTable, LevelSamples, Sample, VerdictTag, WitnessSequence,
    WitnessStep,
};
pub use geometry::{ball, bounded_geometry_profile, GeometryProfile};
pub use tower::{Generator, GeneratorKind, MetricTower, Point, MAX_EXPONENT};
pub use validate::{validate_metric, Axiom, MetricReport, ValidationReport, Violation, MAX_REPORTED};
