//! Event-driven simulator of the Sinai billiard and its unfolded periodic
//! Lorentz gas, with the collision-statistics machinery to estimate
//! collision-number distributions, central moments, and the diffusion
//! exponent z(R), validated against closed-form reference statistics.
//!
//! The numeric core is generic over the scalar type (see [`scalar::Scalar`]);
//! the aliases below pin `f64`, which is what the CLI and the acceptance
//! suite use.

pub mod engine;
pub mod ensemble;
pub mod error;
pub mod geometry;
pub mod oracles;
pub mod quadrature;
pub mod reference;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Cell geometry at `f64` precision.
pub type BilliardConfig = geometry::BilliardConfig<f64>;
/// Particle state at `f64` precision.
pub type ParticleState = engine::ParticleState<f64>;
/// Event log at `f64` precision.
pub type CollisionRecord = engine::CollisionRecord<f64>;
/// Event-loop tolerances at `f64` precision.
pub type FlightRules = engine::FlightRules<f64>;
/// Ensemble description at `f64` precision.
pub type EnsembleSpec = ensemble::EnsembleSpec<f64>;
/// Mergeable moment accumulator at `f64` precision.
pub type EnsembleMoments = ensemble::EnsembleMoments<f64>;
/// Ensemble result at `f64` precision.
pub type EnsembleRun = ensemble::EnsembleRun<f64>;
/// Count-distribution estimate at `f64` precision.
pub type DistributionEstimate = stats::DistributionEstimate<f64>;
/// Diffusion-exponent fit at `f64` precision.
pub type DiffusionFit = stats::DiffusionFit<f64>;
