//! Simulation kernels and statistical checks for the Bernoulli sieve and
//! perturbed random walks.
//!
//! The numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the precision for the common case.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod laws;
pub mod occupancy;
pub mod parallel;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod verify;
pub mod walks;

pub use error::{Result, SieveError};
pub use laws::{centering, scales, AnyLaw, GenericLaw, Marginal, MomentProfile, MomentRoute, Step, StepLaw, WLaw};
pub use occupancy::{Allocation, OccupancyTrace, TraceOptions};
pub use rng::{seed_derive, RandomStream};
pub use scalar::Scalar;
pub use walks::{Counter, WalkPath};

/// Double-precision stick-breaking law.
pub type Law = WLaw<f64>;
pub type Law32 = WLaw<f32>;
pub type Path = WalkPath<f64, WLaw<f64>>;
pub type Path32 = WalkPath<f32, WLaw<f32>>;
pub type Trace = OccupancyTrace<f64>;
pub type Trace32 = OccupancyTrace<f32>;
pub type Profile = MomentProfile<f64>;
pub type Series = verify::StandardizedSeries<f64>;
