//! Exact joint annotator and sub-channel allocation for wireless crowd
//! labelling.
//!
//! An access point multicasts compressed data objects to clusters of noisy
//! annotators whose majority vote must meet a target error probability. Lower
//! encoding rates save spectrum but need larger clusters; the solvers here pick
//! rates, clusters and sub-channel counts that label the most objects.
//!
//! * [`model`]: rate ladder, majority-vote error, cluster and sub-channel sizing.
//! * [`channel`]: Rayleigh draws and truncated channel inversion.
//! * [`fading`]: tree search over faded links and the closed-form regimes.
//! * [`tci`]: knapsack dynamic program and merged tree search for equalized links.
//! * [`oracle`]: brute-force references.
//!
//! Continuous quantities are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common case.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod fading;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod solution;
pub mod tci;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use solution::{Budget, EdgeCost, EdgeCosts, Solution, TableCosts};

pub type RateLadderF64 = model::RateLadder<f64>;
pub type RateLadderF32 = model::RateLadder<f32>;
pub type ScenarioF64 = model::Scenario<f64>;
pub type ScenarioF32 = model::Scenario<f32>;
pub type ChannelF64 = channel::ChannelRealization<f64>;
pub type ChannelF32 = channel::ChannelRealization<f32>;
pub type TciAllocationF64 = channel::TciAllocation<f64>;
pub type FadingProblemF64 = fading::FadingProblem<f64>;
pub type FadingProblemF32 = fading::FadingProblem<f32>;
