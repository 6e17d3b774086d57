//! Multi-objective Bayesian optimization by Pareto-frontier truncation.
//!
//! The numerical core (GP, sampler, geometry, acquisition, optimizers) is
//! generic over the scalar type; the aliases below fix it to `f64`.

pub mod acquisition;
pub mod benchmarks;
pub mod direct;
pub mod error;
pub mod geometry;
pub mod gp;
pub mod harness;
pub mod linalg;
pub mod moo;
pub mod sampler;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type GpPosterior64 = gp::GpPosterior<f64>;
pub type MultiGp64 = gp::MultiGp<f64>;
pub type Domain64 = gp::Domain<f64>;
pub type Dataset64 = gp::Dataset<f64>;
pub type SampledPath64 = sampler::SampledPath<f64>;
pub type ParetoSet64 = moo::ParetoSet<f64>;
pub type CellDecomposition64 = geometry::CellDecomposition<f64>;
