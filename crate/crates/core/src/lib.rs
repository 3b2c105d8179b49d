//! Multiobjectivized gradient-based local search.
//!
//! A single-objective problem `f1` is paired with a sphere helper `f2`
//! centered at `s`. Single-objective local optima of `f1` then become parts of
//! locally efficient sets of `(f1, f2)`, and following the multi-objective
//! gradient plus the helper's descent direction lets a purely local,
//! gradient-based search slide from one basin of `f1` into the next
//! (SO-MOGSA). The crate also computes and renders the multi-objective
//! landscape (efficient cells, attraction basins, dominance counts) and runs
//! benchmark experiments against a Nelder-Mead baseline.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, which the harness and renderers use.

pub mod baseline;
pub mod engine;
pub mod error;
pub mod harness;
pub mod landscape;
pub mod moization;
pub mod point;
pub mod problems;
pub mod scalar;
pub mod trace;

pub use error::{Error, Result, Vanished};
pub use scalar::Scalar;

pub type Point = point::Point<f64>;
pub type Bounds = point::Bounds<f64>;
pub type ScalarProblem = problems::ScalarProblem<f64>;
pub type BiObjectiveProblem = moization::BiObjectiveProblem<f64>;
pub type ObjectivePair = moization::ObjectivePair<f64>;
pub type SearchTrace = trace::SearchTrace<f64>;
pub type SomogsaConfig = engine::SomogsaConfig<f64>;
pub type NelderMeadConfig = baseline::NelderMeadConfig<f64>;
pub type GradientDescentConfig = baseline::GradientDescentConfig<f64>;
pub type PlotField = landscape::PlotField<f64>;
pub type GridSpec = landscape::GridSpec<f64>;

pub type Point32 = point::Point<f32>;
pub type ScalarProblem32 = problems::ScalarProblem<f32>;
pub type BiObjectiveProblem32 = moization::BiObjectiveProblem<f32>;
