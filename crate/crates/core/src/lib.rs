//! Evaluation, exact verification and search for step functions minimizing the
//! Erdős minimum-overlap objective
//!
//! ```text
//! max_k ∫ f(x) (1 - f(x + k)) dx
//! ```
//!
//! over step functions `f` on `[0, 2]` with values in `[0, 1]` and unit integral,
//! together with a brute-force solver for the discrete quantity `M(n)`.
//!
//! - [`rational`]: exact decimal parsing and rendering on top of `BigRational`.
//! - [`stepfn`]: the [`StepFunction`] type, built-in published functions, and the JSON file format.
//! - [`objective`]: per-shift overlap values, their maximum, and subgradients.
//! - [`optimizer`]: projected subgradient search with multi-start and optional annealing.
//! - [`discrete`]: difference counts of balanced partitions of `{1, ..., 2n}` and exhaustive `M(n)`.

pub mod discrete;
pub mod error;
pub mod objective;
pub mod optimizer;
pub mod rational;
pub mod stepfn;

pub use error::{Error, Result};
pub use rational::Rational;
pub use stepfn::StepFunction;
