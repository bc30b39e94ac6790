//! Point estimates and confidence intervals for ratios of quantiles of the
//! Dagum income distribution.
//!
//! The crate is `no_std` (it needs `alloc`). Intervals come in two flavors:
//! the standard one with equal risks on both sides, and the shortest one,
//! obtained by minimizing the interval length over the split of the total
//! risk between underestimation and overestimation.
//!
//! ```
//! use dagum_ci_core::{ci, RatioEstimate, RatioSpec};
//!
//! let est = RatioEstimate::new(2.5, 1000, RatioSpec::QUINTILE, 0.1)?;
//! let standard = ci::standard_interval(&est, 0.95)?;
//! let shortest = ci::shortest_interval(&est, 0.95)?;
//! assert!(shortest.length < standard.length);
//! # Ok::<(), dagum_ci_core::Error>(())
//! ```
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod ci;
pub mod dagum;
mod error;
pub mod estimator;
mod math;
pub mod optimize;
pub mod special_fn;

pub use ci::{ConfidenceInterval, RiskSplit};
pub use dagum::{ratio_of_quantiles, v_from_ratio, DagumParams, RatioSpec};
pub use error::{Error, Result};
pub use estimator::RatioEstimate;
