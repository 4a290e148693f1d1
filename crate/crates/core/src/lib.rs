//! Set-valued selection risk measures of non-convex portfolios on finite
//! probability spaces.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_forms;
pub mod engine;
pub mod error;
pub mod geom;
pub mod prob;
pub mod props;
pub mod report;
pub mod risk;
pub mod scenario;

pub use error::{Error, Result};
