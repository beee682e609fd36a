// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod double_double;
pub mod error;
pub mod excursion_max;
pub mod identities;
pub mod laplace_inv;
pub mod mc_sampler;
pub mod path_lab;
pub mod rng;
pub mod special_fns;
pub mod stats;
pub mod stick_breaking;

pub use error::{Error, Result};

/// Version of this crate, recorded in CLI output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
