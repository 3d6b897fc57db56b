#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compiler;
pub mod composite;
pub mod config;
pub mod dressing;
pub mod error;
pub mod experiments;
pub mod ion;
pub mod quantum;

pub use error::{Error, Result};
