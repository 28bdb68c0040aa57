#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod density;
pub mod env;
pub mod error;
pub mod fp;
pub mod grid;
pub mod harness;
pub mod metrics;
pub mod potential;
pub mod qae;
pub mod seeding;

pub use error::{Error, Result};
