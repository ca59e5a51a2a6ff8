//! Batch front end for the `dampwave` crate: reads a run configuration,
//! runs one experiment and writes hashed artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod artifacts;
pub mod config;
pub mod run;
