//! Oscillating sequences and the flows they are linearly disjoint from.
//!
//! The crate is organized by object: [`seq`] generates weight sequences and
//! their spectra, [`flow`] is the dynamical-system abstraction that
//! [`torus`], [`padic`], [`interval`] and [`circle`] implement, and
//! [`analysis`] measures weighted Birkhoff sums against them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod circle;
pub mod cli;
pub mod error;
pub mod flow;
pub mod interval;
pub mod numeric;
pub mod padic;
pub mod seq;
pub mod torus;

pub use error::{Error, Result};
