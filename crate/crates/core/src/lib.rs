//! Propeller-immersed wing analysis and planform optimisation.
//!
//! The crate couples a lifting-line wing model with a propeller slipstream
//! and tabulated section polars, and searches Bezier chord and twist laws
//! for minimum drag or maximum endurance factor under area and lift
//! constraints.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cases;
pub mod error;
mod interp;
pub mod llt;
pub mod optimizer;
pub mod planform;
pub mod polar;
pub mod slipstream;
mod table;

pub use error::{Error, Result};
