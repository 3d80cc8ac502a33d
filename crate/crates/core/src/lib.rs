//! Markovian open-system dynamics with the invariance transformations of the
//! master equation treated as a searchable space of monitoring strategies.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod fig1;
pub mod linalg;
pub mod lit;
pub mod observables;
pub mod optimizer;
pub mod random;
pub mod state;
pub mod thermal;
pub mod trajectories;

pub use error::{Error, Result};
