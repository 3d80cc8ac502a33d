//! Scenario-driven batch runs of the `lindblad_lit` simulations.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod output;
pub mod run;
pub mod scenario;
