//! Finite-scale workbench for metrics on the double of a metric space, their
//! finite-propagation support masks, and inverse-semigroup laws.
//!
//! * [`metric`]: truncation towers, metric axioms, balls, coarse comparison.
//! * [`double`]: metrics on `X × {0,1}`, min-plus concatenation, idempotents
//!   built from nested families, witnesses of non-equivalence.
//! * [`roe`]: band operators with exact entries, inner products, support
//!   masks and ghost profiles.
//! * [`inverse`]: partial bijections, multiplication tables and the
//!   inverse-semigroup axioms.
//! * [`schema`]: the JSON formats shared with the command-line tool.

pub mod double;
pub mod error;
pub mod inverse;
pub mod metric;
pub mod number;
pub mod roe;
pub mod schema;

pub use error::{Error, Result};
pub use number::{Dist, Grid};
