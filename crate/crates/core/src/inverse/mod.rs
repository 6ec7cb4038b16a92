//! Finite inverse semigroups: partial bijections, ideals of `ℂⁿ`, and
//! axiom checks on multiplication tables.
//!
//! Partial bijections compose left to right (`σ` then `τ`), the same order
//! as support masks.

mod ideal;
mod pbij;
mod table;

pub use ideal::{ideal_product, IdealProduct};
pub use pbij::{
    pb_compose, pb_enumerate, pb_enumerate_bounded, pb_inverse, pb_support_correspondence, Correspondence,
    PartialBijection, DEFAULT_ENUMERATION_BOUND,
};
pub use table::{pb_natural_le, InverseReport, InverseSemigroup, MulTable, RegularReport};
