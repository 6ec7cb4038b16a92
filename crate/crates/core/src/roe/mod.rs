//! Finite-propagation operators between truncations and their supports.
//!
//! Operators carry exact complex rational entries. A [`SupportMask`] cut
//! from a double at bound `L` is the set of pairs an operator of
//! propagation `≤ L` may occupy, and mask algebra stands in for products
//! and duals of the corresponding bimodules.

mod ghost;
mod mask;
mod operator;

pub use ghost::{ghost_profile, GhostProfile};
pub use mask::{
    base_mask, contains_operator, cross_mask, mask_compose, mask_inclusion, mask_operator, mask_transpose, metric_mask,
    split_cover, Inclusion, SupportMask,
};
pub use operator::{
    abs_exact, abs_sq, bimodule_product, compose, inner_left, inner_right, one, pair_sum_operator, propagation, real,
    BandOperator, PairMetric, Scalar,
};
