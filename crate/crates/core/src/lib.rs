//! Completion-time analysis for tree-structured probabilistic
//! entanglement-distribution protocols.
//!
//! A protocol is modeled as a tree of heralded `generate` leaves and
//! `restart-until-success` stages ([`protocol`]). The crate computes the
//! exact completion-time distribution of any such tree by structural
//! recursion over truncated Pmfs ([`exact`], [`pmf`]), evaluates closed-form
//! mean and tail bounds for the same trees ([`bounds`]), cross-validates
//! both against direct stochastic simulation ([`montecarlo`]), and verifies
//! the reliability-theory machinery the bounds rest on ([`nbu`]).
//!
//! The numeric core is generic over the scalar type through
//! [`scalar::Real`]; `f64` is the default everywhere, and the `*32` aliases
//! below select single precision.

// negated comparisons in parameter guards are deliberate: `!(x > 0)` also
// rejects NaN, which `x <= 0` lets through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod exact;
pub mod montecarlo;
pub mod nbu;
pub mod pmf;
pub mod protocol;
pub mod scalar;

pub use bounds::{
    deterministic_swap_bounds, gen_envelope, gen_upper_mean, harmonic_number, markov_baseline,
    max_mean_bounds, max_mean_iid_closed, r_n_mean, repeater_bounds, rus_mean, rus_tail,
    switch_bounds, three_over_two, tree_mean_upper, tree_tail_upper, BoundReport, CurveDirection,
    TailCurve,
};
pub use error::{Error, Result};
pub use exact::{completion_pmf, completion_pmf_to_tail, mean_of, ExactResult};
pub use montecarlo::{estimate, sample_completion, SimEstimate};
pub use nbu::{
    check_dominance, check_min_bound, check_nbu, check_nwu, check_tolerance,
    closure_under_max_test, ks_to_exponential, CheckProperty, CheckReport, Survival,
};
pub use pmf::{ExpCurve, MeanBound, Pmf};
pub use protocol::{
    build_repeater, build_switch, parse_protocol, serialize_protocol, GenModel, ProtocolNode,
    RepeaterSpec, SwitchSpec,
};
pub use scalar::Real;

/// Single-precision aliases; the unsuffixed names default to `f64`.
pub type Pmf32 = pmf::Pmf<f32>;
pub type ExpCurve32 = pmf::ExpCurve<f32>;
pub type TailCurve32 = bounds::TailCurve<f32>;
pub type BoundReport32 = bounds::BoundReport<f32>;
pub type ProtocolNode32 = protocol::ProtocolNode<f32>;
pub type RepeaterSpec32 = protocol::RepeaterSpec<f32>;
pub type ExactResult32 = exact::ExactResult<f32>;
