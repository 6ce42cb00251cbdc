//! Average-cost solver and turnpike verification for finite two-person
//! zero-sum Markov games.
//!
//! A game is a finite weighted state space, finite action grids for the
//! minimizing player (`u`) and the maximizing player (`v`), a transition
//! density with respect to the state weights, a bounded transition cost and
//! a terminal cost. The crate provides the min-max Bellman (Shapley)
//! operator, the span quotient machinery in which that operator contracts
//! under a minorization condition, an average-cost solver, and empirical
//! checks of the early (strategy) and middle (state distribution) turnpike
//! properties of long finite-horizon games.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command-line runner live in the `turnpike-cli` crate.

#![no_std]
// `!(a > b)` is used on purpose so that NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bellman;
pub mod certificate;
pub mod error;
pub mod fixtures;
pub mod model;
pub mod quotient;
pub mod sim;
pub mod solver;
pub mod turnpike;

pub use bellman::{apply_bellman, equilibrium_set, ActionPair, EquilibriumSet};
pub use certificate::{minorization_search, MinorizationCertificate};
pub use error::{Error, Result, Warning};
pub use model::{
    validate, ActionSets, CostFunction, GameModel, StateSpace, TransitionKernel, ValidationReport,
    ValueFunction, Violation,
};
pub use quotient::{project, quotient_distance, quotient_norm, sup_norm};
pub use solver::{solve, solve_from, SolveOptions, SolveResult};
pub use turnpike::{tv_distance, StateDistribution, TurnpikeProfile};
