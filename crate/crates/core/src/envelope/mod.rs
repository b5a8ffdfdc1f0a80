//! Piecewise-linear limit functions and their slope-constrained envelopes.

mod pwl;
mod regularize;

pub use pwl::{PwlDoc, PwlFunction};
pub use regularize::{
    duality_check, lemma2_construct, lower_regularization, succ, upper_regularization, upper_regularization_anchored, SlopeBound,
};
