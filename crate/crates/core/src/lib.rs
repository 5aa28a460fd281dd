//! Numerical verification of Tauberian tail bounds for heavy-tailed random
//! variables.
//!
//! The crate computes Laplace–Stieltjes transforms of heavy-tailed
//! distributions, identifies the algebraic/logarithmic singularity of the
//! transform at the origin, builds explicit correction densities matching the
//! leading singular and analytic terms, and combines them with
//! majorant/minorant functions of exponential type to produce upper and lower
//! bounds on `P(X > x)`. An M/G/1-type queue module applies the same machinery
//! to stationary queue-length distributions.

pub mod correction;
pub mod dist;
pub mod error;
pub mod extremal;
pub mod ls_transform;
pub mod mg1;
pub mod numerics;
pub mod tailbound;
pub mod verify;

pub use error::{Error, Result};
