//! Exact real search, optimisation and regression.
//!
//! Two encodings of reals are provided: lazy signed-digit streams over
//! `[-1, 1]` ([`signed_digit`]) and ternary Boehm encodings over the whole
//! line ([`boehm`]). Search, optimisation and regression work over compact
//! subsets of either.

pub mod boehm;
pub mod cli;
pub mod dyadic;
pub mod error;
pub mod expr;
pub mod optimisation;
mod par;
pub mod regression;
pub mod search;
pub mod signed_digit;

pub use dyadic::Dyadic;
pub use error::{ErsError, Result};
