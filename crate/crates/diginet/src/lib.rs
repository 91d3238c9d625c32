//! Digital (0,n,2)-nets over GF(2), their exact discrepancy, and the Haar
//! coefficients of their discrepancy function.

pub mod discrepancy;
pub mod error;
pub mod gf2;
pub mod haar;
pub mod netgen;
pub mod par;
pub mod rational;
pub mod study;

pub use error::{Error, Result};
pub use rational::{Dyadic, Rational};
