//! Numerical toolkit for analytic tent spaces on the unit disk and for the generalized
//! integration operators `T_g^{n,k} f = I^n(f^(k) g^(n-k))` and `S_g^{n,k} f = I^n(f^(n-k) g^(k))`.

pub mod error;
pub mod funcmodel;
pub mod geometry;
pub mod quadrature;
pub mod tentnorm;
pub mod operators;
pub mod criteria;
pub mod atomic;
pub mod harness;

pub use error::{Error, Result};
