//! Quadratic Dirichlet L-functions over `F_q[x]` in the hyperelliptic
//! ensemble: their zeros on the critical circle, the argument functions
//! `S_n(theta, chi_D)`, extremal one-sided trigonometric approximations, and
//! executable versions of the resulting upper and lower bounds.

#![allow(clippy::needless_range_loop)]

pub mod argument;
pub mod bounds;
pub mod cli;
pub mod config;
pub mod error;
pub mod extremal;
pub mod fq;
pub mod lpoly;
pub mod par;
pub mod scan;
pub mod symbol;

pub use error::{Error, Result};
