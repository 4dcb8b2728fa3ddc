//! Exact computations for spaces of irreducible multivariate polynomials,
//! organized by the stratification of `Poly_{d,n}` by factorization type.
//!
//! - [`partition`]: partitions, refinement, and the threshold function `r`
//! - [`algebra`]: rational polynomials in `q`, truncated series in `t`
//! - [`census`]: point counts over `F_q`, Euler characteristics, Carlitz
//!   ratios, Hyde coefficient stabilization
//! - [`graded`]: symmetric powers of dimension series and the stable series
//!   `P_1`, `P_2`, `P_3`
//! - [`spectral`]: `E_1` windows, stable Betti numbers, explicit bounds
//! - [`brute`]: exhaustive enumeration over small prime fields

pub mod algebra;
pub mod brute;
pub mod census;
pub mod error;
pub mod graded;
pub mod json;
pub mod partition;
pub mod spectral;

pub use error::{Error, Result};
