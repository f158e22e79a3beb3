//! Numerical Loewner theory on the unit ball of `C^n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`holomap`]: holomorphic maps on the ball (closed forms, truncated jets,
//!   convex combinations), exact Jacobians and sampled membership tests for
//!   the Carathéodory-type class `M_n`.
//! * [`loewner`]: piecewise-constant Herglotz vector fields, point/Jacobian/jet
//!   flows of the Loewner ODE and the infinite-horizon limit `f^G`.
//! * [`variation`]: needle variations and their first-order terms, with a
//!   brute-force verifier.
//! * [`control`]: linear functionals, transported functionals `L_t`, the
//!   Hamiltonian scan and the maximum-principle style checks built on it.
//!
//! Every operation is pure; values are immutable after construction and may
//! be shared between threads.

pub mod control;
mod error;
pub mod holomap;
pub mod linalg;
pub mod loewner;
pub mod variation;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand for building a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
