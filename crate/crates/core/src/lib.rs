//! Exact and certified numerics for symmetric t-hyperbolic systems
//! `A u_t + sum_i B_i u_{x_i} = f` on the unit cube.
//!
//! The crate is organised bottom-up: [`algebraic`] provides exact real
//! algebraic numbers, [`linalg`] the exact spectral and pencil
//! decompositions, [`problem`] the problem model and domain of dependence,
//! [`planner`] the grid and error-budget planning, [`engine`] the Godunov
//! scheme and [`certify`] interpolation, norms and certificates.

pub mod algebraic;
pub mod linalg;
pub mod problem;
pub mod planner;
pub mod engine;
pub mod certify;
