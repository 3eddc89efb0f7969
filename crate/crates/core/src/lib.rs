//! Numerical and combinatorial machinery for gradient-like multivalued
//! semiflows.
//!
//! Two halves share this crate:
//!
//! * the one-dimensional Chafee–Infante problem `u_t = u_xx + f(u)` on
//!   `(0, 1)` with Dirichlet data: reaction terms ([`nonlinearity`]), time
//!   maps and branch energies ([`timemap`]), stationary profiles
//!   ([`equilibria`]), an IMEX integrator ([`pde`]) and empirical connection
//!   digraphs between equilibria ([`connections`]);
//! * an exact finite-state model of multivalued semiflows ([`morse`]):
//!   limit sets, weakly invariant sets, local attractors and repellers,
//!   homoclinic structures, Morse reordering and perturbation sweeps.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
mod math;

pub mod connections;
pub mod equilibria;
pub mod grid;
pub mod morse;
pub mod nonlinearity;
pub mod pde;
pub mod quadrature;
pub mod roots;
pub mod timemap;
pub mod tridiag;

pub use error::{Error, Result};
pub use nonlinearity::{ModelKind, NonlinearityModel, Sign};
