//! Spectral toolkit for affinely quantized oscillators.
//!
//! The crate covers four layers:
//!
//! * [`classical`]: phase-space points, the coupled half-line Hamiltonian, its
//!   decoupled normal-coordinate form, the dilation variable and numeric
//!   Poisson brackets.
//! * [`specfun`]: terminating confluent hypergeometric series, Hermite and
//!   associated Laguerre polynomials, and half-line quadrature.
//! * [`analytic`]: closed-form eigenpairs of the half harmonic oscillator and
//!   of both normal-mode branches of the coupled system.
//! * [`numeric`]: a finite-difference Sturm–Liouville eigensolver with Sturm
//!   bisection, inverse iteration and Richardson extrapolation.
//!
//! [`interp`] builds the moving-endpoint study on top of the solver and
//! [`cli`] wires everything into the `affine-osc` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod classical;
pub mod cli;
pub mod error;
pub mod interp;
pub mod numeric;
pub mod specfun;

pub use classical::{Frame, PhaseSpacePoint, PhysicalParams};
pub use error::{Error, Result};
