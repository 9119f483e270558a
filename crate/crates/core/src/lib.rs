//! Geometric quantization of time-dependent Hamiltonian mechanics on a
//! fibred configuration space `Q -> R`.
//!
//! The crate is organized in layers:
//!
//! * [`poly`] / [`parse`] — exact multivariate polynomials over the fixed
//!   variable list `(t, q^1..q^m, p_0, p_1..p_m)` with complex-rational
//!   coefficients, and a small expression parser producing them.
//! * [`poisson`] — the canonical Poisson brackets on `V*Q` and `T*Q`,
//!   Hamiltonian vector fields, the Hamiltonian connection, the classical
//!   evolution equation and frame splitting.
//! * [`operator`] / [`quantize`] — normal-ordered differential operators and
//!   the quantization maps (prequantum on `T*Q` and `V*Q`, Schrödinger on
//!   half-densities with metaplectic correction, divergence-form quadratic
//!   ordering), with the Dirac defect as a first-class measurement.
//! * [`grid`] / [`evolve`] — half-densities sampled on a uniform box grid,
//!   the Hermitian form, discretized operators, Crank–Nicolson time stepping,
//!   classical RK4 flow, and constant-velocity frame transforms.
//! * [`suite`] — seeded randomized verification suites shared by the CLI and
//!   the acceptance tests.
//!
//! All symbolic operations are exact: coefficients are complex rationals and
//! floats appear only at evaluation boundaries.

pub mod coeff;
pub mod error;
pub mod evolve;
pub mod exec;
pub mod grid;
pub mod operator;
pub mod parse;
pub mod poisson;
pub mod poly;
pub mod quantize;
pub mod sample;
pub mod suite;

pub use coeff::{Coeff, Rat};
pub use error::Error;
pub use evolve::{ClassicalState, FrameDirection, MovingFrame};
pub use grid::{GridSpec, GridState};
pub use operator::{DiffOperator, VarSet};
pub use poisson::{FrameConnection, PhaseFunction, Space, VectorFieldCoeffs};
pub use poly::{Polynomial, Var};
pub use quantize::QuantizationMap;
