//! Joint transmit beamforming and intelligent-reflecting-surface (IRS) phase
//! optimization for the MISO wiretap channel.
//!
//! A multi-antenna transmitter reaches a single-antenna legitimate receiver
//! through an IRS with `M` passive unit-modulus reflectors while a
//! single-antenna eavesdropper listens through the same surface. The crate
//! maximizes the secrecy rate over the beamformer `f` (with `‖f‖² ≤ P`) and
//! the reflection phases `θ`.
//!
//! Two solvers are provided:
//!
//! * [`bcd::solve_bcd`] treats every phase as its own block and updates it
//!   with a closed-form global maximizer of a cosine ratio.
//! * [`aomm::solve_aomm`] alternates between the beamformer and the full
//!   phase vector, updating the latter with one minorization-maximization
//!   step per iteration.
//!
//! Both share the closed-form optimal beamformer in
//! [`model::optimal_beamformer`] (a generalized Rayleigh quotient) and the
//! dominant-singular-vector initialization in [`model::initial_phases`].
//!
//! The crate is `no_std` (with `alloc`). Enable the `std` feature to get
//! wall-clock timing in [`solver::SolveTrace`] and `std::error::Error`
//! integration.

#![cfg_attr(not(feature = "std"), no_std)]
// Negated comparisons reject NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod aomm;
pub mod bcd;
pub mod channel;
mod error;
pub mod model;
pub mod numerics;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64;
