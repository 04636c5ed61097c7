//! Dissipative preparation of spin coherent states of entangled spins.
//!
//! The crate is organised around the pieces of the pumping scheme:
//!
//! - [`spin_algebra`]: half-integers, Clebsch–Gordan coefficients, the
//!   `(j_A ⊗ j_B) ⊗ j_β` coupled basis and collective ladder operators.
//! - [`sparse`]: the complex sparse operator type shared by every module.
//! - [`master_equation`]: Lindblad evolution, the secular rate-equation
//!   limit and projective measurement.
//! - [`pump_protocols`]: the general and simplified pumping schemes, their
//!   analytic steady states and pump/measure/repump cycles.
//! - [`qubit_register`]: explicit `2^N` simulations with dephasing and
//!   calibration errors, plus entanglement diagnostics.
//! - [`telecloning`]: resource states and the Bell-measurement telecloning
//!   protocol.
//! - [`aklt`]: 4-qubit AKLT clusters and parity-measurement chain growth.
//! - [`cavity_planner`]: Raman-rate and feasibility arithmetic for atoms in
//!   an optical-lattice cavity.

pub mod aklt;
pub mod cavity_planner;
pub mod error;
pub mod export;
pub mod master_equation;
pub mod pump_protocols;
pub mod qubit_register;
pub mod sparse;
pub mod spin_algebra;
pub mod telecloning;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
