//! Measurement-interrupted dynamics of a delta-kicked particle in an
//! infinite square well.
//!
//! The particle lives on `[0, pi]` with eigenstates `sqrt(2/pi) sin(n x)`.
//! Each period it receives a kick `exp(-i V(x) / hbar)` and its energy is
//! then measured projectively, so populations follow the linear map
//! `P(N) = Z P(N-1)` with `Z_nm = |<n|U_kick|m>|^2`. This crate builds `Z`,
//! iterates it, evaluates the closed-form energy growth, the entanglement
//! between the particle and the measuring register, and the density-matrix
//! dephasing model whose strong-damping limit reproduces the measured map.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod basis;
pub mod bessel;
pub mod dephase;
pub mod entangle;
pub mod error;
pub mod evolve;
pub mod kick;
pub mod linalg;
pub mod quadrature;

pub use basis::{
    constant_rate_check, default_spectrum, deriv_squared_spectrum, BoxBasis, ConstantRate,
    DerivSquaredSpectrum, KickPotential,
};
pub use dephase::{
    advance_to_kick, dephase_step, free_step, kicked_cycle, run_dephasing, DensityMatrix,
    DephasingMode, DephasingSchedule,
};
pub use entangle::{
    entanglement_series, joint_state_oracle, shannon_entropy_bits, EntanglementSeries,
};
pub use error::{Error, Result};
pub use evolve::{
    asymptotic_rate, basis_state, energy_increment_prediction, run_trajectory, step,
    AsymptoticOptions, AsymptoticReport, EvolveOptions, Trajectory,
};
pub use kick::{
    kick_operator_bessel, kick_operator_quadrature, transition_matrix, KickMethod, KickOperator,
    TransitionMatrix,
};
pub use linalg::CMatrix;
pub use num_complex::Complex64;
