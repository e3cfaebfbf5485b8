//! Entanglement between the particle and the measuring register.
//!
//! After each projective record the particle's reduced state is diagonal, so
//! the particle-register entanglement is the Shannon entropy of the measured
//! populations, and the entanglement with the most recent register alone is
//! the one-step entropy increment.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolve::Trajectory;
use crate::linalg::{hermitian_eigenvalues, CMatrix};

/// Largest particle dimension accepted by [`joint_state_oracle`].
pub const MAX_ORACLE_DIM: usize = 6;

/// `-sum p log2 p` with `0 log 0 = 0`.
pub fn shannon_entropy_bits(p: &[f64]) -> f64 {
    // `0 - x` rather than `-x` so a pure state gives +0
    0.0 - p
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.log2())
        .sum::<f64>()
}

/// Von Neumann entropy in bits from a spectrum; eigenvalues at or below
/// `1e-300` (including round-off negatives) are dropped.
pub fn von_neumann_entropy_bits(eigenvalues: &[f64]) -> f64 {
    0.0 - eigenvalues
        .iter()
        .filter(|&&v| v > 1e-300)
        .map(|&v| v * v.log2())
        .sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementSeries {
    /// Particle-register entropy `S_V(N)` for `N = 0..=steps`.
    pub s_v: Vec<f64>,
    /// Pairwise entanglement `E_r(N)` for `N = 1..=steps`, stored at `N - 1`.
    pub e_r: Vec<f64>,
    /// `max_N |sum_{n <= N} E_r(n) - S_V(N) + S_V(0)|`.
    pub telescoping_residual: f64,
}

impl EntanglementSeries {
    /// `E_r(n)` for 1-based step `n`.
    pub fn partial(&self, n: usize) -> f64 {
        self.e_r[n - 1]
    }
}

pub fn entanglement_series(traj: &Trajectory) -> Result<EntanglementSeries> {
    if traj.populations.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "trajectory",
            reason: "needs at least one step",
        });
    }
    let s_v: Vec<f64> = traj
        .populations
        .iter()
        .map(|p| shannon_entropy_bits(p))
        .collect();
    let e_r: Vec<f64> = s_v.windows(2).map(|w| w[1] - w[0]).collect();
    let mut acc = 0.0;
    let mut telescoping_residual = 0.0_f64;
    for (n, e) in e_r.iter().enumerate() {
        acc += e;
        telescoping_residual = telescoping_residual.max((acc - (s_v[n + 1] - s_v[0])).abs());
    }
    Ok(EntanglementSeries {
        s_v,
        e_r,
        telescoping_residual,
    })
}

/// Reduced particle state obtained from an explicit joint particle-register
/// wavefunction.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    pub reduced: CMatrix,
    pub populations: Vec<f64>,
    /// Von Neumann entropy of `reduced`, in bits.
    pub entropy: f64,
    /// Norm of the kicked particle state before renormalisation.
    pub norm: f64,
}

/// One kick-and-record period simulated on the joint space of `d` particle
/// levels and `d` register spins, all spins starting down.
///
/// The kick is the leading `d x d` block of `u`, applied to `|level>`; the
/// record is the controlled flip `-i sum_n |n><n| (x) sigma_x^(n)`. The spins
/// are then traced out explicitly. A truncated block is renormalised.
pub fn joint_state_oracle(u: &CMatrix, level: usize, d: usize) -> Result<OracleOutcome> {
    if d > MAX_ORACLE_DIM {
        return Err(Error::OracleTooLarge {
            d,
            limit: MAX_ORACLE_DIM,
        });
    }
    if d == 0 || d > u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: d,
        });
    }
    if level == 0 || level > d {
        return Err(Error::LevelOutOfRange { n: level, n_max: d });
    }
    let spins = 1usize << d;
    let kicked: Vec<Complex64> = (0..d).map(|n| u[(n, level - 1)]).collect();
    let norm = kicked.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidParameter {
            name: "u",
            reason: "kicked state vanishes in the block",
        });
    }

    // joint amplitude index: particle * 2^d + register bits; all spins down = 0
    let mut joint = vec![Complex64::new(0.0, 0.0); d * spins];
    for (n, a) in kicked.iter().enumerate() {
        joint[n * spins] = a / norm;
    }
    let mut recorded = vec![Complex64::new(0.0, 0.0); d * spins];
    let minus_i = Complex64::new(0.0, -1.0);
    for n in 0..d {
        for s in 0..spins {
            recorded[n * spins + (s ^ (1 << n))] += minus_i * joint[n * spins + s];
        }
    }

    let mut reduced = CMatrix::zeros(d);
    for a in 0..d {
        for b in 0..d {
            reduced[(a, b)] = (0..spins)
                .map(|s| recorded[a * spins + s] * recorded[b * spins + s].conj())
                .sum();
        }
    }
    let entropy = von_neumann_entropy_bits(&hermitian_eigenvalues(&reduced));
    let populations = reduced.diagonal();
    Ok(OracleOutcome {
        reduced,
        populations,
        entropy,
        norm,
    })
}
