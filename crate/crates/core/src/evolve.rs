//! Iteration of the measured kick map on populations, energy trajectories
//! and asymptotic diffusion rates.
//!
//! Free evolution is diagonal in the measured basis, so the period `T` and
//! the measurement offset `t'` drop out of everything in this module.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::basis::{BoxBasis, DerivSquaredSpectrum};
use crate::error::{Error, Result};
use crate::kick::{TransitionMatrix, DEFAULT_LEAK_FAIL};
use crate::linalg::solve_real;

pub const DEFAULT_CROSS_TOL: f64 = 1e-6;
pub const DEFAULT_ASYMPTOTIC_STEPS: usize = 2000;
/// Relative slope mismatch below which an asymptotic run counts as converged.
pub const CONVERGENCE_TOL: f64 = 0.02;

const PROB_SLACK: f64 = 1e-12;

/// Tolerances applied while iterating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Largest probability that may leave the basis in a single step.
    pub leak_fail: f64,
    /// Relative agreement required between direct and recursed energies.
    pub cross_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            leak_fail: DEFAULT_LEAK_FAIL,
            cross_tol: DEFAULT_CROSS_TOL,
        }
    }
}

/// `e_level` as a probability vector of length `dim` (`level` is 1-based).
pub fn basis_state(dim: usize, level: usize) -> Result<Vec<f64>> {
    if level == 0 || level > dim {
        return Err(Error::LevelOutOfRange {
            n: level,
            n_max: dim,
        });
    }
    let mut p = vec![0.0; dim];
    p[level - 1] = 1.0;
    Ok(p)
}

fn check_sub_probability(p: &[f64]) -> Result<f64> {
    if p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "populations",
            reason: "entries must be finite and non-negative",
        });
    }
    let total: f64 = p.iter().sum();
    if total > 1.0 + PROB_SLACK {
        return Err(Error::InvalidParameter {
            name: "populations",
            reason: "sum exceeds one",
        });
    }
    Ok(total)
}

/// One kick-and-measure period: `Z p`.
pub fn step(z: &TransitionMatrix, p: &[f64]) -> Result<Vec<f64>> {
    check_sub_probability(p)?;
    z.apply(p)
}

/// `E = sum_n E_n P_n`.
pub fn mean_energy(basis: &BoxBasis, p: &[f64]) -> f64 {
    p.iter()
        .enumerate()
        .map(|(i, pi)| basis.energy(i + 1) * pi)
        .sum()
}

/// Energy gained in one period from populations `p_prev`, in units of
/// `hbar^2`: `a0/2 - (1/2pi) sum_m c_m P_m`. Levels beyond the spectrum's
/// range contribute no correction.
pub fn energy_increment_prediction(spec: &DerivSquaredSpectrum, p_prev: &[f64]) -> f64 {
    let correction: f64 = p_prev
        .iter()
        .enumerate()
        .map(|(i, p)| spec.cos_projection(i + 1) * p)
        .sum();
    spec.mean_rate() - correction / (2.0 * PI)
}

/// Populations and energies of a measured run, indexed by step `0..=steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub populations: Vec<Vec<f64>>,
    pub energies: Vec<f64>,
    /// Energies from the spectral recursion, when a spectrum was supplied.
    pub recursed_energies: Option<Vec<f64>>,
    pub total_prob: Vec<f64>,
    /// `(E_N - E_0) / N`; entry 0 is 0 by convention.
    pub diffusion_rate: Vec<f64>,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.populations.len() - 1
    }

    /// Population of the 1-based `level` at every step.
    pub fn level_series(&self, level: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[level - 1]).collect()
    }

    /// Total probability lost to truncation over the run.
    pub fn lost_probability(&self) -> f64 {
        self.total_prob[0] - self.total_prob[self.total_prob.len() - 1]
    }
}

/// Iterates `P(N) = Z P(N-1)` from `p0` for `n_steps` periods.
///
/// With a spectrum, energies are also propagated through the spectral
/// recursion and checked against the direct sums at every step.
pub fn run_trajectory(
    z: &TransitionMatrix,
    basis: &BoxBasis,
    spectrum: Option<&DerivSquaredSpectrum>,
    p0: &[f64],
    n_steps: usize,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if n_steps < 1 {
        return Err(Error::InvalidParameter {
            name: "n_steps",
            reason: "must be at least 1",
        });
    }
    if basis.n_max() != z.dim() {
        return Err(Error::DimensionMismatch {
            expected: z.dim(),
            got: basis.n_max(),
        });
    }
    if p0.len() != z.dim() {
        return Err(Error::DimensionMismatch {
            expected: z.dim(),
            got: p0.len(),
        });
    }
    let total0 = check_sub_probability(p0)?;
    if (total0 - 1.0).abs() > PROB_SLACK {
        return Err(Error::InvalidParameter {
            name: "p0",
            reason: "must sum to one",
        });
    }
    let hbar2 = basis.hbar() * basis.hbar();
    let e0 = mean_energy(basis, p0);

    let mut populations = Vec::with_capacity(n_steps + 1);
    let mut energies = Vec::with_capacity(n_steps + 1);
    let mut total_prob = Vec::with_capacity(n_steps + 1);
    let mut diffusion_rate = Vec::with_capacity(n_steps + 1);
    let mut recursed = spectrum.map(|_| {
        let mut v = Vec::with_capacity(n_steps + 1);
        v.push(e0);
        v
    });
    populations.push(p0.to_vec());
    energies.push(e0);
    total_prob.push(total0);
    diffusion_rate.push(0.0);

    for n in 1..=n_steps {
        let prev = &populations[n - 1];
        let next = z.apply(prev)?;
        let total: f64 = next.iter().sum();
        let lost = total_prob[n - 1] - total;
        if lost > opts.leak_fail {
            return Err(Error::TrajectoryLeakage {
                step: n,
                lost,
                limit: opts.leak_fail,
            });
        }
        let e = mean_energy(basis, &next);
        if let (Some(spec), Some(rec)) = (spectrum, recursed.as_mut()) {
            let predicted = rec[n - 1] + hbar2 * energy_increment_prediction(spec, prev);
            if (e - predicted).abs() > opts.cross_tol * predicted.abs() {
                return Err(Error::EnergyMismatch {
                    step: n,
                    direct: e,
                    recursed: predicted,
                });
            }
            rec.push(predicted);
        }
        energies.push(e);
        total_prob.push(total);
        diffusion_rate.push((e - e0) / n as f64);
        populations.push(next);
    }
    Ok(Trajectory {
        populations,
        energies,
        recursed_energies: recursed,
        total_prob,
        diffusion_rate,
    })
}

/// Least-squares slope of `E_N` against `N` over the final `fraction` of steps.
pub fn fitted_rate(energies: &[f64], fraction: f64) -> f64 {
    let last = energies.len() - 1;
    let start = last - ((last as f64 * fraction).round() as usize).clamp(1, last);
    let pts: Vec<(f64, f64)> = (start..=last).map(|i| (i as f64, energies[i])).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// How the geometric third term of the long-time energy was evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrectionMethod {
    /// Direct solve of `(I - Z) x = e_1`.
    LinearSolve,
    /// `(I - Z)` was singular; partial sums of `Z^i e_1` were used instead.
    PartialSums { terms: usize, converged: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticOptions {
    pub steps: usize,
    /// Trailing share of the run used for the slope fit.
    pub fit_fraction: f64,
    pub evolve: EvolveOptions,
    /// Term cap for the partial-sum fallback.
    pub max_partial_terms: usize,
}

impl Default for AsymptoticOptions {
    fn default() -> Self {
        Self {
            steps: DEFAULT_ASYMPTOTIC_STEPS,
            fit_fraction: 0.5,
            evolve: EvolveOptions::default(),
            max_partial_terms: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    /// `hbar^2 a0 / 2`.
    pub closed_form_rate: f64,
    /// Slope of a long ground-state run.
    pub numeric_rate: f64,
    /// `-(hbar^2 / 2pi) sum_m c_m ((I - Z)^{-1} e_1)_m`.
    pub geometric_correction: f64,
    pub correction_method: CorrectionMethod,
    pub converged: bool,
    pub trajectory_lost_probability: f64,
}

/// Closed-form and fitted long-time diffusion rates from the ground state.
pub fn asymptotic_rate(
    z: &TransitionMatrix,
    spec: &DerivSquaredSpectrum,
    basis: &BoxBasis,
    opts: &AsymptoticOptions,
) -> Result<AsymptoticReport> {
    let dim = z.dim();
    let hbar2 = basis.hbar() * basis.hbar();
    let closed_form_rate = hbar2 * spec.mean_rate();

    let mut i_minus_z: Vec<f64> = z.as_slice().iter().map(|v| -v).collect();
    for i in 0..dim {
        i_minus_z[i * dim + i] += 1.0;
    }
    let rhs = basis_state(dim, 1)?;
    let (visits, correction_method) = match solve_real(dim, i_minus_z, rhs.clone()) {
        Some(x) => (x, CorrectionMethod::LinearSolve),
        None => partial_sums(z, rhs, opts.max_partial_terms)?,
    };
    let weighted: f64 = visits
        .iter()
        .enumerate()
        .map(|(i, v)| spec.cos_projection(i + 1) * v)
        .sum();
    let geometric_correction = -hbar2 * weighted / (2.0 * PI);

    let p0 = basis_state(dim, 1)?;
    let traj = run_trajectory(z, basis, Some(spec), &p0, opts.steps, &opts.evolve)?;
    let numeric_rate = fitted_rate(&traj.energies, opts.fit_fraction);
    let converged = if closed_form_rate == 0.0 {
        numeric_rate.abs() < 1e-12
    } else {
        ((numeric_rate - closed_form_rate) / closed_form_rate).abs() < CONVERGENCE_TOL
    };
    Ok(AsymptoticReport {
        closed_form_rate,
        numeric_rate,
        geometric_correction,
        correction_method,
        converged,
        trajectory_lost_probability: traj.lost_probability(),
    })
}

fn partial_sums(
    z: &TransitionMatrix,
    e1: Vec<f64>,
    max_terms: usize,
) -> Result<(Vec<f64>, CorrectionMethod)> {
    let mut acc = e1.clone();
    let mut term = e1;
    for terms in 1..max_terms {
        term = z.apply(&term)?;
        let size: f64 = term.iter().map(|v| v.abs()).sum();
        for (a, t) in acc.iter_mut().zip(&term) {
            *a += t;
        }
        if size < 1e-10 {
            return Ok((
                acc,
                CorrectionMethod::PartialSums {
                    terms: terms + 1,
                    converged: true,
                },
            ));
        }
    }
    Ok((
        acc,
        CorrectionMethod::PartialSums {
            terms: max_terms,
            converged: false,
        },
    ))
}
