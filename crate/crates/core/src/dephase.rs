//! Density-matrix evolution with dephasing generated by `[p^2, [p^2, rho]]`.
//!
//! `p^2` is diagonal in the well eigenbasis, so free evolution and damping
//! both act elementwise and integrate in closed form; only the kick needs a
//! matrix conjugation. One cycle spans `[t', T + t']`: free flight for
//! `T - t'`, the kick, free flight for `t'`, then the damping impulse.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::basis::BoxBasis;
use crate::error::{Error, Result};
use crate::kick::KickOperator;
use crate::linalg::{hermitian_eigenvalues, CMatrix};

/// Default cap on the dimension of density-matrix runs.
pub const MAX_DENSITY_DIM: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn from_matrix(rho: CMatrix) -> Self {
        Self { rho }
    }

    /// `|level><level|` with a 1-based level.
    pub fn pure_level(dim: usize, level: usize) -> Result<Self> {
        if level == 0 || level > dim {
            return Err(Error::LevelOutOfRange {
                n: level,
                n_max: dim,
            });
        }
        let mut rho = CMatrix::zeros(dim);
        rho[(level - 1, level - 1)] = Complex64::new(1.0, 0.0);
        Ok(Self { rho })
    }

    /// Diagonal state with the given populations.
    pub fn from_populations(p: &[f64]) -> Self {
        let mut rho = CMatrix::zeros(p.len());
        for (i, &v) in p.iter().enumerate() {
            rho[(i, i)] = Complex64::new(v, 0.0);
        }
        Self { rho }
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn populations(&self) -> Vec<f64> {
        self.rho.diagonal()
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.rho.hermiticity_defect()
    }

    /// `Tr(rho^2)`, which for Hermitian `rho` is the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.rho.as_slice().iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn energy(&self, basis: &BoxBasis) -> f64 {
        self.populations()
            .iter()
            .enumerate()
            .map(|(i, p)| basis.energy(i + 1) * p)
            .sum()
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    worst = worst.max(self.rho[(r, c)].norm());
                }
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.rho)
            .first()
            .copied()
            .unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DephasingMode {
    /// Constant rate `gamma0` throughout the period.
    Continuous { gamma0: f64 },
    /// Impulse of weight `epsilon0` at `t'` after each kick; `f64::INFINITY`
    /// gives an exact projective measurement.
    Kicked { epsilon0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingSchedule {
    pub mode: DephasingMode,
    pub period: f64,
    pub offset: f64,
}

impl DephasingSchedule {
    pub const DEFAULT_PERIOD: f64 = 1.0;
    pub const DEFAULT_OFFSET: f64 = 0.5;

    pub fn new(mode: DephasingMode, period: f64, offset: f64) -> Result<Self> {
        let s = Self {
            mode,
            period,
            offset,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_defaults(mode: DephasingMode) -> Self {
        Self {
            mode,
            period: Self::DEFAULT_PERIOD,
            offset: Self::DEFAULT_OFFSET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::InvalidParameter {
                name: "period",
                reason: "must be positive",
            });
        }
        if !(self.offset > 0.0 && self.offset < self.period) {
            return Err(Error::InvalidParameter {
                name: "offset",
                reason: "must lie in (0, period)",
            });
        }
        let ok = match self.mode {
            DephasingMode::Continuous { gamma0 } => gamma0.is_finite() && gamma0 >= 0.0,
            DephasingMode::Kicked { epsilon0 } => epsilon0 >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "dephasing",
                reason: "strength must be non-negative",
            })
        }
    }

    /// The kicked schedule with `epsilon0 = gamma0 T`; kicked schedules map to themselves.
    pub fn equivalent_kicked(&self) -> Self {
        let mode = match self.mode {
            DephasingMode::Continuous { gamma0 } => DephasingMode::Kicked {
                epsilon0: gamma0 * self.period,
            },
            m => m,
        };
        Self { mode, ..*self }
    }

    fn continuous_rate(&self) -> f64 {
        match self.mode {
            DephasingMode::Continuous { gamma0 } => gamma0,
            DephasingMode::Kicked { .. } => 0.0,
        }
    }
}

/// `rho_nm <- rho_nm exp(-(strength / 2) (hbar^2 n^2 - hbar^2 m^2)^2)`.
pub fn dephase_step(rho: &DensityMatrix, basis: &BoxBasis, strength: f64) -> DensityMatrix {
    let h2 = basis.hbar() * basis.hbar();
    let mut out = rho.clone();
    if strength == 0.0 {
        return out;
    }
    let n = rho.dim();
    for r in 0..n {
        for c in 0..n {
            if r == c {
                continue;
            }
            let gap = h2 * (((r + 1) * (r + 1)) as f64 - ((c + 1) * (c + 1)) as f64);
            out.rho[(r, c)] *= (-0.5 * strength * gap * gap).exp();
        }
    }
    out
}

/// `rho_nm <- rho_nm exp(-i (E_n - E_m) t / hbar)`.
pub fn free_step(rho: &DensityMatrix, basis: &BoxBasis, duration: f64) -> DensityMatrix {
    let mut out = rho.clone();
    if duration == 0.0 {
        return out;
    }
    let n = rho.dim();
    let phases: Vec<Complex64> = (1..=n)
        .map(|k| {
            let (s, c) = (basis.energy(k) * duration / basis.hbar()).sin_cos();
            Complex64::new(c, -s)
        })
        .collect();
    for r in 0..n {
        for c in 0..n {
            if r != c {
                out.rho[(r, c)] *= phases[r] * phases[c].conj();
            }
        }
    }
    out
}

/// Free flight with continuous damping at rate `gamma0`, both exact.
fn drift(rho: &DensityMatrix, basis: &BoxBasis, duration: f64, gamma0: f64) -> DensityMatrix {
    dephase_step(&free_step(rho, basis, duration), basis, gamma0 * duration)
}

/// `U rho U^dagger`.
pub fn kick_conjugate(rho: &DensityMatrix, u: &KickOperator) -> DensityMatrix {
    let m = u.matrix();
    DensityMatrix {
        rho: m.mul(&rho.rho).mul(&m.adjoint()),
    }
}

/// Advances one period from just after a measurement instant `t'` to the next.
pub fn kicked_cycle(
    rho: &DensityMatrix,
    u: &KickOperator,
    basis: &BoxBasis,
    schedule: &DephasingSchedule,
) -> Result<DensityMatrix> {
    schedule.validate()?;
    if rho.dim() != u.dim() || rho.dim() != basis.n_max() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: rho.dim(),
        });
    }
    let gamma0 = schedule.continuous_rate();
    let before = drift(rho, basis, schedule.period - schedule.offset, gamma0);
    let kicked = kick_conjugate(&before, u);
    let after = drift(&kicked, basis, schedule.offset, gamma0);
    Ok(match schedule.mode {
        DephasingMode::Kicked { epsilon0 } => dephase_step(&after, basis, epsilon0),
        DephasingMode::Continuous { .. } => after,
    })
}

/// Carries a state sampled at `t'` forward to just before the next kick.
pub fn advance_to_kick(
    rho: &DensityMatrix,
    basis: &BoxBasis,
    schedule: &DephasingSchedule,
) -> DensityMatrix {
    drift(
        rho,
        basis,
        schedule.period - schedule.offset,
        schedule.continuous_rate(),
    )
}

/// Per-cycle diagnostics of a dephasing run.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub cycle: usize,
    pub trace: f64,
    pub energy: f64,
    pub purity: f64,
    pub max_off_diagonal: f64,
    pub hermiticity_defect: f64,
    pub populations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DephasingRun {
    /// Entry 0 describes the initial state.
    pub records: Vec<CycleRecord>,
    pub final_state: DensityMatrix,
}

fn record(cycle: usize, rho: &DensityMatrix, basis: &BoxBasis) -> CycleRecord {
    CycleRecord {
        cycle,
        trace: rho.trace(),
        energy: rho.energy(basis),
        purity: rho.purity(),
        max_off_diagonal: rho.max_off_diagonal(),
        hermiticity_defect: rho.hermiticity_defect(),
        populations: rho.populations(),
    }
}

/// Runs `cycles` periods from `rho0`, capped at [`MAX_DENSITY_DIM`] levels.
pub fn run_dephasing(
    rho0: &DensityMatrix,
    u: &KickOperator,
    basis: &BoxBasis,
    schedule: &DephasingSchedule,
    cycles: usize,
) -> Result<DephasingRun> {
    if basis.n_max() > MAX_DENSITY_DIM {
        return Err(Error::InvalidParameter {
            name: "n_max",
            reason: "density-matrix runs are limited to 256 levels",
        });
    }
    let mut records = Vec::with_capacity(cycles + 1);
    records.push(record(0, rho0, basis));
    let mut rho = rho0.clone();
    for cycle in 1..=cycles {
        rho = kicked_cycle(&rho, u, basis, schedule)?;
        records.push(record(cycle, &rho, basis));
    }
    Ok(DephasingRun {
        records,
        final_state: rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(dim: usize, seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = CMatrix::from_fn(dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let mut rho = a.mul(&a.adjoint());
        let tr = rho.trace().re;
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] /= tr;
            }
        }
        DensityMatrix::from_matrix(rho)
    }

    #[test]
    fn zero_strength_and_zero_duration_are_identities() {
        let b = BoxBasis::with_dim(6).unwrap();
        let rho = random_state(6, 1);
        assert_eq!(dephase_step(&rho, &b, 0.0), rho);
        assert_eq!(free_step(&rho, &b, 0.0), rho);
    }

    #[test]
    fn infinite_strength_projects() {
        let b = BoxBasis::with_dim(6).unwrap();
        let rho = random_state(6, 2);
        let out = dephase_step(&rho, &b, f64::INFINITY);
        assert_eq!(out.populations(), rho.populations());
        assert_eq!(out.max_off_diagonal(), 0.0);
    }

    #[test]
    fn dephasing_matches_elementwise_closed_form() {
        let b = BoxBasis::with_dim(8).unwrap();
        let rho = random_state(8, 3);
        let out = dephase_step(&rho, &b, 0.01);
        for n in 1..=8usize {
            for m in 1..=8usize {
                let g = (n * n) as f64 - (m * m) as f64;
                let want = rho.matrix()[(n - 1, m - 1)] * (-0.005 * g * g).exp();
                assert!((out.matrix()[(n - 1, m - 1)] - want).norm() < 1e-15);
            }
        }
        assert!(out.hermiticity_defect() < 1e-15);
    }

    #[test]
    fn two_level_free_phase() {
        let b = BoxBasis::with_dim(2).unwrap();
        let half = Complex64::new(0.5, 0.0);
        let rho = DensityMatrix::from_matrix(CMatrix::from_row_major(2, vec![half; 4]).unwrap());
        let t = 0.37;
        let out = free_step(&rho, &b, t);
        let (s, c) = (-(b.energy(2) - b.energy(1)) * t).sin_cos();
        let want = Complex64::new(c, s) * 0.5;
        assert!((out.matrix()[(1, 0)] - want).norm() < 1e-15);
        assert_eq!(
            free_step(&DensityMatrix::from_populations(&[0.3, 0.7]), &b, 5.0).populations(),
            vec![0.3, 0.7]
        );
    }

    #[test]
    fn schedule_validation() {
        let k = DephasingMode::Kicked { epsilon0: 1.0 };
        assert!(DephasingSchedule::new(k, 1.0, 0.0).is_err());
        assert!(DephasingSchedule::new(k, 1.0, 1.0).is_err());
        assert!(DephasingSchedule::new(k, -1.0, 0.5).is_err());
        assert!(DephasingSchedule::new(
            DephasingMode::Kicked {
                epsilon0: f64::INFINITY
            },
            1.0,
            0.5
        )
        .is_ok());
        assert!(
            DephasingSchedule::new(DephasingMode::Continuous { gamma0: -1.0 }, 1.0, 0.5).is_err()
        );
        let c =
            DephasingSchedule::new(DephasingMode::Continuous { gamma0: 3.0 }, 2.0, 0.5).unwrap();
        assert_eq!(
            c.equivalent_kicked().mode,
            DephasingMode::Kicked { epsilon0: 6.0 }
        );
    }
}
