//! The kick unitary `<n| exp(-i V(x) / hbar) |m>` in the truncated basis and
//! the transition matrix `Z_nm = |U_nm|^2` it induces.
//!
//! Both construction routes reduce the matrix to a one-dimensional table via
//! `2 sin(nx) sin(mx) = cos((n-m)x) - cos((n+m)x)`, so that
//! `U_nm = G(|n-m|) - G(n+m)` with `G(l) = (1/pi) int cos(l x) e^{-iV/hbar} dx`.
//! Index `i` of every matrix and vector is level `i + 1`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::basis::{BoxBasis, KickPotential};
use crate::bessel::bessel_j_sequence;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Default column-leakage failure threshold.
pub const DEFAULT_LEAK_FAIL: f64 = 1e-4;

/// `2jR` closer than this to an integer `l` takes the resonant branch.
pub const RESONANCE_EXACT: f64 = 1e-12;
/// `2jR` within this distance of `l` (but not exact) is flagged.
pub const RESONANCE_FLAG: f64 = 1e-6;

/// Reseed the cosine rotation with a direct evaluation this often.
const RESEED_EVERY: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KickMethod {
    Quadrature,
    BesselSeries,
}

/// A Bessel-series term whose resonance condition `2jR = |l|` is met only
/// approximately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearResonance {
    pub j: usize,
    pub l: usize,
    pub gap: f64,
}

/// Kick unitary restricted to the truncated basis.
#[derive(Debug, Clone)]
pub struct KickOperator {
    matrix: CMatrix,
    unitarity_defect: f64,
    method: KickMethod,
    near_resonances: Vec<NearResonance>,
}

impl KickOperator {
    /// Wraps an arbitrary matrix as a kick, computing its unitarity defect.
    pub fn from_matrix(matrix: CMatrix, method: KickMethod) -> Self {
        let unitarity_defect = matrix.unitarity_defect_block(matrix.dim());
        Self {
            matrix,
            unitarity_defect,
            method,
            near_resonances: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `max |U^dagger U - I|` over the whole truncated space. Columns near
    /// the truncation edge leak, so this is dominated by the top levels.
    pub fn unitarity_defect(&self) -> f64 {
        self.unitarity_defect
    }

    /// Unitarity defect restricted to the leading `block` levels.
    pub fn block_defect(&self, block: usize) -> f64 {
        self.matrix.unitarity_defect_block(block)
    }

    pub fn method(&self) -> KickMethod {
        self.method
    }

    pub fn near_resonances(&self) -> &[NearResonance] {
        &self.near_resonances
    }

    fn from_table(dim: usize, table: &[Complex64], diag: Complex64, method: KickMethod) -> Self {
        let matrix = CMatrix::from_fn(dim, |r, c| {
            let (n, m) = (r + 1, c + 1);
            let mut v = table[n.abs_diff(m)] - table[n + m];
            if r == c {
                v += diag;
            }
            v
        });
        Self::from_matrix(matrix, method)
    }
}

/// Matrix elements by composite Gauss-Legendre quadrature of
/// `(2/pi) sin(nx) exp(-iV/hbar) sin(mx)`.
pub fn kick_operator_quadrature(basis: &BoxBasis, pot: &KickPotential) -> Result<KickOperator> {
    pot.validate()?;
    let dim = basis.n_max();
    if pot.is_flat() {
        let (s, c) = pot.phase(0.0).sin_cos();
        let mut matrix = CMatrix::zeros(dim);
        for i in 0..dim {
            matrix[(i, i)] = Complex64::new(c, -s);
        }
        return Ok(KickOperator::from_matrix(matrix, KickMethod::Quadrature));
    }
    let q = basis.quadrature();
    let len = 2 * dim + 1;
    let mut table = vec![Complex64::new(0.0, 0.0); len];
    for (&x, &w) in q.nodes().iter().zip(q.weights()) {
        let (sv, cv) = pot.phase(x).sin_cos();
        let f = Complex64::new(cv, -sv) * (w / PI);
        let (s1, c1) = x.sin_cos();
        let (mut s, mut c) = (0.0_f64, 1.0_f64);
        for (l, g) in table.iter_mut().enumerate() {
            if l % RESEED_EVERY == 0 {
                let (ss, cc) = (l as f64 * x).sin_cos();
                s = ss;
                c = cc;
            }
            *g += f * c;
            let c_next = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = c_next;
        }
    }
    Ok(KickOperator::from_table(
        dim,
        &table,
        Complex64::new(0.0, 0.0),
        KickMethod::Quadrature,
    ))
}

/// Matrix elements of a `k cos(2 r x)` kick from its Bessel expansion,
/// truncated after `j_max` terms (see [`crate::bessel::series_cutoff`]).
pub fn kick_operator_bessel(
    basis: &BoxBasis,
    pot: &KickPotential,
    j_max: usize,
) -> Result<KickOperator> {
    let KickPotential::CosRatio { k, r } = *pot else {
        return Err(Error::UnsupportedPotential);
    };
    pot.validate()?;
    let dim = basis.n_max();
    let len = 2 * dim + 1;
    let bessel = bessel_j_sequence(j_max, k);
    let mut table = vec![Complex64::new(0.0, 0.0); len];
    let mut near = Vec::new();
    // (-i)^j cycles through 1, -i, -1, i
    let phases = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
    ];
    for (j, &jj) in bessel.iter().enumerate().skip(1) {
        if jj == 0.0 {
            continue;
        }
        let coef = phases[j % 4] * (jj / PI);
        let beta = 2.0 * j as f64 * r;
        let sin_beta = (beta * PI).sin();
        for (l, g) in table.iter_mut().enumerate() {
            let lf = l as f64;
            let gap = (beta - lf).abs();
            let c = if l > 0 && gap < RESONANCE_EXACT {
                PI
            } else if l > 0 && gap <= RESONANCE_FLAG {
                near.push(NearResonance { j, l, gap });
                // sin(beta pi) = (-1)^l sin((beta - l) pi), evaluated near the root
                let delta = beta - lf;
                2.0 * beta * (delta * PI).sin() / (delta * (beta + lf))
            } else {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                4.0 * sign * j as f64 * r * sin_beta / (beta * beta - lf * lf)
            };
            *g += coef * c;
        }
    }
    let mut op = KickOperator::from_table(
        dim,
        &table,
        Complex64::new(bessel[0], 0.0),
        KickMethod::BesselSeries,
    );
    op.near_resonances = near;
    Ok(op)
}

/// Transition probabilities `Z_nm = |U_nm|^2`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    dim: usize,
    z: Vec<f64>,
    column_leakage: Vec<f64>,
}

impl TransitionMatrix {
    /// Builds `Z` from a kick without any leakage check.
    pub fn from_kick(u: &KickOperator) -> Self {
        let dim = u.dim();
        let z: Vec<f64> = u.matrix().as_slice().iter().map(|v| v.norm_sqr()).collect();
        Self::from_entries(dim, z)
    }

    /// Builds `Z` from row-major entries; panics on a non-square length.
    pub fn from_entries(dim: usize, z: Vec<f64>) -> Self {
        assert_eq!(z.len(), dim * dim, "transition matrix is not square");
        let mut column_leakage = vec![1.0; dim];
        for row in z.chunks_exact(dim) {
            for (leak, v) in column_leakage.iter_mut().zip(row) {
                *leak -= v;
            }
        }
        Self {
            dim,
            z,
            column_leakage,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.z[n * self.dim + m]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.z
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.z[n * self.dim..(n + 1) * self.dim]
    }

    pub fn column(&self, m: usize) -> Vec<f64> {
        (0..self.dim).map(|n| self.get(n, m)).collect()
    }

    /// `1 - sum_n Z_nm` per column.
    pub fn column_leakage(&self) -> &[f64] {
        &self.column_leakage
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.column_leakage.iter().map(|l| 1.0 - l).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.z
            .chunks_exact(self.dim)
            .map(|r| r.iter().sum())
            .collect()
    }

    /// Largest column leakage among the leading `band` levels.
    pub fn max_leakage(&self, band: usize) -> (usize, f64) {
        self.column_leakage[..band.min(self.dim)]
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &l)| {
                if l > best.1 {
                    (i, l)
                } else {
                    best
                }
            })
    }

    /// `Z p`.
    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            });
        }
        Ok(self
            .z
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(p).map(|(z, p)| z * p).sum())
            .collect())
    }
}

/// Number of leading levels whose columns are held to the leakage limit;
/// the remaining upper half of the basis is a guard band.
pub fn certified_band(dim: usize) -> usize {
    (dim / 2).max(1)
}

/// `Z` from a kick, failing if any column in the certified band leaks more
/// than `leak_fail`. Leakage is reported, never renormalised away.
pub fn transition_matrix(u: &KickOperator, leak_fail: f64) -> Result<TransitionMatrix> {
    let z = TransitionMatrix::from_kick(u);
    let (level, leakage) = z.max_leakage(certified_band(z.dim()));
    if leakage > leak_fail {
        return Err(Error::Truncation {
            level: level + 1,
            leakage,
            limit: leak_fail,
        });
    }
    Ok(z)
}
