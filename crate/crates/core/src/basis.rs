//! The truncated eigenbasis of the infinite square well on `[0, pi]`, the
//! family of kick potentials and the Fourier analysis of `(V')^2` that feeds
//! the energy-growth formulas.
//!
//! Kick strengths are stored as `k / hbar`, so [`KickPotential::phase`]
//! returns the dimensionless `V(x) / hbar` and every [`DerivSquaredSpectrum`]
//! is expressed in units of `hbar^2`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quadrature::{well_points, Quadrature};

/// Eigenbasis of the well truncated to levels `1..=n_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxBasis {
    n_max: usize,
    hbar: f64,
}

impl BoxBasis {
    pub fn new(n_max: usize, hbar: f64) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParameter {
                name: "n_max",
                reason: "must be at least 2",
            });
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter {
                name: "hbar",
                reason: "must be positive",
            });
        }
        Ok(Self { n_max, hbar })
    }

    /// Basis with `hbar = 1`.
    pub fn with_dim(n_max: usize) -> Result<Self> {
        Self::new(n_max, 1.0)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `E_n = hbar^2 n^2 / 2` for the 1-based level `n`.
    pub fn energy(&self, n: usize) -> f64 {
        let n = n as f64;
        0.5 * self.hbar * self.hbar * n * n
    }

    /// Energies of levels `1..=n_max`, indexed from zero.
    pub fn energies(&self) -> Vec<f64> {
        (1..=self.n_max).map(|n| self.energy(n)).collect()
    }

    /// `sqrt(2/pi) sin(n x)`.
    pub fn eigenfunction(&self, n: usize, x: f64) -> Result<f64> {
        self.check_level(n)?;
        if !(0.0..=PI).contains(&x) {
            return Err(Error::PositionOutOfRange(x));
        }
        Ok((2.0 / PI).sqrt() * (n as f64 * x).sin())
    }

    pub(crate) fn check_level(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.n_max {
            return Err(Error::LevelOutOfRange {
                n,
                n_max: self.n_max,
            });
        }
        Ok(())
    }

    /// The quadrature rule sized for this basis.
    pub fn quadrature(&self) -> Quadrature {
        Quadrature::well(well_points(self.n_max))
    }
}

/// Kick potential, with strengths given in units of `hbar`.
#[derive(Debug, Clone, PartialEq)]
pub enum KickPotential {
    /// `k cos(x + alpha)`.
    CosShifted { k: f64, alpha: f64 },
    /// `k cos(2 r x)`, `r` the ratio of well width to kick wavelength.
    CosRatio { k: f64, r: f64 },
    /// `c0 + sum_j cos_coeffs[j-1] cos(j x) + sin_coeffs[j-1] sin(j x)`.
    Fourier {
        c0: f64,
        cos_coeffs: Vec<f64>,
        sin_coeffs: Vec<f64>,
    },
}

impl KickPotential {
    /// `V == 0`.
    pub fn null() -> Self {
        KickPotential::Fourier {
            c0: 0.0,
            cos_coeffs: Vec::new(),
            sin_coeffs: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match self {
            KickPotential::CosShifted { k, alpha } => k.is_finite() && alpha.is_finite(),
            KickPotential::CosRatio { k, r } => {
                if r.is_nan() || *r <= 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "r",
                        reason: "must be positive",
                    });
                }
                k.is_finite() && r.is_finite()
            }
            KickPotential::Fourier {
                c0,
                cos_coeffs,
                sin_coeffs,
            } => c0.is_finite() && cos_coeffs.iter().chain(sin_coeffs).all(|c| c.is_finite()),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "potential",
                reason: "coefficients must be finite",
            })
        }
    }

    /// `V(x) / hbar`.
    pub fn phase(&self, x: f64) -> f64 {
        match self {
            KickPotential::CosShifted { k, alpha } => k * (x + alpha).cos(),
            KickPotential::CosRatio { k, r } => k * (2.0 * r * x).cos(),
            KickPotential::Fourier {
                c0,
                cos_coeffs,
                sin_coeffs,
            } => {
                let mut v = *c0;
                for (j, c) in cos_coeffs.iter().enumerate() {
                    v += c * ((j + 1) as f64 * x).cos();
                }
                for (j, s) in sin_coeffs.iter().enumerate() {
                    v += s * ((j + 1) as f64 * x).sin();
                }
                v
            }
        }
    }

    /// `V'(x) / hbar`.
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            KickPotential::CosShifted { k, alpha } => -k * (x + alpha).sin(),
            KickPotential::CosRatio { k, r } => -2.0 * k * r * (2.0 * r * x).sin(),
            KickPotential::Fourier {
                cos_coeffs,
                sin_coeffs,
                ..
            } => {
                let mut d = 0.0;
                for (j, c) in cos_coeffs.iter().enumerate() {
                    let j = (j + 1) as f64;
                    d -= c * j * (j * x).sin();
                }
                for (j, s) in sin_coeffs.iter().enumerate() {
                    let j = (j + 1) as f64;
                    d += s * j * (j * x).cos();
                }
                d
            }
        }
    }

    /// True when `V` is constant, so the kick is a global phase.
    pub fn is_flat(&self) -> bool {
        match self {
            KickPotential::CosShifted { k, .. } | KickPotential::CosRatio { k, .. } => *k == 0.0,
            KickPotential::Fourier {
                cos_coeffs,
                sin_coeffs,
                ..
            } => cos_coeffs.iter().chain(sin_coeffs).all(|&c| c == 0.0),
        }
    }

    /// Largest `|V / hbar|` bound implied by the coefficients.
    pub fn strength_bound(&self) -> f64 {
        match self {
            KickPotential::CosShifted { k, .. } | KickPotential::CosRatio { k, .. } => k.abs(),
            KickPotential::Fourier {
                c0,
                cos_coeffs,
                sin_coeffs,
            } => {
                c0.abs()
                    + cos_coeffs
                        .iter()
                        .chain(sin_coeffs)
                        .map(|c| c.abs())
                        .sum::<f64>()
            }
        }
    }
}

/// Projections of `(V'/hbar)^2` onto `1`, `cos(2 m x)` and `sin(2 m x)` over the well.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivSquaredSpectrum {
    /// `(1/pi) int (V')^2 dx`.
    pub a0: f64,
    /// `c_m = int (V')^2 cos(2 m x) dx`, entry `m - 1`.
    pub cos_proj: Vec<f64>,
    /// `s_m = int (V')^2 sin(2 m x) dx`, entry `m - 1`.
    pub sin_proj: Vec<f64>,
}

impl DerivSquaredSpectrum {
    pub fn m_max(&self) -> usize {
        self.cos_proj.len()
    }

    /// `c_m` for 1-based `m`, zero past the computed range.
    pub fn cos_projection(&self, m: usize) -> f64 {
        m.checked_sub(1)
            .and_then(|i| self.cos_proj.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    /// Coefficient of `sin(2 m x)` in the Fourier series of `(V')^2`.
    pub fn sin_coefficient(&self, m: usize) -> f64 {
        m.checked_sub(1)
            .and_then(|i| self.sin_proj.get(i))
            .map_or(0.0, |s| 2.0 * s / PI)
    }

    /// `(1 / 2 pi) int (V')^2 dx = a0 / 2`, the asymptotic diffusion rate.
    pub fn mean_rate(&self) -> f64 {
        0.5 * self.a0
    }
}

/// Projects `(V')^2` onto the first `m_max` harmonics with a composite
/// Gauss-Legendre rule of `quad_points` nodes.
pub fn deriv_squared_spectrum(
    pot: &KickPotential,
    m_max: usize,
    quad_points: usize,
) -> Result<DerivSquaredSpectrum> {
    if m_max < 1 {
        return Err(Error::InvalidParameter {
            name: "m_max",
            reason: "must be at least 1",
        });
    }
    if quad_points < 32 * m_max {
        return Err(Error::InvalidParameter {
            name: "quad_points",
            reason: "need at least 32 nodes per harmonic",
        });
    }
    pot.validate()?;
    let q = Quadrature::well(quad_points);
    let weighted: Vec<(f64, f64)> = q
        .nodes()
        .iter()
        .zip(q.weights())
        .map(|(&x, &w)| {
            let d = pot.derivative(x);
            (x, w * d * d)
        })
        .collect();
    let a0 = weighted.iter().map(|(_, w)| w).sum::<f64>() / PI;
    let mut cos_proj = alloc::vec![0.0; m_max];
    let mut sin_proj = alloc::vec![0.0; m_max];
    for (m, (c, s)) in cos_proj.iter_mut().zip(sin_proj.iter_mut()).enumerate() {
        let freq = 2.0 * (m + 1) as f64;
        for &(x, w) in &weighted {
            let (sn, cs) = (freq * x).sin_cos();
            *c += w * cs;
            *s += w * sn;
        }
    }
    Ok(DerivSquaredSpectrum {
        a0,
        cos_proj,
        sin_proj,
    })
}

/// Spectrum with the default sizing for `basis`: `m_max = n_max` and
/// `max(4096, 32 n_max)` nodes.
pub fn default_spectrum(basis: &BoxBasis, pot: &KickPotential) -> Result<DerivSquaredSpectrum> {
    deriv_squared_spectrum(pot, basis.n_max(), well_points(basis.n_max()))
}

/// Outcome of the constant-rate test on a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantRate {
    pub constant: bool,
    /// 1-based index of the largest `|c_m|`.
    pub worst_index: usize,
    pub worst_value: f64,
    /// `a0 / 2` when `constant` holds.
    pub rate: Option<f64>,
}

/// The rate is constant when every cosine projection of `(V')^2` vanishes.
pub fn constant_rate_check(spec: &DerivSquaredSpectrum, tol: f64) -> ConstantRate {
    let (worst_index, worst_value) = spec
        .cos_proj
        .iter()
        .enumerate()
        .map(|(i, c)| (i + 1, c.abs()))
        .fold(
            (1, 0.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    let constant = worst_value < tol;
    ConstantRate {
        constant,
        worst_index,
        worst_value,
        rate: constant.then(|| spec.mean_rate()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_4;

    #[test]
    fn eigenfunction_values() {
        let b = BoxBasis::with_dim(8).unwrap();
        let amp = (2.0 / PI).sqrt();
        assert!((b.eigenfunction(1, PI / 2.0).unwrap() - amp).abs() < 1e-15);
        assert!(b.eigenfunction(2, PI / 2.0).unwrap().abs() < 1e-15);
        assert!((b.eigenfunction(3, PI / 6.0).unwrap() - amp).abs() < 1e-15);
    }

    #[test]
    fn eigenfunction_domain_errors() {
        let b = BoxBasis::with_dim(4).unwrap();
        assert_eq!(
            b.eigenfunction(0, 1.0),
            Err(Error::LevelOutOfRange { n: 0, n_max: 4 })
        );
        assert_eq!(
            b.eigenfunction(5, 1.0),
            Err(Error::LevelOutOfRange { n: 5, n_max: 4 })
        );
        assert!(matches!(
            b.eigenfunction(1, -0.1),
            Err(Error::PositionOutOfRange(_))
        ));
        assert!(matches!(
            b.eigenfunction(1, 3.2),
            Err(Error::PositionOutOfRange(_))
        ));
    }

    #[test]
    fn basis_rejects_bad_parameters() {
        assert!(BoxBasis::new(1, 1.0).is_err());
        assert!(BoxBasis::new(4, 0.0).is_err());
        assert!(BoxBasis::new(4, f64::NAN).is_err());
    }

    #[test]
    fn energies_scale_with_hbar() {
        let b = BoxBasis::new(4, 0.5).unwrap();
        assert_eq!(b.energy(2), 0.5);
        let e = b.energies();
        assert!(e.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn orthonormal_under_the_rule() {
        let b = BoxBasis::with_dim(48).unwrap();
        let q = b.quadrature();
        for n in 1..=48 {
            for m in n..=48 {
                let ip = q
                    .integrate(|x| b.eigenfunction(n, x).unwrap() * b.eigenfunction(m, x).unwrap());
                let want = if n == m { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-10, "<{n}|{m}> = {ip}");
            }
        }
    }

    #[test]
    fn shifted_cosine_at_quarter_phase() {
        let k = 1.7;
        let s = deriv_squared_spectrum(
            &KickPotential::CosShifted {
                k,
                alpha: FRAC_PI_4,
            },
            16,
            4096,
        )
        .unwrap();
        assert!((s.a0 - k * k / 2.0).abs() < 1e-10);
        assert!((s.sin_coefficient(1) - k * k / 2.0).abs() < 1e-10);
        assert!(s.cos_proj.iter().all(|c| c.abs() < 1e-10));
        assert!(s.sin_proj[1..].iter().all(|c| c.abs() < 1e-10));
    }

    #[test]
    fn shifted_cosine_at_zero_phase() {
        let k = 2.0;
        let s =
            deriv_squared_spectrum(&KickPotential::CosShifted { k, alpha: 0.0 }, 8, 4096).unwrap();
        assert!((s.cos_proj[0] + PI * k * k / 4.0).abs() < 1e-10);
        // correction term of the energy recursion from the ground state
        assert!((-s.cos_proj[0] / (2.0 * PI) - k * k / 8.0).abs() < 1e-12);
        let check = constant_rate_check(&s, 1e-8);
        assert!(!check.constant);
        assert_eq!(check.worst_index, 1);
    }

    #[test]
    fn constant_potential_has_empty_spectrum() {
        let pot = KickPotential::Fourier {
            c0: 3.0,
            cos_coeffs: Vec::new(),
            sin_coeffs: Vec::new(),
        };
        let s = deriv_squared_spectrum(&pot, 8, 4096).unwrap();
        assert_eq!(s.a0, 0.0);
        assert!(s.cos_proj.iter().chain(&s.sin_proj).all(|&c| c == 0.0));
    }

    #[test]
    fn constant_rate_cases() {
        let k = 1.3;
        let s = deriv_squared_spectrum(
            &KickPotential::CosShifted {
                k,
                alpha: FRAC_PI_4,
            },
            32,
            4096,
        )
        .unwrap();
        let c = constant_rate_check(&s, 1e-9);
        assert!(c.constant);
        assert!((c.rate.unwrap() - k * k / 4.0).abs() < 1e-12);

        let r = 0.75;
        let s = deriv_squared_spectrum(&KickPotential::CosRatio { k, r }, 32, 4096).unwrap();
        let c = constant_rate_check(&s, 1e-9);
        assert!(c.constant);
        assert!((c.rate.unwrap() - k * k * r * r).abs() < 1e-10);
    }

    #[test]
    fn cos_ratio_mean_rate_closed_form() {
        let k = 1.0;
        for r in [0.3, 0.75, PI / 4.0, PI / 2.0, PI] {
            let s = deriv_squared_spectrum(&KickPotential::CosRatio { k, r }, 4, 4096).unwrap();
            let want = k * k * r * r - k * k * r * (4.0 * r * PI).sin() / (4.0 * PI);
            assert!((s.mean_rate() - want).abs() < 1e-9, "r = {r}");
        }
    }

    #[test]
    fn fourier_derivative_matches_finite_difference() {
        let pot = KickPotential::Fourier {
            c0: 0.2,
            cos_coeffs: alloc::vec![0.5, -0.3],
            sin_coeffs: alloc::vec![0.1, 0.0, 0.7],
        };
        let h = 1e-6;
        for x in [0.1, 1.0, 2.5] {
            let fd = (pot.phase(x + h) - pot.phase(x - h)) / (2.0 * h);
            assert!((fd - pot.derivative(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn spectrum_preconditions() {
        let pot = KickPotential::CosShifted { k: 1.0, alpha: 0.0 };
        assert!(deriv_squared_spectrum(&pot, 0, 4096).is_err());
        assert!(deriv_squared_spectrum(&pot, 256, 4096).is_err());
        assert!(KickPotential::CosRatio { k: 1.0, r: 0.0 }
            .validate()
            .is_err());
    }
}
