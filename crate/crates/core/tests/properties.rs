use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use kickwell_core::evolve::fitted_rate;
use kickwell_core::quadrature::Quadrature;
use kickwell_core::{
    basis_state, default_spectrum, entanglement_series, kick_operator_quadrature, run_trajectory,
    step, BoxBasis, EvolveOptions, KickPotential, TransitionMatrix,
};
use proptest::prelude::*;

fn z_for(pot: &KickPotential, n_max: usize) -> TransitionMatrix {
    let basis = BoxBasis::with_dim(n_max).unwrap();
    TransitionMatrix::from_kick(&kick_operator_quadrature(&basis, pot).unwrap())
}

fn potential() -> impl Strategy<Value = KickPotential> {
    prop_oneof![
        (0.0..3.0f64, -PI..PI).prop_map(|(k, alpha)| KickPotential::CosShifted { k, alpha }),
        (0.0..2.0f64, 0.1..3.5f64).prop_map(|(k, r)| KickPotential::CosRatio { k, r }),
    ]
}

fn sub_simplex(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, dim).prop_map(|v| {
        let s: f64 = v.iter().sum::<f64>().max(1e-300);
        v.iter().map(|x| x / s).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn z_keeps_probabilities_in_the_simplex(pot in potential(), p in sub_simplex(48)) {
        let z = z_for(&pot, 48);
        let q = step(&z, &p).unwrap();
        prop_assert!(q.iter().all(|&v| v >= 0.0));
        prop_assert!(q.iter().sum::<f64>() <= p.iter().sum::<f64>() + 1e-12);
    }

    #[test]
    fn constant_offset_changes_nothing_measurable(k in 0.1..2.0f64, alpha in -PI..PI, c in -5.0..5.0f64) {
        let basis = BoxBasis::with_dim(32).unwrap();
        let a = KickPotential::Fourier { c0: 0.0, cos_coeffs: vec![0.0, k], sin_coeffs: vec![] };
        let b = KickPotential::Fourier { c0: c, cos_coeffs: vec![0.0, k], sin_coeffs: vec![] };
        let (sa, sb) = (default_spectrum(&basis, &a).unwrap(), default_spectrum(&basis, &b).unwrap());
        prop_assert_eq!(&sa, &sb);
        let (za, zb) = (z_for(&a, 32), z_for(&b, 32));
        for (x, y) in za.as_slice().iter().zip(zb.as_slice()) {
            prop_assert!((x - y).abs() < 1e-13);
        }
        // a shifted cosine has the same (V')^2 mean for every alpha
        let s = default_spectrum(&basis, &KickPotential::CosShifted { k, alpha }).unwrap();
        prop_assert!((s.mean_rate() - k * k / 4.0).abs() < 1e-12 * k * k);
    }

    #[test]
    fn entropy_never_decreases(k in 0.0..1.5f64, r in 0.1..2.0f64) {
        let pot = KickPotential::CosRatio { k, r };
        let basis = BoxBasis::with_dim(128).unwrap();
        let z = z_for(&pot, 128);
        let p0 = basis_state(128, 1).unwrap();
        let traj = run_trajectory(&z, &basis, None, &p0, 15, &EvolveOptions::default()).unwrap();
        let s = entanglement_series(&traj).unwrap();
        prop_assert!(s.e_r.iter().all(|&e| e >= -1e-9));
    }

    #[test]
    fn eigenfunctions_are_orthonormal(n in 1usize..40, m in 1usize..40) {
        let basis = BoxBasis::with_dim(40).unwrap();
        let q = Quadrature::well(4096);
        let ip = q.integrate(|x| basis.eigenfunction(n, x).unwrap() * basis.eigenfunction(m, x).unwrap());
        let expected = if n == m { 1.0 } else { 0.0 };
        prop_assert!((ip - expected).abs() < 1e-13);
    }
}

#[test]
fn closed_form_rate_grows_with_r() {
    let basis = BoxBasis::with_dim(64).unwrap();
    let rates: Vec<f64> = (1..=10)
        .map(|i| {
            let pot = KickPotential::CosRatio {
                k: 1.0,
                r: 0.3 * i as f64,
            };
            default_spectrum(&basis, &pot).unwrap().mean_rate()
        })
        .collect();
    for (i, w) in rates.windows(2).enumerate() {
        assert!(
            w[1] > w[0],
            "rate fell between grid points {i} and {}",
            i + 1
        );
    }
    // against k^2 r^2 - k^2 r sin(4 r pi) / (4 pi)
    for (i, &rate) in rates.iter().enumerate() {
        let r = 0.3 * (i + 1) as f64;
        let exact = r * r - r * (4.0 * r * PI).sin() / (4.0 * PI);
        assert!((rate - exact).abs() < 1e-12, "r = {r}: {rate} vs {exact}");
    }
}

#[test]
fn first_kick_gain_matches_spectrum() {
    let n_max = 512;
    let basis = BoxBasis::with_dim(n_max).unwrap();
    let pot = KickPotential::CosRatio {
        k: 1.0,
        r: FRAC_PI_2,
    };
    let z = z_for(&pot, n_max);
    let spec = default_spectrum(&basis, &pot).unwrap();
    for m in [1usize, 2, 5, 10] {
        let gain: f64 = (1..=n_max)
            .map(|n| basis.energy(n) * z.get(n - 1, m - 1))
            .sum::<f64>()
            - basis.energy(m);
        let predicted = spec.mean_rate() - spec.cos_projection(m) / (2.0 * PI);
        assert!(
            (gain - predicted).abs() < 1e-6,
            "level {m}: {gain} vs {predicted}"
        );
    }
}

#[test]
fn slope_approaches_quarter_k_squared_for_every_alpha() {
    let n_max = 256;
    let basis = BoxBasis::with_dim(n_max).unwrap();
    let p0 = basis_state(n_max, 1).unwrap();
    for alpha in [0.0, 1.0, 2.5] {
        let z = z_for(&KickPotential::CosShifted { k: 1.0, alpha }, n_max);
        let traj = run_trajectory(&z, &basis, None, &p0, 2000, &EvolveOptions::default()).unwrap();
        let short = (fitted_rate(&traj.energies[..=200], 0.5) - 0.25).abs();
        let long = (fitted_rate(&traj.energies, 0.5) - 0.25).abs();
        assert!(long < short, "alpha = {alpha}: {long} vs {short}");
    }
    // at alpha = pi/4 every c_m vanishes and the rate is exact from the start
    let z = z_for(
        &KickPotential::CosShifted {
            k: 1.0,
            alpha: FRAC_PI_4,
        },
        n_max,
    );
    let traj = run_trajectory(&z, &basis, None, &p0, 50, &EvolveOptions::default()).unwrap();
    assert!((fitted_rate(&traj.energies, 1.0) - 0.25).abs() < 1e-5);
}

#[test]
fn ground_decay_orders_by_strength() {
    let n_max = 256;
    let basis = BoxBasis::with_dim(n_max).unwrap();
    let p0 = basis_state(n_max, 1).unwrap();
    let ground = |pot: KickPotential| {
        let z = z_for(&pot, n_max);
        run_trajectory(&z, &basis, None, &p0, 50, &EvolveOptions::default())
            .unwrap()
            .level_series(1)
    };
    let by_k: Vec<Vec<f64>> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&k| ground(KickPotential::CosShifted { k, alpha: 1.0 }))
        .collect();
    let by_r: Vec<Vec<f64>> = [FRAC_PI_4, FRAC_PI_2, PI]
        .iter()
        .map(|&r| ground(KickPotential::CosRatio { k: 1.0, r }))
        .collect();
    for curves in [&by_k, &by_r] {
        let triples = curves[0].iter().zip(&curves[1]).zip(&curves[2]);
        for (n, ((a, b), c)) in triples.enumerate().skip(1) {
            assert!(a > b && b > c, "N = {n}");
        }
    }
    for w in by_k[0].windows(2) {
        assert!(w[1] < w[0]);
    }
}

#[test]
fn entropy_curves_order_by_r_and_partial_entanglement_peaks_first() {
    let n_max = 256;
    let basis = BoxBasis::with_dim(n_max).unwrap();
    let p0 = basis_state(n_max, 1).unwrap();
    let series: Vec<_> = [FRAC_PI_4, FRAC_PI_2, PI]
        .iter()
        .map(|&r| {
            let z = z_for(&KickPotential::CosRatio { k: 1.0, r }, n_max);
            let traj =
                run_trajectory(&z, &basis, None, &p0, 50, &EvolveOptions::default()).unwrap();
            entanglement_series(&traj).unwrap()
        })
        .collect();
    for (n, ((a, b), c)) in series[0]
        .s_v
        .iter()
        .zip(&series[1].s_v)
        .zip(&series[2].s_v)
        .enumerate()
        .skip(1)
    {
        assert!(a < b && b < c, "N = {n}");
    }
    for s in &series {
        assert!(s.telescoping_residual < 1e-12);
        for n in 2..=50 {
            assert!(s.partial(n) < s.partial(n - 1), "E_r rose at N = {n}");
        }
    }
}

#[test]
fn certified_band_defect_shrinks_as_the_basis_doubles() {
    for pot in [
        KickPotential::CosRatio {
            k: 1.0,
            r: FRAC_PI_4,
        },
        KickPotential::CosRatio {
            k: 1.0,
            r: FRAC_PI_2,
        },
        KickPotential::CosRatio { k: 1.0, r: PI },
    ] {
        let band_defect = |n: usize| {
            kick_operator_quadrature(&BoxBasis::with_dim(n).unwrap(), &pot)
                .unwrap()
                .block_defect(n / 2)
        };
        let (d64, d128, d256) = (band_defect(64), band_defect(128), band_defect(256));
        assert!(
            d128 < d64 && d256 < d128,
            "{pot:?}: {d64:e}, {d128:e}, {d256:e}"
        );
    }
}
