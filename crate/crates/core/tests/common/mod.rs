#![allow(dead_code)]

use kickwell_core::{CMatrix, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Unitary from Gram-Schmidt on a seeded random complex matrix.
pub fn random_unitary(d: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    for j in 0..d {
        for i in 0..j {
            let proj: Complex64 = (0..d).map(|r| cols[i][r].conj() * cols[j][r]).sum();
            let (done, rest) = cols.split_at_mut(j);
            for (a, v) in rest[0].iter_mut().zip(&done[i]) {
                *a -= proj * v;
            }
        }
        let norm = cols[j].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut cols[j] {
            *a /= norm;
        }
    }
    CMatrix::from_fn(d, |r, c| cols[c][r])
}
