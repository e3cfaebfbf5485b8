//! Small dense matrix helpers: complex square matrices, a Jacobi
//! eigenvalue routine for Hermitian input and a pivoted real solver.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Dense complex square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(dim: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major data; `None` if the length is not a square.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Option<Self> {
        (data.len() == dim * dim).then_some(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    /// `max |(U^dagger U - I)_{ab}|` over the leading `block` levels; the inner
    /// sum always runs over every row of the matrix.
    pub fn unitarity_defect_block(&self, block: usize) -> f64 {
        let n = self.dim;
        let block = block.min(n);
        let mut gram = vec![Complex64::new(0.0, 0.0); block * block];
        for r in 0..n {
            let row = &self.data[r * n..r * n + block];
            for (a, ua) in row.iter().enumerate() {
                let ca = ua.conj();
                let acc = &mut gram[a * block..(a + 1) * block];
                for (g, ub) in acc[a..].iter_mut().zip(&row[a..]) {
                    *g += ca * ub;
                }
            }
        }
        let mut worst = 0.0_f64;
        for a in 0..block {
            for b in a..block {
                let mut s = gram[a * block + b];
                if a == b {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

/// Eigenvalues of a real symmetric matrix (row-major), ascending, by cyclic Jacobi.
pub fn symmetric_eigenvalues(dim: usize, mut a: Vec<f64>) -> Vec<f64> {
    assert_eq!(a.len(), dim * dim, "matrix is not square");
    let idx = |r: usize, c: usize| r * dim + c;
    for _sweep in 0..100 {
        let off: f64 = (0..dim)
            .flat_map(|r| (0..dim).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[idx(r, c)] * a[idx(r, c)])
            .sum();
        let scale: f64 = a.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[idx(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..dim).map(|i| a[idx(i, i)]).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    eig
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Works on the real symmetric embedding `[[Re, -Im], [Im, Re]]`, whose
/// spectrum is that of the input with every eigenvalue doubled.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.dim();
    let big = 2 * n;
    let mut a = vec![0.0; big * big];
    for r in 0..n {
        for c in 0..n {
            let z = m[(r, c)];
            a[r * big + c] = z.re;
            a[(r + n) * big + c + n] = z.re;
            a[r * big + c + n] = -z.im;
            a[(r + n) * big + c] = z.im;
        }
    }
    symmetric_eigenvalues(big, a)
        .into_iter()
        .step_by(2)
        .collect()
}

/// Solves `a x = b` for a dense real system by Gaussian elimination with
/// partial pivoting. Returns `None` when a pivot falls below `1e-14` times
/// the largest entry of `a`.
pub fn solve_real(dim: usize, mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    assert_eq!(a.len(), dim * dim, "matrix is not square");
    assert_eq!(b.len(), dim, "right-hand side length differs");
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&i, &j| a[i * dim + col].abs().total_cmp(&a[j * dim + col].abs()))?;
        if a[pivot * dim + col].abs() < 1e-14 * scale {
            return None;
        }
        if pivot != col {
            for k in 0..dim {
                a.swap(col * dim + k, pivot * dim + k);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * dim + col];
        for r in col + 1..dim {
            let f = a[r * dim + col] / diag;
            if f == 0.0 {
                continue;
            }
            for k in col..dim {
                a[r * dim + k] -= f * a[col * dim + k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; dim];
    for r in (0..dim).rev() {
        let tail: f64 = (r + 1..dim).map(|k| a[r * dim + k] * x[k]).sum();
        x[r] = (b[r] - tail) / a[r * dim + r];
    }
    Some(x)
}
