//! Composite Gauss-Legendre quadrature.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Points per panel of the composite rule.
pub const PANEL_ORDER: usize = 16;

/// Minimum total node count used for integrals over the well.
pub const MIN_WELL_POINTS: usize = 4096;

/// Node count for a basis of `n_max` levels: `max(4096, 32 * n_max)`.
pub fn well_points(n_max: usize) -> usize {
    MIN_WELL_POINTS.max(32 * n_max)
}

/// Gauss-Legendre nodes and weights of the given order on [-1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be positive");
    let mut nodes = alloc::vec![0.0; order];
    let mut weights = alloc::vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        // Tricomi initial guess, refined by Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(order, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if order == 0 {
        return (1.0, 0.0);
    }
    let n = order as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A fixed composite Gauss-Legendre rule on a closed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    /// Composite rule on `[a, b]` with at least `points` nodes, split into
    /// equal panels of `PANEL_ORDER` points each.
    pub fn composite(a: f64, b: f64, points: usize) -> Self {
        let panels = points.div_ceil(PANEL_ORDER).max(1);
        let (ref_nodes, ref_weights) = gauss_legendre(PANEL_ORDER);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
        let mut weights = Vec::with_capacity(panels * PANEL_ORDER);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in ref_nodes.iter().zip(&ref_weights) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        Self { nodes, weights }
    }

    /// The rule used for every integral over the well `[0, pi]`.
    pub fn well(points: usize) -> Self {
        Self::composite(0.0, PI, points)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(PANEL_ORDER);
        // exact up to degree 2n - 1
        for deg in 0..(2 * PANEL_ORDER) {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let want = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            assert!((got - want).abs() < 1e-14, "degree {deg}: {got} vs {want}");
        }
    }

    #[test]
    fn odd_order_has_center_node() {
        let (x, w) = gauss_legendre(5);
        assert_eq!(x[2], 0.0);
        assert!((w[2] - 128.0 / 225.0).abs() < 1e-15);
    }

    #[test]
    fn composite_integrates_oscillatory_trig() {
        let q = Quadrature::well(well_points(64));
        assert_eq!(q.len(), 4096);
        let got = q.integrate(|x| (37.0 * x).sin() * (37.0 * x).sin());
        assert!((got - PI / 2.0).abs() < 1e-13);
        let got = q.integrate(|x| (3.0 * x).sin());
        assert!((got - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn point_count_rounds_up_to_whole_panels() {
        assert_eq!(Quadrature::well(17).len(), 32);
        assert_eq!(well_points(256), 8192);
    }
}
