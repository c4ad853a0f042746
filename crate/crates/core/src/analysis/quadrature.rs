use std::f64::consts::{FRAC_PI_2, PI};

use crate::{Error, Result};

/// Gauss–Legendre nodes and weights mapped onto `(0, pi/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// `n`-point rule; nodes from Newton iteration on `P_n`.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("quadrature needs at least one node"));
        }
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            // Tricomi's initial guess for the i-th root.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // [-1, 1] -> (0, pi/2)
            nodes.push(FRAC_PI_2 * (x + 1.0) / 2.0);
            weights.push(w * FRAC_PI_2 / 2.0);
        }
        Ok(QuadratureRule { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

impl Default for QuadratureRule {
    /// The 64-node rule used by the BER bounds.
    fn default() -> Self {
        QuadratureRule::gauss_legendre(64).expect("64 > 0")
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_positive_and_sum_to_interval() {
        for n in [1, 2, 5, 64, 128] {
            let q = QuadratureRule::gauss_legendre(n).unwrap();
            assert!(q.weights().iter().all(|&w| w > 0.0));
            assert!(q.nodes().iter().all(|&x| x > 0.0 && x < FRAC_PI_2));
            assert_abs_diff_eq!(q.weights().iter().sum::<f64>(), FRAC_PI_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_for_polynomials() {
        // n nodes integrate degree 2n-1 exactly.
        let q = QuadratureRule::gauss_legendre(4).unwrap();
        let b = FRAC_PI_2;
        assert_abs_diff_eq!(q.integrate(|x| x.powi(7)), b.powi(8) / 8.0, epsilon = 1e-12);
    }

    #[test]
    fn smooth_integrands() {
        let q = QuadratureRule::default();
        assert_abs_diff_eq!(q.integrate(f64::sin), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(q.integrate(|t| t.sin().powi(2)), PI / 4.0, epsilon = 1e-14);
        // Craig's form of Q(x) at x = 1: (1/pi) int exp(-1/(2 sin^2)) = 0.158655...
        let qv = q.integrate(|t| (-1.0 / (2.0 * t.sin().powi(2))).exp()) / PI;
        assert_abs_diff_eq!(qv, 0.5 * libm::erfc(1.0 / 2f64.sqrt()), epsilon = 1e-13);
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(QuadratureRule::gauss_legendre(0).is_err());
    }
}
