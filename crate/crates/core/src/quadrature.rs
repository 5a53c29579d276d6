//! Gauss–Legendre quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default number of nodes used by priors.
pub const DEFAULT_NODES: usize = 64;

/// Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Computes the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
        }
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = T::from_usize(n).expect("node count fits");
        let half = T::lit(0.5);
        for i in 0..n.div_ceil(2) {
            let mut z = (T::PI() * (T::from_usize(i).unwrap() + T::lit(0.75)) / (nf + half)).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let step = p / d;
                z = z - step;
                if step.abs() <= T::epsilon() * T::lit(4.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d.is_finite() {
                dp = d;
            }
            let w = T::lit(2.0) / ((T::one() - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Nodes and weights affinely mapped onto `[lower, upper]`.
    pub fn mapped(&self, lower: T, upper: T) -> Vec<(T, T)> {
        let half = (upper - lower) * T::lit(0.5);
        let mid = (upper + lower) * T::lit(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| (mid + half * x, w * half))
            .collect()
    }

    /// `∫_lower^upper f(s) ds`.
    pub fn integrate(&self, lower: T, upper: T, mut f: impl FnMut(T) -> T) -> T {
        self.mapped(lower, upper)
            .into_iter()
            .fold(T::zero(), |acc, (s, w)| acc + w * f(s))
    }
}

fn legendre_with_derivative<T: Real>(n: usize, z: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = z;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for j in 2..=n {
        let jf = T::from_usize(j).unwrap();
        let p2 = ((T::lit(2.0) * jf - T::one()) * z * p1 - (jf - T::one()) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize(n).unwrap();
    (p1, nf * (z * p1 - p0) / (z * z - T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_order_rules() {
        let r = GaussLegendre::<f64>::new(1).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert_relative_eq!(r.weights()[0], 2.0, epsilon = 1e-15);

        let r = GaussLegendre::<f64>::new(2).unwrap();
        assert_relative_eq!(r.nodes()[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(r.weights()[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for n in [3usize, 7, 16, 64] {
            let r = GaussLegendre::<f64>::new(n).unwrap();
            let deg = 2 * n - 1;
            let got = r.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert_relative_eq!(got, 1.0 / (deg as f64 + 1.0), max_relative = 1e-13);
            let sum: f64 = r.weights().iter().sum();
            assert_relative_eq!(sum, 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn trigonometric_integrand_converges() {
        let r = GaussLegendre::<f64>::new(64).unwrap();
        let got = r.integrate(0.0, std::f64::consts::FRAC_PI_2, |s| s * s.cos());
        assert_relative_eq!(got, std::f64::consts::FRAC_PI_2 - 1.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(GaussLegendre::<f64>::new(0).is_err());
    }
}
