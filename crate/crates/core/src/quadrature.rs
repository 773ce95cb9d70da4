//! Gauss rules mapped to the unit interval.

use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi, GaussLegendre};

use crate::error::{Error, Result};

/// Nodes in `[0, 1]` and weights for `∫_0^1 s^b f(s) ds ≈ Σ w_i f(s_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UnitRule {
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&s, &w)| w * f(s)).sum()
    }

    /// `∫_a^b f` for the plain (Legendre) rule.
    pub fn integrate_on(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = b - a;
        h * self.integrate(|s| f(a + h * s))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn degree(n: usize) -> NonZeroUsize {
    NonZeroUsize::new(n.max(2)).expect("degree is at least 2")
}

/// Gauss-Legendre on `[0, 1]`.
pub fn legendre_unit(n: usize) -> UnitRule {
    let rule = GaussLegendre::new(degree(n));
    let (nodes, weights) = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| ((1.0 + x) / 2.0, w / 2.0))
        .unzip();
    UnitRule { nodes, weights }
}

/// Gauss-Jacobi rule for the weight `s^b` on `[0, 1]`, exact for polynomial
/// `f` of degree `< 2n`. Requires `b > −1`.
///
/// Only even orders are used: the odd-order construction in the backing crate
/// pins the middle node at the centre, which is wrong for asymmetric weights.
pub fn jacobi_unit(n: usize, b: f64) -> Result<UnitRule> {
    let beta = FiniteAboveNegOneF64::new(b).ok_or(Error::Divergent { exponent: -b })?;
    let zero = FiniteAboveNegOneF64::new(0.0).expect("0 is admissible");
    let n = n.max(2).next_multiple_of(2);
    let rule = GaussJacobi::new(degree(n), zero, beta);
    let scale = 0.5f64.powf(b + 1.0);
    let (nodes, weights) = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| ((1.0 + x) / 2.0, w * scale))
        .unzip();
    Ok(UnitRule { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_exact_for_polynomials() {
        let rule = legendre_unit(8);
        for k in 0..16 {
            let q = rule.integrate(|s| s.powi(k));
            assert!((q - 1.0 / f64::from(k + 1)).abs() < 1e-14, "k={k}");
        }
        assert!((rule.integrate_on(1.0, 3.0, |x| x * x) - 26.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn jacobi_exact_for_weighted_monomials() {
        for b in [-0.99, -0.5, 0.3, 1.5, 3.7] {
            let rule = jacobi_unit(8, b).unwrap();
            for k in 0..8 {
                let exact = 1.0 / (b + f64::from(k) + 1.0);
                let q = rule.integrate(|s| s.powi(k));
                assert!(((q - exact) / exact).abs() < 1e-12, "b={b} k={k}");
            }
        }
    }

    #[test]
    fn jacobi_rejects_nonintegrable_weight() {
        assert!(jacobi_unit(8, -1.0).is_err());
    }

    #[test]
    fn odd_orders_are_rounded_up() {
        assert_eq!(jacobi_unit(5, 0.5).unwrap().len(), 6);
    }
}
