//! Gauss-Legendre quadrature on finite intervals.

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// A Gauss-Legendre rule with a fixed number of nodes.
#[derive(Debug, Clone)]
pub struct LegendreRule {
    rule: GaussLegendre,
    nodes: usize,
}

impl LegendreRule {
    pub fn new(nodes: usize) -> Result<Self> {
        let rule = GaussLegendre::new(nodes)
            .map_err(|_| Error::Domain(format!("quadrature needs at least 2 nodes, got {nodes}")))?;
        Ok(Self { rule, nodes })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.rule.integrate(a, b, f)
    }

    /// Integrates `f` over the rectangle `[a0, b0] x [a1, b1]` as a tensor-product rule.
    pub fn integrate_2d<F: FnMut(f64, f64) -> f64>(&self, (a0, b0): (f64, f64), (a1, b1): (f64, f64), mut f: F) -> f64 {
        self.rule
            .integrate(a0, b0, |x| self.rule.integrate(a1, b1, |y| f(x, y)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = LegendreRule::new(8).unwrap();
        let v = rule.integrate(0.0, 2.0, |x| x.powi(7) - 3.0 * x * x);
        assert!((v - (256.0 / 8.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn tensor_product_rule() {
        let rule = LegendreRule::new(16).unwrap();
        let v = rule.integrate_2d((0.0, 1.0), (1.0, 2.0), |x, y| x * y * y);
        assert!((v - 0.5 * 7.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_degenerate_rule() {
        assert!(LegendreRule::new(1).is_err());
    }
}
