//! The univariate Gaussian family `p(x | mu, sigma)`.
//!
//! Everything here is a pure function of its arguments. The microspace is the
//! real line; numerical integration over it is truncated according to a
//! [`MicrospaceGrid`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Smallest scale accepted as a valid macrostate.
pub const SIGMA_MIN: f64 = 1e-12;

/// A macrostate `(mu, sigma)` on the Gaussian manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint {
    mu: f64,
    sigma: f64,
}

impl ParameterPoint {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !sigma.is_finite() {
            return domain(format!("parameters must be finite, got ({mu}, {sigma})"));
        }
        if sigma <= SIGMA_MIN {
            return domain(format!("sigma must be positive, got {sigma}"));
        }
        Ok(Self { mu, sigma })
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        self.mu
    }

    #[inline]
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// The same point shifted by `(d_mu, d_sigma)`.
    pub fn offset(&self, d_mu: f64, d_sigma: f64) -> Result<Self> {
        Self::new(self.mu + d_mu, self.sigma + d_sigma)
    }
}

/// Truncation and resolution used when integrating over the microspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicrospaceGrid {
    half_width_sigmas: f64,
    nodes: usize,
}

impl MicrospaceGrid {
    pub const MIN_HALF_WIDTH: f64 = 8.0;
    pub const MIN_NODES: usize = 64;

    pub fn new(half_width_sigmas: f64, nodes: usize) -> Result<Self> {
        if !(half_width_sigmas >= Self::MIN_HALF_WIDTH) || !half_width_sigmas.is_finite() {
            return domain(format!(
                "half width must be at least {} sigma, got {half_width_sigmas}",
                Self::MIN_HALF_WIDTH
            ));
        }
        if nodes < Self::MIN_NODES {
            return domain(format!(
                "quadrature needs at least {} nodes, got {nodes}",
                Self::MIN_NODES
            ));
        }
        Ok(Self {
            half_width_sigmas,
            nodes,
        })
    }

    pub fn half_width_sigmas(&self) -> f64 {
        self.half_width_sigmas
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Same truncation, twice the nodes.
    pub fn refined(&self) -> Self {
        Self {
            half_width_sigmas: self.half_width_sigmas,
            nodes: self.nodes * 2,
        }
    }

    /// Integration interval around `theta`.
    pub fn interval(&self, theta: &ParameterPoint) -> (f64, f64) {
        let w = self.half_width_sigmas * theta.sigma();
        (theta.mu() - w, theta.mu() + w)
    }

    /// Interval covering both densities, used for two-point integrands.
    pub fn interval_pair(&self, a: &ParameterPoint, b: &ParameterPoint) -> (f64, f64) {
        let s = a.sigma().max(b.sigma());
        let w = self.half_width_sigmas * s;
        (a.mu().min(b.mu()) - w, a.mu().max(b.mu()) + w)
    }
}

impl Default for MicrospaceGrid {
    fn default() -> Self {
        Self {
            half_width_sigmas: 10.0,
            nodes: 256,
        }
    }
}

/// Gaussian density `exp(-(x-mu)^2 / (2 sigma^2)) / sqrt(2 pi sigma^2)`.
#[inline]
pub fn density(theta: &ParameterPoint, x: f64) -> f64 {
    let s = theta.sigma();
    let z = (x - theta.mu()) / s;
    (-0.5 * z * z).exp() / (2.0 * PI * s * s).sqrt()
}

/// Partial derivatives `(dp/dmu, dp/dsigma)` of the density at `x`.
#[inline]
pub fn density_gradient(theta: &ParameterPoint, x: f64) -> (f64, f64) {
    let p = density(theta, x);
    let s = theta.sigma();
    let d = x - theta.mu();
    let dp_dmu = p * d / (s * s);
    let dp_dsigma = p * (d * d / (s * s * s) - 1.0 / s);
    (dp_dmu, dp_dsigma)
}

/// Relative entropy `-int p(x|theta') log[p(x|theta') / p(x|theta)] dx`,
/// i.e. the negative Kullback-Leibler divergence of `theta'` from `theta`.
///
/// Always `<= 0`, vanishing only when the two points coincide.
pub fn relative_entropy(theta_prime: &ParameterPoint, theta: &ParameterPoint) -> f64 {
    let (m1, s1) = (theta_prime.mu(), theta_prime.sigma());
    let (m2, s2) = (theta.mu(), theta.sigma());
    let r = s1 / s2;
    let dm = (m1 - m2) / s2;
    // KL = -ln r + (r^2 - 1)/2 + dm^2/2, written to stay accurate for r near 1.
    let kl = 0.5 * (r * r - 1.0) - r.ln() + 0.5 * dm * dm;
    -kl
}
