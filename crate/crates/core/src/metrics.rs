//! Metric tensors on the Gaussian manifold.
//!
//! Two metrizations have closed forms for the Gaussian family:
//!
//! * Fisher-Rao: `g = (1/sigma^2) diag(1, 2)`;
//! * alpha-order (alpha = 2): `g = (1/sigma^3) diag(1/(4 sqrt(pi)), 3/(8 sqrt(pi)))`.
//!
//! Any convex `phi` yields a metric `g_ij = int phi''(p) d_i p d_j p dx`,
//! computed here by Gauss-Legendre quadrature. With `phi''(p) = 1/p` this is
//! the Fisher-Rao metric; with `phi''(p) = 2` it is twice the alpha-order metric.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::families::{density, density_gradient, relative_entropy, MicrospaceGrid, ParameterPoint};
use crate::quadrature::LegendreRule;

/// The two metrizations with closed-form geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metrization {
    FisherRao,
    AlphaOrder,
}

impl Metrization {
    pub const ALL: [Metrization; 2] = [Metrization::FisherRao, Metrization::AlphaOrder];

    /// Short label used in tables and on the command line.
    pub fn label(&self) -> &'static str {
        match self {
            Metrization::FisherRao => "fr",
            Metrization::AlphaOrder => "alpha",
        }
    }

    /// Closed-form metric at `theta`.
    pub fn metric(&self, theta: &ParameterPoint) -> MetricTensor2 {
        match self {
            Metrization::FisherRao => fisher_rao_metric(theta),
            Metrization::AlphaOrder => alpha_metric(theta),
        }
    }
}

impl fmt::Display for Metrization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Metrization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fr" | "fisher-rao" | "fisherrao" => Ok(Metrization::FisherRao),
            "alpha" | "alpha-order" => Ok(Metrization::AlphaOrder),
            other => domain(format!("unknown metrization '{other}'")),
        }
    }
}

/// Where a metric tensor came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricKind {
    FisherRao,
    AlphaOrder,
    PhiGeneric,
}

impl From<Metrization> for MetricKind {
    fn from(m: Metrization) -> Self {
        match m {
            Metrization::FisherRao => MetricKind::FisherRao,
            Metrization::AlphaOrder => MetricKind::AlphaOrder,
        }
    }
}

/// Symmetric positive-definite 2x2 metric at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTensor2 {
    g11: f64,
    g12: f64,
    g22: f64,
    kind: MetricKind,
    at: ParameterPoint,
}

impl MetricTensor2 {
    pub fn new(g11: f64, g12: f64, g22: f64, kind: MetricKind, at: ParameterPoint) -> Result<Self> {
        let det = g11 * g22 - g12 * g12;
        if !(g11 > 0.0 && det > 0.0) || !det.is_finite() {
            return domain(format!(
                "metric is not positive definite: g11={g11}, g12={g12}, g22={g22}"
            ));
        }
        Ok(Self {
            g11,
            g12,
            g22,
            kind,
            at,
        })
    }

    pub fn g11(&self) -> f64 {
        self.g11
    }

    pub fn g12(&self) -> f64 {
        self.g12
    }

    pub fn g22(&self) -> f64 {
        self.g22
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn at(&self) -> ParameterPoint {
        self.at
    }

    /// Component `g_ij` with zero-based indices.
    pub fn component(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => self.g11,
            (1, 1) => self.g22,
            _ => self.g12,
        }
    }

    pub fn as_array(&self) -> [[f64; 2]; 2] {
        [[self.g11, self.g12], [self.g12, self.g22]]
    }

    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    /// `g_ij u^i v^j`.
    pub fn inner(&self, u: [f64; 2], v: [f64; 2]) -> f64 {
        self.g11 * u[0] * v[0] + self.g12 * (u[0] * v[1] + u[1] * v[0]) + self.g22 * u[1] * v[1]
    }

    /// Every component multiplied by `c` (must be positive).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(c * self.g11, c * self.g12, c * self.g22, self.kind, self.at)
    }
}

type SecondDerivative = dyn Fn(f64) -> f64 + Send + Sync;

/// The second derivative `phi''(p)` of a convex entropy generator.
#[derive(Clone)]
pub struct PhiKernel {
    second_derivative: Arc<SecondDerivative>,
    label: String,
}

impl fmt::Debug for PhiKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhiKernel").field("label", &self.label).finish()
    }
}

impl PhiKernel {
    /// Wraps a user-supplied `phi''`. Convexity is probed on a grid of `(0, 1]`.
    pub fn new<F>(label: impl Into<String>, second_derivative: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let label = label.into();
        for k in 1..=100 {
            let p = k as f64 / 100.0;
            let v = second_derivative(p);
            if !(v > 0.0) || !v.is_finite() {
                return domain(format!("kernel '{label}' is not convex at p={p}: phi''={v}"));
            }
        }
        Ok(Self {
            second_derivative: Arc::new(second_derivative),
            label,
        })
    }

    /// `phi_1(p) = p log p`, `phi_1'' = 1/p`.
    pub fn shannon() -> Self {
        Self {
            second_derivative: Arc::new(|p| 1.0 / p),
            label: "phi_1".into(),
        }
    }

    /// `phi_2(p) = p^2 - p`, `phi_2'' = 2`.
    pub fn quadratic() -> Self {
        Self {
            second_derivative: Arc::new(|_| 2.0),
            label: "phi_2".into(),
        }
    }

    /// `phi_alpha(p) = (p^alpha - p)/(alpha - 1)`, or `p log p` at `alpha = 1`.
    pub fn alpha_order(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return domain(format!("alpha must be positive, got {alpha}"));
        }
        if alpha == 1.0 {
            return Ok(Self::shannon());
        }
        Self::new(format!("phi_{alpha}"), move |p: f64| alpha * p.powf(alpha - 2.0))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, p: f64) -> f64 {
        (self.second_derivative)(p)
    }
}

/// Relative change under node doubling above which quadrature is rejected.
pub const QUADRATURE_TOLERANCE: f64 = 1e-9;

fn phi_components(kernel: &PhiKernel, theta: &ParameterPoint, grid: &MicrospaceGrid) -> Result<[f64; 3]> {
    let rule = LegendreRule::new(grid.nodes())?;
    let (a, b) = grid.interval(theta);
    let mut bad = None;
    let mut acc = [0.0; 3];
    for (slot, (i, j)) in [(0usize, 0usize), (0, 1), (1, 1)].into_iter().enumerate() {
        acc[slot] = rule.integrate(a, b, |x| {
            let p = density(theta, x);
            let w = kernel.eval(p);
            if !w.is_finite() || w < 0.0 {
                bad = Some((x, w));
                return 0.0;
            }
            let d = density_gradient(theta, x);
            let d = [d.0, d.1];
            w * d[i] * d[j]
        });
    }
    if let Some((x, w)) = bad {
        return Err(Error::Numeric(format!(
            "kernel '{}' produced {w} at x={x}",
            kernel.label()
        )));
    }
    Ok(acc)
}

/// Metric `g_ij = int phi''(p) (dp/dtheta^i)(dp/dtheta^j) dx` by quadrature.
///
/// The integral is evaluated with `grid.nodes()` and with twice as many nodes;
/// a relative change above [`QUADRATURE_TOLERANCE`] is reported as a numeric
/// error. The finer estimate is returned.
pub fn phi_metric(kernel: &PhiKernel, theta: &ParameterPoint, grid: &MicrospaceGrid) -> Result<MetricTensor2> {
    let coarse = phi_components(kernel, theta, grid)?;
    let fine = phi_components(kernel, theta, &grid.refined())?;
    let scale = fine[0].abs().max(fine[2].abs());
    for (c, f) in coarse.iter().zip(fine.iter()) {
        if (c - f).abs() > QUADRATURE_TOLERANCE * scale {
            return Err(Error::Numeric(format!(
                "quadrature did not converge at ({}, {}): {c} vs {f} after doubling nodes",
                theta.mu(),
                theta.sigma()
            )));
        }
    }
    MetricTensor2::new(fine[0], fine[1], fine[2], MetricKind::PhiGeneric, *theta)
        .map_err(|e| Error::Numeric(e.to_string()))
}

/// Fisher-Rao metric `(1/sigma^2) diag(1, 2)`.
pub fn fisher_rao_metric(theta: &ParameterPoint) -> MetricTensor2 {
    let s2 = theta.sigma() * theta.sigma();
    MetricTensor2 {
        g11: 1.0 / s2,
        g12: 0.0,
        g22: 2.0 / s2,
        kind: MetricKind::FisherRao,
        at: *theta,
    }
}

/// Alpha-order metric `(1/sigma^3) diag(1/(4 sqrt(pi)), 3/(8 sqrt(pi)))`.
pub fn alpha_metric(theta: &ParameterPoint) -> MetricTensor2 {
    let s3 = theta.sigma().powi(3);
    let sqrt_pi = PI.sqrt();
    MetricTensor2 {
        g11: 1.0 / (4.0 * sqrt_pi * s3),
        g12: 0.0,
        g22: 3.0 / (8.0 * sqrt_pi * s3),
        kind: MetricKind::AlphaOrder,
        at: *theta,
    }
}

pub const KL_STEP_MIN: f64 = 1e-6;
pub const KL_STEP_MAX: f64 = 1e-2;

/// Fisher-Rao metric as the negative Hessian of the relative entropy in its
/// first argument at coincidence, by central differences with spacing `step`.
pub fn fisher_from_kl_hessian(theta: &ParameterPoint, step: f64) -> Result<MetricTensor2> {
    if !(KL_STEP_MIN..=KL_STEP_MAX).contains(&step) {
        return domain(format!(
            "finite-difference step must lie in [{KL_STEP_MIN}, {KL_STEP_MAX}], got {step}"
        ));
    }
    if theta.sigma() <= 2.0 * step {
        return domain(format!("step {step} too large for sigma {}", theta.sigma()));
    }
    let f = |dm: f64, ds: f64| -> Result<f64> { Ok(-relative_entropy(&theta.offset(dm, ds)?, theta)) };
    let h = step;
    let f0 = f(0.0, 0.0)?;
    let g11 = (f(h, 0.0)? - 2.0 * f0 + f(-h, 0.0)?) / (h * h);
    let g22 = (f(0.0, h)? - 2.0 * f0 + f(0.0, -h)?) / (h * h);
    let g12 = (f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / (4.0 * h * h);
    MetricTensor2::new(g11, g12, g22, MetricKind::FisherRao, *theta).map_err(|e| Error::Numeric(e.to_string()))
}

/// Contravariant components `g^ij`, returned in a [`MetricTensor2`].
pub fn inverse_metric(g: &MetricTensor2) -> Result<MetricTensor2> {
    let det = g.det();
    if !(g.g11 > 0.0 && det > 0.0) {
        return domain("inverse of a non-positive-definite metric");
    }
    MetricTensor2::new(g.g22 / det, -g.g12 / det, g.g11 / det, g.kind, g.at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(mu: f64, sigma: f64) -> ParameterPoint {
        ParameterPoint::new(mu, sigma).unwrap()
    }

    #[test]
    fn closed_forms() {
        let g = fisher_rao_metric(&pt(0.0, 1.0));
        assert_eq!(g.as_array(), [[1.0, 0.0], [0.0, 2.0]]);
        assert_eq!(fisher_rao_metric(&pt(7.0, 1.0)).as_array(), [[1.0, 0.0], [0.0, 2.0]]);
        assert_eq!(fisher_rao_metric(&pt(0.0, 0.5)).as_array(), [[4.0, 0.0], [0.0, 8.0]]);

        let a = alpha_metric(&pt(0.0, 1.0));
        assert_relative_eq!(a.g11(), 0.141_047_395_886_939_07, max_relative = 1e-15);
        assert_relative_eq!(a.g22(), 0.211_571_093_830_408_6, max_relative = 1e-15);
        assert_eq!(alpha_metric(&pt(3.0, 1.0)), MetricTensor2 { at: pt(3.0, 1.0), ..a });
        let a2 = alpha_metric(&pt(0.0, 2.0));
        assert_relative_eq!(a2.g11(), 1.0 / (32.0 * PI.sqrt()), max_relative = 1e-15);
        assert_relative_eq!(a2.g22(), 3.0 / (64.0 * PI.sqrt()), max_relative = 1e-15);
    }

    #[test]
    fn phi_metric_reproduces_closed_forms() {
        let grid = MicrospaceGrid::default();
        let g = phi_metric(&PhiKernel::shannon(), &pt(0.0, 1.0), &grid).unwrap();
        assert!((g.g11() - 1.0).abs() < 1e-8);
        assert!((g.g22() - 2.0).abs() < 1e-8);
        assert!(g.g12().abs() < 1e-8);
        assert_eq!(g.kind(), MetricKind::PhiGeneric);

        let g = phi_metric(&PhiKernel::quadratic(), &pt(0.0, 1.0), &grid).unwrap();
        let sp = PI.sqrt();
        assert!((g.g11() - 2.0 / (4.0 * sp)).abs() < 1e-8);
        assert!((g.g22() - 2.0 * 3.0 / (8.0 * sp)).abs() < 1e-8);

        let g = phi_metric(&PhiKernel::shannon(), &pt(0.0, 2.0), &grid).unwrap();
        assert!((g.g11() - 0.25).abs() < 1e-8);
        assert!((g.g22() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn alpha_order_kernel_family() {
        let k1 = PhiKernel::alpha_order(1.0).unwrap();
        assert_eq!(k1.eval(0.5), 2.0);
        let k2 = PhiKernel::alpha_order(2.0).unwrap();
        assert_eq!(k2.eval(0.3), 2.0);
        assert!(PhiKernel::alpha_order(0.0).is_err());
        assert!(PhiKernel::new("concave", |_| -1.0).is_err());
    }

    #[test]
    fn too_coarse_quadrature_is_a_numeric_error() {
        // A narrow spike kernel cannot be resolved by 64 nodes.
        let spiky = PhiKernel::new("spiky", |p: f64| 1.0 + 1e6 * (-(p - 0.39).powi(2) * 1e6).exp()).unwrap();
        let grid = MicrospaceGrid::new(40.0, 64).unwrap();
        match phi_metric(&spiky, &pt(0.0, 1.0), &grid) {
            Err(Error::Numeric(_)) => {}
            other => panic!("expected numeric error, got {other:?}"),
        }
    }

    #[test]
    fn kl_hessian_route() {
        let g = fisher_from_kl_hessian(&pt(0.0, 1.0), 1e-3).unwrap();
        assert!((g.g11() - 1.0).abs() < 1e-4);
        assert!((g.g22() - 2.0).abs() < 1e-4);
        assert!(g.g12().abs() < 1e-4);
        let g3 = fisher_from_kl_hessian(&pt(0.0, 3.0), 1e-3).unwrap();
        assert!((g3.g11() - 1.0 / 9.0).abs() < 1e-4);
        assert!((g3.g22() - 2.0 / 9.0).abs() < 1e-4);
        let g5 = fisher_from_kl_hessian(&pt(5.0, 1.0), 1e-3).unwrap();
        assert!((g5.g11() - g.g11()).abs() < 1e-9);
        assert!((g5.g22() - g.g22()).abs() < 1e-9);

        assert!(fisher_from_kl_hessian(&pt(0.0, 1.0), 1e-7).is_err());
        assert!(fisher_from_kl_hessian(&pt(0.0, 1.0), 0.1).is_err());
    }

    #[test]
    fn inverse() {
        let gi = inverse_metric(&fisher_rao_metric(&pt(0.0, 1.0))).unwrap();
        assert_eq!(gi.as_array(), [[1.0, 0.0], [0.0, 0.5]]);
        let id = MetricTensor2::new(1.0, 0.0, 1.0, MetricKind::PhiGeneric, pt(0.0, 1.0)).unwrap();
        assert_eq!(inverse_metric(&id).unwrap().as_array(), id.as_array());
        let ai = inverse_metric(&alpha_metric(&pt(0.0, 1.0))).unwrap();
        assert_relative_eq!(ai.g11(), 4.0 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(ai.g22(), 8.0 * PI.sqrt() / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn rejects_indefinite() {
        assert!(MetricTensor2::new(1.0, 2.0, 1.0, MetricKind::PhiGeneric, pt(0.0, 1.0)).is_err());
        assert!(MetricTensor2::new(-1.0, 0.0, -1.0, MetricKind::PhiGeneric, pt(0.0, 1.0)).is_err());
    }
}
