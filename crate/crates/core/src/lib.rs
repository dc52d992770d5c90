//! Information geometry of the univariate Gaussian family.
//!
//! The crate builds the two-dimensional statistical manifold of Gaussian
//! densities `p(x | mu, sigma)` under two metrizations, the Fisher-Rao
//! information metric and the alpha-order (alpha = 2) entropy metric, and
//! provides:
//!
//! * [`families`]: the density, its parameter gradient and the relative entropy;
//! * [`metrics`]: metric tensors in closed form and by quadrature of a
//!   phi-entropy Hessian;
//! * [`geometry`]: Christoffel symbols, Riemann/Ricci/scalar/sectional
//!   curvature, the Weyl anisotropy tensor and a symmetry classifier;
//! * [`geodesics`]: geodesic ODE integration and closed-form geodesics;
//! * [`ige`]: information geometric complexity/entropy along geodesics and
//!   asymptotic growth classification;
//! * [`verify`] and [`report`]: the check suite and tabular export used by the
//!   `infogeo` binary.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod families;
pub mod geodesics;
pub mod geometry;
pub mod ige;
pub mod metrics;
pub mod quadrature;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use families::{MicrospaceGrid, ParameterPoint};
pub use metrics::{MetricKind, MetricTensor2, Metrization};
