//! Connection and curvature of the Gaussian manifold.
//!
//! Index conventions: components are stored zero-based with coordinate 0 the
//! location `mu` and coordinate 1 the scale `sigma`. The Riemann tensor follows
//!
//! ```text
//! R^l_ijk = d_j G^l_ki - d_k G^l_ji + G^l_jm G^m_ki - G^l_km G^m_ji
//! ```
//!
//! with Ricci `R_ij = R^k_ikj`, scalar `R = R_ij g^ij` and, in two dimensions,
//! sectional curvature `K = R_1212 / det g = R / 2`.
//!
//! Closed forms for both metrizations live beside a generic finite-difference
//! pipeline (metric -> Christoffel -> Riemann) that works for any metric field.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::families::ParameterPoint;
use crate::metrics::{inverse_metric, MetricTensor2, Metrization};

const N: usize = 2;

/// Christoffel symbols of the second kind, `gamma[k][i][j] = G^k_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Christoffel2 {
    pub gamma: [[[f64; 2]; 2]; 2],
}

impl Christoffel2 {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[k][i][j]
    }

    /// Largest `|G^k_ij - G^k_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..N {
            worst = worst.max((self.gamma[k][0][1] - self.gamma[k][1][0]).abs());
        }
        worst
    }
}

/// Riemann tensor with one raised index, `r[l][i][j][k] = R^l_ijk`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Riemann {
    pub r: [[[[f64; 2]; 2]; 2]; 2],
}

impl Riemann {
    pub fn get(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        self.r[l][i][j][k]
    }

    /// Ricci contraction `R_ij = R^k_ikj`.
    pub fn ricci(&self) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..N).map(|k| self.r[k][i][k][j]).sum();
            }
        }
        out
    }

    /// Fully covariant components `R_lijk = g_lm R^m_ijk`.
    pub fn lowered(&self, g: &MetricTensor2) -> [[[[f64; 2]; 2]; 2]; 2] {
        let mut out = [[[[0.0; 2]; 2]; 2]; 2];
        for l in 0..N {
            for i in 0..N {
                for j in 0..N {
                    for k in 0..N {
                        out[l][i][j][k] = (0..N).map(|m| g.component(l, m) * self.r[m][i][j][k]).sum();
                    }
                }
            }
        }
        out
    }

    /// Largest `|R^l_ijk + R^l_ikj|`; zero for a well-formed tensor.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for l in 0..N {
            for i in 0..N {
                for j in 0..N {
                    for k in 0..N {
                        worst = worst.max((self.r[l][i][j][k] + self.r[l][i][k][j]).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Closed-form Christoffel symbols.
pub fn christoffel(metrization: Metrization, theta: &ParameterPoint) -> Christoffel2 {
    let s = theta.sigma();
    let (g0_01, g1_00, g1_11) = match metrization {
        Metrization::FisherRao => (-1.0 / s, 1.0 / (2.0 * s), -1.0 / s),
        Metrization::AlphaOrder => (-3.0 / (2.0 * s), 1.0 / s, -3.0 / (2.0 * s)),
    };
    let mut gamma = [[[0.0; 2]; 2]; 2];
    gamma[0][0][1] = g0_01;
    gamma[0][1][0] = g0_01;
    gamma[1][0][0] = g1_00;
    gamma[1][1][1] = g1_11;
    Christoffel2 { gamma }
}

/// Closed-form Riemann tensor `R^l_ijk`.
pub fn riemann(metrization: Metrization, theta: &ParameterPoint) -> Riemann {
    let s2 = theta.sigma() * theta.sigma();
    // (R^1_212, R^2_112) in one-based labels; the partners follow by antisymmetry.
    let (a, b) = match metrization {
        Metrization::FisherRao => (-1.0 / s2, 1.0 / (2.0 * s2)),
        Metrization::AlphaOrder => (-3.0 / (2.0 * s2), 1.0 / s2),
    };
    let mut r = [[[[0.0; 2]; 2]; 2]; 2];
    r[0][1][0][1] = a;
    r[0][1][1][0] = -a;
    r[1][0][0][1] = b;
    r[1][0][1][0] = -b;
    Riemann { r }
}

/// Closed-form Ricci tensor (diagonal for both metrizations).
pub fn ricci(metrization: Metrization, theta: &ParameterPoint) -> [[f64; 2]; 2] {
    let s2 = theta.sigma() * theta.sigma();
    let (r11, r22) = match metrization {
        Metrization::FisherRao => (-1.0 / (2.0 * s2), -1.0 / s2),
        Metrization::AlphaOrder => (-1.0 / s2, -3.0 / (2.0 * s2)),
    };
    [[r11, 0.0], [0.0, r22]]
}

/// Closed-form scalar curvature: `-1` for Fisher-Rao, `-8 sqrt(pi) sigma` for alpha-order.
pub fn scalar_curvature(metrization: Metrization, theta: &ParameterPoint) -> f64 {
    match metrization {
        Metrization::FisherRao => -1.0,
        Metrization::AlphaOrder => -8.0 * PI.sqrt() * theta.sigma(),
    }
}

/// Sectional curvature `R_1212 / det g`.
pub fn sectional_curvature(metrization: Metrization, theta: &ParameterPoint) -> f64 {
    let g = metrization.metric(theta);
    sectional_from(&riemann(metrization, theta), &g)
}

/// `R_1212 / det g` for arbitrary components.
pub fn sectional_from(riemann: &Riemann, g: &MetricTensor2) -> f64 {
    riemann.lowered(g)[0][1][0][1] / g.det()
}

/// `R = R_ij g^ij`.
pub fn scalar_from(ricci: &[[f64; 2]; 2], g: &MetricTensor2) -> Result<f64> {
    let gi = inverse_metric(g)?;
    let mut acc = 0.0;
    for (i, row) in ricci.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            acc += v * gi.component(i, j);
        }
    }
    Ok(acc)
}

/// Weyl anisotropy components
/// `W_lijk = g_lm (R^m_ijk - (R_ik d^m_j - R_ij d^m_k) / (N - 1))`.
pub fn weyl_tensor(riemann: &Riemann, ricci: &[[f64; 2]; 2], g: &MetricTensor2) -> [[[[f64; 2]; 2]; 2]; 2] {
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut mixed = [[[[0.0; 2]; 2]; 2]; 2];
    for l in 0..N {
        for i in 0..N {
            for j in 0..N {
                for k in 0..N {
                    mixed[l][i][j][k] = riemann.r[l][i][j][k]
                        - (ricci[i][k] * delta(l, j) - ricci[i][j] * delta(l, k)) / (N as f64 - 1.0);
                }
            }
        }
    }
    let mut out = [[[[0.0; 2]; 2]; 2]; 2];
    for l in 0..N {
        for i in 0..N {
            for j in 0..N {
                for k in 0..N {
                    out[l][i][j][k] = (0..N).map(|m| g.component(l, m) * mixed[m][i][j][k]).sum();
                }
            }
        }
    }
    out
}

fn max_abs4(t: &[[[[f64; 2]; 2]; 2]; 2]) -> f64 {
    t.iter()
        .flatten()
        .flatten()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Largest absolute covariant Weyl anisotropy component.
pub fn weyl_anisotropy(metrization: Metrization, theta: &ParameterPoint) -> f64 {
    let g = metrization.metric(theta);
    max_abs4(&weyl_tensor(
        &riemann(metrization, theta),
        &ricci(metrization, theta),
        &g,
    ))
}

/// Everything curvature-related at one point.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    pub metrization: Metrization,
    pub at: ParameterPoint,
    pub christoffel: Christoffel2,
    pub riemann: Riemann,
    pub ricci: [[f64; 2]; 2],
    pub scalar: f64,
    pub sectional: f64,
    pub weyl_max_abs: f64,
}

pub fn curvature_report(metrization: Metrization, theta: &ParameterPoint) -> CurvatureReport {
    CurvatureReport {
        metrization,
        at: *theta,
        christoffel: christoffel(metrization, theta),
        riemann: riemann(metrization, theta),
        ricci: ricci(metrization, theta),
        scalar: scalar_curvature(metrization, theta),
        sectional: sectional_curvature(metrization, theta),
        weyl_max_abs: weyl_anisotropy(metrization, theta),
    }
}

/// Outcome of the maximal-symmetry tests over a set of probe points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryVerdict {
    pub isotropic: bool,
    pub homogeneous: bool,
    pub maximally_symmetric: bool,
    /// `(check, worst residual over all probes)`.
    pub evidence: Vec<(String, f64)>,
}

pub const SYMMETRY_TOLERANCE: f64 = 1e-9;
pub const MIN_PROBES: usize = 5;

/// Classifies the manifold with the default tolerance [`SYMMETRY_TOLERANCE`].
pub fn classify_symmetry(metrization: Metrization, probes: &[ParameterPoint]) -> Result<SymmetryVerdict> {
    classify_symmetry_with_tolerance(metrization, probes, SYMMETRY_TOLERANCE)
}

/// Isotropy requires, at every probe,
///
/// * `R_ij = (R/N) g_ij`,
/// * `R_lijk = R/(N(N-1)) (g_ik g_jl - g_ij g_kl)` (constant-curvature form in
///   the sign convention of [`riemann`]),
/// * vanishing Weyl anisotropy;
///
/// homogeneity requires the scalar curvature to agree across probes. Ricci and
/// Riemann residuals are relative to the largest component at that probe.
pub fn classify_symmetry_with_tolerance(
    metrization: Metrization,
    probes: &[ParameterPoint],
    tolerance: f64,
) -> Result<SymmetryVerdict> {
    if probes.len() < MIN_PROBES {
        return domain(format!(
            "symmetry classification needs at least {MIN_PROBES} probe points, got {}",
            probes.len()
        ));
    }
    let nf = N as f64;
    let mut ricci_res: f64 = 0.0;
    let mut riemann_res: f64 = 0.0;
    let mut weyl_res: f64 = 0.0;
    for theta in probes {
        let g = metrization.metric(theta);
        let rc = ricci(metrization, theta);
        let rm = riemann(metrization, theta);
        let scalar = scalar_curvature(metrization, theta);

        let ricci_scale = rc
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        for i in 0..N {
            for j in 0..N {
                let d = rc[i][j] - scalar / nf * g.component(i, j);
                ricci_res = ricci_res.max(d.abs() / ricci_scale);
            }
        }

        let low = rm.lowered(&g);
        let riem_scale = max_abs4(&low).max(f64::MIN_POSITIVE);
        let c = scalar / (nf * (nf - 1.0));
        for l in 0..N {
            for i in 0..N {
                for j in 0..N {
                    for k in 0..N {
                        let model = c * (g.component(i, k) * g.component(j, l) - g.component(i, j) * g.component(k, l));
                        riemann_res = riemann_res.max((low[l][i][j][k] - model).abs() / riem_scale);
                    }
                }
            }
        }

        weyl_res = weyl_res.max(max_abs4(&weyl_tensor(&rm, &rc, &g)));
    }
    let reference = scalar_curvature(metrization, &probes[0]);
    let homog_res = probes
        .iter()
        .map(|p| (scalar_curvature(metrization, p) - reference).abs() / reference.abs().max(1.0))
        .fold(0.0f64, f64::max);

    let isotropic = ricci_res <= tolerance && riemann_res <= tolerance && weyl_res <= tolerance;
    let homogeneous = homog_res <= tolerance;
    Ok(SymmetryVerdict {
        isotropic,
        homogeneous,
        maximally_symmetric: isotropic && homogeneous,
        evidence: vec![
            ("ricci_isotropy".into(), ricci_res),
            ("riemann_isotropy".into(), riemann_res),
            ("weyl_anisotropy".into(), weyl_res),
            ("scalar_homogeneity".into(), homog_res),
        ],
    })
}

/// Finite-difference route from an arbitrary metric field to curvature.
pub mod numeric {
    use super::*;

    /// Default central-difference spacing at `theta`.
    pub fn default_step(theta: &ParameterPoint) -> f64 {
        1e-5 * theta.sigma().max(1.0)
    }

    fn shifted(theta: &ParameterPoint, axis: usize, h: f64) -> Result<ParameterPoint> {
        if axis == 0 {
            theta.offset(h, 0.0)
        } else {
            theta.offset(0.0, h)
        }
    }

    /// `G^k_ij = 1/2 g^km (d_i g_mj + d_j g_im - d_m g_ij)` with metric
    /// derivatives taken by central differences.
    pub fn christoffel_from_metric<F>(metric: F, theta: &ParameterPoint, step: f64) -> Result<Christoffel2>
    where
        F: Fn(&ParameterPoint) -> Result<MetricTensor2>,
    {
        // dg[m][i][j] = d_m g_ij
        let mut dg = [[[0.0; 2]; 2]; 2];
        for (m, slot) in dg.iter_mut().enumerate() {
            let plus = metric(&shifted(theta, m, step)?)?;
            let minus = metric(&shifted(theta, m, -step)?)?;
            for i in 0..N {
                for j in 0..N {
                    slot[i][j] = (plus.component(i, j) - minus.component(i, j)) / (2.0 * step);
                }
            }
        }
        let gi = inverse_metric(&metric(theta)?)?;
        let mut gamma = [[[0.0; 2]; 2]; 2];
        for k in 0..N {
            for i in 0..N {
                for j in 0..N {
                    gamma[k][i][j] = 0.5
                        * (0..N)
                            .map(|m| gi.component(k, m) * (dg[i][m][j] + dg[j][i][m] - dg[m][i][j]))
                            .sum::<f64>();
                }
            }
        }
        Ok(Christoffel2 { gamma })
    }

    /// Riemann tensor from a Christoffel field, differentiating by central differences.
    pub fn riemann_from_christoffel<F>(christoffel: F, theta: &ParameterPoint, step: f64) -> Result<Riemann>
    where
        F: Fn(&ParameterPoint) -> Result<Christoffel2>,
    {
        // dgam[a][l][i][j] = d_a G^l_ij
        let mut dgam = [[[[0.0; 2]; 2]; 2]; 2];
        for (a, slot) in dgam.iter_mut().enumerate() {
            let plus = christoffel(&shifted(theta, a, step)?)?;
            let minus = christoffel(&shifted(theta, a, -step)?)?;
            for l in 0..N {
                for i in 0..N {
                    for j in 0..N {
                        slot[l][i][j] = (plus.gamma[l][i][j] - minus.gamma[l][i][j]) / (2.0 * step);
                    }
                }
            }
        }
        let gam = christoffel(theta)?.gamma;
        let mut r = [[[[0.0; 2]; 2]; 2]; 2];
        for l in 0..N {
            for i in 0..N {
                for j in 0..N {
                    for k in 0..N {
                        let quad: f64 = (0..N)
                            .map(|m| gam[l][j][m] * gam[m][k][i] - gam[l][k][m] * gam[m][j][i])
                            .sum();
                        r[l][i][j][k] = dgam[j][l][k][i] - dgam[k][l][j][i] + quad;
                    }
                }
            }
        }
        Ok(Riemann { r })
    }

    /// Whole pipeline from the closed-form metric, each stage by finite differences.
    pub fn riemann_from_metric(metrization: Metrization, theta: &ParameterPoint) -> Result<Riemann> {
        let metric = move |p: &ParameterPoint| Ok(metrization.metric(p));
        let outer = default_step(theta);
        riemann_from_christoffel(|p| christoffel_from_metric(metric, p, default_step(p)), theta, outer)
    }
}
