//! Self-check suite run by `infogeo verify`.
//!
//! Each check reduces to a non-negative residual and passes when the residual
//! is strictly below its tolerance (and, for verdict checks, the verdict is the
//! expected one). A tolerance of zero therefore always fails.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::families::{MicrospaceGrid, ParameterPoint};
use crate::geodesics::{
    convergence_rate_ratio, integrate, residual_check, ClosedFormGeodesic, GeodesicInitialConditions, Integrator,
    MeanPhase, ResidualProbe,
};
use crate::geometry::{self, classify_symmetry_with_tolerance, numeric, SYMMETRY_TOLERANCE};
use crate::ige::{self, GrowthClass};
use crate::metrics::{
    alpha_metric, fisher_from_kl_hessian, fisher_rao_metric, phi_metric, MetricTensor2, Metrization, PhiKernel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckGroup {
    Metric,
    Curvature,
    Symmetry,
    Geodesic,
    Ige,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 5] = [
        CheckGroup::Metric,
        CheckGroup::Curvature,
        CheckGroup::Symmetry,
        CheckGroup::Geodesic,
        CheckGroup::Ige,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            CheckGroup::Metric => "metric",
            CheckGroup::Curvature => "curvature",
            CheckGroup::Symmetry => "symmetry",
            CheckGroup::Geodesic => "geodesic",
            CheckGroup::Ige => "ige",
        }
    }
}

impl FromStr for CheckGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckGroup::ALL
            .into_iter()
            .find(|g| g.label() == s)
            .ok_or_else(|| Error::Domain(format!("unknown check group '{s}'")))
    }
}

/// What to run.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub metrizations: Vec<Metrization>,
    /// Empty means every group.
    pub only: Vec<CheckGroup>,
    /// Replaces every per-check tolerance when set.
    pub tolerance: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            metrizations: Metrization::ALL.to_vec(),
            only: Vec::new(),
            tolerance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    /// Extra facts printed with the check, e.g. a symmetry verdict.
    pub detail: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One line per check and a summary line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = write!(
                s,
                "{status} {} residual={:.6e} tolerance={:.1e}",
                c.name, c.residual, c.tolerance
            );
            if !c.detail.is_empty() {
                let _ = write!(s, " {}", c.detail);
            }
            s.push('\n');
        }
        let failed = self.failed().count();
        let _ = writeln!(s, "summary: {} passed, {} failed", self.checks.len() - failed, failed);
        s
    }
}

struct Runner {
    tolerance: Option<f64>,
    checks: Vec<CheckResult>,
}

impl Runner {
    fn record(&mut self, name: String, outcome: Result<(f64, bool, String)>, tolerance: f64) {
        let tolerance = self.tolerance.unwrap_or(tolerance);
        let result = match outcome {
            Ok((residual, verdict_ok, detail)) => CheckResult {
                passed: verdict_ok && residual < tolerance,
                name,
                residual,
                tolerance,
                detail,
            },
            Err(e) => CheckResult {
                name,
                residual: f64::INFINITY,
                tolerance,
                detail: format!("error=\"{e}\""),
                passed: false,
            },
        };
        self.checks.push(result);
    }

    fn residual(&mut self, name: String, residual: Result<f64>, tolerance: f64) {
        self.record(name, residual.map(|r| (r, true, String::new())), tolerance);
    }
}

fn pt(mu: f64, sigma: f64) -> ParameterPoint {
    ParameterPoint::new(mu, sigma).expect("fixed probe points are valid")
}

/// The 5x5 `(mu, sigma)` grid used by the metric checks.
pub fn metric_grid() -> Vec<ParameterPoint> {
    let mus = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let sigmas = [0.5, 1.0, 1.5, 2.0, 3.0];
    mus.iter()
        .flat_map(|&m| sigmas.iter().map(move |&s| pt(m, s)))
        .collect()
}

/// Probe points along `mu = 0` used by the curvature and symmetry checks.
pub fn sigma_probes() -> Vec<ParameterPoint> {
    [0.5, 1.0, 2.0, 4.0, 8.0].iter().map(|&s| pt(0.0, s)).collect()
}

fn max_rel_diff(a: &MetricTensor2, b: &MetricTensor2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let (x, y) = (a.component(i, j), b.component(i, j));
            let scale = y.abs().max(1e-300);
            let d = if y == 0.0 { (x - y).abs() } else { (x - y).abs() / scale };
            worst = worst.max(d);
        }
    }
    worst
}

fn golden_metric(m: Metrization) -> (f64, f64) {
    match m {
        Metrization::FisherRao => (1.0, 2.0),
        Metrization::AlphaOrder => (1.0 / (4.0 * PI.sqrt()), 3.0 / (8.0 * PI.sqrt())),
    }
}

fn metric_checks(r: &mut Runner, m: Metrization) {
    let l = m.label();
    let g = match m {
        Metrization::FisherRao => fisher_rao_metric(&pt(0.0, 1.0)),
        Metrization::AlphaOrder => alpha_metric(&pt(0.0, 1.0)),
    };
    let (e11, e22) = golden_metric(m);
    let golden = (g.g11() - e11).abs().max(g.g12().abs()).max((g.g22() - e22).abs());
    r.residual(format!("metric.{l}.golden"), Ok(golden), 1e-15);

    let grid = MicrospaceGrid::default();
    let (kernel, scale) = match m {
        Metrization::FisherRao => (PhiKernel::shannon(), 1.0),
        Metrization::AlphaOrder => (PhiKernel::quadratic(), 0.5),
    };
    let quad = metric_grid().iter().try_fold(0.0f64, |worst, p| {
        let q = phi_metric(&kernel, p, &grid)?.scaled(scale)?;
        Ok::<_, Error>(worst.max(max_rel_diff(&q, &m.metric(p))))
    });
    r.residual(format!("metric.{l}.phi_quadrature"), quad, 1e-7);

    if m == Metrization::FisherRao {
        let kl = metric_grid().iter().try_fold(0.0f64, |worst, p| {
            let h = fisher_from_kl_hessian(p, 1e-3)?;
            Ok::<_, Error>(worst.max(max_rel_diff(&h, &fisher_rao_metric(p))))
        });
        r.residual("metric.fr.kl_hessian".into(), kl, 1e-4);
    }
}

fn curvature_checks(r: &mut Runner, m: Metrization) {
    let l = m.label();
    let probes = sigma_probes();
    // (scalar, sectional) = (c0 + c1 sigma, (c0 + c1 sigma) / 2)
    let (c0, c1) = match m {
        Metrization::FisherRao => (-1.0, 0.0),
        Metrization::AlphaOrder => (0.0, -8.0 * PI.sqrt()),
    };
    let scalar_law = |s: f64| c0 + c1 * s;
    let sectional_law = |s: f64| 0.5 * (c0 + c1 * s);
    let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
    let scalar = probes
        .iter()
        .map(|p| rel(geometry::scalar_curvature(m, p), scalar_law(p.sigma())))
        .fold(0.0, f64::max);
    r.residual(format!("curvature.{l}.scalar"), Ok(scalar), 1e-12);
    let sectional = probes
        .iter()
        .map(|p| rel(geometry::sectional_curvature(m, p), sectional_law(p.sigma())))
        .fold(0.0, f64::max);
    r.residual(format!("curvature.{l}.sectional"), Ok(sectional), 1e-12);

    let pipeline = probes.iter().try_fold(0.0f64, |worst, p| {
        let num = numeric::riemann_from_metric(m, p)?;
        let exact = geometry::riemann(m, p);
        let scale = exact
            .r
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0f64, |a, v| a.max(v.abs()));
        let mut d: f64 = 0.0;
        for (a, b) in num
            .r
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .zip(exact.r.iter().flatten().flatten().flatten())
        {
            d = d.max((a - b).abs() / scale);
        }
        Ok::<_, Error>(worst.max(d))
    });
    r.residual(format!("curvature.{l}.finite_difference"), pipeline, 1e-5);
}

fn symmetry_checks(r: &mut Runner, m: Metrization) {
    let l = m.label();
    let tol = r.tolerance.unwrap_or(SYMMETRY_TOLERANCE);
    let verdict = classify_symmetry_with_tolerance(m, &sigma_probes(), tol);
    let Ok(v) = verdict else {
        let e = verdict.unwrap_err();
        r.record(format!("symmetry.{l}.verdict"), Err(e), SYMMETRY_TOLERANCE);
        return;
    };
    let ev = |name: &str| {
        v.evidence
            .iter()
            .find(|(k, _)| k == name)
            .map_or(f64::INFINITY, |(_, x)| *x)
    };
    let isotropy = ev("ricci_isotropy").max(ev("riemann_isotropy"));
    let detail = format!(
        "isotropic={} homogeneous={} maximally_symmetric={}",
        v.isotropic, v.homogeneous, v.maximally_symmetric
    );
    r.record(
        format!("symmetry.{l}.isotropy"),
        Ok((isotropy, v.isotropic, detail.clone())),
        SYMMETRY_TOLERANCE,
    );
    r.residual(format!("symmetry.{l}.weyl"), Ok(ev("weyl_anisotropy")), 1e-12);
    match m {
        Metrization::FisherRao => r.record(
            "symmetry.fr.homogeneity".into(),
            Ok((ev("scalar_homogeneity"), v.maximally_symmetric, detail)),
            SYMMETRY_TOLERANCE,
        ),
        Metrization::AlphaOrder => {
            // the scalar must vary, and vary exactly linearly in sigma
            let probes = sigma_probes();
            let slope0 = geometry::scalar_curvature(m, &probes[0]) / probes[0].sigma();
            let linearity = probes
                .iter()
                .map(|p| (geometry::scalar_curvature(m, p) / p.sigma() - slope0).abs() / slope0.abs())
                .fold(0.0, f64::max);
            r.record(
                "symmetry.alpha.inhomogeneity".into(),
                Ok((linearity, v.isotropic && !v.homogeneous, detail)),
                1e-12,
            );
        }
    }
}

fn geodesic_checks(r: &mut Runner, metrizations: &[Metrization]) {
    let ic = GeodesicInitialConditions::standard();
    for &m in metrizations {
        let l = m.label();
        let residual = match m {
            Metrization::FisherRao => ClosedFormGeodesic::fisher_rao_from_initial_conditions(&ic).and_then(|g| {
                residual_check(
                    m,
                    move |t| g.position(t).unwrap_or((f64::NAN, f64::NAN)),
                    &ResidualProbe::new(0.0, 10.0),
                )
            }),
            Metrization::AlphaOrder => ClosedFormGeodesic::alpha_moduli(1.0).and_then(|g| {
                residual_check(
                    m,
                    move |t| g.position(t).unwrap_or((f64::NAN, f64::NAN)),
                    &ResidualProbe::new(0.0, 10.0).with_phase(MeanPhase::Imaginary),
                )
            }),
        };
        r.residual(format!("geodesic.{l}.closed_form_residual"), residual, 1e-5);
    }
    if metrizations.contains(&Metrization::FisherRao) {
        for (integrator, tol) in [(Integrator::Rk4, 1e-6), (Integrator::ForwardEuler, 5e-3)] {
            let gap = numeric_gap(&ic, integrator);
            r.residual(format!("geodesic.fr.{}_vs_closed_form", integrator.label()), gap, tol);
        }
    }
    if metrizations.len() == Metrization::ALL.len() {
        let ratio = convergence_rate_ratio(30.0, 1e-2).map(|c| {
            (
                c.ratio_at_tau_max,
                c.monotone_past_five,
                format!("monotone_past_five={}", c.monotone_past_five),
            )
        });
        r.record("geodesic.convergence_ratio".into(), ratio, 1e-3);
    }
}

fn numeric_gap(ic: &GeodesicInitialConditions, integrator: Integrator) -> Result<f64> {
    let exact = ClosedFormGeodesic::fisher_rao_from_initial_conditions(ic)?;
    let path = integrate(Metrization::FisherRao, ic, 1e-3, 10.0, integrator)?;
    if let Some(h) = path.halt {
        return Err(Error::Numeric(h.describe()));
    }
    path.samples.iter().try_fold(0.0f64, |worst, s| {
        let (mu, sigma) = exact.position(s.tau)?;
        Ok(worst.max((s.state.mu - mu).abs()).max((s.state.sigma - sigma).abs()))
    })
}

/// `(geodesic, grid)` of the growth checks: FR with `lambda = 1` up to 50,
/// alpha-order with `a = 1` up to `1e4`.
pub fn growth_setup(m: Metrization) -> Result<(ClosedFormGeodesic, Vec<f64>)> {
    match m {
        Metrization::FisherRao => Ok((
            ClosedFormGeodesic::fisher_rao(1.0, 0.0, 1.0)?,
            ige::uniform_grid(50.0, 5001)?,
        )),
        Metrization::AlphaOrder => Ok((ClosedFormGeodesic::alpha_moduli(1.0)?, ige::uniform_grid(1e4, 20001)?)),
    }
}

/// Largest relative gap between the sampled average volume and the closed
/// form over the last decade of the grid.
pub fn closed_form_gap(curve: &ige::IgeCurve, geodesic: &ClosedFormGeodesic) -> Result<f64> {
    let tau_max = curve.points.last().map_or(0.0, |p| p.tau);
    curve
        .points
        .iter()
        .filter(|p| p.tau >= tau_max / 10.0 && p.tau > 0.0)
        .try_fold(0.0f64, |worst, p| {
            let exact = match geodesic.metrization() {
                Metrization::FisherRao => ige::igc_closed_form_fr(geodesic.rate(), p.tau)?,
                Metrization::AlphaOrder => ige::igc_closed_form_alpha(geodesic.rate(), p.tau)?,
            };
            Ok(worst.max((p.avg_volume - exact).abs() / exact.abs()))
        })
}

fn ige_checks(r: &mut Runner, m: Metrization) {
    let l = m.label();
    let setup = growth_setup(m).and_then(|(g, grid)| Ok((g, ige::ige_along(&g, &grid)?)));
    let (g, curve) = match setup {
        Ok(x) => x,
        Err(e) => {
            r.record(format!("ige.{l}.growth"), Err(e), 0.1);
            return;
        }
    };
    let expected = match m {
        Metrization::FisherRao => GrowthClass::Linear,
        Metrization::AlphaOrder => GrowthClass::Logarithmic,
    };
    let growth = ige::classify_growth(&curve).map(|fit| {
        (
            (fit.stats.slope - 1.0).abs(),
            fit.class == expected,
            format!(
                "class={} slope={:.6} r_squared={:.6}",
                fit.class.label(),
                fit.stats.slope,
                fit.stats.r_squared
            ),
        )
    });
    r.record(format!("ige.{l}.growth"), growth, 0.1);
    r.residual(format!("ige.{l}.closed_form"), closed_form_gap(&curve, &g), 1e-2);
}

/// Runs the selected checks in a fixed order.
pub fn run(options: &VerifyOptions) -> VerifyReport {
    let mut r = Runner {
        tolerance: options.tolerance,
        checks: Vec::new(),
    };
    let metrizations: Vec<Metrization> = Metrization::ALL
        .into_iter()
        .filter(|m| options.metrizations.contains(m))
        .collect();
    let wanted = |g: CheckGroup| options.only.is_empty() || options.only.contains(&g);
    for group in CheckGroup::ALL {
        if !wanted(group) {
            continue;
        }
        match group {
            CheckGroup::Geodesic => geodesic_checks(&mut r, &metrizations),
            _ => {
                for &m in &metrizations {
                    match group {
                        CheckGroup::Metric => metric_checks(&mut r, m),
                        CheckGroup::Curvature => curvature_checks(&mut r, m),
                        CheckGroup::Symmetry => symmetry_checks(&mut r, m),
                        CheckGroup::Ige => ige_checks(&mut r, m),
                        CheckGroup::Geodesic => unreachable!(),
                    }
                }
            }
        }
    }
    VerifyReport { checks: r.checks }
}
