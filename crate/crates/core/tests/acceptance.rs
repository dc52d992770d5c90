//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::{PI, SQRT_2};
use std::process::{Command, ExitCode};

use infogeo::families::{MicrospaceGrid, ParameterPoint};
use infogeo::geodesics::{
    convergence_rate_ratio, integrate, mu_dot_ratio, residual_check, ClosedFormGeodesic, GeodesicInitialConditions,
    Integrator, MeanPhase, ResidualProbe,
};
use infogeo::geometry::{classify_symmetry, scalar_curvature, sectional_curvature, weyl_anisotropy};
use infogeo::ige::{classify_growth, igc_closed_form_alpha, igc_closed_form_fr, ige_along, uniform_grid, GrowthClass};
use infogeo::metrics::{alpha_metric, fisher_from_kl_hessian, fisher_rao_metric, phi_metric, Metrization, PhiKernel};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn pt(mu: f64, sigma: f64) -> ParameterPoint {
    ParameterPoint::new(mu, sigma).unwrap()
}

fn grid_5x5() -> Vec<ParameterPoint> {
    let mut v = Vec::new();
    for mu in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        for sigma in [0.5, 1.0, 1.5, 2.0, 3.0] {
            v.push(pt(mu, sigma));
        }
    }
    v
}

fn probes() -> Vec<ParameterPoint> {
    [0.5, 1.0, 2.0, 4.0, 8.0].iter().map(|&s| pt(0.0, s)).collect()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn metric_golden_values() -> Outcome {
    let fr = fisher_rao_metric(&pt(0.0, 1.0));
    let al = alpha_metric(&pt(0.0, 1.0));
    let (a11, a22) = (1.0 / (4.0 * PI.sqrt()), 3.0 / (8.0 * PI.sqrt()));
    ensure(
        fr.g11() == 1.0 && fr.g12() == 0.0 && fr.g22() == 2.0 && al.g11() == a11 && al.g12() == 0.0 && al.g22() == a22,
        format!(
            "fr=({}, {}, {}) alpha=({}, {}, {})",
            fr.g11(),
            fr.g12(),
            fr.g22(),
            al.g11(),
            al.g12(),
            al.g22()
        ),
    )
}

fn quadrature_vs_closed_form() -> Outcome {
    const TOL: f64 = 1e-7;
    let grid = MicrospaceGrid::default();
    let mut worst: f64 = 0.0;
    for p in grid_5x5() {
        let q1 = phi_metric(&PhiKernel::shannon(), &p, &grid).map_err(|e| e.to_string())?;
        let q2 = phi_metric(&PhiKernel::quadratic(), &p, &grid).map_err(|e| e.to_string())?;
        // oracle: the closed forms written out here, not the library's
        let s = p.sigma();
        let fr = [1.0 / (s * s), 2.0 / (s * s)];
        let al = [1.0 / (4.0 * PI.sqrt() * s.powi(3)), 3.0 / (8.0 * PI.sqrt() * s.powi(3))];
        worst = worst
            .max((q1.g11() - fr[0]).abs() / fr[0])
            .max((q1.g22() - fr[1]).abs() / fr[1])
            .max(q1.g12().abs() / fr[0])
            .max((0.5 * q2.g11() - al[0]).abs() / al[0])
            .max((0.5 * q2.g22() - al[1]).abs() / al[1])
            .max(0.5 * q2.g12().abs() / al[0]);
    }
    ensure(
        worst <= TOL,
        format!("max relative error {worst:.3e} (tolerance {TOL:e})"),
    )
}

fn kl_hessian_route() -> Outcome {
    const TOL: f64 = 1e-4;
    let mut worst: f64 = 0.0;
    for p in grid_5x5() {
        let h = fisher_from_kl_hessian(&p, 1e-3).map_err(|e| e.to_string())?;
        let s2 = p.sigma() * p.sigma();
        for (got, want) in [(h.g11(), 1.0 / s2), (h.g12(), 0.0), (h.g22(), 2.0 / s2)] {
            let abs = (got - want).abs();
            let rel = if want == 0.0 { abs } else { abs / want };
            worst = worst.max(abs.max(rel));
        }
    }
    ensure(worst <= TOL, format!("max error {worst:.3e} (tolerance {TOL:e})"))
}

fn curvature_golden_values() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut fr_exact = true;
    let mut worst: f64 = 0.0;
    for p in probes() {
        fr_exact &= scalar_curvature(Metrization::FisherRao, &p) == -1.0;
        fr_exact &= sectional_curvature(Metrization::FisherRao, &p) == -0.5;
        let s = p.sigma();
        let r = scalar_curvature(Metrization::AlphaOrder, &p);
        let k = sectional_curvature(Metrization::AlphaOrder, &p);
        worst = worst
            .max((r + 8.0 * PI.sqrt() * s).abs() / (8.0 * PI.sqrt() * s))
            .max((k + 4.0 * PI.sqrt() * s).abs() / (4.0 * PI.sqrt() * s));
    }
    ensure(
        fr_exact && worst <= TOL,
        format!("fr exact={fr_exact}, alpha max relative error {worst:.3e} (tolerance {TOL:e})"),
    )
}

fn symmetry_verdicts() -> Outcome {
    const WEYL_TOL: f64 = 1e-12;
    let fr = classify_symmetry(Metrization::FisherRao, &probes()).map_err(|e| e.to_string())?;
    let al = classify_symmetry(Metrization::AlphaOrder, &probes()).map_err(|e| e.to_string())?;
    let weyl = probes()
        .iter()
        .flat_map(|p| Metrization::ALL.map(|m| weyl_anisotropy(m, p)))
        .fold(0.0f64, f64::max);
    ensure(
        fr.maximally_symmetric && al.isotropic && !al.homogeneous && weyl <= WEYL_TOL,
        format!(
            "fr maximally_symmetric={}, alpha isotropic={} homogeneous={}, weyl max-abs {weyl:.3e}",
            fr.maximally_symmetric, al.isotropic, al.homogeneous
        ),
    )
}

fn closed_forms_solve_odes() -> Outcome {
    const TOL: f64 = 1e-5;
    let fr = ClosedFormGeodesic::fisher_rao_from_initial_conditions(&GeodesicInitialConditions::standard())
        .map_err(|e| e.to_string())?;
    let al = ClosedFormGeodesic::alpha_moduli(1.0).map_err(|e| e.to_string())?;
    let r_fr = residual_check(
        Metrization::FisherRao,
        |t| fr.position(t).unwrap(),
        &ResidualProbe::new(0.0, 10.0),
    )
    .map_err(|e| e.to_string())?;
    let r_al = residual_check(
        Metrization::AlphaOrder,
        |t| al.position(t).unwrap(),
        &ResidualProbe::new(0.0, 10.0).with_phase(MeanPhase::Imaginary),
    )
    .map_err(|e| e.to_string())?;
    ensure(
        r_fr <= TOL && r_al <= TOL,
        format!("fr residual {r_fr:.3e}, alpha moduli residual {r_al:.3e} (tolerance {TOL:e})"),
    )
}

fn numeric_vs_closed_form() -> Outcome {
    const RK4_TOL: f64 = 1e-6;
    const EULER_TOL: f64 = 5e-3;
    let ic = GeodesicInitialConditions::standard();
    // oracle: sigma = sech(tau/sqrt2), mu = sqrt2 tanh(tau/sqrt2) for these initial conditions
    let exact = |t: f64| {
        let x = t / SQRT_2;
        (SQRT_2 * x.tanh(), 1.0 / x.cosh())
    };
    let gap = |integrator| -> Result<f64, String> {
        let path = integrate(Metrization::FisherRao, &ic, 1e-3, 10.0, integrator).map_err(|e| e.to_string())?;
        if path.halt.is_some() || (path.last().tau - 10.0).abs() > 1e-9 {
            return Err("integration stopped early".into());
        }
        Ok(path.samples.iter().fold(0.0f64, |w, s| {
            let (mu, sigma) = exact(s.tau);
            w.max((s.state.mu - mu).abs()).max((s.state.sigma - sigma).abs())
        }))
    };
    let rk4 = gap(Integrator::Rk4)?;
    let euler = gap(Integrator::ForwardEuler)?;
    ensure(
        rk4 <= RK4_TOL && euler <= EULER_TOL,
        format!("rk4 gap {rk4:.3e} (tolerance {RK4_TOL:e}), euler gap {euler:.3e} (tolerance {EULER_TOL:e})"),
    )
}

fn convergence_rate() -> Outcome {
    const TOL: f64 = 1e-3;
    // oracle: mu'_FR = sech^2(tau/sqrt2), mu'_alpha = (1 + 4 tau/sqrt6)^(-3/2)
    let oracle = |t: f64| (1.0 / (t / SQRT_2).cosh()).powi(2) / (1.0 + 4.0 * t / 6f64.sqrt()).powf(-1.5);
    let at30 = mu_dot_ratio(30.0).map_err(|e| e.to_string())?;
    let agrees = (at30 - oracle(30.0)).abs() <= 1e-9 * oracle(30.0);
    let monotone = (0..=2500)
        .map(|k| oracle(5.0 + k as f64 * 0.01))
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| w[1] < w[0]);
    let lib = convergence_rate_ratio(30.0, 1e-2).map_err(|e| e.to_string())?;
    ensure(
        at30 < TOL && agrees && monotone && lib.monotone_past_five,
        format!(
            "ratio at tau=30 {at30:.3e} (bound {TOL:e}), matches oracle={agrees}, monotone past 5={}",
            monotone && lib.monotone_past_five
        ),
    )
}

fn growth_classes() -> Outcome {
    let fr = ClosedFormGeodesic::fisher_rao(1.0, 0.0, 1.0).map_err(|e| e.to_string())?;
    let al = ClosedFormGeodesic::alpha_moduli(1.0).map_err(|e| e.to_string())?;
    let fr_curve = ige_along(&fr, &uniform_grid(50.0, 5001).unwrap()).map_err(|e| e.to_string())?;
    let al_curve = ige_along(&al, &uniform_grid(1e4, 20001).unwrap()).map_err(|e| e.to_string())?;
    let f = classify_growth(&fr_curve).map_err(|e| e.to_string())?;
    let a = classify_growth(&al_curve).map_err(|e| e.to_string())?;
    let in_band = |s: f64| (0.9..=1.1).contains(&s);
    // slope of the entropy over the last stretch [40, 50]
    let late: Vec<_> = fr_curve.points.iter().filter(|p| p.tau >= 40.0).collect();
    let late_slope =
        (late.last().unwrap().ige.unwrap() - late[0].ige.unwrap()) / (late.last().unwrap().tau - late[0].tau);
    ensure(
        f.class == GrowthClass::Linear
            && in_band(f.stats.slope)
            && in_band(late_slope)
            && a.class == GrowthClass::Logarithmic
            && in_band(a.stats.slope),
        format!(
            "fr {:?} slope {:.4} (slope on [40,50] {late_slope:.4}), alpha {:?} slope {:.4}",
            f.class, f.stats.slope, a.class, a.stats.slope
        ),
    )
}

fn closed_form_igc() -> Outcome {
    const TOL: f64 = 1e-2;
    let fr = ClosedFormGeodesic::fisher_rao(1.0, 0.0, 1.0).map_err(|e| e.to_string())?;
    let al = ClosedFormGeodesic::alpha_moduli(1.0).map_err(|e| e.to_string())?;
    let fr_curve = ige_along(&fr, &uniform_grid(50.0, 5001).unwrap()).map_err(|e| e.to_string())?;
    let al_curve = ige_along(&al, &uniform_grid(1e4, 20001).unwrap()).map_err(|e| e.to_string())?;
    let gap = |curve: &infogeo::ige::IgeCurve, f: &dyn Fn(f64) -> f64| {
        let tau_max = curve.points.last().unwrap().tau;
        curve
            .points
            .iter()
            .filter(|p| p.tau >= tau_max / 10.0)
            .fold(0.0f64, |w, p| w.max((p.avg_volume - f(p.tau)).abs() / f(p.tau)))
    };
    let g_fr = gap(&fr_curve, &|t| igc_closed_form_fr(1.0, t).unwrap());
    let g_al = gap(&al_curve, &|t| igc_closed_form_alpha(1.0, t).unwrap());
    ensure(
        g_fr <= TOL && g_al <= TOL,
        format!("fr max relative gap {g_fr:.3e}, alpha {g_al:.3e} (tolerance {TOL:e})"),
    )
}

fn verify_is_deterministic() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_infogeo"))
            .arg("verify")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(
        a.stdout == b.stdout && !a.stdout.is_empty() && a.status.success(),
        format!(
            "{} report bytes, identical={}, exit={:?}",
            a.stdout.len(),
            a.stdout == b.stdout,
            a.status.code()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("metric golden values", metric_golden_values),
        ("phi quadrature vs closed form", quadrature_vs_closed_form),
        ("relative-entropy Hessian route", kl_hessian_route),
        ("curvature golden values", curvature_golden_values),
        ("symmetry verdicts", symmetry_verdicts),
        ("closed-form geodesics solve their equations", closed_forms_solve_odes),
        ("numeric vs closed-form geodesics", numeric_vs_closed_form),
        ("convergence-rate ratio", convergence_rate),
        ("entropy growth classes", growth_classes),
        ("closed-form complexity vs quadrature", closed_form_igc),
        ("verify determinism", verify_is_deterministic),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
