//! Information geometric complexity (IGC) and entropy (IGE) along geodesics.
//!
//! For a path `theta~(tau)` the explored region at time `t` is the coordinate
//! rectangle spanned by `theta~(0)` and `theta~(t)`. Its volume under the
//! Fisher density `sqrt(det g)` is averaged over `[0, tau]`; the IGC is that
//! average and the IGE its logarithm.
//!
//! Both metrizations have a determinant that factorizes into a function of
//! sigma alone, so rectangle volumes are products of one-dimensional
//! antiderivatives. The time average uses the composite trapezoid rule on the
//! caller's grid, summed in grid order.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::error::{domain, Result};
use crate::geodesics::ClosedFormGeodesic;
use crate::metrics::Metrization;

/// `sqrt(det g)` as a function of sigma.
pub fn fisher_density(metrization: Metrization, sigma: f64) -> f64 {
    match metrization {
        Metrization::FisherRao => SQRT_2 / (sigma * sigma),
        Metrization::AlphaOrder => (3.0 / (32.0 * PI)).sqrt() / sigma.powi(3),
    }
}

/// Antiderivative in sigma of [`fisher_density`].
fn density_antiderivative(metrization: Metrization, sigma: f64) -> f64 {
    match metrization {
        Metrization::FisherRao => -SQRT_2 / sigma,
        Metrization::AlphaOrder => -(3.0 / (32.0 * PI)).sqrt() / (2.0 * sigma * sigma),
    }
}

/// Fisher-density volume of the rectangle with corners `from` and `to`,
/// both given as `(mu~, sigma~)`. Each coordinate interval is taken as
/// `[min, max]`, so the volume is never negative.
pub fn parameter_volume(metrization: Metrization, from: (f64, f64), to: (f64, f64)) -> Result<f64> {
    if !(from.1 > 0.0) || !(to.1 > 0.0) {
        return domain(format!("sigma bounds must be positive, got {} and {}", from.1, to.1));
    }
    let width = (to.0 - from.0).abs();
    let (lo, hi) = if from.1 <= to.1 { (from.1, to.1) } else { (to.1, from.1) };
    let height = density_antiderivative(metrization, hi) - density_antiderivative(metrization, lo);
    Ok(width * height)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GrowthClass {
    Linear,
    Logarithmic,
    Undetermined,
}

impl GrowthClass {
    pub fn label(&self) -> &'static str {
        match self {
            GrowthClass::Linear => "linear",
            GrowthClass::Logarithmic => "logarithmic",
            GrowthClass::Undetermined => "undetermined",
        }
    }

    /// Growth of the IGC implied by this IGE growth.
    pub fn igc_label(&self) -> &'static str {
        match self {
            GrowthClass::Linear => "exponential",
            GrowthClass::Logarithmic => "polynomial",
            GrowthClass::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitStats {
    pub slope: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IgePoint {
    pub tau: f64,
    pub volume: f64,
    pub avg_volume: f64,
    /// `None` where the average volume is zero (e.g. `tau = 0`).
    pub ige: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IgeCurve {
    pub points: Vec<IgePoint>,
    pub metrization: Metrization,
    pub growth_class: GrowthClass,
    pub fit_stats: FitStats,
}

/// Samples the IGE of `path` on `tau_grid`.
///
/// `tau_grid` must start at zero and increase strictly. `path` maps `tau` to
/// `(mu~, sigma~)`. The growth class is filled in when the grid supports a fit
/// (see [`classify_growth`]) and left `Undetermined` otherwise.
pub fn ige_curve<F>(metrization: Metrization, path: F, tau_grid: &[f64]) -> Result<IgeCurve>
where
    F: Fn(f64) -> (f64, f64),
{
    if tau_grid.len() < 2 {
        return domain("tau grid needs at least two points");
    }
    if tau_grid[0] != 0.0 {
        return domain(format!("tau grid must start at 0, got {}", tau_grid[0]));
    }
    if tau_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("tau grid must be strictly increasing");
    }
    let origin = path(0.0);
    let volumes = tau_grid
        .iter()
        .map(|&t| parameter_volume(metrization, origin, path(t)))
        .collect::<Result<Vec<_>>>()?;

    let mut points = Vec::with_capacity(tau_grid.len());
    let mut integral = 0.0;
    for (k, (&tau, &vol)) in tau_grid.iter().zip(volumes.iter()).enumerate() {
        if k > 0 {
            integral += 0.5 * (tau - tau_grid[k - 1]) * (vol + volumes[k - 1]);
        }
        let avg = if tau > 0.0 { integral / tau } else { 0.0 };
        let ige = (avg > 0.0).then(|| avg.ln());
        points.push(IgePoint {
            tau,
            volume: vol,
            avg_volume: avg,
            ige,
        });
    }
    let mut curve = IgeCurve {
        points,
        metrization,
        growth_class: GrowthClass::Undetermined,
        fit_stats: FitStats {
            slope: f64::NAN,
            r_squared: f64::NAN,
        },
    };
    if let Ok(c) = classify_growth(&curve) {
        curve.growth_class = c.class;
        curve.fit_stats = c.stats;
    }
    Ok(curve)
}

/// `0, tau_max/(n-1), ..., tau_max`.
pub fn uniform_grid(tau_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(tau_max > 0.0) || n < 2 {
        return domain("uniform grid needs tau_max > 0 and at least two points");
    }
    Ok((0..n).map(|k| tau_max * k as f64 / (n - 1) as f64).collect())
}

/// IGE curve along a closed-form geodesic.
pub fn ige_along(geodesic: &ClosedFormGeodesic, tau_grid: &[f64]) -> Result<IgeCurve> {
    let g = *geodesic;
    // positions are only requested on the validated (non-negative) grid
    ige_curve(
        g.metrization(),
        move |t| g.position(t).unwrap_or((f64::NAN, f64::NAN)),
        tau_grid,
    )
}

/// Fisher-Rao average volume
/// `(e^{lt}/(lt)) [e^{-2lt} - 2 e^{-lt} log(1 + e^{2lt}) + 2 lt e^{-lt} + 1] - (2/(lt)) [1 - log 2]`.
pub fn igc_closed_form_fr(lambda: f64, tau: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    if !(tau > 0.0) {
        return domain(format!("tau must be positive, got {tau}"));
    }
    let x = lambda * tau;
    let em = (-x).exp();
    // log(1 + e^{2x}) = 2x + log(1 + e^{-2x})
    let log_term = 2.0 * x + (em * em).ln_1p();
    let bracket = em * em - 2.0 * em * log_term + 2.0 * x * em + 1.0;
    Ok(x.exp() / x * bracket - 2.0 / x * (1.0 - 2f64.ln()))
}

/// Alpha-order average volume: with `u = sqrt(2^{3/2}/sqrt3 a t + 1)`,
///
/// ```text
/// 1/(8 sqrt(pi) u) + sqrt6/(16 sqrt(pi)) a t + sqrt6/(16 sqrt(pi) a) 1/(u t)
///   - sqrt6/(12 sqrt(pi)) a t / u - sqrt6/(16 sqrt(pi) a t)
/// ```
pub fn igc_closed_form_alpha(a: f64, tau: f64) -> Result<f64> {
    if !(a > 0.0) {
        return domain(format!("a must be positive, got {a}"));
    }
    if !(tau > 0.0) {
        return domain(format!("tau must be positive, got {tau}"));
    }
    let sp = PI.sqrt();
    let s6 = 6f64.sqrt();
    let u = (2f64.powf(1.5) / 3f64.sqrt() * a * tau + 1.0).sqrt();
    Ok(
        1.0 / (8.0 * sp * u) + s6 / (16.0 * sp) * a * tau + s6 / (16.0 * sp * a) / (u * tau)
            - s6 / (12.0 * sp) * a * tau / u
            - s6 / (16.0 * sp * a * tau),
    )
}

/// Minimum number of defined samples in the fitting window.
pub const MIN_WINDOW_SAMPLES: usize = 20;
/// Coefficient of determination a model must reach.
pub const MIN_R_SQUARED: f64 = 0.999;
/// Largest relative difference between the slopes fitted on the two halves of the window.
pub const MAX_SLOPE_DRIFT: f64 = 0.1;
/// Smallest rise of the fitted line across the window, in nats.
pub const MIN_RISE: f64 = 0.1;

/// Classification together with the winning fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    pub class: GrowthClass,
    pub stats: FitStats,
    pub linear: FitStats,
    pub logarithmic: FitStats,
}

fn least_squares(x: &[f64], y: &[f64]) -> FitStats {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx == 0.0 {
        return FitStats {
            slope: 0.0,
            r_squared: 0.0,
        };
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 0.0 };
    FitStats { slope, r_squared }
}

fn model_holds(x: &[f64], y: &[f64], fit: &FitStats) -> bool {
    if fit.r_squared < MIN_R_SQUARED {
        return false;
    }
    let span = x[x.len() - 1] - x[0];
    if !(fit.slope * span >= MIN_RISE) {
        return false;
    }
    let half = x.len() / 2;
    let a = least_squares(&x[..half], &y[..half]).slope;
    let b = least_squares(&x[half..], &y[half..]).slope;
    (a - b).abs() <= MAX_SLOPE_DRIFT * a.abs().max(b.abs())
}

/// Fits the IGE over the last decade of `tau` against `tau` and against
/// `log tau`. The better fit wins if it explains the data (`r^2 >= 0.999`),
/// rises by at least [`MIN_RISE`] and keeps a near-constant slope across the
/// window; otherwise the curve is `Undetermined`.
pub fn classify_growth(curve: &IgeCurve) -> Result<GrowthFit> {
    let tau_max = curve.points.last().map(|p| p.tau).unwrap_or(0.0);
    let (taus, iges): (Vec<f64>, Vec<f64>) = curve
        .points
        .iter()
        .filter(|p| p.tau >= tau_max / 10.0 && p.tau > 0.0)
        .filter_map(|p| p.ige.map(|v| (p.tau, v)))
        .unzip();
    if taus.len() < MIN_WINDOW_SAMPLES {
        return domain(format!(
            "growth classification needs at least {MIN_WINDOW_SAMPLES} defined samples in the last decade, got {}",
            taus.len()
        ));
    }
    let logs: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let linear = least_squares(&taus, &iges);
    let logarithmic = least_squares(&logs, &iges);
    let (class, stats) = if linear.r_squared >= logarithmic.r_squared {
        if model_holds(&taus, &iges, &linear) {
            (GrowthClass::Linear, linear)
        } else {
            (GrowthClass::Undetermined, linear)
        }
    } else if model_holds(&logs, &iges, &logarithmic) {
        (GrowthClass::Logarithmic, logarithmic)
    } else {
        (GrowthClass::Undetermined, logarithmic)
    };
    Ok(GrowthFit {
        class,
        stats,
        linear,
        logarithmic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn volumes() {
        assert_eq!(
            parameter_volume(Metrization::FisherRao, (0.0, 1.0), (0.0, 1.0)).unwrap(),
            0.0
        );
        assert_relative_eq!(
            parameter_volume(Metrization::FisherRao, (0.0, 1.0), (1.0, 0.5)).unwrap(),
            SQRT_2,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            parameter_volume(Metrization::AlphaOrder, (0.0, 1.0), (1.0, 0.5)).unwrap(),
            1.5 * (3.0 / (32.0 * PI)).sqrt(),
            max_relative = 1e-15
        );
        // orientation does not matter
        assert_eq!(
            parameter_volume(Metrization::AlphaOrder, (1.0, 0.5), (0.0, 1.0)).unwrap(),
            parameter_volume(Metrization::AlphaOrder, (0.0, 1.0), (1.0, 0.5)).unwrap()
        );
        assert!(parameter_volume(Metrization::FisherRao, (0.0, 0.0), (1.0, 1.0)).is_err());
    }

    #[test]
    fn closed_form_domains() {
        assert!(igc_closed_form_fr(1.0, 0.0).is_err());
        assert!(igc_closed_form_fr(0.0, 1.0).is_err());
        assert!(igc_closed_form_alpha(1.0, 0.0).is_err());
        assert!(igc_closed_form_alpha(-1.0, 1.0).is_err());
    }

    #[test]
    fn constant_path_is_undefined() {
        let grid = uniform_grid(10.0, 101).unwrap();
        let c = ige_curve(Metrization::FisherRao, |_| (0.0, 1.0), &grid).unwrap();
        assert!(c.points.iter().all(|p| p.volume == 0.0 && p.ige.is_none()));
        assert_eq!(c.growth_class, GrowthClass::Undetermined);
        assert!(classify_growth(&c).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(ige_curve(Metrization::FisherRao, |_| (0.0, 1.0), &[1.0, 2.0]).is_err());
        assert!(ige_curve(Metrization::FisherRao, |_| (0.0, 1.0), &[0.0, 2.0, 2.0]).is_err());
        assert!(ige_curve(Metrization::FisherRao, |_| (0.0, 1.0), &[0.0]).is_err());
    }

    #[test]
    fn flat_curve_is_undetermined() {
        let points = (0..100)
            .map(|k| IgePoint {
                tau: 1.0 + k as f64,
                volume: 1.0,
                avg_volume: 1.0,
                ige: Some(0.0),
            })
            .collect();
        let curve = IgeCurve {
            points,
            metrization: Metrization::FisherRao,
            growth_class: GrowthClass::Undetermined,
            fit_stats: FitStats {
                slope: 0.0,
                r_squared: 0.0,
            },
        };
        assert_eq!(classify_growth(&curve).unwrap().class, GrowthClass::Undetermined);
    }

    #[test]
    fn classifies_both_geodesics() {
        let fr = ClosedFormGeodesic::fisher_rao(1.0, 0.0, 1.0).unwrap();
        let c = ige_along(&fr, &uniform_grid(50.0, 5001).unwrap()).unwrap();
        assert_eq!(c.growth_class, GrowthClass::Linear);
        let al = ClosedFormGeodesic::alpha_moduli(1.0).unwrap();
        let c = ige_along(&al, &uniform_grid(1e4, 20001).unwrap()).unwrap();
        assert_eq!(c.growth_class, GrowthClass::Logarithmic);
    }
}
