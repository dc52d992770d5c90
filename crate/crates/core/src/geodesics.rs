//! Geodesic motion on the Gaussian manifold.
//!
//! The geodesic equations `theta'' + G^k_ij theta'^i theta'^j = 0` reduce to
//!
//! ```text
//! Fisher-Rao:  mu'' = (2/s) mu' s',   s'' = -(1/(2s)) mu'^2 + (1/s) s'^2
//! alpha-order: mu'' = (3/s) mu' s',   s'' = -(1/s) mu'^2 + (3/(2s)) s'^2
//! ```
//!
//! Both are integrated here with forward Euler or classical RK4. Closed-form
//! solutions are available for Fisher-Rao (with `s'(0) = 0`) and for the
//! moduli of the alpha-order solution starting at `(0, 1)`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::families::ParameterPoint;
use crate::geometry::christoffel;
use crate::metrics::Metrization;

/// Integration stops once sigma falls to this value.
pub const SIGMA_FLOOR: f64 = 1e-9;

/// Phase-space point `(mu, sigma, mu_dot, sigma_dot)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub mu: f64,
    pub sigma: f64,
    pub mu_dot: f64,
    pub sigma_dot: f64,
}

impl State {
    pub fn new(mu: f64, sigma: f64, mu_dot: f64, sigma_dot: f64) -> Self {
        Self {
            mu,
            sigma,
            mu_dot,
            sigma_dot,
        }
    }

    fn axpy(&self, h: f64, d: &State) -> State {
        State {
            mu: self.mu + h * d.mu,
            sigma: self.sigma + h * d.sigma,
            mu_dot: self.mu_dot + h * d.mu_dot,
            sigma_dot: self.sigma_dot + h * d.sigma_dot,
        }
    }

    fn is_finite(&self) -> bool {
        self.mu.is_finite() && self.sigma.is_finite() && self.mu_dot.is_finite() && self.sigma_dot.is_finite()
    }
}

/// Initial macrostate and velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicInitialConditions {
    pub mu0: f64,
    pub sigma0: f64,
    pub mu_dot0: f64,
    pub sigma_dot0: f64,
}

impl GeodesicInitialConditions {
    pub fn new(mu0: f64, sigma0: f64, mu_dot0: f64, sigma_dot0: f64) -> Result<Self> {
        if ![mu0, sigma0, mu_dot0, sigma_dot0].iter().all(|v| v.is_finite()) {
            return domain("initial conditions must be finite");
        }
        if sigma0 <= 0.0 {
            return domain(format!("sigma must be positive, got {sigma0}"));
        }
        Ok(Self {
            mu0,
            sigma0,
            mu_dot0,
            sigma_dot0,
        })
    }

    /// `(mu, sigma, mu_dot, sigma_dot) = (0, 1, 1, 0)`.
    pub fn standard() -> Self {
        Self {
            mu0: 0.0,
            sigma0: 1.0,
            mu_dot0: 1.0,
            sigma_dot0: 0.0,
        }
    }

    pub fn state(&self) -> State {
        State::new(self.mu0, self.sigma0, self.mu_dot0, self.sigma_dot0)
    }
}

impl Default for GeodesicInitialConditions {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrator {
    ForwardEuler,
    Rk4,
}

impl Integrator {
    pub fn label(&self) -> &'static str {
        match self {
            Integrator::ForwardEuler => "euler",
            Integrator::Rk4 => "rk4",
        }
    }
}

/// Why an integration ended before `tau_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HaltReason {
    SigmaFloor { tau: f64 },
    NonFinite { tau: f64 },
}

impl HaltReason {
    pub fn tau(&self) -> f64 {
        match *self {
            HaltReason::SigmaFloor { tau } | HaltReason::NonFinite { tau } => tau,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            HaltReason::SigmaFloor { tau } => format!("sigma reached floor {SIGMA_FLOOR:e} at tau={tau}"),
            HaltReason::NonFinite { tau } => format!("non-finite state at tau={tau}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub tau: f64,
    pub state: State,
}

/// A sampled geodesic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicPath {
    pub samples: Vec<PathSample>,
    pub metrization: Metrization,
    pub integrator: Integrator,
    pub step: f64,
    pub halt: Option<HaltReason>,
}

impl GeodesicPath {
    pub fn last(&self) -> &PathSample {
        self.samples.last().expect("paths always hold the initial sample")
    }

    /// Linear interpolation of `(mu, sigma)`, clamped to the sampled range.
    pub fn position_at(&self, tau: f64) -> (f64, f64) {
        let n = self.samples.len();
        let first = &self.samples[0];
        if n == 1 || tau <= first.tau {
            return (first.state.mu, first.state.sigma);
        }
        let idx = ((tau / self.step).floor() as usize).min(n - 2);
        let (a, b) = (&self.samples[idx], &self.samples[idx + 1]);
        if tau >= self.last().tau {
            let l = self.last();
            return (l.state.mu, l.state.sigma);
        }
        let t = (tau - a.tau) / (b.tau - a.tau);
        (
            a.state.mu + t * (b.state.mu - a.state.mu),
            a.state.sigma + t * (b.state.sigma - a.state.sigma),
        )
    }

    /// `g_ij theta'^i theta'^j` at every sample.
    pub fn speeds(&self) -> Result<Vec<f64>> {
        self.samples
            .iter()
            .map(|s| squared_speed(self.metrization, &s.state))
            .collect()
    }
}

/// `g_ij theta'^i theta'^j` at a phase-space point.
pub fn squared_speed(metrization: Metrization, state: &State) -> Result<f64> {
    let p = ParameterPoint::new(state.mu, state.sigma)?;
    let g = metrization.metric(&p);
    Ok(g.inner([state.mu_dot, state.sigma_dot], [state.mu_dot, state.sigma_dot]))
}

fn accelerations(metrization: Metrization, mu_dot: f64, sigma: f64, sigma_dot: f64, mu_dot_sq: f64) -> (f64, f64) {
    match metrization {
        Metrization::FisherRao => (
            2.0 / sigma * mu_dot * sigma_dot,
            -mu_dot_sq / (2.0 * sigma) + sigma_dot * sigma_dot / sigma,
        ),
        Metrization::AlphaOrder => (
            3.0 / sigma * mu_dot * sigma_dot,
            -mu_dot_sq / sigma + 1.5 * sigma_dot * sigma_dot / sigma,
        ),
    }
}

/// Right-hand side of the first-order geodesic system.
pub fn geodesic_rhs(metrization: Metrization, state: &State) -> Result<State> {
    if !(state.sigma > 0.0) {
        return domain(format!("sigma must be positive, got {}", state.sigma));
    }
    let (mu_dd, sigma_dd) = accelerations(
        metrization,
        state.mu_dot,
        state.sigma,
        state.sigma_dot,
        state.mu_dot * state.mu_dot,
    );
    Ok(State::new(state.mu_dot, state.sigma_dot, mu_dd, sigma_dd))
}

/// Same accelerations obtained by contracting the Christoffel symbols directly.
pub fn geodesic_rhs_from_connection(metrization: Metrization, state: &State) -> Result<State> {
    let p = ParameterPoint::new(state.mu, state.sigma)?;
    let c = christoffel(metrization, &p);
    let v = [state.mu_dot, state.sigma_dot];
    let mut acc = [0.0; 2];
    for (k, a) in acc.iter_mut().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                *a -= c.gamma[k][i][j] * v[i] * v[j];
            }
        }
    }
    Ok(State::new(state.mu_dot, state.sigma_dot, acc[0], acc[1]))
}

fn step_once(metrization: Metrization, integrator: Integrator, s: &State, h: f64) -> Result<State> {
    match integrator {
        Integrator::ForwardEuler => Ok(s.axpy(h, &geodesic_rhs(metrization, s)?)),
        Integrator::Rk4 => {
            let k1 = geodesic_rhs(metrization, s)?;
            let k2 = geodesic_rhs(metrization, &s.axpy(0.5 * h, &k1))?;
            let k3 = geodesic_rhs(metrization, &s.axpy(0.5 * h, &k2))?;
            let k4 = geodesic_rhs(metrization, &s.axpy(h, &k3))?;
            Ok(State {
                mu: s.mu + h / 6.0 * (k1.mu + 2.0 * k2.mu + 2.0 * k3.mu + k4.mu),
                sigma: s.sigma + h / 6.0 * (k1.sigma + 2.0 * k2.sigma + 2.0 * k3.sigma + k4.sigma),
                mu_dot: s.mu_dot + h / 6.0 * (k1.mu_dot + 2.0 * k2.mu_dot + 2.0 * k3.mu_dot + k4.mu_dot),
                sigma_dot: s.sigma_dot
                    + h / 6.0 * (k1.sigma_dot + 2.0 * k2.sigma_dot + 2.0 * k3.sigma_dot + k4.sigma_dot),
            })
        }
    }
}

/// Integrates the geodesic equations from `ic`, sampling every `step` up to `tau_max`.
///
/// A state whose sigma falls to [`SIGMA_FLOOR`] (or that stops being finite)
/// ends the path early; the reason is recorded in [`GeodesicPath::halt`].
pub fn integrate(
    metrization: Metrization,
    ic: &GeodesicInitialConditions,
    step: f64,
    tau_max: f64,
    integrator: Integrator,
) -> Result<GeodesicPath> {
    if !(step > 0.0) || !step.is_finite() {
        return domain(format!("step must be positive, got {step}"));
    }
    if !(tau_max > 0.0) || !tau_max.is_finite() {
        return domain(format!("tau_max must be positive, got {tau_max}"));
    }
    let n_steps = (tau_max / step * (1.0 + 1e-12)).floor() as usize;
    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut state = ic.state();
    samples.push(PathSample { tau: 0.0, state });
    let mut halt = None;
    for k in 1..=n_steps {
        let tau = k as f64 * step;
        let next = step_once(metrization, integrator, &state, step);
        match next {
            Ok(s) if !s.is_finite() => {
                halt = Some(HaltReason::NonFinite { tau });
                break;
            }
            Ok(s) if s.sigma <= SIGMA_FLOOR => {
                halt = Some(HaltReason::SigmaFloor { tau });
                break;
            }
            Ok(s) => {
                state = s;
                samples.push(PathSample { tau, state });
            }
            Err(_) => {
                // an intermediate RK stage left the domain
                halt = Some(HaltReason::SigmaFloor { tau });
                break;
            }
        }
    }
    Ok(GeodesicPath {
        samples,
        metrization,
        integrator,
        step,
        halt,
    })
}

/// Constants of a closed-form geodesic.
///
/// For Fisher-Rao, `rate` is `lambda = A / sqrt(2)` with `A = mu'(0) / sigma0^2`.
/// For the alpha-order moduli, `rate` is `a = |A| > 0` and the start is `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormGeodesic {
    metrization: Metrization,
    rate: f64,
    mu0: f64,
    sigma0: f64,
}

impl ClosedFormGeodesic {
    pub fn new(metrization: Metrization, rate: f64, mu0: f64, sigma0: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return domain(format!("geodesic rate must be positive, got {rate}"));
        }
        if !(sigma0 > 0.0) || !sigma0.is_finite() || !mu0.is_finite() {
            return domain(format!("invalid start ({mu0}, {sigma0})"));
        }
        if metrization == Metrization::AlphaOrder && (mu0 != 0.0 || sigma0 != 1.0) {
            return domain("alpha-order closed form is only available for the start (0, 1)");
        }
        Ok(Self {
            metrization,
            rate,
            mu0,
            sigma0,
        })
    }

    pub fn fisher_rao(lambda: f64, mu0: f64, sigma0: f64) -> Result<Self> {
        Self::new(Metrization::FisherRao, lambda, mu0, sigma0)
    }

    pub fn alpha_moduli(a: f64) -> Result<Self> {
        Self::new(Metrization::AlphaOrder, a, 0.0, 1.0)
    }

    /// Fisher-Rao closed form matching initial conditions with `sigma'(0) = 0`
    /// and `mu'(0) > 0`: `A = mu'(0)/sigma0^2`, `lambda = A / sqrt(2)`.
    pub fn fisher_rao_from_initial_conditions(ic: &GeodesicInitialConditions) -> Result<Self> {
        if ic.sigma_dot0 != 0.0 {
            return domain("Fisher-Rao closed form requires sigma_dot0 = 0");
        }
        if !(ic.mu_dot0 > 0.0) {
            return domain("Fisher-Rao closed form requires mu_dot0 > 0");
        }
        let big_a = ic.mu_dot0 / (ic.sigma0 * ic.sigma0);
        Self::fisher_rao(big_a / SQRT_2, ic.mu0, ic.sigma0)
    }

    pub fn metrization(&self) -> Metrization {
        self.metrization
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    /// `(mu, sigma)` at `tau`, dispatching on the metrization.
    pub fn position(&self, tau: f64) -> Result<(f64, f64)> {
        match self.metrization {
            Metrization::FisherRao => closed_form_fr(self, tau),
            Metrization::AlphaOrder => closed_form_alpha_moduli(self, tau),
        }
    }

    /// `mu'` from the first integrals `mu' = A sigma^2` (Fisher-Rao) and
    /// `mu' = a sigma^3` (alpha-order moduli).
    pub fn mu_dot(&self, tau: f64) -> Result<f64> {
        let (_, sigma) = self.position(tau)?;
        Ok(match self.metrization {
            Metrization::FisherRao => SQRT_2 * self.rate * sigma * sigma,
            Metrization::AlphaOrder => self.rate * sigma.powi(3),
        })
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0) {
        return domain(format!("tau must be non-negative, got {tau}"));
    }
    Ok(())
}

/// Fisher-Rao geodesic
/// `sigma = 2 s0 e^{s0 l t} / (1 + e^{2 s0 l t})`,
/// `mu = ((mu0 + sqrt2 s0)(1 + e^{2 s0 l t}) - 2 sqrt2 s0) / (1 + e^{2 s0 l t})`.
pub fn closed_form_fr(params: &ClosedFormGeodesic, tau: f64) -> Result<(f64, f64)> {
    if params.metrization != Metrization::FisherRao {
        return domain("closed_form_fr needs Fisher-Rao parameters");
    }
    check_tau(tau)?;
    let s0 = params.sigma0;
    let x = s0 * params.rate * tau;
    // written with e^{-x} so large tau does not overflow
    let e1 = (-x).exp();
    let e2 = e1 * e1;
    let sigma = 2.0 * s0 * e1 / (1.0 + e2);
    let mu = params.mu0 + SQRT_2 * s0 - 2.0 * SQRT_2 * s0 * e2 / (1.0 + e2);
    Ok((mu, sigma))
}

/// Moduli of the alpha-order geodesic from `(0, 1)`:
/// `sigma~ = (1 + 4 a t / sqrt6)^{-1/2}`, `mu~ = (sqrt6 / 2)(1 - sigma~)`.
pub fn closed_form_alpha_moduli(params: &ClosedFormGeodesic, tau: f64) -> Result<(f64, f64)> {
    if params.metrization != Metrization::AlphaOrder {
        return domain("closed_form_alpha_moduli needs alpha-order parameters");
    }
    if params.mu0 != 0.0 || params.sigma0 != 1.0 {
        return domain("alpha-order closed form is only available for the start (0, 1)");
    }
    check_tau(tau)?;
    let sqrt6 = 6f64.sqrt();
    let sigma = 1.0 / (1.0 + 4.0 * params.rate / sqrt6 * tau).sqrt();
    let mu = 0.5 * sqrt6 * (1.0 - sigma);
    Ok((mu, sigma))
}

/// How the location coordinate of a trajectory enters the geodesic equations.
///
/// The alpha-order closed form has a purely imaginary mean `mu = -i mu~`; its
/// modulus `mu~` satisfies the equations once `mu'^2` is replaced by
/// `-mu~'^2`. The location equation is linear in `mu` and unaffected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeanPhase {
    Real,
    Imaginary,
}

/// Probe grid for [`residual_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualProbe {
    pub tau_start: f64,
    pub tau_end: f64,
    pub points: usize,
    pub diff_step: f64,
    pub phase: MeanPhase,
}

impl ResidualProbe {
    pub fn new(tau_start: f64, tau_end: f64) -> Self {
        Self {
            tau_start,
            tau_end,
            points: 512,
            diff_step: 1e-4,
            phase: MeanPhase::Real,
        }
    }

    pub fn with_phase(mut self, phase: MeanPhase) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_diff_step(mut self, h: f64) -> Self {
        self.diff_step = h;
        self
    }
}

/// Largest absolute residual of the geodesic equations along `trajectory`,
/// with velocities and accelerations from central differences.
///
/// Probe points are spread over `[tau_start + h, tau_end - h]` so the stencil
/// never leaves the probe interval.
pub fn residual_check<F>(metrization: Metrization, trajectory: F, probe: &ResidualProbe) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    if probe.points < 2 || !(probe.diff_step > 0.0) || !(probe.tau_end - probe.tau_start > 2.0 * probe.diff_step) {
        return domain("residual probe needs at least two points on a non-empty interval");
    }
    let h = probe.diff_step;
    let phase_sq = match probe.phase {
        MeanPhase::Real => 1.0,
        MeanPhase::Imaginary => -1.0,
    };
    let mut worst: f64 = 0.0;
    for k in 0..probe.points {
        let span = probe.tau_end - probe.tau_start - 2.0 * h;
        let tau = probe.tau_start + h + span * k as f64 / (probe.points - 1) as f64;
        let (m_minus, s_minus) = trajectory(tau - h);
        let (m0, s0) = trajectory(tau);
        let (m_plus, s_plus) = trajectory(tau + h);
        let mu_dot = (m_plus - m_minus) / (2.0 * h);
        let sigma_dot = (s_plus - s_minus) / (2.0 * h);
        let mu_dd = (m_plus - 2.0 * m0 + m_minus) / (h * h);
        let sigma_dd = (s_plus - 2.0 * s0 + s_minus) / (h * h);
        if !(s0 > 0.0) {
            return domain(format!("trajectory left the manifold at tau={tau}"));
        }
        let (ea, eb) = accelerations(metrization, mu_dot, s0, sigma_dot, phase_sq * mu_dot * mu_dot);
        worst = worst.max((mu_dd - ea).abs()).max((sigma_dd - eb).abs());
    }
    Ok(worst)
}

/// `mu'_FR / mu'_alpha` at `tau` for the Fisher-Rao geodesic through the
/// standard initial conditions `(0, 1, 1, 0)` and the alpha-order moduli with `a = 1`.
pub fn mu_dot_ratio(tau: f64) -> Result<f64> {
    let fr = ClosedFormGeodesic::fisher_rao_from_initial_conditions(&GeodesicInitialConditions::standard())?;
    let al = ClosedFormGeodesic::alpha_moduli(1.0)?;
    Ok(fr.mu_dot(tau)? / al.mu_dot(tau)?)
}

/// Result of [`convergence_rate_ratio`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRatio {
    pub ratio_at_tau_max: f64,
    /// Strict decrease of the ratio on the `step` grid over `[5, tau_max]`.
    pub monotone_past_five: bool,
}

/// Compares how fast the two means settle: the ratio of their velocities at
/// `tau_max`, and whether that ratio keeps falling beyond `tau = 5`.
pub fn convergence_rate_ratio(tau_max: f64, step: f64) -> Result<ConvergenceRatio> {
    if !(tau_max > 0.0) || !(step > 0.0) {
        return domain("tau_max and step must be positive");
    }
    let mut monotone = true;
    let mut prev = None;
    let mut tau = 5.0;
    let mut k = 0usize;
    while tau <= tau_max {
        let r = mu_dot_ratio(tau)?;
        if let Some(p) = prev {
            if !(r < p) {
                monotone = false;
            }
        }
        prev = Some(r);
        k += 1;
        tau = 5.0 + k as f64 * step;
    }
    Ok(ConvergenceRatio {
        ratio_at_tau_max: mu_dot_ratio(tau_max)?,
        monotone_past_five: monotone,
    })
}
