//! Single-atom stimulated-Rayleigh amplitudes and the net probe-photon
//! emission probability `w_T = |A_em|^2 - |A_abs|^2`, by four routes:
//!
//! 1. [`amplitudes_time_domain`] — direct evaluation of the time-ordered
//!    second-order amplitude for a discrete-level atom. Slowest and most
//!    literal; serves as the oracle for everything else.
//! 2. [`amplitudes_frequency_domain`] — spectral quadrature
//!    `A = 2 pi i int_0^inf dw alpha(w) * overlap(w)`, valid for any
//!    polarizability model and any pulse pair.
//! 3. [`w_t_resonant`] / [`j_resonant`] — closed-form reduction for matched
//!    Gaussian pulses resonant with a Lorentzian-broadened line,
//!    `w_T = (tau W_R)^2 (tau W~_R)^2 J(t0, gamma)`.
//! 4. [`w_t_continuum`] — the analytic above-threshold result for the
//!    delta-potential atom, first order in the polarizability variation
//!    across the pulse bandwidth.
//!
//! Route 1 and route 2 agree because both follow from the same second-order
//! perturbation theory; the normalization here is fixed so that the
//! time-domain route reproduces the spectral one identically (each field
//! cosine contributes half its amplitude to the rotating term).

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{
    erfcx, integrate_complex_split, IntegralEstimate, NumericsError, QuadratureSpec,
};
use crate::polarizability::{DeltaPotential, DiscreteLevels, ModelError, PolarizabilityModel};
use crate::pulses::{Branch, PulseError, PulsePair};

const PI: f64 = std::f64::consts::PI;
const TWO_OVER_SQRT_PI: f64 = 1.128_379_167_095_512_6;

#[derive(Debug, Error)]
pub enum RayleighError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("closed-form route requires matched pulses (equal carrier and duration)")]
    UnmatchedPulses,
    #[error("spectral window [{lo}, {hi}] is empty after clipping to the model domain")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("invalid resonant parameters: {0}")]
    InvalidParams(String),
}

/// Emission and absorption amplitudes for one pulse pair and model, with a
/// convergence flag instead of silent failure.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudePair {
    pub em: Complex64,
    pub abs: Complex64,
    /// False when quadrature or grid refinement did not reach its target.
    pub converged: bool,
    /// Combined absolute error estimate on either amplitude.
    pub abs_error: f64,
}

impl AmplitudePair {
    /// Net probe-photon emission probability; positive means probe gain.
    pub fn w_t(&self) -> f64 {
        self.em.norm_sqr() - self.abs.norm_sqr()
    }
}

/// A scalar observable with propagated convergence information.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
}

// ---------------------------------------------------------------------------
// Route 1: time domain
// ---------------------------------------------------------------------------

/// Discretization of the ordered double time integral.
#[derive(Debug, Clone)]
pub struct TimeGridSpec {
    /// Grid points for the base evaluation (the refinement check doubles it).
    pub points: usize,
    /// Half-span of the grid beyond both pulse centers, in max pulse
    /// durations; at least 6.
    pub span_sigmas: f64,
    /// Re-evaluate on a doubled grid and flag results that move by more than
    /// `refine_tol` (relative).
    pub refine_check: bool,
    pub refine_tol: f64,
}

impl Default for TimeGridSpec {
    fn default() -> Self {
        Self {
            points: 1 << 16,
            span_sigmas: 8.0,
            refine_check: true,
            refine_tol: 1e-4,
        }
    }
}

impl TimeGridSpec {
    fn validate(&self) -> Result<(), RayleighError> {
        if self.points < 64 {
            return Err(RayleighError::InvalidGrid(
                "need at least 64 grid points".into(),
            ));
        }
        if !(self.span_sigmas >= 6.0) {
            return Err(RayleighError::InvalidGrid(
                "grid must span at least 6 pulse durations beyond the centers".into(),
            ));
        }
        if !(self.refine_tol > 0.0) {
            return Err(RayleighError::InvalidGrid(
                "refine_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One branch of the ordered double integral on a fixed grid:
///
/// ```text
/// int dt int_{-inf}^{t} dt' e^{-(i w_n + delta)(t - t')} [f(t) g(t') + g(t) f(t')]
/// ```
///
/// computed with a damped running integral (trapezoid in both stages), so no
/// intermediate quantity can overflow even for strong damping.
fn ordered_double_integral(
    f: &[Complex64],
    g: &[Complex64],
    h: f64,
    wn: f64,
    delta: f64,
) -> Complex64 {
    let n = f.len();
    let decay = Complex64::new(-delta * h, -wn * h).exp();
    let mut s_g = Complex64::ZERO; // int^t g(t') e^{-lam (t-t')}
    let mut s_f = Complex64::ZERO;
    let mut acc = Complex64::ZERO;
    let mut prev = f[0] * s_g + g[0] * s_f; // zero, kept for clarity of the trapezoid
    for k in 1..n {
        s_g = s_g * decay + 0.5 * h * (g[k] + g[k - 1] * decay);
        s_f = s_f * decay + 0.5 * h * (f[k] + f[k - 1] * decay);
        let cur = f[k] * s_g + g[k] * s_f;
        acc += 0.5 * h * (cur + prev);
        prev = cur;
    }
    acc
}

fn amplitudes_on_grid(
    pair: &PulsePair,
    model: &DiscreteLevels,
    n: usize,
    span: f64,
) -> (Complex64, Complex64) {
    let tau = pair.pump.duration().max(pair.probe.duration());
    let dt = pair.delay();
    let t_min = dt.min(0.0) - span * tau;
    let t_max = dt.max(0.0) + span * tau;
    let h = (t_max - t_min) / (n as f64 - 1.0);

    let w0 = pair.pump.carrier();
    let w0t = pair.probe.carrier();

    // em: pump photon absorbed (e^{-i w0 t}), probe photon emitted
    // (e^{+i w0t (t - dt)}); abs is the conjugate assignment. The half
    // amplitudes come from splitting each cosine into exponentials.
    let mut f_em = Vec::with_capacity(n);
    let mut g_em = Vec::with_capacity(n);
    for k in 0..n {
        let t = t_min + h * k as f64;
        let ep = 0.5 * pair.pump.envelope(t);
        let et = 0.5 * pair.probe.envelope(t);
        f_em.push(ep * Complex64::new(0.0, -w0 * t).exp());
        g_em.push(et * Complex64::new(0.0, w0t * (t - dt)).exp());
    }
    let f_abs: Vec<Complex64> = f_em.iter().map(|z| z.conj()).collect();
    let g_abs: Vec<Complex64> = g_em.iter().map(|z| z.conj()).collect();

    let mut a_em = Complex64::ZERO;
    let mut a_abs = Complex64::ZERO;
    for level in model.levels() {
        let em = ordered_double_integral(&f_em, &g_em, h, level.energy, model.delta());
        let ab = ordered_double_integral(&f_abs, &g_abs, h, level.energy, model.delta());
        a_em -= level.dipole_sq * em;
        a_abs -= level.dipole_sq * ab;
    }
    (a_em, a_abs)
}

/// Brute-force evaluation of the ordered double time integral for a
/// discrete-level atom. Oracle for the spectral route.
pub fn amplitudes_time_domain(
    pair: &PulsePair,
    model: &DiscreteLevels,
    grid: &TimeGridSpec,
) -> Result<AmplitudePair, RayleighError> {
    grid.validate()?;
    let (em_c, abs_c) = amplitudes_on_grid(pair, model, grid.points, grid.span_sigmas);
    if !grid.refine_check {
        return Ok(AmplitudePair {
            em: em_c,
            abs: abs_c,
            converged: true,
            abs_error: f64::NAN,
        });
    }
    let (em_f, abs_f) = amplitudes_on_grid(pair, model, 2 * grid.points, grid.span_sigmas);
    let scale = em_f.norm().max(abs_f.norm()).max(f64::MIN_POSITIVE);
    let drift = ((em_f - em_c).norm().max((abs_f - abs_c).norm())) / scale;
    Ok(AmplitudePair {
        em: em_f,
        abs: abs_f,
        converged: drift <= grid.refine_tol,
        abs_error: drift * scale,
    })
}

// ---------------------------------------------------------------------------
// Route 2: frequency domain
// ---------------------------------------------------------------------------

/// Truncated spectral window covering the pulse-pair overlap, clipped to the
/// model domain.
fn spectral_window(pair: &PulsePair, model: &PolarizabilityModel, sigmas: f64) -> (f64, f64) {
    let t2 = pair.pump.duration().powi(2);
    let tt2 = pair.probe.duration().powi(2);
    let center = (pair.pump.carrier() * t2 + pair.probe.carrier() * tt2) / (t2 + tt2);
    let sigma = 1.0 / (t2 + tt2).sqrt();
    let lo = (center - sigmas * sigma)
        .max(model.domain_floor())
        .max(center * 1e-12);
    let hi = center + sigmas * sigma;
    (lo, hi)
}

/// Spectral-quadrature amplitudes `A = 2 pi i int dw alpha(w) overlap(w)`.
///
/// The integration window is the pulse-overlap Gaussian support (truncation
/// error bounded by its `exp(-(s/sqrt2)^2)` tail) clipped to the model
/// domain; for narrowband pulses this also discards the counter-rotating
/// lobes, whose contribution is O(exp(-2 (w0 tau)^2)).
pub fn amplitudes_frequency_domain(
    pair: &PulsePair,
    model: &PolarizabilityModel,
    spec: &QuadratureSpec,
) -> Result<AmplitudePair, RayleighError> {
    let (lo, hi) = spectral_window(pair, model, spec.truncation_sigmas);
    if !(lo < hi) {
        return Err(RayleighError::EmptyWindow { lo, hi });
    }
    let splits = model.resonances_in(lo, hi);

    let run = |branch: Branch| -> Result<IntegralEstimate, RayleighError> {
        let f = |w: f64| -> Complex64 {
            match model.alpha(w) {
                Ok(a) => a * pair.overlap_integrand(w, branch),
                Err(_) => Complex64::new(f64::NAN, f64::NAN), // caught by the quadrature
            }
        };
        Ok(integrate_complex_split(f, lo, hi, &splits, spec)?)
    };

    let em = run(Branch::Emission)?;
    let abs = run(Branch::Absorption)?;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    Ok(AmplitudePair {
        em: two_pi_i * em.value,
        abs: two_pi_i * abs.value,
        converged: em.converged && abs.converged,
        abs_error: 2.0 * PI * em.abs_error.max(abs.abs_error),
    })
}

/// `w_T` through the spectral route.
pub fn w_t_frequency(
    pair: &PulsePair,
    model: &PolarizabilityModel,
    spec: &QuadratureSpec,
) -> Result<Estimate, RayleighError> {
    let a = amplitudes_frequency_domain(pair, model, spec)?;
    Ok(Estimate {
        value: a.w_t(),
        abs_error: 2.0 * (a.em.norm() + a.abs.norm()) * a.abs_error,
        converged: a.converged,
    })
}

/// `w_T` through the time-domain route.
pub fn w_t_time(
    pair: &PulsePair,
    model: &DiscreteLevels,
    grid: &TimeGridSpec,
) -> Result<Estimate, RayleighError> {
    let a = amplitudes_time_domain(pair, model, grid)?;
    Ok(Estimate {
        value: a.w_t(),
        abs_error: 2.0 * (a.em.norm() + a.abs.norm()) * a.abs_error,
        converged: a.converged,
    })
}

// ---------------------------------------------------------------------------
// Route 3: resonant closed form
// ---------------------------------------------------------------------------

/// Dimensionless parameters of the resonant closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantParams {
    /// Delay over duration, `t0 = dt / tau`.
    pub t0: f64,
    /// Width times duration, `gamma = Gamma tau > 0`.
    pub gamma: f64,
    /// Pump Rabi frequency times duration, `W_R tau` with
    /// `W_R = eps0 |d01| / 2`.
    pub pump_rabi_tau: f64,
    /// Probe Rabi frequency times duration.
    pub probe_rabi_tau: f64,
}

impl ResonantParams {
    pub fn new(
        t0: f64,
        gamma: f64,
        pump_rabi_tau: f64,
        probe_rabi_tau: f64,
    ) -> Result<Self, RayleighError> {
        if !(gamma > 0.0) {
            return Err(RayleighError::InvalidParams(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if ![t0, pump_rabi_tau, probe_rabi_tau].iter().all(|v| v.is_finite())
            || pump_rabi_tau < 0.0
            || probe_rabi_tau < 0.0
        {
            return Err(RayleighError::InvalidParams(
                "t0 and the Rabi products must be finite, Rabi products non-negative".into(),
            ));
        }
        Ok(Self {
            t0,
            gamma,
            pump_rabi_tau,
            probe_rabi_tau,
        })
    }
}

/// `I(t0) = int dx exp(-x^2 + i t0 x) / (x^2 + gamma^2/4)` by adaptive
/// quadrature over the truncated Gaussian support, split at the Lorentzian
/// peak.
pub fn resonant_i(
    t0: f64,
    gamma: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate, RayleighError> {
    let g2 = 0.25 * gamma * gamma;
    let x_max = spec.truncation_sigmas / std::f64::consts::SQRT_2;
    Ok(integrate_complex_split(
        |x| Complex64::new(-x * x, t0 * x).exp() / (x * x + g2),
        -x_max,
        x_max,
        &[0.0],
        spec,
    )?)
}

/// `I'(t0) = int dx i x exp(-x^2 + i t0 x) / (x^2 + gamma^2/4)`.
pub fn resonant_i_prime(
    t0: f64,
    gamma: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate, RayleighError> {
    let g2 = 0.25 * gamma * gamma;
    let x_max = spec.truncation_sigmas / std::f64::consts::SQRT_2;
    Ok(integrate_complex_split(
        |x| Complex64::new(0.0, x) * Complex64::new(-x * x, t0 * x).exp() / (x * x + g2),
        -x_max,
        x_max,
        &[0.0],
        spec,
    )?)
}

/// Dimensionless resonant delay function
/// `J(t0, gamma) = -gamma d/dt0 |I(t0)|^2`, computed analytically as
/// `-2 gamma Re(conj(I) I')` from the two quadratures above. This is the
/// authoritative evaluation; [`j_resonant_closed`] cross-checks it.
pub fn j_resonant(t0: f64, gamma: f64, spec: &QuadratureSpec) -> Result<Estimate, RayleighError> {
    if !(gamma > 0.0) {
        return Err(RayleighError::InvalidParams(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let i = resonant_i(t0, gamma, spec)?;
    let ip = resonant_i_prime(t0, gamma, spec)?;
    let value = -2.0 * gamma * (i.value.conj() * ip.value).re;
    let abs_error = 2.0
        * gamma
        * (ip.value.norm() * i.abs_error
            + i.value.norm() * ip.abs_error
            + i.abs_error * ip.abs_error);
    Ok(Estimate {
        value,
        abs_error,
        converged: i.converged && ip.converged,
    })
}

/// Closed form for `I(t0)` in terms of the scaled complementary error
/// function:
///
/// ```text
/// I(t0) = (pi / gamma) e^{-t0^2/4} [ erfcx(g + t0/2) + erfcx(g - t0/2) ],  g = gamma/2
/// ```
pub fn resonant_i_closed(t0: f64, gamma: f64) -> f64 {
    let g = 0.5 * gamma;
    (PI / gamma) * (-0.25 * t0 * t0).exp() * (erfcx(g + 0.5 * t0) + erfcx(g - 0.5 * t0))
}

/// Closed-form `J(t0, gamma)`; derivation cross-check only, the quadrature
/// route is authoritative.
pub fn j_resonant_closed(t0: f64, gamma: f64) -> f64 {
    let g = 0.5 * gamma;
    let ex_p = erfcx(g + 0.5 * t0);
    let ex_m = erfcx(g - 0.5 * t0);
    let exd = |z: f64| 2.0 * z * erfcx(z) - TWO_OVER_SQRT_PI;
    let pref = (PI / (2.0 * g)) * (-0.25 * t0 * t0).exp();
    let i = pref * (ex_p + ex_m);
    let ip = pref * (-0.5 * t0 * (ex_p + ex_m) + 0.5 * (exd(g + 0.5 * t0) - exd(g - 0.5 * t0)));
    -2.0 * gamma * i * ip
}

/// Resonant closed-form probability
/// `w_T = (tau W_R)^2 (tau W~_R)^2 J(t0, gamma)`.
pub fn w_t_resonant(params: &ResonantParams, spec: &QuadratureSpec) -> Result<Estimate, RayleighError> {
    let j = j_resonant(params.t0, params.gamma, spec)?;
    let pref = params.pump_rabi_tau.powi(2) * params.probe_rabi_tau.powi(2);
    Ok(Estimate {
        value: pref * j.value,
        abs_error: pref * j.abs_error,
        converged: j.converged,
    })
}

/// Large-width asymptote of the resonant probability,
/// `w_T -> (tau W_R)^2 (tau W~_R)^2 (16 pi / gamma^3) t0 exp(-t0^2/2)`;
/// quantitative for `gamma >> 1`.
pub fn w_t_asymptotic(params: &ResonantParams) -> f64 {
    params.pump_rabi_tau.powi(2)
        * params.probe_rabi_tau.powi(2)
        * (16.0 * PI / params.gamma.powi(3))
        * params.t0
        * (-0.5 * params.t0 * params.t0).exp()
}

// ---------------------------------------------------------------------------
// Route 4: continuum closed form
// ---------------------------------------------------------------------------

/// `(w0 - E_b) tau`: the number of pulse bandwidths separating the carrier
/// from the ionization threshold. The linearized continuum formula assumes
/// this is large; callers should warn below 10.
pub fn continuum_bandwidth_margin(pair: &PulsePair, model: &DeltaPotential) -> f64 {
    (pair.pump.carrier() - model.binding_energy) * pair.pump.duration()
}

/// Analytic above-threshold probability for matched pulses,
///
/// ```text
/// w_T = (pi eps0^2 epst0^2 / 8) dt exp(-dt^2 / 2 tau^2)
///       * (alpha_1 alpha_2' - alpha_2 alpha_1')|_{w0}
/// ```
///
/// first order in the variation of `alpha` across the pulse bandwidth.
pub fn w_t_continuum(pair: &PulsePair, model: &DeltaPotential) -> Result<f64, RayleighError> {
    if !pair.is_matched() {
        return Err(RayleighError::UnmatchedPulses);
    }
    let w0 = pair.pump.carrier();
    let tau = pair.pump.duration();
    let dt = pair.delay();
    let pm = PolarizabilityModel::Delta(*model);
    let a = pm.alpha(w0)?;
    let ap = pm.alpha_prime(w0)?;
    let weight = a.re * ap.im - a.im * ap.re;
    Ok((PI / 8.0)
        * pair.pump.amplitude().powi(2)
        * pair.probe.amplitude().powi(2)
        * dt
        * (-0.5 * (dt / tau).powi(2)).exp()
        * weight)
}
