//! Gaussian pump and probe pulses and their analytic Fourier spectra.
//!
//! Field model (atomic units, scalar polarization):
//!
//! ```text
//! eps(t) = eps0 * exp(-(t - dt)^2 / 2 tau^2) * cos(w0 (t - dt))
//! ```
//!
//! The carrier phase is referenced to the pulse center, so a delay is a pure
//! spectral phase `exp(-i w dt)`. Spectra follow the convention
//!
//! ```text
//! eps(t) = int dw exp(+i w t) eps_w
//! ```
//!
//! which gives the two-lobe analytic transform in [`GaussianPulse::spectrum`].
//! A carrier phase referenced to `t = 0` instead would multiply the spectrum
//! by the constant phase `exp(i w0 dt)`, which is common to both branches of
//! the emission/absorption overlap and drops out of every `|A|^2`; the
//! convention is documented here and not configurable.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::norm;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

#[derive(Debug, Error)]
pub enum PulseError {
    #[error("pulse duration must be positive, got {0}")]
    NonPositiveDuration(f64),
    #[error("carrier frequency must be positive, got {0}")]
    NonPositiveCarrier(f64),
    #[error("field amplitude must be non-negative, got {0}")]
    NegativeAmplitude(f64),
    #[error("direction must be a unit vector, |n| = {0}")]
    NotUnitDirection(f64),
    #[error("pump delay must be zero (probe carries the pair delay), got {0}")]
    PumpDelayNonZero(f64),
    #[error("non-finite pulse parameter")]
    NonFinite,
}

/// A linearly polarized Gaussian pulse in atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulse {
    amplitude: f64,
    carrier: f64,
    duration: f64,
    delay: f64,
    direction: [f64; 3],
}

impl GaussianPulse {
    pub fn new(
        amplitude: f64,
        carrier: f64,
        duration: f64,
        delay: f64,
        direction: [f64; 3],
    ) -> Result<Self, PulseError> {
        if ![amplitude, carrier, duration, delay].iter().all(|v| v.is_finite())
            || !direction.iter().all(|v| v.is_finite())
        {
            return Err(PulseError::NonFinite);
        }
        if duration <= 0.0 {
            return Err(PulseError::NonPositiveDuration(duration));
        }
        if carrier <= 0.0 {
            return Err(PulseError::NonPositiveCarrier(carrier));
        }
        if amplitude < 0.0 {
            return Err(PulseError::NegativeAmplitude(amplitude));
        }
        let n = norm(direction);
        if (n - 1.0).abs() > 1e-12 {
            return Err(PulseError::NotUnitDirection(n));
        }
        Ok(Self {
            amplitude,
            carrier,
            duration,
            delay,
            direction,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
    pub fn carrier(&self) -> f64 {
        self.carrier
    }
    pub fn duration(&self) -> f64 {
        self.duration
    }
    pub fn delay(&self) -> f64 {
        self.delay
    }
    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }

    /// Same pulse shifted to a new center time.
    pub fn with_delay(&self, delay: f64) -> Self {
        Self { delay, ..*self }
    }

    /// Wave vector `(w0 / c) * direction`.
    pub fn wave_vector(&self) -> [f64; 3] {
        let k = self.carrier / crate::units::SPEED_OF_LIGHT_AU;
        [
            k * self.direction[0],
            k * self.direction[1],
            k * self.direction[2],
        ]
    }

    /// The frequency-domain reduction assumes many carrier cycles under the
    /// envelope; callers should warn when this returns false (w0 tau < 10).
    pub fn is_narrowband(&self) -> bool {
        self.carrier * self.duration >= 10.0
    }

    /// Envelope at time `t`.
    pub fn envelope(&self, t: f64) -> f64 {
        let u = (t - self.delay) / self.duration;
        self.amplitude * (-0.5 * u * u).exp()
    }

    /// Instantaneous field at time `t`.
    pub fn field(&self, t: f64) -> f64 {
        self.envelope(t) * (self.carrier * (t - self.delay)).cos()
    }

    /// Analytic Fourier component `eps_w` of the real field.
    ///
    /// Both the positive- and the negative-frequency Gaussian lobe are kept;
    /// the counter-rotating lobe is ~exp(-2 (w0 tau)^2) near the carrier and
    /// irrelevant for narrowband pulses, but its presence keeps
    /// `spectrum(-w) = conj(spectrum(w))` exact.
    pub fn spectrum(&self, w: f64) -> Complex64 {
        let tau = self.duration;
        let pref = self.amplitude * tau / (2.0 * SQRT_2PI);
        let lobes = (-0.5 * ((w - self.carrier) * tau).powi(2)).exp()
            + (-0.5 * ((w + self.carrier) * tau).powi(2)).exp();
        let phase = Complex64::new(0.0, -w * self.delay).exp();
        pref * lobes * phase
    }

    /// Analytic `int eps(t)^2 dt`.
    pub fn energy_time_integral(&self) -> f64 {
        let wt = self.carrier * self.duration;
        0.5 * self.amplitude.powi(2)
            * std::f64::consts::PI.sqrt()
            * self.duration
            * (1.0 + (-wt * wt).exp())
    }
}

/// Stimulated emission or absorption of a probe photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Emission,
    Absorption,
}

/// Pump plus delayed probe. The pump is pinned at zero delay so the probe
/// delay is the pair delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsePair {
    pub pump: GaussianPulse,
    pub probe: GaussianPulse,
}

impl PulsePair {
    pub fn new(pump: GaussianPulse, probe: GaussianPulse) -> Result<Self, PulseError> {
        if pump.delay != 0.0 {
            return Err(PulseError::PumpDelayNonZero(pump.delay));
        }
        Ok(Self { pump, probe })
    }

    pub fn delay(&self) -> f64 {
        self.probe.delay
    }

    /// Same pair with the probe moved to a new delay.
    pub fn with_delay(&self, delay: f64) -> Self {
        Self {
            pump: self.pump,
            probe: self.probe.with_delay(delay),
        }
    }

    /// True when carrier frequencies and durations coincide; the closed-form
    /// routes require this.
    pub fn is_matched(&self) -> bool {
        self.pump.carrier == self.probe.carrier && self.pump.duration == self.probe.duration
    }

    /// Spectral overlap `eps_w^* epst_w` (emission) or `eps_w epst_w^*`
    /// (absorption) of pump spectrum `eps` and probe spectrum `epst`.
    pub fn overlap_integrand(&self, w: f64, branch: Branch) -> Complex64 {
        let e = self.pump.spectrum(w);
        let et = self.probe.spectrum(w);
        match branch {
            Branch::Emission => e.conj() * et,
            Branch::Absorption => e * et.conj(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_complex, QuadratureSpec};

    const Z: [f64; 3] = [0.0, 0.0, 1.0];

    fn pulse(amp: f64, w0: f64, tau: f64, dt: f64) -> GaussianPulse {
        GaussianPulse::new(amp, w0, tau, dt, Z).unwrap()
    }

    #[test]
    fn constructor_validation() {
        assert!(GaussianPulse::new(1.0, 1.0, 0.0, 0.0, Z).is_err());
        assert!(GaussianPulse::new(1.0, -1.0, 1.0, 0.0, Z).is_err());
        assert!(GaussianPulse::new(-1.0, 1.0, 1.0, 0.0, Z).is_err());
        assert!(GaussianPulse::new(1.0, 1.0, 1.0, 0.0, [0.0, 0.0, 0.9]).is_err());
        assert!(GaussianPulse::new(1.0, 1.0, 1.0, 0.0, Z).is_ok());
        assert!(pulse(1.0, 50.0, 1.0, 0.0).is_narrowband());
        assert!(!pulse(1.0, 5.0, 1.0, 0.0).is_narrowband());
    }

    #[test]
    fn pump_delay_pinned() {
        let pump = pulse(1.0, 50.0, 1.0, 0.5);
        let probe = pulse(1.0, 50.0, 1.0, 1.0);
        assert!(PulsePair::new(pump, probe).is_err());
        let pair = PulsePair::new(pump.with_delay(0.0), probe).unwrap();
        assert_eq!(pair.delay(), 1.0);
    }

    #[test]
    fn spectrum_at_carrier() {
        // eps0 tau / (2 sqrt(2 pi)) * (1 + exp(-2 w0^2 tau^2)) at w = w0, dt = 0
        let (eps0, w0, tau) = (0.7, 3.0, 0.9);
        let p = pulse(eps0, w0, tau, 0.0);
        let want = eps0 * tau / (2.0 * SQRT_2PI) * (1.0 + (-2.0 * w0 * w0 * tau * tau).exp());
        let got = p.spectrum(w0);
        assert!((got.re - want).abs() < 1e-15 * want.abs().max(1.0));
        assert_eq!(got.im, 0.0);
    }

    #[test]
    fn spectrum_reality_symmetry() {
        let p = pulse(1.3, 7.0, 2.0, 0.8);
        for w in [-9.0, -2.3, 0.1, 3.7, 8.5] {
            let a = p.spectrum(-w);
            let b = p.spectrum(w).conj();
            assert!((a - b).norm() < 1e-15 * b.norm().max(1e-300));
        }
    }

    #[test]
    fn delay_is_pure_phase() {
        let p0 = pulse(1.0, 10.0, 1.5, 0.0);
        let p1 = p0.with_delay(3.3);
        for w in [8.0, 9.5, 10.0, 11.7] {
            assert!((p0.spectrum(w).norm() - p1.spectrum(w).norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn overlap_branches_conjugate() {
        let pair = PulsePair::new(pulse(1.0, 40.0, 1.0, 0.0), pulse(0.5, 40.0, 1.2, 0.7)).unwrap();
        for w in [38.0, 40.0, 41.5] {
            let em = pair.overlap_integrand(w, Branch::Emission);
            let ab = pair.overlap_integrand(w, Branch::Absorption);
            assert!((em - ab.conj()).norm() < 1e-18);
        }
        // zero delay, identical pulses: both branches real non-negative
        let same = PulsePair::new(pulse(1.0, 40.0, 1.0, 0.0), pulse(1.0, 40.0, 1.0, 0.0)).unwrap();
        let em = same.overlap_integrand(40.5, Branch::Emission);
        assert!(em.im.abs() < 1e-20 && em.re >= 0.0);
    }

    #[test]
    fn overlap_gaussian_falloff() {
        // equal-tau, equal-carrier pair: |overlap| ~ exp(-(w - w0)^2 tau^2)
        let (w0, tau) = (50.0, 1.0);
        let pair = PulsePair::new(pulse(1.0, w0, tau, 0.0), pulse(1.0, w0, tau, 1.0)).unwrap();
        let at = |w: f64| pair.overlap_integrand(w, Branch::Emission).norm();
        let ratio = at(w0 + 1.5) / at(w0);
        let want = (-(1.5 * tau).powi(2)).exp();
        assert!((ratio - want).abs() / want < 1e-12);
    }

    #[test]
    fn spectral_prefactor_identity() {
        // 2 pi * (pump prefactor) * (probe prefactor) = eps0 epst0 tau^2 / 4
        // for identical carriers and durations; evaluated at the carrier where
        // the counter-rotating lobe underflows for w0 tau = 50.
        let (eps0, epst0, w0, tau) = (0.8, 0.3, 50.0, 1.0);
        let pump = pulse(eps0, w0, tau, 0.0);
        let probe = pulse(epst0, w0, tau, 0.0);
        let lhs = 2.0 * std::f64::consts::PI * (pump.spectrum(w0) * probe.spectrum(w0)).re;
        let rhs = eps0 * epst0 * tau * tau / 4.0;
        assert!((lhs - rhs).abs() / rhs < 1e-12);
    }

    #[test]
    fn parseval_energy() {
        // 2 pi int |eps_w|^2 dw = int eps(t)^2 dt; integrate the positive
        // lobe over w0 +- 10/tau and double it (spectrum is conjugate
        // symmetric, the lobes do not overlap at w0 tau = 50).
        let p = pulse(1.1, 50.0, 1.0, 0.4);
        let spec = QuadratureSpec::default();
        let lobe = integrate_complex(
            |w| Complex64::new(p.spectrum(w).norm_sqr(), 0.0),
            p.carrier() - 10.0 / p.duration(),
            p.carrier() + 10.0 / p.duration(),
            &spec,
        )
        .unwrap();
        assert!(lobe.converged);
        let lhs = 2.0 * std::f64::consts::PI * 2.0 * lobe.value.re;
        let rhs = p.energy_time_integral();
        assert!((lhs - rhs).abs() / rhs < 1e-6);
    }
}
