//! Scenario configuration: a single JSON document in laboratory units,
//! resolved against documented defaults, validated, and converted to
//! atomic-unit core objects.
//!
//! Precedence is flags > config file > defaults; the resolved config is
//! echoed into every output header and re-parses to an equivalent run.

use serde::{Deserialize, Serialize};
use srs_core::numerics::QuadratureSpec;
use srs_core::phasematch::EnsembleGeometry;
use srs_core::polarizability::{
    DeltaPotential, DiscreteLevels, PolarizabilityModel, ResonantLorentzian,
};
use srs_core::pulses::{GaussianPulse, PulsePair};
use srs_core::rayleigh::TimeGridSpec;
use srs_core::units::{
    to_atomic, wavelength_to_frequency, Dimension, Quantity, Unit, ATOMIC_TIME_S,
    SPEED_OF_LIGHT_AU,
};

use crate::AppError;

fn config_err(msg: impl Into<String>) -> AppError {
    AppError::Config(msg.into())
}

/// Pulse-pair description in laboratory units. Exactly one of
/// `wavelength_nm` / `carrier_ev`, and exactly one field-strength input per
/// pulse (`*_rabi_tau` or `*_field_au`), must be given.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    pub wavelength_nm: Option<f64>,
    pub carrier_ev: Option<f64>,
    pub duration_fs: f64,
    /// Probe delay in units of the duration (`t0`); positive = retarded.
    pub delay_over_tau: Option<f64>,
    pub delay_fs: Option<f64>,
    /// Pump Rabi frequency times duration (dimensionless).
    pub pump_rabi_tau: Option<f64>,
    pub pump_field_au: Option<f64>,
    pub probe_rabi_tau: Option<f64>,
    pub probe_field_au: Option<f64>,
    /// Angle between pump and probe propagation directions.
    pub beam_angle_mrad: f64,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self {
            wavelength_nm: None,
            carrier_ev: None,
            duration_fs: 100.0,
            delay_over_tau: None,
            delay_fs: None,
            pump_rabi_tau: None,
            pump_field_au: None,
            probe_rabi_tau: None,
            probe_field_au: None,
            beam_angle_mrad: 0.0,
        }
    }
}

/// Atom model selector with lab-unit parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    /// Bound-bound resonance at the pulse carrier with a Lorentzian width.
    Resonant {
        #[serde(default = "default_d01_sq")]
        d01_sq_au: f64,
        /// Width in s^-1; when absent, `gain` fills it from the
        /// phase-matching stage and `wt` requires it.
        #[serde(default)]
        gamma_per_s: Option<f64>,
    },
    /// Single-bound-state continuum model. Exactly one of `binding_ev`
    /// (ionization energy) or `x` (carrier over threshold, `w0/E_b`).
    Delta {
        #[serde(default)]
        binding_ev: Option<f64>,
        #[serde(default)]
        x: Option<f64>,
    },
    /// Discrete level table (transition energy a.u., dipole-squared a.u.).
    Levels {
        #[serde(default)]
        path: Option<String>,
        #[serde(default)]
        levels: Option<Vec<(f64, f64)>>,
        delta_au: f64,
    },
}

fn default_d01_sq() -> f64 {
    1.0
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::Resonant {
            d01_sq_au: 1.0,
            gamma_per_s: None,
        }
    }
}

/// Focal-volume description; the bookkeeping volume is `d^2 L`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub waist_cm: f64,
    pub length_cm: f64,
    pub density_per_cm3: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            waist_cm: 1e-3,
            length_cm: 1e-2,
            density_per_cm3: 1e16,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub var: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepConfig {
    /// Uniform grid over `[min, max]`; a single-point sweep needs
    /// `min == max`.
    pub fn grid(&self) -> Result<Vec<f64>, AppError> {
        if self.steps == 0 {
            return Err(config_err("sweep needs at least one step"));
        }
        if self.steps == 1 {
            if self.min != self.max {
                return Err(config_err("single-step sweep requires min == max"));
            }
            return Ok(vec![self.min]);
        }
        if !(self.min < self.max) {
            return Err(config_err(format!(
                "sweep range is empty: min {} >= max {}",
                self.min, self.max
            )));
        }
        let n = self.steps;
        Ok((0..n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (n as f64 - 1.0))
            .collect())
    }
}

/// Numerical knobs with safe defaults; all optional in the file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub truncation_sigmas: f64,
    pub time_grid_points: usize,
    /// Direction samples for the spontaneous-emission solid-angle estimate.
    pub fsp_direction_samples: usize,
    /// Position subsample cap for large ensembles.
    pub fsp_subsample: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            max_subdivisions: q.max_subdivisions,
            truncation_sigmas: q.truncation_sigmas,
            time_grid_points: TimeGridSpec::default().points,
            fsp_direction_samples: 20_000,
            fsp_subsample: 10_000,
        }
    }
}

impl NumericsConfig {
    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
            truncation_sigmas: self.truncation_sigmas,
        }
    }

    pub fn time_grid(&self) -> TimeGridSpec {
        TimeGridSpec {
            points: self.time_grid_points,
            ..Default::default()
        }
    }
}

/// The scenario document. All fields have documented defaults and the
/// resolved form is echoed into outputs.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub pulses: PulseConfig,
    pub model: ModelConfig,
    pub geometry: GeometryConfig,
    /// Single-atom radiative width feeding the collective-width estimate.
    pub gamma_r_per_s: Option<f64>,
    pub sweep: Option<SweepConfig>,
    pub numerics: NumericsConfig,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self, AppError> {
        serde_json::from_str(text).map_err(|e| config_err(format!("config parse: {e}")))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// Materialize the documented defaults for every exclusive input group
    /// left empty, so the echoed config is fully explicit: 1000 nm carrier,
    /// probe delayed by one duration, Rabi-times-duration 1e-2 per pulse,
    /// radiative width 1e8 s^-1.
    pub fn with_defaults(mut self) -> Self {
        let p = &mut self.pulses;
        if p.wavelength_nm.is_none() && p.carrier_ev.is_none() {
            p.wavelength_nm = Some(1000.0);
        }
        if p.delay_over_tau.is_none() && p.delay_fs.is_none() {
            p.delay_over_tau = Some(1.0);
        }
        if p.pump_rabi_tau.is_none() && p.pump_field_au.is_none() {
            p.pump_rabi_tau = Some(1e-2);
        }
        if p.probe_rabi_tau.is_none() && p.probe_field_au.is_none() {
            p.probe_rabi_tau = Some(1e-2);
        }
        if self.gamma_r_per_s.is_none() {
            self.gamma_r_per_s = Some(1e8);
        }
        self
    }

    pub fn gamma_r_au(&self) -> Result<f64, AppError> {
        let g = self.gamma_r_per_s.unwrap_or(1e8);
        if !(g > 0.0) {
            return Err(config_err("gamma_r_per_s must be positive"));
        }
        Ok(g * ATOMIC_TIME_S)
    }
}

/// Scenario resolved to atomic units, ready for the core routines.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub pair: PulsePair,
    pub model: PolarizabilityModel,
    pub geometry: EnsembleGeometry,
    /// Dipole-squared used for Rabi/field conversions, when the model has one.
    pub d01_sq: Option<f64>,
    /// Wave number of the carrier, a.u.
    pub k: f64,
    /// Probe wave-vector mismatch `k - k~` for the beam angle.
    pub dk: [f64; 3],
    pub warnings: Vec<String>,
}

impl ScenarioConfig {
    /// Carrier angular frequency in a.u.
    pub fn carrier_au(&self) -> Result<f64, AppError> {
        match (self.pulses.wavelength_nm, self.pulses.carrier_ev) {
            (Some(nm), None) => {
                if !(nm > 0.0) {
                    return Err(config_err("wavelength_nm must be positive"));
                }
                let lam = to_atomic(Quantity::new(nm, Dimension::Length), Unit::Nanometer)
                    .map_err(|e| config_err(e.to_string()))?;
                Ok(wavelength_to_frequency(lam))
            }
            (None, Some(ev)) => {
                if !(ev > 0.0) {
                    return Err(config_err("carrier_ev must be positive"));
                }
                to_atomic(Quantity::new(ev, Dimension::Energy), Unit::Electronvolt)
                    .map_err(|e| config_err(e.to_string()))
            }
            _ => Err(config_err(
                "give exactly one of pulses.wavelength_nm / pulses.carrier_ev",
            )),
        }
    }

    pub fn duration_au(&self) -> Result<f64, AppError> {
        if !(self.pulses.duration_fs > 0.0) {
            return Err(config_err("duration_fs must be positive"));
        }
        to_atomic(
            Quantity::new(self.pulses.duration_fs, Dimension::Time),
            Unit::Femtosecond,
        )
        .map_err(|e| config_err(e.to_string()))
    }

    pub fn delay_au(&self) -> Result<f64, AppError> {
        let tau = self.duration_au()?;
        match (self.pulses.delay_over_tau, self.pulses.delay_fs) {
            (Some(t0), None) => Ok(t0 * tau),
            (None, Some(fs)) => to_atomic(Quantity::new(fs, Dimension::Time), Unit::Femtosecond)
                .map_err(|e| config_err(e.to_string())),
            _ => Err(config_err(
                "give exactly one of pulses.delay_over_tau / pulses.delay_fs",
            )),
        }
    }

    /// Field amplitude (a.u.) from the exclusive Rabi/field inputs.
    fn field_au(
        &self,
        rabi_tau: Option<f64>,
        field_au: Option<f64>,
        which: &str,
        d01_sq: Option<f64>,
        tau: f64,
    ) -> Result<f64, AppError> {
        match (rabi_tau, field_au) {
            (Some(rt), None) => {
                if rt < 0.0 {
                    return Err(config_err(format!("{which}_rabi_tau must be >= 0")));
                }
                let d01 = d01_sq
                    .ok_or_else(|| {
                        config_err(format!(
                            "{which}_rabi_tau needs a model with a dipole moment; \
                             give {which}_field_au for the delta model"
                        ))
                    })?
                    .sqrt();
                Ok(2.0 * rt / (tau * d01))
            }
            (None, Some(f)) => {
                if f < 0.0 {
                    return Err(config_err(format!("{which}_field_au must be >= 0")));
                }
                Ok(f)
            }
            _ => Err(config_err(format!(
                "give exactly one of pulses.{which}_rabi_tau / pulses.{which}_field_au"
            ))),
        }
    }

    pub fn geometry_au(&self) -> Result<EnsembleGeometry, AppError> {
        let g = &self.geometry;
        let conv = |v: f64, dim, unit| {
            to_atomic(Quantity::new(v, dim), unit).map_err(|e| config_err(e.to_string()))
        };
        let waist = conv(g.waist_cm, Dimension::Length, Unit::Centimeter)?;
        let length = conv(g.length_cm, Dimension::Length, Unit::Centimeter)?;
        let density = conv(g.density_per_cm3, Dimension::Density, Unit::PerCubicCentimeter)?;
        EnsembleGeometry::new(waist, length, density, [0.0, 0.0, 1.0])
            .map_err(|e| config_err(e.to_string()))
    }

    /// Dipole-squared available for Rabi conversions, if the model has one.
    fn model_d01_sq(&self, model: &PolarizabilityModel) -> Option<f64> {
        match model {
            PolarizabilityModel::Lorentzian(m) => Some(m.d01_sq),
            PolarizabilityModel::Discrete(m) => Some(m.levels()[0].dipole_sq),
            PolarizabilityModel::Delta(_) => None,
        }
    }

    /// Build the polarizability model. `gamma_fallback_au` supplies the
    /// resonant width when the config leaves it to the pipeline.
    pub fn model_au(
        &self,
        w0: f64,
        gamma_fallback_au: Option<f64>,
    ) -> Result<PolarizabilityModel, AppError> {
        match &self.model {
            ModelConfig::Resonant {
                d01_sq_au,
                gamma_per_s,
            } => {
                let width = match (gamma_per_s, gamma_fallback_au) {
                    (Some(g), _) => g * ATOMIC_TIME_S,
                    (None, Some(g)) => g,
                    (None, None) => {
                        return Err(config_err(
                            "model.gamma_per_s is required unless the gain pipeline supplies it",
                        ))
                    }
                };
                Ok(PolarizabilityModel::Lorentzian(
                    ResonantLorentzian::new(w0, *d01_sq_au, width)
                        .map_err(|e| config_err(e.to_string()))?,
                ))
            }
            ModelConfig::Delta { binding_ev, x } => {
                let e_b = match (binding_ev, x) {
                    (Some(ev), None) => {
                        to_atomic(Quantity::new(*ev, Dimension::Energy), Unit::Electronvolt)
                            .map_err(|e| config_err(e.to_string()))?
                    }
                    (None, Some(x)) => {
                        if !(*x > 1.0) {
                            return Err(config_err(format!(
                                "model.x must be > 1 (above threshold), got {x}"
                            )));
                        }
                        w0 / x
                    }
                    _ => {
                        return Err(config_err(
                            "give exactly one of model.binding_ev / model.x",
                        ))
                    }
                };
                Ok(PolarizabilityModel::Delta(
                    DeltaPotential::new(e_b).map_err(|e| config_err(e.to_string()))?,
                ))
            }
            ModelConfig::Levels {
                path,
                levels,
                delta_au,
            } => {
                let table = match (path, levels) {
                    (Some(p), None) => {
                        let text = std::fs::read_to_string(p)
                            .map_err(|e| AppError::Io(format!("{p}: {e}")))?;
                        if p.ends_with(".json") {
                            DiscreteLevels::from_json_str(&text, Some(*delta_au))
                        } else {
                            DiscreteLevels::from_table_str(&text, *delta_au)
                        }
                    }
                    (None, Some(rows)) => DiscreteLevels::new(
                        rows.iter()
                            .map(|(e, d2)| srs_core::polarizability::Level {
                                energy: *e,
                                dipole_sq: *d2,
                            })
                            .collect(),
                        *delta_au,
                    ),
                    _ => {
                        return Err(config_err(
                            "give exactly one of model.path / model.levels",
                        ))
                    }
                };
                Ok(PolarizabilityModel::Discrete(
                    table.map_err(|e| config_err(e.to_string()))?,
                ))
            }
        }
    }

    /// Resolve the full scenario to atomic units.
    pub fn resolve(&self, gamma_fallback_au: Option<f64>) -> Result<ResolvedScenario, AppError> {
        let w0 = self.carrier_au()?;
        let tau = self.duration_au()?;
        let delay = self.delay_au()?;
        let model = self.model_au(w0, gamma_fallback_au)?;
        let d01_sq = self.model_d01_sq(&model);

        let eps0 = self.field_au(
            self.pulses.pump_rabi_tau,
            self.pulses.pump_field_au,
            "pump",
            d01_sq,
            tau,
        )?;
        let epst0 = self.field_au(
            self.pulses.probe_rabi_tau,
            self.pulses.probe_field_au,
            "probe",
            d01_sq,
            tau,
        )?;

        let theta = self.pulses.beam_angle_mrad * 1e-3;
        let pump_dir = [0.0, 0.0, 1.0];
        let probe_dir = [theta.sin(), 0.0, theta.cos()];
        let pump = GaussianPulse::new(eps0, w0, tau, 0.0, pump_dir)
            .map_err(|e| config_err(e.to_string()))?;
        let probe = GaussianPulse::new(epst0, w0, tau, delay, probe_dir)
            .map_err(|e| config_err(e.to_string()))?;
        let pair = PulsePair::new(pump, probe).map_err(|e| config_err(e.to_string()))?;

        let mut warnings = Vec::new();
        if !pump.is_narrowband() {
            warnings.push(format!(
                "w0 tau = {:.2} < 10: the spectral reduction degrades for few-cycle pulses",
                w0 * tau
            ));
        }
        if let PolarizabilityModel::Delta(m) = &model {
            let margin = srs_core::rayleigh::continuum_bandwidth_margin(&pair, m);
            if margin < 10.0 {
                warnings.push(format!(
                    "(w0 - E_b) tau = {margin:.2} < 10: continuum closed form is out of its validity range"
                ));
            }
        }

        let k = w0 / SPEED_OF_LIGHT_AU;
        let dk = [
            k * (pump_dir[0] - probe_dir[0]),
            k * (pump_dir[1] - probe_dir[1]),
            k * (pump_dir[2] - probe_dir[2]),
        ];

        Ok(ResolvedScenario {
            pair,
            model,
            geometry: self.geometry_au()?,
            d01_sq,
            k,
            dk,
            warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_to_paper_scale_numbers() {
        let cfg = ScenarioConfig {
            model: ModelConfig::Resonant {
                d01_sq_au: 1.0,
                gamma_per_s: Some(1e14),
            },
            ..Default::default()
        }
        .with_defaults();
        let r = cfg.resolve(None).unwrap();
        let tau = r.pair.pump.duration();
        assert!((tau - 4134.137).abs() < 1e-2);
        assert!((r.pair.pump.carrier() * tau - 188.365).abs() < 0.01);
        assert!((r.geometry.atom_count() - 1e8).abs() < 1.0);
        // gamma = Gamma tau = 1e14 s^-1 * 100 fs = 10
        if let PolarizabilityModel::Lorentzian(m) = &r.model {
            assert!((m.width * tau - 10.0).abs() < 1e-9);
        } else {
            panic!("expected Lorentzian");
        }
        // Rabi tau 1e-2 with d01 = 1: eps0 = 2e-2 / tau
        assert!((r.pair.pump.amplitude() - 2e-2 / tau).abs() < 1e-12);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn exclusive_inputs_enforced() {
        let mut cfg = ScenarioConfig::default().with_defaults();
        cfg.pulses.carrier_ev = Some(1.0); // both wavelength and carrier
        assert!(cfg.resolve(Some(1e-3)).is_err());

        let mut cfg = ScenarioConfig::default().with_defaults();
        cfg.pulses.pump_field_au = Some(1e-5); // both rabi and field
        assert!(cfg.resolve(Some(1e-3)).is_err());

        let mut cfg = ScenarioConfig::default().with_defaults();
        cfg.pulses.delay_fs = Some(10.0); // both delays
        assert!(cfg.resolve(Some(1e-3)).is_err());

        // a field-only config stays field-only after defaulting
        let mut cfg = ScenarioConfig::default();
        cfg.pulses.pump_field_au = Some(1e-5);
        cfg.pulses.probe_field_au = Some(1e-5);
        let cfg = cfg.with_defaults();
        assert_eq!(cfg.pulses.pump_rabi_tau, None);
        assert!(cfg.resolve(Some(1e-3)).is_ok());
    }

    #[test]
    fn resonant_width_must_come_from_somewhere() {
        let cfg = ScenarioConfig::default().with_defaults(); // no gamma_per_s
        assert!(cfg.resolve(None).is_err());
        assert!(cfg.resolve(Some(2.4e-3)).is_ok());
    }

    #[test]
    fn delta_model_requires_field_input() {
        let cfg = ScenarioConfig {
            model: ModelConfig::Delta {
                binding_ev: None,
                x: Some(1.2),
            },
            ..Default::default()
        }
        .with_defaults();
        // default pulses use rabi_tau, which has no dipole here
        assert!(cfg.resolve(None).is_err());
        let mut cfg = cfg;
        cfg.pulses.pump_rabi_tau = None;
        cfg.pulses.probe_rabi_tau = None;
        cfg.pulses.pump_field_au = Some(4.8e-6);
        cfg.pulses.probe_field_au = Some(4.8e-6);
        let r = cfg.resolve(None).unwrap();
        if let PolarizabilityModel::Delta(m) = &r.model {
            assert!((r.pair.pump.carrier() / m.binding_energy - 1.2).abs() < 1e-12);
        } else {
            panic!("expected delta model");
        }
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = ScenarioConfig {
            model: ModelConfig::Delta {
                binding_ev: Some(1.0),
                x: None,
            },
            sweep: Some(SweepConfig {
                var: "t0".into(),
                min: -3.0,
                max: 3.0,
                steps: 61,
            }),
            seed: 7,
            ..Default::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back = ScenarioConfig::from_json_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ScenarioConfig::from_json_str(r#"{"pulses": {"wavelenght_nm": 800}}"#).is_err());
    }

    #[test]
    fn sweep_grid_rules() {
        let s = SweepConfig {
            var: "t0".into(),
            min: -1.0,
            max: 1.0,
            steps: 5,
        };
        assert_eq!(s.grid().unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let single = SweepConfig {
            var: "x".into(),
            min: 2.0,
            max: 2.0,
            steps: 1,
        };
        assert_eq!(single.grid().unwrap(), vec![2.0]);
        let bad = SweepConfig {
            var: "x".into(),
            min: 2.0,
            max: 1.0,
            steps: 5,
        };
        assert!(bad.grid().is_err());
    }
}
