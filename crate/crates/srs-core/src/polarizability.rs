//! Complex atomic polarizability `alpha(w) = alpha_1 + i alpha_2` and its
//! frequency derivative for the three atom models used here.
//!
//! * [`DiscreteLevels`] — sum over bound transitions with a finite positive
//!   broadening `delta` standing in for the +i0 prescription,
//!
//!   ```text
//!   alpha(w) = sum_n |d_0n|^2 [ 1/(w_n - w - i delta) + 1/(w_n + w - i delta) ]
//!   ```
//!
//! * [`ResonantLorentzian`] — the resonant part alone, with a width put in
//!   by hand: `alpha(w) = -d01^2 / ((w - w_res) + i Gamma/2)`.
//!
//! * [`DeltaPotential`] — single bound state of binding energy `E_b` with
//!   the closed-form continuum polarizability `alpha(w) = a(x)/E_b^2`,
//!   `x = w/E_b >= 1`,
//!
//!   ```text
//!   a(x) = -1/x^2 + 8/(3 x^4) - (4/3) [ (x+1)^{3/2} - i (x-1)^{3/2} ] / x^4
//!   ```
//!
//!   The model gives no branch prescription below threshold, so `x < 1` is
//!   rejected rather than guessed.
//!
//! Derivatives are coded from the term-by-term analytic expressions; finite
//! differences are test-only oracles.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("below-threshold frequency for the delta-potential model: x = {x} < 1")]
    BelowThreshold { x: f64 },
    #[error("threshold point x = 1 excluded for this operation")]
    AtThreshold,
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("level table parse error: {0}")]
    LevelTable(String),
}

/// One bound-bound transition: excitation energy and squared dipole moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    /// Transition energy E_n - E_0 (a.u.), positive.
    pub energy: f64,
    /// |d_0n|^2 (a.u.), non-negative.
    pub dipole_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLevels {
    levels: Vec<Level>,
    delta: f64,
}

impl DiscreteLevels {
    pub fn new(levels: Vec<Level>, delta: f64) -> Result<Self, ModelError> {
        if levels.is_empty() {
            return Err(ModelError::InvalidParameter("no levels given".into()));
        }
        for l in &levels {
            if !(l.energy > 0.0) || !(l.dipole_sq >= 0.0) {
                return Err(ModelError::InvalidParameter(format!(
                    "level ({}, {}) must have energy > 0 and dipole_sq >= 0",
                    l.energy, l.dipole_sq
                )));
            }
        }
        if !(delta > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "broadening delta must be positive, got {delta}"
            )));
        }
        Ok(Self { levels, delta })
    }

    pub fn one_level(energy: f64, dipole_sq: f64, delta: f64) -> Result<Self, ModelError> {
        Self::new(
            vec![Level {
                energy,
                dipole_sq,
            }],
            delta,
        )
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Parse a JSON level table: `[[energy, dipole_sq], ...]` or
    /// `{"delta": d, "levels": [[energy, dipole_sq], ...]}`. A `delta`
    /// argument overrides the in-file value when both are present.
    pub fn from_json_str(text: &str, delta: Option<f64>) -> Result<Self, ModelError> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ModelError::LevelTable(e.to_string()))?;
        let (rows, file_delta) = match &v {
            serde_json::Value::Array(rows) => (rows.clone(), None),
            serde_json::Value::Object(map) => {
                let rows = map
                    .get("levels")
                    .and_then(|l| l.as_array())
                    .ok_or_else(|| ModelError::LevelTable("missing `levels` array".into()))?
                    .clone();
                (rows, map.get("delta").and_then(|d| d.as_f64()))
            }
            _ => return Err(ModelError::LevelTable("expected array or object".into())),
        };
        let mut levels = Vec::with_capacity(rows.len());
        for row in rows {
            let pair = row
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| ModelError::LevelTable("each level must be [energy, d2]".into()))?;
            let energy = pair[0]
                .as_f64()
                .ok_or_else(|| ModelError::LevelTable("non-numeric energy".into()))?;
            let dipole_sq = pair[1]
                .as_f64()
                .ok_or_else(|| ModelError::LevelTable("non-numeric dipole_sq".into()))?;
            levels.push(Level { energy, dipole_sq });
        }
        let delta = delta
            .or(file_delta)
            .ok_or_else(|| ModelError::LevelTable("no broadening delta given".into()))?;
        Self::new(levels, delta)
    }

    /// Parse a whitespace-separated two-column table (energy a.u.,
    /// dipole-squared a.u.); `#` starts a comment line.
    pub fn from_table_str(text: &str, delta: f64) -> Result<Self, ModelError> {
        let mut levels = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64, ModelError> {
                tok.ok_or_else(|| {
                    ModelError::LevelTable(format!("line {}: expected two columns", lineno + 1))
                })?
                .parse::<f64>()
                .map_err(|e| ModelError::LevelTable(format!("line {}: {e}", lineno + 1)))
            };
            let energy = parse(cols.next())?;
            let dipole_sq = parse(cols.next())?;
            if cols.next().is_some() {
                return Err(ModelError::LevelTable(format!(
                    "line {}: expected exactly two columns",
                    lineno + 1
                )));
            }
            levels.push(Level { energy, dipole_sq });
        }
        Self::new(levels, delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantLorentzian {
    /// Resonance energy E_1 - E_0 (a.u.).
    pub omega_res: f64,
    /// |d_01|^2 (a.u.).
    pub d01_sq: f64,
    /// Full width Gamma (a.u.).
    pub width: f64,
}

impl ResonantLorentzian {
    pub fn new(omega_res: f64, d01_sq: f64, width: f64) -> Result<Self, ModelError> {
        if !(omega_res > 0.0) || !(d01_sq > 0.0) || !(width > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "ResonantLorentzian requires omega_res, d01_sq, width > 0, got ({omega_res}, {d01_sq}, {width})"
            )));
        }
        Ok(Self {
            omega_res,
            d01_sq,
            width,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaPotential {
    /// Binding (ionization) energy E_b (a.u.).
    pub binding_energy: f64,
}

impl DeltaPotential {
    pub fn new(binding_energy: f64) -> Result<Self, ModelError> {
        if !(binding_energy > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "binding energy must be positive, got {binding_energy}"
            )));
        }
        Ok(Self { binding_energy })
    }

    /// Dimensionless continuum polarizability `a(x)`, `x = w/E_b >= 1`.
    pub fn a(x: f64) -> Result<Complex64, ModelError> {
        if !(x >= 1.0) {
            return Err(ModelError::BelowThreshold { x });
        }
        let x2 = x * x;
        let x4 = x2 * x2;
        let re = -1.0 / x2 + 8.0 / (3.0 * x4) - (4.0 / 3.0) * (x + 1.0).powf(1.5) / x4;
        let im = (4.0 / 3.0) * (x - 1.0).powf(1.5) / x4;
        Ok(Complex64::new(re, im))
    }

    /// `da/dx`; one-sided at threshold, so `x > 1` strictly.
    pub fn a_prime(x: f64) -> Result<Complex64, ModelError> {
        if !(x >= 1.0) {
            return Err(ModelError::BelowThreshold { x });
        }
        if x == 1.0 {
            return Err(ModelError::AtThreshold);
        }
        let x3 = x * x * x;
        let x4 = x3 * x;
        let x5 = x4 * x;
        let sp = (x + 1.0).sqrt();
        let sm = (x - 1.0).sqrt();
        let re = 2.0 / x3 - 32.0 / (3.0 * x5) - 2.0 * sp / x4 + (16.0 / 3.0) * sp.powi(3) / x5;
        let im = 2.0 * sm / x4 - (16.0 / 3.0) * sm.powi(3) / x5;
        Ok(Complex64::new(re, im))
    }

    /// `Re a(x) Im a'(x) - Im a(x) Re a'(x)`: the dimensionless weight that
    /// sets the size and sign of the continuum delay effect at `x = w0/E_b`.
    pub fn delay_weight(&self, x: f64) -> Result<f64, ModelError> {
        let a = Self::a(x)?;
        let ap = Self::a_prime(x)?;
        Ok(a.re * ap.im - a.im * ap.re)
    }
}

/// Tagged union over the three polarizability models.
#[derive(Debug, Clone, PartialEq)]
pub enum PolarizabilityModel {
    Discrete(DiscreteLevels),
    Lorentzian(ResonantLorentzian),
    Delta(DeltaPotential),
}

impl PolarizabilityModel {
    /// Complex polarizability at `w > 0` (a.u.).
    pub fn alpha(&self, w: f64) -> Result<Complex64, ModelError> {
        if !(w > 0.0) {
            return Err(ModelError::NonPositiveFrequency(w));
        }
        match self {
            Self::Discrete(m) => {
                let id = Complex64::new(0.0, m.delta);
                let mut sum = Complex64::ZERO;
                for l in &m.levels {
                    sum += l.dipole_sq
                        * (1.0 / (Complex64::new(l.energy - w, 0.0) - id)
                            + 1.0 / (Complex64::new(l.energy + w, 0.0) - id));
                }
                Ok(sum)
            }
            Self::Lorentzian(m) => {
                Ok(-m.d01_sq / Complex64::new(w - m.omega_res, 0.5 * m.width))
            }
            Self::Delta(m) => {
                let x = w / m.binding_energy;
                Ok(DeltaPotential::a(x)? / m.binding_energy.powi(2))
            }
        }
    }

    /// Analytic `d alpha / d w`.
    pub fn alpha_prime(&self, w: f64) -> Result<Complex64, ModelError> {
        if !(w > 0.0) {
            return Err(ModelError::NonPositiveFrequency(w));
        }
        match self {
            Self::Discrete(m) => {
                let id = Complex64::new(0.0, m.delta);
                let mut sum = Complex64::ZERO;
                for l in &m.levels {
                    let dn = Complex64::new(l.energy - w, 0.0) - id;
                    let dp = Complex64::new(l.energy + w, 0.0) - id;
                    sum += l.dipole_sq * (1.0 / (dn * dn) - 1.0 / (dp * dp));
                }
                Ok(sum)
            }
            Self::Lorentzian(m) => {
                let z = Complex64::new(w - m.omega_res, 0.5 * m.width);
                Ok(m.d01_sq / (z * z))
            }
            Self::Delta(m) => {
                let x = w / m.binding_energy;
                Ok(DeltaPotential::a_prime(x)? / m.binding_energy.powi(3))
            }
        }
    }

    /// Lowest frequency at which the model is defined (0 except for the
    /// delta-potential threshold).
    pub fn domain_floor(&self) -> f64 {
        match self {
            Self::Delta(m) => m.binding_energy,
            _ => 0.0,
        }
    }

    /// Resonance positions inside `(lo, hi)`, used as forced quadrature
    /// subdivision points.
    pub fn resonances_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            Self::Discrete(m) => m
                .levels
                .iter()
                .map(|l| l.energy)
                .filter(|e| *e > lo && *e < hi)
                .collect(),
            Self::Lorentzian(m) => {
                if m.omega_res > lo && m.omega_res < hi {
                    vec![m.omega_res]
                } else {
                    vec![]
                }
            }
            Self::Delta(m) => {
                if m.binding_energy > lo && m.binding_energy < hi {
                    vec![m.binding_energy]
                } else {
                    vec![]
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::derivative_central;

    fn crel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn lorentzian_on_resonance() {
        // alpha(w_res) = -1/(i Gamma/2) = 2i/Gamma
        let m = PolarizabilityModel::Lorentzian(
            ResonantLorentzian::new(1.0, 1.0, 0.1).unwrap(),
        );
        let a = m.alpha(1.0).unwrap();
        assert!((a - Complex64::new(0.0, 20.0)).norm() < 1e-12);
        // alpha'(w_res) = d01_sq/(i Gamma/2)^2 = -4 d01_sq / Gamma^2
        let ap = m.alpha_prime(1.0).unwrap();
        assert!((ap - Complex64::new(-400.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn delta_potential_hand_values() {
        // a(1) = -1 + 8/3 - (4/3) 2^{3/2}
        let a1 = DeltaPotential::a(1.0).unwrap();
        let want = -1.0 + 8.0 / 3.0 - (4.0 / 3.0) * 2.0_f64.powf(1.5);
        assert!((a1.re - want).abs() < 1e-12 && a1.im == 0.0);
        assert!((a1.re + 2.104_57).abs() < 1e-4);

        // a(2) = -1/4 + 1/6 - (1/12)(3 sqrt 3 - i)
        let a2 = DeltaPotential::a(2.0).unwrap();
        let want = Complex64::new(
            -0.25 + 1.0 / 6.0 - 3.0 * 3.0_f64.sqrt() / 12.0,
            1.0 / 12.0,
        );
        assert!((a2 - want).norm() < 1e-12);
        assert!((a2.re + 0.51635).abs() < 1e-5 && (a2.im - 0.08333).abs() < 1e-5);
    }

    #[test]
    fn delta_potential_domain() {
        assert!(matches!(
            DeltaPotential::a(0.99),
            Err(ModelError::BelowThreshold { .. })
        ));
        assert!(matches!(
            DeltaPotential::a_prime(1.0),
            Err(ModelError::AtThreshold)
        ));
        let m = PolarizabilityModel::Delta(DeltaPotential::new(0.5).unwrap());
        assert!(m.alpha(0.4).is_err());
        assert!(m.alpha(0.5).is_ok());
        assert!(m.alpha(-1.0).is_err());
    }

    #[test]
    fn delay_weight_at_two_composes() {
        // matches the hand-evaluated a(2), a'(2) composition
        let m = DeltaPotential::new(1.0).unwrap();
        let a = DeltaPotential::a(2.0).unwrap();
        let ap = DeltaPotential::a_prime(2.0).unwrap();
        let w = m.delay_weight(2.0).unwrap();
        assert!((w - (a.re * ap.im - a.im * ap.re)).abs() < 1e-15);
        assert!((w + 0.025_667_725_157_684_94).abs() < 1e-12);
        assert!(m.delay_weight(1.0).is_err());
    }

    #[test]
    fn absorptive_part_non_negative() {
        let models = [
            PolarizabilityModel::Lorentzian(ResonantLorentzian::new(1.3, 0.8, 0.05).unwrap()),
            PolarizabilityModel::Discrete(
                DiscreteLevels::new(
                    vec![
                        Level {
                            energy: 0.9,
                            dipole_sq: 0.5,
                        },
                        Level {
                            energy: 1.7,
                            dipole_sq: 0.2,
                        },
                    ],
                    0.02,
                )
                .unwrap(),
            ),
            PolarizabilityModel::Delta(DeltaPotential::new(0.4).unwrap()),
        ];
        for m in &models {
            let floor = m.domain_floor();
            for i in 0..200 {
                let w = floor + (0.01 + 0.02 * i as f64);
                let a = m.alpha(w).unwrap();
                assert!(a.im >= 0.0, "alpha_2 < 0 at w = {w} for {m:?}");
            }
        }
    }

    #[test]
    fn discrete_minus_counter_term_matches_lorentzian() {
        // one level with delta = Gamma/2 reproduces the resonant Lorentzian
        // once the counter-rotating term is subtracted
        let (wr, d2, gam) = (1.0, 0.7, 0.02);
        let disc = DiscreteLevels::one_level(wr, d2, gam / 2.0).unwrap();
        let dm = PolarizabilityModel::Discrete(disc);
        let lm = PolarizabilityModel::Lorentzian(ResonantLorentzian::new(wr, d2, gam).unwrap());
        for k in -10..=10 {
            let w = wr + gam * k as f64 / 10.0;
            let counter = d2 / Complex64::new(wr + w, -gam / 2.0);
            let got = dm.alpha(w).unwrap() - counter;
            let want = lm.alpha(w).unwrap();
            assert!(crel(got, want) < 1e-3);
        }
    }

    #[test]
    fn alpha_prime_matches_finite_difference() {
        let models = [
            PolarizabilityModel::Lorentzian(ResonantLorentzian::new(1.0, 1.0, 0.1).unwrap()),
            PolarizabilityModel::Discrete(DiscreteLevels::one_level(1.2, 0.4, 0.03).unwrap()),
            PolarizabilityModel::Delta(DeltaPotential::new(1.0).unwrap()),
        ];
        let points = [
            [0.8, 0.95, 1.0, 1.05, 1.3],  // around the Lorentzian resonance
            [0.9, 1.1, 1.2, 1.5, 2.0],    // around the discrete level
            [1.05, 1.2, 1.5, 2.0, 3.0],   // above the delta threshold
        ];
        for (m, ws) in models.iter().zip(points.iter()) {
            for &w in ws {
                let h = 1e-5;
                let re = derivative_central(|u| m.alpha(u).unwrap().re, w, h);
                let im = derivative_central(|u| m.alpha(u).unwrap().im, w, h);
                let got = m.alpha_prime(w).unwrap();
                assert!(
                    crel(got, Complex64::new(re, im)) < 1e-6,
                    "model {m:?} at w = {w}"
                );
            }
        }
    }

    #[test]
    fn level_table_parsing() {
        let json = r#"{"delta": 0.01, "levels": [[1.0, 0.5], [2.0, 0.1]]}"#;
        let m = DiscreteLevels::from_json_str(json, None).unwrap();
        assert_eq!(m.levels().len(), 2);
        assert_eq!(m.delta(), 0.01);
        // explicit delta overrides the in-file one
        let m2 = DiscreteLevels::from_json_str(json, Some(0.05)).unwrap();
        assert_eq!(m2.delta(), 0.05);

        let bare = "[[1.0, 0.5]]";
        assert!(DiscreteLevels::from_json_str(bare, None).is_err()); // no delta anywhere
        assert!(DiscreteLevels::from_json_str(bare, Some(0.01)).is_ok());

        let table = "# energy  d2\n1.0 0.5\n2.0 0.1\n";
        let t = DiscreteLevels::from_table_str(table, 0.01).unwrap();
        assert_eq!(t.levels(), m.levels());
        assert!(DiscreteLevels::from_table_str("1.0\n", 0.01).is_err());
        assert!(DiscreteLevels::from_table_str("1.0 0.5 9\n", 0.01).is_err());
        // invalid physics rejected
        assert!(DiscreteLevels::from_table_str("-1.0 0.5\n", 0.01).is_err());
    }
}
