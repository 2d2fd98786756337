//! Conversions between laboratory units and Hartree atomic units.
//!
//! All core math in this crate runs in atomic units (`hbar = m_e = e = 1`);
//! laboratory units appear only at the CLI boundary. The base constants
//! below are the single source of truth for every conversion factor.
//!
//! Values from CODATA 2018 / NIST.

use thiserror::Error;

/// Atomic unit of time (s).
pub const ATOMIC_TIME_S: f64 = 2.418_884_326_585_7e-17;

/// Atomic unit of energy, the Hartree (eV).
pub const HARTREE_EV: f64 = 27.211_386_245_988;

/// Atomic unit of length, the Bohr radius (cm).
pub const BOHR_CM: f64 = 5.291_772_109_03e-9;

/// Atomic unit of electric field strength (V/cm).
pub const ATOMIC_FIELD_V_PER_CM: f64 = 5.142_206_747_63e9;

/// Speed of light in atomic units (inverse fine-structure constant).
pub const SPEED_OF_LIGHT_AU: f64 = 137.035_999_084;

/// Physical dimension of a [`Quantity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Time,
    Length,
    /// Angular frequency / rate (rad/s in the lab, 1/t_au internally).
    Frequency,
    Field,
    Density,
    Energy,
    Dimensionless,
}

/// A laboratory or atomic unit tag with a fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Second,
    Femtosecond,
    Attosecond,
    AtomicTime,
    Meter,
    Centimeter,
    Micrometer,
    Nanometer,
    Bohr,
    /// Angular frequency or rate in s^-1.
    PerSecond,
    AtomicFrequency,
    VoltPerCentimeter,
    AtomicField,
    PerCubicCentimeter,
    AtomicDensity,
    Electronvolt,
    Hartree,
    Dimensionless,
}

impl Unit {
    pub fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            Second | Femtosecond | Attosecond | AtomicTime => Dimension::Time,
            Meter | Centimeter | Micrometer | Nanometer | Bohr => Dimension::Length,
            PerSecond | AtomicFrequency => Dimension::Frequency,
            VoltPerCentimeter | AtomicField => Dimension::Field,
            PerCubicCentimeter | AtomicDensity => Dimension::Density,
            Electronvolt | Hartree => Dimension::Energy,
            Dimensionless => Dimension::Dimensionless,
        }
    }

    /// Multiplicative factor taking a value in this unit to atomic units.
    pub fn to_atomic_factor(self) -> f64 {
        use Unit::*;
        match self {
            Second => 1.0 / ATOMIC_TIME_S,
            Femtosecond => 1e-15 / ATOMIC_TIME_S,
            Attosecond => 1e-18 / ATOMIC_TIME_S,
            Meter => 1e2 / BOHR_CM,
            Centimeter => 1.0 / BOHR_CM,
            Micrometer => 1e-4 / BOHR_CM,
            Nanometer => 1e-7 / BOHR_CM,
            PerSecond => ATOMIC_TIME_S,
            VoltPerCentimeter => 1.0 / ATOMIC_FIELD_V_PER_CM,
            PerCubicCentimeter => BOHR_CM * BOHR_CM * BOHR_CM,
            Electronvolt => 1.0 / HARTREE_EV,
            AtomicTime | Bohr | AtomicFrequency | AtomicField | AtomicDensity | Hartree
            | Dimensionless => 1.0,
        }
    }

    /// Short tag used in config files and output headers.
    pub fn tag(self) -> &'static str {
        use Unit::*;
        match self {
            Second => "s",
            Femtosecond => "fs",
            Attosecond => "as",
            AtomicTime => "au_time",
            Meter => "m",
            Centimeter => "cm",
            Micrometer => "um",
            Nanometer => "nm",
            Bohr => "bohr",
            PerSecond => "1/s",
            AtomicFrequency => "au_frequency",
            VoltPerCentimeter => "V/cm",
            AtomicField => "au_field",
            PerCubicCentimeter => "1/cm3",
            AtomicDensity => "au_density",
            Electronvolt => "eV",
            Hartree => "hartree",
            Dimensionless => "1",
        }
    }
}

impl std::str::FromStr for Unit {
    type Err = UnitsError;

    fn from_str(s: &str) -> Result<Self, UnitsError> {
        use Unit::*;
        Ok(match s {
            "s" => Second,
            "fs" => Femtosecond,
            "as" => Attosecond,
            "au_time" => AtomicTime,
            "m" => Meter,
            "cm" => Centimeter,
            "um" => Micrometer,
            "nm" => Nanometer,
            "bohr" => Bohr,
            "1/s" => PerSecond,
            "au_frequency" => AtomicFrequency,
            "V/cm" => VoltPerCentimeter,
            "au_field" => AtomicField,
            "1/cm3" => PerCubicCentimeter,
            "au_density" => AtomicDensity,
            "eV" => Electronvolt,
            "hartree" => Hartree,
            "1" | "" => Dimensionless,
            _ => return Err(UnitsError::UnknownUnit(s.to_string())),
        })
    }
}

/// A dimensioned value in some laboratory unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub dimension: Dimension,
}

impl Quantity {
    pub fn new(value: f64, dimension: Dimension) -> Self {
        Self { value, dimension }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum UnitsError {
    #[error("unit `{unit}` has dimension {unit_dim:?}, quantity has {quantity_dim:?}")]
    DimensionMismatch {
        unit: &'static str,
        unit_dim: Dimension,
        quantity_dim: Dimension,
    },
    #[error("unknown unit tag `{0}`")]
    UnknownUnit(String),
    #[error("non-finite value {0}")]
    NonFinite(f64),
}

/// Convert a quantity expressed in `unit` to atomic units.
pub fn to_atomic(q: Quantity, unit: Unit) -> Result<f64, UnitsError> {
    if !q.value.is_finite() {
        return Err(UnitsError::NonFinite(q.value));
    }
    if unit.dimension() != q.dimension {
        return Err(UnitsError::DimensionMismatch {
            unit: unit.tag(),
            unit_dim: unit.dimension(),
            quantity_dim: q.dimension,
        });
    }
    Ok(q.value * unit.to_atomic_factor())
}

/// Convert a value in atomic units back to `unit`; inverse of [`to_atomic`].
pub fn from_atomic(value_au: f64, unit: Unit) -> Result<Quantity, UnitsError> {
    if !value_au.is_finite() {
        return Err(UnitsError::NonFinite(value_au));
    }
    Ok(Quantity::new(
        value_au / unit.to_atomic_factor(),
        unit.dimension(),
    ))
}

/// Angular carrier frequency (a.u.) of light with vacuum wavelength in a.u.
pub fn wavelength_to_frequency(wavelength_au: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_AU / wavelength_au
}
