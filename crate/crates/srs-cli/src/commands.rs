//! The `srs` subcommands as library functions.
//!
//! Each command resolves its parameters, runs the core routines and returns
//! a [`ScanTable`] or [`Report`]; the binary only parses flags and writes
//! the rendered output.

use serde::{Deserialize, Serialize};
use srs_core::numerics::RngStream;
use srs_core::phasematch::{
    effective_width_shortcut, f_factor_rescaled, f_sp_for_positions, gain, phase_slip_diagnostic,
    AtomPositions,
};
use srs_core::polarizability::{DeltaPotential, DiscreteLevels, PolarizabilityModel};
use srs_core::pulses::{GaussianPulse, PulsePair};
use srs_core::rayleigh::{
    amplitudes_frequency_domain, amplitudes_time_domain, j_resonant, w_t_continuum,
    w_t_frequency, w_t_resonant, w_t_time, ResonantParams, TimeGridSpec,
};
use srs_core::units::ATOMIC_TIME_S;

use crate::config::{NumericsConfig, ScenarioConfig, SweepConfig};
use crate::table::{Column, Report, ScanTable};
use crate::AppError;

fn config_err(msg: impl Into<String>) -> AppError {
    AppError::Config(msg.into())
}

// ---------------------------------------------------------------------------
// fig2: J(t0, gamma) scan
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Fig2Params {
    pub gamma: f64,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub numerics: NumericsConfig,
}

impl Default for Fig2Params {
    fn default() -> Self {
        Self {
            gamma: 10.0,
            min: -4.0,
            max: 4.0,
            steps: 161,
            numerics: NumericsConfig::default(),
        }
    }
}

/// Scan of the dimensionless resonant delay function `J(t0, gamma)`.
pub fn run_fig2(params: &Fig2Params) -> Result<ScanTable, AppError> {
    if !(params.gamma > 0.0) {
        return Err(config_err("gamma must be positive"));
    }
    if params.steps < 2 {
        return Err(config_err("fig2 needs at least two sweep steps"));
    }
    let grid = SweepConfig {
        var: "t0".into(),
        min: params.min,
        max: params.max,
        steps: params.steps,
    }
    .grid()?;
    let spec = params.numerics.quadrature();

    let mut table = ScanTable::new(
        "fig2",
        params,
        vec![
            Column::new("t0", "1"),
            Column::new("J", "1"),
            Column::new("converged", "1"),
        ],
    );
    for t0 in grid {
        match j_resonant(t0, params.gamma, &spec) {
            Ok(j) => table.push_row(vec![t0, j.value, f64::from(u8::from(j.converged))]),
            Err(e) => return Err(AppError::Numerics(format!("J({t0}, {}): {e}", params.gamma))),
        }
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// fig3: continuum delay weight scan
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Fig3Params {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Default for Fig3Params {
    fn default() -> Self {
        Self {
            min: 1.01,
            max: 3.0,
            steps: 200,
        }
    }
}

/// Scan of the dimensionless continuum weight
/// `Re a(x) Im a'(x) - Im a(x) Re a'(x)` over `x = w0/E_b`; the footer
/// records where its magnitude peaks.
pub fn run_fig3(params: &Fig3Params) -> Result<ScanTable, AppError> {
    if !(params.min > 1.0) {
        return Err(config_err(format!(
            "fig3 domain is x > 1 (above threshold), got min = {}",
            params.min
        )));
    }
    let grid = SweepConfig {
        var: "x".into(),
        min: params.min,
        max: params.max,
        steps: params.steps,
    }
    .grid()?;
    let model = DeltaPotential::new(1.0).expect("unit binding energy");

    let mut table = ScanTable::new(
        "fig3",
        params,
        vec![Column::new("x", "1"), Column::new("weight", "1")],
    );
    let mut extremum = (f64::NAN, 0.0_f64);
    for x in grid {
        let w = model
            .delay_weight(x)
            .map_err(|e| config_err(format!("x = {x}: {e}")))?;
        if w.abs() > extremum.1.abs() {
            extremum = (x, w);
        }
        table.push_row(vec![x, w]);
    }
    table.push_meta("argmax_x", crate::table::fmt_f64(extremum.0));
    table.push_meta("extremum_weight", crate::table::fmt_f64(extremum.1));
    table.push_meta(
        "argmax_definition",
        "grid point where |weight| is largest (peak of the delay effect)",
    );
    Ok(table)
}

// ---------------------------------------------------------------------------
// wt: single-atom probability sweeps over t0 / gamma / x
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum WtRoute {
    Frequency,
    Time,
    Resonant,
    Asymptotic,
    Continuum,
}

impl WtRoute {
    fn name(&self) -> &'static str {
        match self {
            WtRoute::Frequency => "frequency",
            WtRoute::Time => "time",
            WtRoute::Resonant => "resonant",
            WtRoute::Asymptotic => "asymptotic",
            WtRoute::Continuum => "continuum",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WtParams {
    pub config: ScenarioConfig,
    pub routes: Vec<WtRoute>,
}

/// Rabi-frequency-times-duration for a pulse, given the model dipole.
fn rabi_tau(pulse: &GaussianPulse, d01_sq: f64) -> f64 {
    0.5 * pulse.amplitude() * d01_sq.sqrt() * pulse.duration()
}

/// One w_T evaluation for a fully specified point.
fn eval_route(
    route: WtRoute,
    pair: &PulsePair,
    model: &PolarizabilityModel,
    numerics: &NumericsConfig,
) -> Result<(f64, bool), AppError> {
    let spec = numerics.quadrature();
    match route {
        WtRoute::Frequency => {
            let e = w_t_frequency(pair, model, &spec)
                .map_err(|e| AppError::Numerics(e.to_string()))?;
            Ok((e.value, e.converged))
        }
        WtRoute::Time => {
            let disc = match model {
                PolarizabilityModel::Discrete(d) => d.clone(),
                PolarizabilityModel::Lorentzian(_) | PolarizabilityModel::Delta(_) => {
                    return Err(config_err(
                        "the time route needs a discrete level model (model.type = levels)",
                    ))
                }
            };
            let grid = TimeGridSpec {
                points: numerics.time_grid_points,
                ..Default::default()
            };
            let e = w_t_time(pair, &disc, &grid).map_err(|e| AppError::Numerics(e.to_string()))?;
            Ok((e.value, e.converged))
        }
        WtRoute::Resonant | WtRoute::Asymptotic => {
            let m = match model {
                PolarizabilityModel::Lorentzian(m) => m,
                _ => {
                    return Err(config_err(format!(
                        "the {} route needs the resonant model (model.type = resonant)",
                        route.name()
                    )))
                }
            };
            if !pair.is_matched() {
                return Err(config_err(
                    "closed-form routes need matched pump/probe carrier and duration",
                ));
            }
            let tau = pair.pump.duration();
            let params = ResonantParams::new(
                pair.delay() / tau,
                m.width * tau,
                rabi_tau(&pair.pump, m.d01_sq),
                rabi_tau(&pair.probe, m.d01_sq),
            )
            .map_err(|e| config_err(e.to_string()))?;
            if route == WtRoute::Resonant {
                let e = w_t_resonant(&params, &spec)
                    .map_err(|e| AppError::Numerics(e.to_string()))?;
                Ok((e.value, e.converged))
            } else {
                Ok((srs_core::rayleigh::w_t_asymptotic(&params), true))
            }
        }
        WtRoute::Continuum => {
            let m = match model {
                PolarizabilityModel::Delta(m) => m,
                _ => {
                    return Err(config_err(
                        "the continuum route needs the delta model (model.type = delta)",
                    ))
                }
            };
            let v = w_t_continuum(pair, m).map_err(|e| config_err(e.to_string()))?;
            Ok((v, true))
        }
    }
}

/// Sweep `w_T` over the configured variable, one column per route.
pub fn run_wt(params: &WtParams) -> Result<ScanTable, AppError> {
    if params.routes.is_empty() {
        return Err(config_err("wt needs at least one route"));
    }
    let sweep = params
        .config
        .sweep
        .clone()
        .ok_or_else(|| config_err("wt needs a sweep block (var/min/max/steps)"))?;
    let grid = sweep.grid()?;
    let base = params.config.resolve(None)?;
    let tau = base.pair.pump.duration();

    let mut columns = vec![Column::new(&sweep.var, "1")];
    for r in &params.routes {
        columns.push(Column::new(&format!("w_t_{}", r.name()), "1"));
    }
    columns.push(Column::new("converged", "1"));
    if params.routes.len() == 2 {
        columns.push(Column::new("rel_dev_global", "1"));
    }
    let mut table = ScanTable::new("wt", params, columns);
    for w in &base.warnings {
        table.push_meta("warning", w);
    }

    // per-row pair/model under the sweep variable
    let point = |v: f64| -> Result<(PulsePair, PolarizabilityModel), AppError> {
        match sweep.var.as_str() {
            "t0" => Ok((base.pair.with_delay(v * tau), base.model.clone())),
            "gamma" => match &base.model {
                PolarizabilityModel::Lorentzian(m) => {
                    if !(v > 0.0) {
                        return Err(config_err("gamma sweep values must be positive"));
                    }
                    let m = srs_core::polarizability::ResonantLorentzian::new(
                        m.omega_res,
                        m.d01_sq,
                        v / tau,
                    )
                    .map_err(|e| config_err(e.to_string()))?;
                    Ok((base.pair, PolarizabilityModel::Lorentzian(m)))
                }
                _ => Err(config_err("gamma sweeps need the resonant model")),
            },
            "x" => match &base.model {
                PolarizabilityModel::Delta(m) => {
                    if !(v > 1.0) {
                        return Err(config_err("x sweep values must be > 1"));
                    }
                    let w0 = v * m.binding_energy;
                    let pump = GaussianPulse::new(
                        base.pair.pump.amplitude(),
                        w0,
                        tau,
                        0.0,
                        base.pair.pump.direction(),
                    )
                    .map_err(|e| config_err(e.to_string()))?;
                    let probe = GaussianPulse::new(
                        base.pair.probe.amplitude(),
                        w0,
                        tau,
                        base.pair.probe.delay(),
                        base.pair.probe.direction(),
                    )
                    .map_err(|e| config_err(e.to_string()))?;
                    let pair =
                        PulsePair::new(pump, probe).map_err(|e| config_err(e.to_string()))?;
                    Ok((pair, base.model.clone()))
                }
                _ => Err(config_err("x sweeps need the delta model")),
            },
            other => Err(config_err(format!(
                "unknown sweep variable `{other}` (use t0, gamma or x)"
            ))),
        }
    };

    let mut values: Vec<Vec<f64>> = Vec::with_capacity(grid.len());
    let mut flags: Vec<bool> = Vec::with_capacity(grid.len());
    for &v in &grid {
        let (pair, model) = point(v)?;
        let mut row = Vec::with_capacity(params.routes.len());
        let mut ok = true;
        for route in &params.routes {
            let (w, conv) = eval_route(*route, &pair, &model, &params.config.numerics)?;
            row.push(w);
            ok &= conv;
        }
        values.push(row);
        flags.push(ok);
    }

    // deviation between two routes, normalized by the larger curve scale so
    // near-null rows (t0 = 0) do not divide by zero
    let scale = values
        .iter()
        .flat_map(|r| r.iter().map(|v| v.abs()))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    for ((v, row), ok) in grid.iter().zip(values).zip(flags) {
        let mut out = vec![*v];
        out.extend_from_slice(&row);
        out.push(f64::from(u8::from(ok)));
        if row.len() == 2 {
            out.push((row[0] - row[1]).abs() / scale);
        }
        table.push_row(out);
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// gain: end-to-end pipeline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GammaRoute {
    /// Effective width from the Monte-Carlo `F_sp` estimate.
    Mc,
    /// Effective width from the `(d/L)^2 N_a` shortcut.
    Shortcut,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GainParams {
    pub config: ScenarioConfig,
    pub gamma_route: GammaRoute,
}

/// Geometry -> F, F_sp -> Gamma -> gamma = Gamma tau -> w_T -> G, with every
/// intermediate reported with units.
pub fn run_gain(params: &GainParams) -> Result<Report, AppError> {
    let cfg = &params.config;
    let stage = |name: &str, e: String| AppError::Numerics(format!("stage {name}: {e}"));

    // stage pulses: carrier and duration without the model (resolve comes
    // after the width pipeline)
    let w0 = cfg.carrier_au()?;
    let tau = cfg.duration_au()?;
    let geometry = cfg.geometry_au()?;
    let gamma_r = cfg.gamma_r_au()?;
    let n_a = geometry.atom_count();
    let k = w0 / srs_core::units::SPEED_OF_LIGHT_AU;

    // stage phasematch: stimulated-direction F and the solid-angle estimate
    let stream = RngStream::new(cfg.seed, 0);
    let positions =
        AtomPositions::from_geometry(&geometry, cfg.numerics.fsp_subsample, &stream)
            .map_err(|e| stage("phasematch", e.to_string()))?;
    let theta = cfg.pulses.beam_angle_mrad * 1e-3;
    let dk = [-k * theta.sin(), 0.0, k * (1.0 - theta.cos())];
    let f_stim = f_factor_rescaled(&positions, dk);
    let f_over_na = f_stim / n_a;
    let slip = phase_slip_diagnostic(&geometry, dk);

    let fsp = f_sp_for_positions(&geometry, &positions, k, cfg.numerics.fsp_direction_samples, &stream.substream(1))
        .map_err(|e| stage("phasematch", e.to_string()))?;

    // stage width
    let gamma_mc = gamma_r * fsp.value / n_a;
    let gamma_short = effective_width_shortcut(&geometry, gamma_r);
    let gamma_sel = match params.gamma_route {
        GammaRoute::Mc => gamma_mc,
        GammaRoute::Shortcut => gamma_short,
    };

    // stage resolve: model with the pipeline width as fallback
    let resolved = cfg.resolve(Some(gamma_sel))?;
    let pair = resolved.pair;

    // stage w_t
    let (w_t, route_name) = match &resolved.model {
        PolarizabilityModel::Lorentzian(m) => {
            if !pair.is_matched() {
                return Err(config_err("gain needs matched pump/probe pulses"));
            }
            let rp = ResonantParams::new(
                pair.delay() / tau,
                m.width * tau,
                rabi_tau(&pair.pump, m.d01_sq),
                rabi_tau(&pair.probe, m.d01_sq),
            )
            .map_err(|e| stage("w_t", e.to_string()))?;
            let est = w_t_resonant(&rp, &cfg.numerics.quadrature())
                .map_err(|e| stage("w_t", e.to_string()))?;
            if !est.converged {
                return Err(stage("w_t", "resonant quadrature did not converge".into()));
            }
            (est.value, "resonant")
        }
        PolarizabilityModel::Delta(m) => {
            let v = w_t_continuum(&pair, m).map_err(|e| stage("w_t", e.to_string()))?;
            (v, "continuum")
        }
        PolarizabilityModel::Discrete(_) => {
            let est = w_t_frequency(&pair, &resolved.model, &cfg.numerics.quadrature())
                .map_err(|e| stage("w_t", e.to_string()))?;
            if !est.converged {
                return Err(stage("w_t", "spectral quadrature did not converge".into()));
            }
            (est.value, "frequency")
        }
    };

    // stage gain
    let g = gain(w_t, &geometry, &pair.probe, f_over_na)
        .map_err(|e| stage("gain", e.to_string()))?;

    let mut report = Report::new("gain", params);
    for w in &resolved.warnings {
        report.push_meta("warning", w);
    }
    report.push_meta("w_t_route", route_name);
    report.push("omega0", w0, "hartree");
    report.push("tau", tau * ATOMIC_TIME_S / 1e-15, "fs");
    report.push("delay", pair.delay() * ATOMIC_TIME_S / 1e-15, "fs");
    report.push("t0", pair.delay() / tau, "1");
    report.push("pump_field", pair.pump.amplitude(), "au_field");
    report.push("probe_field", pair.probe.amplitude(), "au_field");
    report.push("n_a", n_a, "1");
    report.push("k", k, "1/bohr");
    report.push("f_stimulated", f_stim, "1");
    report.push("f_over_na", f_over_na, "1");
    report.push("phase_slip", slip, "1");
    report.push("f_sp", fsp.value, "sr");
    report.push("f_sp_std_error", fsp.std_error, "sr");
    report.push(
        "f_sp_ratio",
        fsp.value / ((geometry.waist / geometry.length).powi(2) * n_a * n_a),
        "1",
    );
    report.push("subsample", fsp.subsample_size as f64, "1");
    report.push("gamma_mc", gamma_mc / ATOMIC_TIME_S, "1/s");
    report.push("gamma_shortcut", gamma_short / ATOMIC_TIME_S, "1/s");
    report.push("gamma_selected", gamma_sel / ATOMIC_TIME_S, "1/s");
    report.push("gamma_tau", gamma_sel * tau, "1");
    report.push("w_t", w_t, "1");
    report.push("gain", g, "1");
    Ok(report)
}

// ---------------------------------------------------------------------------
// phasematch: direct F / F_sp queries
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PhasematchParams {
    pub config: ScenarioConfig,
}

pub fn run_phasematch(params: &PhasematchParams) -> Result<Report, AppError> {
    let cfg = &params.config;
    let w0 = cfg.carrier_au()?;
    let geometry = cfg.geometry_au()?;
    let gamma_r = cfg.gamma_r_au()?;
    let n_a = geometry.atom_count();
    let k = w0 / srs_core::units::SPEED_OF_LIGHT_AU;

    let stream = RngStream::new(cfg.seed, 0);
    let positions = AtomPositions::from_geometry(&geometry, cfg.numerics.fsp_subsample, &stream)
        .map_err(|e| AppError::Numerics(e.to_string()))?;
    let theta = cfg.pulses.beam_angle_mrad * 1e-3;
    let dk = [-k * theta.sin(), 0.0, k * (1.0 - theta.cos())];
    let f_stim = f_factor_rescaled(&positions, dk);
    let fsp = f_sp_for_positions(
        &geometry,
        &positions,
        k,
        cfg.numerics.fsp_direction_samples,
        &stream.substream(1),
    )
    .map_err(|e| AppError::Numerics(e.to_string()))?;

    let mut report = Report::new("phasematch", params);
    report.push("n_a", n_a, "1");
    report.push("k", k, "1/bohr");
    report.push("beam_angle", cfg.pulses.beam_angle_mrad, "mrad");
    report.push("dk_norm", srs_core::numerics::norm(dk), "1/bohr");
    report.push("phase_slip", phase_slip_diagnostic(&geometry, dk), "1");
    report.push("f_stimulated", f_stim, "1");
    report.push("f_over_na", f_stim / n_a, "1");
    report.push("f_over_na2", f_stim / (n_a * n_a), "1");
    report.push("f_sp", fsp.value, "sr");
    report.push("f_sp_std_error", fsp.std_error, "sr");
    report.push(
        "f_sp_ratio",
        fsp.value / ((geometry.waist / geometry.length).powi(2) * n_a * n_a),
        "1",
    );
    report.push("subsample", fsp.subsample_size as f64, "1");
    report.push("gamma_mc", gamma_r * fsp.value / n_a / ATOMIC_TIME_S, "1/s");
    report.push(
        "gamma_shortcut",
        effective_width_shortcut(&geometry, gamma_r) / ATOMIC_TIME_S,
        "1/s",
    );
    Ok(report)
}

// ---------------------------------------------------------------------------
// oracle: route-equivalence harness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OracleParams {
    pub tol_time_vs_frequency: f64,
    pub tol_frequency_vs_closed: f64,
    pub tol_continuum_vs_frequency: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            tol_time_vs_frequency: 1e-3,
            tol_frequency_vs_closed: 1e-4,
            tol_continuum_vs_frequency: 0.02,
        }
    }
}

fn matched_pair(eps0: f64, epst0: f64, w0: f64, tau: f64, dt: f64) -> PulsePair {
    let z = [0.0, 0.0, 1.0];
    PulsePair::new(
        GaussianPulse::new(eps0, w0, tau, 0.0, z).expect("valid pulse"),
        GaussianPulse::new(epst0, w0, tau, dt, z).expect("valid pulse"),
    )
    .expect("valid pair")
}

/// Cross-route comparison table. The returned flag is true when every case
/// is within its tolerance.
pub fn run_oracle(params: &OracleParams) -> Result<(ScanTable, bool), AppError> {
    let mut table = ScanTable::new(
        "oracle",
        params,
        vec![
            Column::new("case", "1"),
            Column::new("p1", "1"),
            Column::new("p2", "1"),
            Column::new("rel_dev", "1"),
            Column::new("tol", "1"),
            Column::new("pass", "1"),
        ],
    );
    table.push_meta("case_0", "time vs frequency amplitudes; p1 = t0 (one-level, w0 tau = 50, gamma = 10)");
    table.push_meta("case_1", "frequency vs closed-form resonant w_T; p1 = t0, p2 = gamma");
    table.push_meta("case_2", "continuum formula vs frequency w_T; p1 = t0 (E_b tau = 100, x = 1.5)");
    let numerics = NumericsConfig::default();
    let spec = numerics.quadrature();
    let mut all_pass = true;
    let mut push = |table: &mut ScanTable, case: f64, p1: f64, p2: f64, dev: f64, tol: f64| {
        let pass = dev < tol;
        all_pass &= pass;
        table.push_row(vec![case, p1, p2, dev, tol, f64::from(u8::from(pass))]);
    };

    // case 0: one-level model, time vs frequency amplitudes
    {
        let (w0, tau, d2, delta) = (50.0, 1.0, 1.0, 5.0);
        let disc = DiscreteLevels::one_level(w0, d2, delta)
            .map_err(|e| AppError::Numerics(e.to_string()))?;
        let model = PolarizabilityModel::Discrete(disc.clone());
        let grid = TimeGridSpec::default();
        for t0 in [-2.0, -1.0, 0.5, 1.0, 2.0] {
            let pair = matched_pair(1.0, 1.0, w0, tau, t0 * tau);
            let ft = amplitudes_frequency_domain(&pair, &model, &spec)
                .map_err(|e| AppError::Numerics(e.to_string()))?;
            let tt = amplitudes_time_domain(&pair, &disc, &grid)
                .map_err(|e| AppError::Numerics(e.to_string()))?;
            let dev = ((ft.em - tt.em).norm() / ft.em.norm())
                .max((ft.abs - tt.abs).norm() / ft.abs.norm());
            push(&mut table, 0.0, t0, 0.0, dev, params.tol_time_vs_frequency);
        }
    }

    // case 1: Lorentzian model, frequency route vs closed form
    {
        let (w0, tau, d01_sq) = (50.0, 1.0, 1.0);
        for gamma in [2.0, 5.0, 10.0, 20.0, 50.0] {
            for t0 in [0.5, 1.5] {
                let pair = matched_pair(1.0, 1.0, w0, tau, t0 * tau);
                let model = PolarizabilityModel::Lorentzian(
                    srs_core::polarizability::ResonantLorentzian::new(w0, d01_sq, gamma / tau)
                        .map_err(|e| AppError::Numerics(e.to_string()))?,
                );
                let freq = w_t_frequency(&pair, &model, &spec)
                    .map_err(|e| AppError::Numerics(e.to_string()))?;
                let rp = ResonantParams::new(t0, gamma, 0.5 * tau, 0.5 * tau)
                    .map_err(|e| AppError::Numerics(e.to_string()))?;
                let closed = w_t_resonant(&rp, &spec)
                    .map_err(|e| AppError::Numerics(e.to_string()))?;
                let dev = (freq.value - closed.value).abs() / closed.value.abs();
                push(&mut table, 1.0, t0, gamma, dev, params.tol_frequency_vs_closed);
            }
        }
    }

    // case 2: delta model, linearized continuum formula vs frequency route
    {
        let tau = 1000.0;
        let e_b = 100.0 / tau;
        let w0 = 1.5 * e_b;
        let delta = DeltaPotential::new(e_b).map_err(|e| AppError::Numerics(e.to_string()))?;
        let model = PolarizabilityModel::Delta(delta);
        for t0 in [0.5, 1.0, 2.0] {
            let pair = matched_pair(1e-4, 1e-4, w0, tau, t0 * tau);
            let full = w_t_frequency(&pair, &model, &spec)
                .map_err(|e| AppError::Numerics(e.to_string()))?;
            let closed =
                w_t_continuum(&pair, &delta).map_err(|e| AppError::Numerics(e.to_string()))?;
            let dev = (full.value - closed).abs() / closed.abs();
            push(&mut table, 2.0, t0, 0.0, dev, params.tol_continuum_vs_frequency);
        }
    }

    table.push_meta("all_pass", all_pass);
    Ok((table, all_pass))
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ModelConfig;

    #[test]
    fn fig2_defaults_shape() {
        let t = run_fig2(&Fig2Params::default()).unwrap();
        assert_eq!(t.rows.len(), 161);
        // odd curve with J(0) = 0 and all rows converged
        let mid = &t.rows[80];
        assert_eq!(mid[0], 0.0);
        assert!(mid[1].abs() < 1e-10);
        assert!(t.rows.iter().all(|r| r[2] == 1.0));
        let j = |i: usize| t.rows[i][1];
        for i in 0..80 {
            assert!((j(i) + j(160 - i)).abs() < 1e-9 * j(160 - i).abs().max(1e-12));
        }
    }

    #[test]
    fn fig2_validation() {
        let bad = Fig2Params {
            gamma: -1.0,
            ..Default::default()
        };
        assert!(matches!(run_fig2(&bad), Err(AppError::Config(_))));
        let two = Fig2Params {
            steps: 2,
            min: 0.0,
            max: 1.0,
            ..Default::default()
        };
        assert_eq!(run_fig2(&two).unwrap().rows.len(), 2);
        let one = Fig2Params {
            steps: 1,
            ..Default::default()
        };
        assert!(run_fig2(&one).is_err());
    }

    #[test]
    fn fig3_single_point_matches_hand_value() {
        let t = run_fig3(&Fig3Params {
            min: 2.0,
            max: 2.0,
            steps: 1,
        })
        .unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!((t.rows[0][1] + 0.025_667_725_157_684_94).abs() < 1e-12);
    }

    #[test]
    fn fig3_rejects_below_threshold() {
        let bad = Fig3Params {
            min: 0.9,
            max: 3.0,
            steps: 10,
        };
        assert!(matches!(run_fig3(&bad), Err(AppError::Config(_))));
    }

    #[test]
    fn fig3_tail_monotone_beyond_two() {
        let t = run_fig3(&Fig3Params {
            min: 2.0,
            max: 5.0,
            steps: 100,
        })
        .unwrap();
        // |weight| decays monotonically at this resolution: no further local
        // maxima of the magnitude
        for w in t.rows.windows(2) {
            assert!(w[1][1].abs() <= w[0][1].abs() + 1e-15);
        }
    }

    #[test]
    fn wt_sweep_antisymmetric_and_routes_agree() {
        let config = ScenarioConfig {
            model: ModelConfig::Resonant {
                d01_sq_au: 1.0,
                gamma_per_s: Some(1e14),
            },
            sweep: Some(SweepConfig {
                var: "t0".into(),
                min: -2.0,
                max: 2.0,
                steps: 21,
            }),
            ..Default::default()
        };
        let t = run_wt(&WtParams {
            config,
            routes: vec![WtRoute::Frequency, WtRoute::Resonant],
        })
        .unwrap();
        assert_eq!(t.rows.len(), 21);
        let n = t.rows.len();
        let scale = t
            .rows
            .iter()
            .map(|r| r[1].abs())
            .fold(0.0_f64, f64::max);
        for i in 0..n {
            // antisymmetry of the resonant column
            let j = n - 1 - i;
            assert!((t.rows[i][2] + t.rows[j][2]).abs() < 1e-9 * scale);
            // cross-route deviation column stays under the closed-form budget
            assert!(t.rows[i][3] == 1.0, "row {i} not converged");
            assert!(t.rows[i][4] < 1e-4, "row {i} deviation {}", t.rows[i][4]);
        }
    }

    #[test]
    fn wt_route_model_mismatch_is_config_error() {
        let config = ScenarioConfig {
            model: ModelConfig::Resonant {
                d01_sq_au: 1.0,
                gamma_per_s: Some(1e14),
            },
            sweep: Some(SweepConfig {
                var: "t0".into(),
                min: 0.0,
                max: 1.0,
                steps: 3,
            }),
            ..Default::default()
        };
        let r = run_wt(&WtParams {
            config,
            routes: vec![WtRoute::Continuum],
        });
        assert!(matches!(r, Err(AppError::Config(_))));
    }

    #[test]
    fn oracle_all_green() {
        let (table, pass) = run_oracle(&OracleParams::default()).unwrap();
        assert!(pass, "oracle deviations:\n{}", table.to_csv());
    }
}
