use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use srs_cli::commands::{
    run_fig2, run_fig3, run_gain, run_oracle, run_phasematch, run_wt, Fig2Params, Fig3Params,
    GainParams, GammaRoute, OracleParams, PhasematchParams, WtParams, WtRoute,
};
use srs_cli::config::{ScenarioConfig, SweepConfig};
use srs_cli::table::OutputFormat;
use srs_cli::AppError;

/// Delay-dependent probe gain from stimulated Rayleigh scattering of a
/// pump/probe pulse pair.
#[derive(Debug, Parser)]
#[command(name = "srs", version, about)]
struct Cli {
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutputFormat,

    /// Scenario config (JSON); flags override config fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// RNG seed override for Monte-Carlo stages.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SweepFlags {
    /// Sweep variable (wt: t0, gamma or x).
    #[arg(long)]
    var: Option<String>,
    #[arg(long)]
    min: Option<f64>,
    #[arg(long)]
    max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan the dimensionless resonant delay function J(t0, gamma).
    Fig2 {
        /// Scaled width gamma = Gamma tau.
        #[arg(long, default_value_t = 10.0)]
        gamma: f64,
        #[command(flatten)]
        sweep: SweepFlags,
    },
    /// Scan the continuum delay weight over x = w0/E_b.
    Fig3 {
        #[command(flatten)]
        sweep: SweepFlags,
    },
    /// Sweep the single-atom probability w_T over t0, gamma or x.
    Wt {
        /// Comma-separated routes: frequency, time, resonant, asymptotic,
        /// continuum.
        #[arg(long, value_delimiter = ',', default_value = "resonant")]
        routes: Vec<WtRoute>,
        #[command(flatten)]
        sweep: SweepFlags,
    },
    /// End-to-end macroscopic gain pipeline for the configured scenario.
    Gain {
        /// Which effective-width route feeds gamma = Gamma tau.
        #[arg(long, value_enum, default_value = "mc")]
        gamma_route: GammaRoute,
    },
    /// Direct phase-matching queries: F, F_sp and the effective width.
    Phasematch {
        /// Beam angle override (mrad).
        #[arg(long)]
        angle_mrad: Option<f64>,
        /// Direction-sample override for the F_sp estimate.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Cross-route equivalence harness; exits 3 when any case exceeds its
    /// tolerance.
    Oracle {
        #[arg(long, default_value_t = 1e-3)]
        tol_time: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol_closed: f64,
        #[arg(long, default_value_t = 0.02)]
        tol_continuum: f64,
    },
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, AppError> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::from_path(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg.with_defaults())
}

fn apply_sweep_flags(cfg: &mut ScenarioConfig, flags: &SweepFlags) -> Result<(), AppError> {
    if flags.var.is_none()
        && flags.min.is_none()
        && flags.max.is_none()
        && flags.steps.is_none()
    {
        return Ok(());
    }
    let base = cfg.sweep.clone();
    let take = |v: Option<f64>, b: Option<f64>, name: &str| {
        v.or(b).ok_or_else(|| {
            AppError::Config(format!("sweep {name} missing (flag or config.sweep)"))
        })
    };
    cfg.sweep = Some(SweepConfig {
        var: flags
            .var
            .clone()
            .or_else(|| base.as_ref().map(|s| s.var.clone()))
            .ok_or_else(|| AppError::Config("sweep var missing".into()))?,
        min: take(flags.min, base.as_ref().map(|s| s.min), "min")?,
        max: take(flags.max, base.as_ref().map(|s| s.max), "max")?,
        steps: flags
            .steps
            .or(base.as_ref().map(|s| s.steps))
            .ok_or_else(|| AppError::Config("sweep steps missing".into()))?,
    });
    Ok(())
}

fn emit(cli: &Cli, rendered: String) -> Result<(), AppError> {
    match &cli.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| AppError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), AppError> {
    match &cli.command {
        Command::Fig2 { gamma, sweep } => {
            let cfg = load_config(cli)?;
            let d = Fig2Params::default();
            let params = Fig2Params {
                gamma: *gamma,
                min: sweep.min.unwrap_or(d.min),
                max: sweep.max.unwrap_or(d.max),
                steps: sweep.steps.unwrap_or(d.steps),
                numerics: cfg.numerics,
            };
            emit(cli, run_fig2(&params)?.render(cli.format))
        }
        Command::Fig3 { sweep } => {
            let d = Fig3Params::default();
            let params = Fig3Params {
                min: sweep.min.unwrap_or(d.min),
                max: sweep.max.unwrap_or(d.max),
                steps: sweep.steps.unwrap_or(d.steps),
            };
            emit(cli, run_fig3(&params)?.render(cli.format))
        }
        Command::Wt { routes, sweep } => {
            let mut config = load_config(cli)?;
            apply_sweep_flags(&mut config, sweep)?;
            let params = WtParams {
                config,
                routes: routes.clone(),
            };
            emit(cli, run_wt(&params)?.render(cli.format))
        }
        Command::Gain { gamma_route } => {
            let config = load_config(cli)?;
            let params = GainParams {
                config,
                gamma_route: *gamma_route,
            };
            emit(cli, run_gain(&params)?.render(cli.format))
        }
        Command::Phasematch {
            angle_mrad,
            samples,
        } => {
            let mut config = load_config(cli)?;
            if let Some(a) = angle_mrad {
                config.pulses.beam_angle_mrad = *a;
            }
            if let Some(s) = samples {
                config.numerics.fsp_direction_samples = *s;
            }
            let params = PhasematchParams { config };
            emit(cli, run_phasematch(&params)?.render(cli.format))
        }
        Command::Oracle {
            tol_time,
            tol_closed,
            tol_continuum,
        } => {
            let params = OracleParams {
                tol_time_vs_frequency: *tol_time,
                tol_frequency_vs_closed: *tol_closed,
                tol_continuum_vs_frequency: *tol_continuum,
            };
            let (table, all_pass) = run_oracle(&params)?;
            emit(cli, table.render(cli.format))?;
            if !all_pass {
                return Err(AppError::Numerics(
                    "route-equivalence tolerances exceeded (see table)".into(),
                ));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("srs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
