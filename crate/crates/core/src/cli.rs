//! Command dispatch behind the `duopoly` binary.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::bifurcation::{classify, HopfAnalysis};
use crate::config::{RunConfig, DEFAULT_STEP};
use crate::dynamics::{integrate_dde, periods_horizon, HistorySpec};
use crate::error::{Error, Result};
use crate::linear::{
    char_poly_no_delay, eigenvalue_oracle, jacobian_coefficients, jacobian_matrix, routh_hurwitz,
    CharPolyNoDelay, JacobianCoefficients, RouthHurwitzReport,
};
use crate::model::{
    equilibrium, feasibility_check, foc_residual, static_sweep, uniform_grid, Feasibility,
    ModelParams,
};
use crate::output::{write_csv, write_csv_to, CsvTable};

/// Parameters of the static figure preset: `c1 = 0.3, c2 = 0.6, q = 0.12, t1 = 0.16`.
pub const SECTION2_BASE: ModelParams = ModelParams {
    q: 0.12,
    s: 22.0,
    t1: 0.16,
    c1: 0.3,
    c2: 0.6,
};
pub const SECTION2_RANGE: (f64, f64) = (22.0, 100.0);
pub const SECTION2_POINTS: usize = 200;

/// Oscillation periods covered by the default simulation horizon.
pub const HORIZON_PERIODS: f64 = 20.0;
const HORIZON_MIN_OMEGA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepPreset {
    Section2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Equilibrium,
    Stability,
    Hopf,
    Simulate {
        tau: Option<f64>,
        step: Option<f64>,
        t_end: Option<f64>,
        output: Option<PathBuf>,
    },
    Sweep {
        param: String,
        from: Option<f64>,
        to: Option<f64>,
        steps: Option<usize>,
        preset: Option<SweepPreset>,
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Serialize)]
pub struct EquilibriumOutput {
    pub params: ModelParams,
    pub x1_star: f64,
    pub x2_star: f64,
    pub z1_star: f64,
    pub z2_star: f64,
    pub evaded: f64,
    pub feasible: bool,
    pub feasibility: Feasibility,
    pub profits: [f64; 2],
    pub foc_residual: [f64; 4],
    pub foc_residual_max: f64,
}

pub fn equilibrium_output(params: &ModelParams) -> Result<EquilibriumOutput> {
    let eq = equilibrium(params)?;
    let residual = foc_residual(&eq.state, params)?;
    Ok(EquilibriumOutput {
        params: *params,
        x1_star: eq.state.x1,
        x2_star: eq.state.x2,
        z1_star: eq.state.z1,
        z2_star: eq.state.z2,
        evaded: eq.evaded,
        feasible: eq.feasible,
        feasibility: feasibility_check(params),
        profits: eq.profits,
        foc_residual: residual,
        foc_residual_max: residual.iter().fold(0.0, |m, v| f64::max(m, v.abs())),
    })
}

#[derive(Debug, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Serialize)]
pub struct StabilityOutput {
    pub jacobian_coefficients: JacobianCoefficients,
    pub jacobian: [[f64; 4]; 4],
    pub characteristic: CharPolyNoDelay,
    pub routh_hurwitz: RouthHurwitzReport,
    pub eigenvalues: Vec<Eigenvalue>,
    pub max_real_part: f64,
    pub stable: bool,
}

pub fn stability_output(config: &RunConfig) -> Result<StabilityOutput> {
    let coeffs = jacobian_coefficients(&config.params)?;
    let m = jacobian_matrix(&coeffs, &config.speeds);
    let poly = char_poly_no_delay(&m);
    let rh = routh_hurwitz(&poly);
    let roots = eigenvalue_oracle(&poly)?;
    Ok(StabilityOutput {
        jacobian_coefficients: coeffs,
        jacobian: std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)])),
        characteristic: poly,
        routh_hurwitz: rh,
        max_real_part: roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max),
        eigenvalues: roots
            .iter()
            .map(|z| Eigenvalue { re: z.re, im: z.im })
            .collect(),
        stable: rh.stable,
    })
}

pub fn hopf_output(config: &RunConfig) -> Result<HopfAnalysis> {
    classify(&config.params, &config.speeds)
}

/// Default horizon: twenty periods of the crossing frequency (at least 0.01).
pub fn default_horizon(config: &RunConfig) -> Result<f64> {
    let omega = classify(&config.params, &config.speeds)
        .ok()
        .and_then(|h| h.omega0)
        .unwrap_or(HORIZON_MIN_OMEGA);
    Ok(periods_horizon(
        omega.max(HORIZON_MIN_OMEGA),
        HORIZON_PERIODS,
    ))
}

fn emit_json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn emit_csv<T: CsvTable + ?Sized>(
    table: &T,
    path: Option<&PathBuf>,
    out: &mut dyn Write,
) -> Result<()> {
    match path {
        Some(p) => write_csv(table, p),
        None => write_csv_to(table, out),
    }
}

/// Runs one command. JSON reports and CSV tables without `--output` go to `out`.
///
/// `config` may be absent only for `sweep --preset`.
pub fn run_command(
    command: &Command,
    config: Option<&RunConfig>,
    out: &mut dyn Write,
) -> Result<()> {
    let need = || config.ok_or_else(|| Error::Config("this command needs --config".into()));
    match command {
        Command::Equilibrium => emit_json(&equilibrium_output(&need()?.params)?, out),
        Command::Stability => emit_json(&stability_output(need()?)?, out),
        Command::Hopf => emit_json(&hopf_output(need()?)?, out),
        Command::Simulate {
            tau,
            step,
            t_end,
            output,
        } => {
            let cfg = need()?;
            let tau = tau.or(cfg.tau).unwrap_or(0.0);
            let step = step.or(cfg.step).unwrap_or(DEFAULT_STEP);
            let t_end = match t_end.or(cfg.t_end) {
                Some(t) => t,
                None => default_horizon(cfg)?,
            };
            let history = HistorySpec::constant(cfg.initial_state()?);
            let traj = integrate_dde(&history, &cfg.params, &cfg.speeds, tau, step, t_end)?;
            emit_csv(&traj, output.as_ref(), out)?;
            match traj.failure {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
        Command::Sweep {
            param,
            from,
            to,
            steps,
            preset,
            output,
        } => {
            let (base, from, to, steps) = match preset {
                Some(SweepPreset::Section2) => (
                    SECTION2_BASE,
                    from.unwrap_or(SECTION2_RANGE.0),
                    to.unwrap_or(SECTION2_RANGE.1),
                    steps.unwrap_or(SECTION2_POINTS),
                ),
                None => {
                    let missing =
                        |flag: &str| Error::Config(format!("sweep needs --{flag} or --preset"));
                    (
                        need()?.params,
                        from.ok_or_else(|| missing("from"))?,
                        to.ok_or_else(|| missing("to"))?,
                        steps.ok_or_else(|| missing("steps"))?,
                    )
                }
            };
            if param != "s" {
                return Err(Error::Config(format!(
                    "unsupported sweep parameter `{param}` (only `s`)"
                )));
            }
            if steps == 0 {
                return Err(Error::Config("--steps must be >= 1".into()));
            }
            let rows = static_sweep(&base, &uniform_grid(from, to, steps))?;
            emit_csv(rows.as_slice(), output.as_ref(), out)
        }
    }
}
