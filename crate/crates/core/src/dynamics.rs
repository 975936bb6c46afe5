//! Gradient-adjustment dynamics, with and without the follower's observation delay.
//!
//! Each firm moves its output and declared revenue proportionally to the
//! corresponding marginal profit. In the delayed variant the second firm
//! prices its own output against the first firm's output from `tau` time
//! units ago; every other term uses current values.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_total, MarketState, ModelParams};

/// Growth rates within `±OSCILLATION_TOLERANCE` (per unit time) count as sustained.
pub const OSCILLATION_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjustmentSpeeds {
    pub k1: f64,
    pub k2: f64,
    pub h1: f64,
    pub h2: f64,
}

impl AdjustmentSpeeds {
    pub fn new(k1: f64, k2: f64, h1: f64, h2: f64) -> Result<Self> {
        let speeds = Self { k1, k2, h1, h2 };
        speeds.validate()?;
        Ok(speeds)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k1", self.k1),
            ("k2", self.k2),
            ("h1", self.h1),
            ("h2", self.h2),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("adjustment speed must be > 0, got {v}"),
                });
            }
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.k1, self.k2, self.h1, self.h2]
    }
}

/// Right-hand side of the undelayed system.
pub fn ode_rhs(
    state: &MarketState,
    params: &ModelParams,
    speeds: &AdjustmentSpeeds,
) -> Result<[f64; 4]> {
    dde_rhs(state, state.x1, params, speeds)
}

/// Right-hand side of the delayed system, `x1_delayed = x1(t - tau)`.
///
/// Only the follower's output equation sees the delayed value; the follower's
/// declaration equation uses the current `x1`.
pub fn dde_rhs(
    state: &MarketState,
    x1_delayed: f64,
    params: &ModelParams,
    speeds: &AdjustmentSpeeds,
) -> Result<[f64; 4]> {
    let total = state.x1 + state.x2;
    check_total(total)?;
    let seen_total = x1_delayed + state.x2;
    check_total(seen_total)?;

    let qst = params.qst();
    let keep = 1.0 - params.q * params.t1;
    let audit_tax = (1.0 - params.q) * params.t1;

    let price = 1.0 / total;
    let slope = -price * price;
    let seen_price = 1.0 / seen_total;
    let seen_slope = -seen_price * seen_price;

    let evaded1 = state.x1 * price - state.z1;
    let evaded2 = state.x2 * price - state.z2;
    let seen_evaded2 = state.x2 * seen_price - state.z2;

    Ok([
        speeds.k1 * ((keep - qst * evaded1) * (price + state.x1 * slope) - params.c1),
        speeds.k2
            * ((keep - qst * seen_evaded2) * (seen_price + state.x2 * seen_slope) - params.c2),
        speeds.h1 * (-audit_tax + qst * evaded1),
        speeds.h2 * (-audit_tax + qst * evaded2),
    ])
}

type HistoryFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Initial data for the delayed system: `x1` on `[-tau, 0]`, the rest at `t = 0`.
#[derive(Clone)]
pub struct HistorySpec {
    phi: HistoryFn,
    pub x20: f64,
    pub z10: f64,
    pub z20: f64,
}

impl HistorySpec {
    /// `x1(theta) = init.x1` for every `theta <= 0`.
    pub fn constant(init: MarketState) -> Self {
        let x10 = init.x1;
        Self {
            phi: Arc::new(move |_| x10),
            x20: init.x2,
            z10: init.z1,
            z20: init.z2,
        }
    }

    pub fn from_fn<F>(phi: F, x20: f64, z10: f64, z20: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            phi: Arc::new(phi),
            x20,
            z10,
            z20,
        }
    }

    pub fn x1_at(&self, theta: f64) -> f64 {
        (self.phi)(theta)
    }

    pub fn initial_state(&self) -> MarketState {
        MarketState::new(self.x1_at(0.0), self.x20, self.z10, self.z20)
    }
}

impl fmt::Debug for HistorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HistorySpec")
            .field("x1(0)", &self.x1_at(0.0))
            .field("x20", &self.x20)
            .field("z10", &self.z10)
            .field("z20", &self.z20)
            .finish()
    }
}

/// Uniformly sampled solution. `failure` is set when integration stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub step: f64,
    pub times: Vec<f64>,
    pub states: Vec<MarketState>,
    pub failure: Option<Error>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<(f64, MarketState)> {
        Some((*self.times.last()?, *self.states.last()?))
    }

    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }
}

fn step_count(step: f64, t_end: f64) -> Result<usize> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Integration(format!("step must be > 0, got {step}")));
    }
    if !(t_end >= step && t_end.is_finite()) {
        return Err(Error::Integration(format!(
            "t_end must be >= step ({step}), got {t_end}"
        )));
    }
    Ok((t_end / step * (1.0 + 1e-12)).floor() as usize)
}

fn axpy(y: &[f64; 4], a: f64, x: &[f64; 4]) -> MarketState {
    MarketState::from_array([
        y[0] + a * x[0],
        y[1] + a * x[1],
        y[2] + a * x[2],
        y[3] + a * x[3],
    ])
}

/// Classical RK4 on a uniform grid. `rhs(n, stage, state)` is given the step
/// index, the stage node (0, 1/2 or 1, encoded as 0, 1, 2) and the stage state.
fn rk4_driver<F>(init: MarketState, h: f64, steps: usize, mut rhs: F) -> Trajectory
where
    F: FnMut(usize, u8, &MarketState) -> Result<[f64; 4]>,
{
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(init);
    let mut failure = None;

    let mut y = init;
    for n in 0..steps {
        let advanced = (|| -> Result<MarketState> {
            let y0 = y.to_array();
            let k1 = rhs(n, 0, &y)?;
            let k2 = rhs(n, 1, &axpy(&y0, 0.5 * h, &k1))?;
            let k3 = rhs(n, 1, &axpy(&y0, 0.5 * h, &k2))?;
            let k4 = rhs(n, 2, &axpy(&y0, h, &k3))?;
            let mut next = [0.0; 4];
            for i in 0..4 {
                next[i] = y0[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            let next = MarketState::from_array(next);
            check_total(next.total_output())?;
            Ok(next)
        })();
        match advanced {
            Ok(next) => {
                y = next;
                times.push((n + 1) as f64 * h);
                states.push(y);
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    Trajectory {
        step: h,
        times,
        states,
        failure,
    }
}

/// Fixed-step RK4 integration of the undelayed system on `[0, t_end]`.
///
/// The grid is `0, step, 2 step, ...` up to the last multiple not exceeding `t_end`.
pub fn integrate_ode(
    init: MarketState,
    params: &ModelParams,
    speeds: &AdjustmentSpeeds,
    step: f64,
    t_end: f64,
) -> Result<Trajectory> {
    params.validate()?;
    speeds.validate()?;
    let steps = step_count(step, t_end)?;
    check_total(init.total_output())?;
    Ok(rk4_driver(init, step, steps, |_, _, y| {
        ode_rhs(y, params, speeds)
    }))
}

/// Step actually used by [`integrate_dde`]: `tau / ceil(tau / requested)`, or
/// `requested` itself when `tau == 0`.
pub fn snapped_step(tau: f64, requested: f64) -> f64 {
    if tau == 0.0 {
        requested
    } else {
        tau / delay_steps(tau, requested) as f64
    }
}

fn delay_steps(tau: f64, requested: f64) -> usize {
    ((tau / requested) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Fixed-step RK4 integration of the delayed system by the method of steps.
///
/// The step is snapped so that `tau` is an integer number of steps, so the
/// delayed value at the start and end of each step is a stored grid value (or
/// the history function). The mid-step node falls halfway between two stored
/// points and is filled by the cubic Hermite interpolant built from the stored
/// values and their derivatives, which keeps the scheme fourth order.
///
/// With `tau == 0` the result is identical to [`integrate_ode`].
pub fn integrate_dde(
    history: &HistorySpec,
    params: &ModelParams,
    speeds: &AdjustmentSpeeds,
    tau: f64,
    step: f64,
    t_end: f64,
) -> Result<Trajectory> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::Integration(format!("delay must be >= 0, got {tau}")));
    }
    let init = history.initial_state();
    if tau == 0.0 {
        return integrate_ode(init, params, speeds, step, t_end);
    }
    params.validate()?;
    speeds.validate()?;
    step_count(step, t_end)?;
    let lag = delay_steps(tau, step);
    let h = tau / lag as f64;
    let steps = step_count(h, t_end)?;
    check_total(init.total_output())?;

    // x1 and dx1/dt at every stored grid point
    let mut x1_grid: Vec<f64> = Vec::with_capacity(steps + 1);
    let mut dx1_grid: Vec<f64> = Vec::with_capacity(steps + 1);
    x1_grid.push(init.x1);

    let traj = rk4_driver(init, h, steps, |n, stage, y| {
        let back = n as isize - lag as isize;
        let delayed = match stage {
            0 if back < 0 => history.x1_at(back as f64 * h),
            0 => x1_grid[back as usize],
            2 if back + 1 < 0 => history.x1_at((back + 1) as f64 * h),
            2 => x1_grid[(back + 1) as usize],
            _ if back < 0 => history.x1_at((back as f64 + 0.5) * h),
            _ => {
                let i = back as usize;
                0.5 * (x1_grid[i] + x1_grid[i + 1]) + h * (dx1_grid[i] - dx1_grid[i + 1]) / 8.0
            }
        };
        let f = dde_rhs(y, delayed, params, speeds)?;
        if stage == 0 {
            // first stage of step n is evaluated at the stored state y_n
            if x1_grid.len() == n {
                x1_grid.push(y.x1);
            }
            dx1_grid.push(f[0]);
        }
        Ok(f)
    });
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Decaying,
    Sustained,
    Growing,
    NonOscillatory,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationMetrics {
    pub peak_times: Vec<f64>,
    pub peak_amplitudes: Vec<f64>,
    /// Slope of `ln |amplitude|` against time.
    pub growth_rate: f64,
    pub verdict: Verdict,
}

/// Envelope growth of `x1(t) - reference.x1` over the trailing `window` of `traj`.
///
/// Extrema are located on the grid and refined by a parabola through the three
/// neighbouring samples. With fewer than four extrema the verdict is
/// `NonOscillatory` and the rate comes from the window's endpoint ratio.
pub fn oscillation_metrics(
    traj: &Trajectory,
    reference: &MarketState,
    window: f64,
) -> Result<OscillationMetrics> {
    let (t_last, _) = traj
        .last()
        .ok_or_else(|| Error::Integration("empty trajectory".into()))?;
    let span = t_last - traj.times[0];
    if !(window > 0.0 && window <= span * (1.0 + 1e-12)) {
        return Err(Error::Integration(format!(
            "window {window} must lie in (0, {span}]"
        )));
    }
    let start = traj
        .times
        .partition_point(|&t| t < t_last - window * (1.0 + 1e-12));
    let times = &traj.times[start..];
    let dev: Vec<f64> = traj.states[start..]
        .iter()
        .map(|s| s.x1 - reference.x1)
        .collect();
    let noise_floor = 1e-12 * reference.x1.abs().max(1.0);

    let mut peak_times = Vec::new();
    let mut peak_amplitudes = Vec::new();
    for i in 1..dev.len().saturating_sub(1) {
        let left = dev[i] - dev[i - 1];
        let right = dev[i + 1] - dev[i];
        let is_extremum = (left > 0.0 && right <= 0.0) || (left < 0.0 && right >= 0.0);
        if !is_extremum {
            continue;
        }
        let curvature = dev[i - 1] - 2.0 * dev[i] + dev[i + 1];
        let (offset, value) = if curvature != 0.0 {
            let delta = 0.5 * (dev[i - 1] - dev[i + 1]) / curvature;
            (delta, dev[i] - 0.25 * (dev[i - 1] - dev[i + 1]) * delta)
        } else {
            (0.0, dev[i])
        };
        if value.abs() <= noise_floor {
            continue;
        }
        peak_times.push(times[i] + offset * (times[i + 1] - times[i]));
        peak_amplitudes.push(value.abs());
    }

    if peak_amplitudes.len() < 4 {
        let (first, last) = (dev[0].abs(), dev[dev.len() - 1].abs());
        let elapsed = times[times.len() - 1] - times[0];
        let growth_rate = if first > noise_floor && last > noise_floor && elapsed > 0.0 {
            (last / first).ln() / elapsed
        } else {
            0.0
        };
        return Ok(OscillationMetrics {
            peak_times,
            peak_amplitudes,
            growth_rate,
            verdict: Verdict::NonOscillatory,
        });
    }

    let logs: Vec<f64> = peak_amplitudes.iter().map(|a| a.ln()).collect();
    let growth_rate = least_squares_slope(&peak_times, &logs);
    let verdict = if growth_rate < -OSCILLATION_TOLERANCE {
        Verdict::Decaying
    } else if growth_rate > OSCILLATION_TOLERANCE {
        Verdict::Growing
    } else {
        Verdict::Sustained
    };
    Ok(OscillationMetrics {
        peak_times,
        peak_amplitudes,
        growth_rate,
        verdict,
    })
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (num, den) = x.iter().zip(y).fold((0.0, 0.0), |(num, den), (xi, yi)| {
        (num + (xi - mx) * (yi - my), den + (xi - mx) * (xi - mx))
    });
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Integration horizon spanning `periods` oscillations at angular frequency `omega`.
pub fn periods_horizon(omega: f64, periods: f64) -> f64 {
    periods * std::f64::consts::TAU / omega
}
