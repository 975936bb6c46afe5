//! Imaginary-axis crossings of `P(lambda) + Q(lambda) exp(-lambda tau)`,
//! the critical delay and the direction in which roots cross.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::AdjustmentSpeeds;
use crate::error::{Error, Result};
use crate::linear::{
    char_poly_no_delay, delay_split, jacobian_coefficients, jacobian_matrix, routh_hurwitz,
    DelayCharCoefficients, JacobianCoefficients, RouthHurwitzReport,
};
use crate::model::{feasibility_check, ModelParams};
use crate::poly::{self, Polynomial};

/// `omega^8 + r6 omega^6 + r4 omega^4 + r2 omega^2 + r0`, i.e. `|P(i omega)|^2 - |Q(i omega)|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaPolynomial {
    pub r6: f64,
    pub r4: f64,
    pub r2: f64,
    pub r0: f64,
}

impl OmegaPolynomial {
    pub fn eval(&self, omega: f64) -> f64 {
        self.eval_squared(omega * omega)
    }

    /// The same polynomial as a quartic in `y = omega^2`.
    pub fn eval_squared(&self, y: f64) -> f64 {
        (((y + self.r6) * y + self.r4) * y + self.r2) * y + self.r0
    }
}

pub fn omega_polynomial(n: &DelayCharCoefficients) -> OmegaPolynomial {
    OmegaPolynomial {
        r6: n.n43 * n.n43 - 2.0 * n.n42,
        r4: n.n42 * n.n42 + 2.0 * n.n40 - 2.0 * n.n43 * n.n41 - n.n22 * n.n22,
        r2: n.n41 * n.n41 - 2.0 * n.n42 * n.n40 + 2.0 * n.n22 * n.n20 - n.n21 * n.n21,
        r0: n.n40 * n.n40 - n.n20 * n.n20,
    }
}

/// Positive `omega` with `|P(i omega)| = |Q(i omega)|`, ascending.
///
/// A root `y` of the quartic in `omega^2` counts when
/// `|Im y| < 1e-9 (1 + |y|)` and `Re y > 1e-12`.
pub fn crossing_frequencies(r: &OmegaPolynomial) -> Result<Vec<f64>> {
    let ys = poly::roots(&[1.0, r.r6, r.r4, r.r2, r.r0])?;
    let mut omegas: Vec<f64> = ys
        .into_iter()
        .filter(|y| y.im.abs() < 1e-9 * (1.0 + y.norm()) && y.re > 1e-12)
        .map(|y| y.re.sqrt())
        .collect();
    omegas.sort_by(f64::total_cmp);
    omegas.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    Ok(omegas)
}

/// `P(i omega) = a1 + i a2` and `Q(i omega) = -a3 + i a4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImaginaryAxisEvaluation {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl ImaginaryAxisEvaluation {
    pub fn at(n: &DelayCharCoefficients, omega: f64) -> Self {
        let w2 = omega * omega;
        Self {
            a1: w2 * w2 - n.n42 * w2 + n.n40,
            a2: -n.n43 * w2 * omega + n.n41 * omega,
            a3: n.n22 * w2 - n.n20,
            a4: n.n21 * omega,
        }
    }

    pub fn p(&self) -> Complex64 {
        Complex64::new(self.a1, self.a2)
    }

    pub fn q(&self) -> Complex64 {
        Complex64::new(-self.a3, self.a4)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalDelay {
    pub omega: f64,
    /// Smallest positive delay placing `i omega` on the spectrum.
    pub tau: f64,
    /// `omega * tau`, in `(0, 2 pi]`.
    pub phase: f64,
    pub evaluation: ImaginaryAxisEvaluation,
    /// `|P(i omega) + Q(i omega) exp(-i omega tau)|`.
    pub residual: f64,
}

impl CriticalDelay {
    /// Later delays at which the same pair returns to the imaginary axis.
    pub fn ladder(&self, count: usize) -> Vec<f64> {
        (1..=count)
            .map(|j| self.tau + TAU * j as f64 / self.omega)
            .collect()
    }
}

/// Smallest `tau > 0` with `exp(-i omega tau) = -P(i omega) / Q(i omega)`.
///
/// The phase is recovered with a two-argument arctangent from
/// `cos(omega tau) = (a1 a3 - a2 a4) / (a3^2 + a4^2)` and
/// `sin(omega tau) = -(a1 a4 + a2 a3) / (a3^2 + a4^2)`.
pub fn critical_delay(n: &DelayCharCoefficients, omega: f64) -> Result<CriticalDelay> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: format!("crossing frequency must be > 0, got {omega}"),
        });
    }
    let ev = ImaginaryAxisEvaluation::at(n, omega);
    let q_norm = ev.q().norm();
    let q_scale = n.n22.abs() * omega * omega + n.n21.abs() * omega + n.n20.abs();
    if q_norm == 0.0 || q_norm <= 1e-14 * q_scale {
        return Err(Error::DegenerateCrossing { magnitude: q_norm });
    }
    let denom = ev.a3 * ev.a3 + ev.a4 * ev.a4;
    let cos = (ev.a1 * ev.a3 - ev.a2 * ev.a4) / denom;
    let sin = -(ev.a1 * ev.a4 + ev.a2 * ev.a3) / denom;
    let mut phase = sin.atan2(cos);
    if phase <= 0.0 {
        phase += TAU;
    }
    let tau = phase / omega;
    let lambda = Complex64::new(0.0, omega);
    let residual = n.quasi_polynomial(lambda, tau).norm();
    Ok(CriticalDelay {
        omega,
        tau,
        phase,
        evaluation: ev,
        residual,
    })
}

/// `d lambda / d tau` on the root branch through `(lambda, tau)`, by implicit
/// differentiation of `P + Q exp(-lambda tau) = 0`.
pub fn root_velocity(n: &DelayCharCoefficients, lambda: Complex64, tau: f64) -> Result<Complex64> {
    root_velocity_of(&n.p(), &n.q(), lambda, tau)
}

/// [`root_velocity`] for arbitrary real `P` and `Q`.
///
/// Fails when `|P'(lambda) + (Q'(lambda) - tau Q(lambda)) exp(-lambda tau)|`
/// is below `1e-12` relative to the largest coefficient.
pub fn root_velocity_of(
    p: &Polynomial,
    q: &Polynomial,
    lambda: Complex64,
    tau: f64,
) -> Result<Complex64> {
    let e = (-lambda * tau).exp();
    let qv = q.eval_complex(lambda);
    let denom =
        p.derivative().eval_complex(lambda) + (q.derivative().eval_complex(lambda) - qv * tau) * e;
    let scale = p
        .coeffs()
        .iter()
        .chain(q.coeffs())
        .fold(0.0_f64, |acc, c| acc.max(c.abs()));
    if denom.norm() < 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateTransversality {
            magnitude: denom.norm(),
        });
    }
    Ok(lambda * qv * e / denom)
}

/// `Re(d lambda / d tau)` at `lambda = i omega`.
pub fn transversality(n: &DelayCharCoefficients, omega: f64, tau: f64) -> Result<f64> {
    Ok(root_velocity(n, Complex64::new(0.0, omega), tau)?.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// Stable at zero delay and no root can ever reach the imaginary axis.
    StableForAllDelays,
    /// Stable for `0 <= tau < tau0`; a pair crosses at `tau0`.
    StableUntilTau0,
    UnstableAtZeroDelay,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfAnalysis {
    pub classification: Classification,
    pub routh_hurwitz: RouthHurwitzReport,
    pub coefficients: DelayCharCoefficients,
    pub omega_polynomial: OmegaPolynomial,
    /// Every positive crossing frequency with its first critical delay.
    pub crossings: Vec<CriticalDelay>,
    pub omega0: Option<f64>,
    pub tau0: Option<f64>,
    pub transversality: Option<f64>,
    pub transversality_sign: Option<i8>,
    pub crossing_residual: Option<f64>,
    /// `tau0 + 2 pi j / omega0` for the next few `j`.
    pub delay_ladder: Vec<f64>,
}

const LADDER_LEN: usize = 3;

/// Delay-stability classification for economic parameters and speeds.
pub fn classify(params: &ModelParams, speeds: &AdjustmentSpeeds) -> Result<HopfAnalysis> {
    let feasibility = feasibility_check(params);
    if !feasibility.feasible {
        return Err(Error::Infeasible(feasibility.reason.unwrap_or_default()));
    }
    classify_coefficients(&jacobian_coefficients(params)?, speeds)
}

/// [`classify`] starting from Jacobian coefficients.
pub fn classify_coefficients(
    j: &JacobianCoefficients,
    speeds: &AdjustmentSpeeds,
) -> Result<HopfAnalysis> {
    speeds.validate()?;
    let rh = routh_hurwitz(&char_poly_no_delay(&jacobian_matrix(j, speeds)));
    let coefficients = delay_split(j, speeds);
    let omega_poly = omega_polynomial(&coefficients);

    let mut analysis = HopfAnalysis {
        classification: Classification::UnstableAtZeroDelay,
        routh_hurwitz: rh,
        coefficients,
        omega_polynomial: omega_poly,
        crossings: Vec::new(),
        omega0: None,
        tau0: None,
        transversality: None,
        transversality_sign: None,
        crossing_residual: None,
        delay_ladder: Vec::new(),
    };
    if !rh.stable {
        return Ok(analysis);
    }

    let mut crossings = Vec::new();
    if !coefficients.q().is_zero() {
        for omega in crossing_frequencies(&omega_poly)? {
            crossings.push(critical_delay(&coefficients, omega)?);
        }
    }
    let Some(first) = crossings
        .iter()
        .min_by(|a, b| a.tau.total_cmp(&b.tau))
        .cloned()
    else {
        analysis.classification = Classification::StableForAllDelays;
        return Ok(analysis);
    };

    let velocity = transversality(&coefficients, first.omega, first.tau)?;
    analysis.classification = Classification::StableUntilTau0;
    analysis.omega0 = Some(first.omega);
    analysis.tau0 = Some(first.tau);
    analysis.transversality = Some(velocity);
    analysis.transversality_sign = Some(if velocity > 0.0 {
        1
    } else if velocity < 0.0 {
        -1
    } else {
        0
    });
    analysis.crossing_residual = Some(first.residual);
    analysis.delay_ladder = first.ladder(LADDER_LEN);
    analysis.crossings = crossings;
    Ok(analysis)
}
