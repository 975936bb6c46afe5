//! Linearisation at the stationary state and the characteristic polynomials
//! of the undelayed and delayed systems.
//!
//! All characteristic coefficients are extracted from the Jacobian matrix
//! itself (principal-minor sums and a cofactor polynomial), never from
//! hand-expanded closed forms.

use nalgebra::{Matrix3, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::AdjustmentSpeeds;
use crate::error::Result;
use crate::model::{equilibrium, ModelParams};
use crate::poly::{det3, Polynomial};

/// Partial derivatives of the four marginal-profit expressions at the
/// stationary state, before multiplication by the adjustment speeds.
///
/// Row `a` is the leader's output equation, `b` the follower's output,
/// `c` and `d` the two declaration equations. Suffixes name the variable:
/// `10` = x1, `01` = x2, `001` = own declared revenue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobianCoefficients {
    pub a10: f64,
    pub a01: f64,
    pub a001: f64,
    pub b10: f64,
    pub b01: f64,
    pub b001: f64,
    pub c10: f64,
    pub c01: f64,
    pub c001: f64,
    pub d10: f64,
    pub d01: f64,
    pub d001: f64,
}

pub fn jacobian_coefficients(params: &ModelParams) -> Result<JacobianCoefficients> {
    let eq = equilibrium(params)?.state;
    let (c1, c2, t1) = (params.c1, params.c2, params.t1);
    let qst = params.qst();
    let net = 1.0 - t1;
    let total = eq.total_output();
    let slope = -1.0 / (total * total);
    let curvature = 2.0 / (total * total * total);
    let (x1, x2) = (eq.x1, eq.x2);

    Ok(JacobianCoefficients {
        a10: -qst * c1 * c1 / (net * net) + net * (2.0 * slope + x1 * curvature),
        a01: -qst * x1 * slope * c1 / net + net * (slope + x1 * curvature),
        a001: qst * c1 / net,
        b10: -qst * x2 * slope * c2 / net + net * (slope + x2 * curvature),
        b01: -qst * c2 * c2 / (net * net) + net * (2.0 * slope + x2 * curvature),
        b001: qst * c2 / net,
        c10: qst * c1 / net,
        c01: qst * x1 * slope,
        c001: -qst,
        d10: qst * x2 * slope,
        d01: qst * c2 / net,
        d001: -qst,
    })
}

/// Speed-scaled Jacobian of the undelayed system, variables ordered `(x1, x2, z1, z2)`.
pub fn jacobian_matrix(j: &JacobianCoefficients, speeds: &AdjustmentSpeeds) -> Matrix4<f64> {
    let AdjustmentSpeeds { k1, k2, h1, h2 } = *speeds;
    Matrix4::new(
        k1 * j.a10,
        k1 * j.a01,
        k1 * j.a001,
        0.0,
        k2 * j.b10,
        k2 * j.b01,
        0.0,
        k2 * j.b001,
        h1 * j.c10,
        h1 * j.c01,
        h1 * j.c001,
        0.0,
        h2 * j.d10,
        h2 * j.d01,
        0.0,
        h2 * j.d001,
    )
}

/// `lambda^4 + m43 lambda^3 + m42 lambda^2 + m41 lambda + m40`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharPolyNoDelay {
    pub m43: f64,
    pub m42: f64,
    pub m41: f64,
    pub m40: f64,
}

impl CharPolyNoDelay {
    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(vec![self.m40, self.m41, self.m42, self.m43, 1.0])
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        [1.0, self.m43, self.m42, self.m41, self.m40]
            .iter()
            .fold(0.0_f64, |acc, c| acc.max(c.abs()))
    }
}

/// `det(lambda I - J)` from sums of principal minors.
pub fn char_poly_no_delay(j: &Matrix4<f64>) -> CharPolyNoDelay {
    let mut minors2 = 0.0;
    for a in 0..4 {
        for b in a + 1..4 {
            minors2 += j[(a, a)] * j[(b, b)] - j[(a, b)] * j[(b, a)];
        }
    }
    let mut minors3 = 0.0;
    for skip in 0..4 {
        let idx: Vec<usize> = (0..4).filter(|&i| i != skip).collect();
        let sub = Matrix3::from_fn(|r, c| j[(idx[r], idx[c])]);
        minors3 += sub.determinant();
    }
    CharPolyNoDelay {
        m43: -j.trace(),
        m42: minors2,
        m41: -minors3,
        m40: j.determinant(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RouthHurwitzReport {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub stable: bool,
}

/// Hurwitz determinants of a monic quartic. All four positive is equivalent to
/// every root lying in the open left half-plane.
pub fn routh_hurwitz(p: &CharPolyNoDelay) -> RouthHurwitzReport {
    let d1 = p.m43;
    let d2 = p.m43 * p.m42 - p.m41;
    let d3 = p.m41 * d2 - p.m43 * p.m43 * p.m40;
    let d4 = p.m40 * d3;
    RouthHurwitzReport {
        d1,
        d2,
        d3,
        d4,
        stable: d1 > 0.0 && d2 > 0.0 && d3 > 0.0 && d4 > 0.0,
    }
}

/// The four roots of the characteristic quartic, computed numerically.
///
/// Independent of [`routh_hurwitz`]; used to cross-check it.
pub fn eigenvalue_oracle(p: &CharPolyNoDelay) -> Result<Vec<Complex64>> {
    crate::poly::roots(&[1.0, p.m43, p.m42, p.m41, p.m40])
}

/// Coefficients of `P(lambda) + Q(lambda) exp(-lambda tau)`, with
/// `P = lambda^4 + n43 lambda^3 + n42 lambda^2 + n41 lambda + n40` and
/// `Q = n22 lambda^2 + n21 lambda + n20`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayCharCoefficients {
    pub n43: f64,
    pub n42: f64,
    pub n41: f64,
    pub n40: f64,
    pub n22: f64,
    pub n21: f64,
    pub n20: f64,
}

impl DelayCharCoefficients {
    pub fn p(&self) -> Polynomial {
        Polynomial::new(vec![self.n40, self.n41, self.n42, self.n43, 1.0])
    }

    pub fn q(&self) -> Polynomial {
        Polynomial::new(vec![self.n20, self.n21, self.n22])
    }

    pub fn eval_p(&self, lambda: Complex64) -> Complex64 {
        self.p().eval_complex(lambda)
    }

    pub fn eval_q(&self, lambda: Complex64) -> Complex64 {
        self.q().eval_complex(lambda)
    }

    /// `P(lambda) + Q(lambda) exp(-lambda tau)`.
    pub fn quasi_polynomial(&self, lambda: Complex64, tau: f64) -> Complex64 {
        self.eval_p(lambda) + self.eval_q(lambda) * (-lambda * tau).exp()
    }
}

/// Splits the characteristic function of the delayed linearisation.
///
/// Only the follower's response to `x1` (entry (2,1)) is delayed. With `J0`
/// the Jacobian with that entry removed, `P = det(lambda I - J0)` and, since
/// the determinant is affine in a single entry, `Q` is that entry times the
/// negated (2,1) cofactor of `lambda I - J0`.
pub fn delay_split(j: &JacobianCoefficients, speeds: &AdjustmentSpeeds) -> DelayCharCoefficients {
    let full = jacobian_matrix(j, speeds);
    let delayed_entry = full[(1, 0)];
    let mut undelayed = full;
    undelayed[(1, 0)] = 0.0;
    let p = char_poly_no_delay(&undelayed);

    // lambda I - J0 as a matrix of polynomials
    let entry = |r: usize, c: usize| {
        let constant = Polynomial::constant(-undelayed[(r, c)]);
        if r == c {
            &constant + &Polynomial::x()
        } else {
            constant
        }
    };
    let rows = [0, 2, 3];
    let cols = [1, 2, 3];
    let minor = det3(&[
        [
            entry(rows[0], cols[0]),
            entry(rows[0], cols[1]),
            entry(rows[0], cols[2]),
        ],
        [
            entry(rows[1], cols[0]),
            entry(rows[1], cols[1]),
            entry(rows[1], cols[2]),
        ],
        [
            entry(rows[2], cols[0]),
            entry(rows[2], cols[1]),
            entry(rows[2], cols[2]),
        ],
    ]);
    // cofactor sign (-1)^(2+1) = -1; det(A - e E21) = det A - e * cofactor21
    let q = minor.scale(delayed_entry);
    debug_assert!(q.degree() <= 2, "delayed part has degree {}", q.degree());

    DelayCharCoefficients {
        n43: p.m43,
        n42: p.m42,
        n41: p.m41,
        n40: p.m40,
        n22: q.coeff(2),
        n21: q.coeff(1),
        n20: q.coeff(0),
    }
}
