//! Static Cournot duopoly with ad valorem tax evasion.
//!
//! Both firms face the inverse demand `p(X) = 1/X`, linear costs `C_i(x) = c_i x`
//! and, when caught evading (probability `q`), the quadratic fine
//! `F(e) = s t1 e^2 / 2` on evaded revenue `e = x_i p(X) - z_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Economic parameters of the game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Detection probability, `0 < q <= 1`.
    pub q: f64,
    /// Penalty scale, `s >= 1`.
    pub s: f64,
    /// Ad valorem tax rate, `0 < t1 < 1`.
    pub t1: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ModelParams {
    pub fn new(q: f64, s: f64, t1: f64, c1: f64, c2: f64) -> Result<Self> {
        let params = Self { q, s, t1, c1, c2 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(name: &'static str, reason: String) -> Result<()> {
            Err(Error::InvalidParameter { name, reason })
        }
        if !(self.q > 0.0 && self.q <= 1.0) {
            return bad(
                "q",
                format!("detection probability must lie in (0, 1], got {}", self.q),
            );
        }
        if !(self.s >= 1.0 && self.s.is_finite()) {
            return bad("s", format!("penalty scale must be >= 1, got {}", self.s));
        }
        if !(self.t1 > 0.0 && self.t1 < 1.0) {
            return bad(
                "t1",
                format!("tax rate must lie in (0, 1), got {}", self.t1),
            );
        }
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return bad("c1", format!("marginal cost must be > 0, got {}", self.c1));
        }
        if !(self.c2 > 0.0 && self.c2.is_finite()) {
            return bad("c2", format!("marginal cost must be > 0, got {}", self.c2));
        }
        Ok(())
    }

    /// The recurring product `q s t1`.
    pub fn qst(&self) -> f64 {
        self.q * self.s * self.t1
    }

    /// Evaded revenue at which the declaration first-order condition holds, `(1-q)/(q s)`.
    pub fn equilibrium_evasion(&self) -> f64 {
        (1.0 - self.q) / (self.q * self.s)
    }

    /// `q s + q - 1`; declarations can only be nonnegative when this is positive.
    pub fn declaration_margin(&self) -> f64 {
        self.q * self.s + self.q - 1.0
    }

    pub fn cost(&self, firm: Firm) -> f64 {
        match firm {
            Firm::First => self.c1,
            Firm::Second => self.c2,
        }
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Firm {
    First,
    Second,
}

/// Outputs and declared revenues of the two firms.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MarketState {
    pub x1: f64,
    pub x2: f64,
    pub z1: f64,
    pub z2: f64,
}

impl MarketState {
    pub const fn new(x1: f64, x2: f64, z1: f64, z2: f64) -> Self {
        Self { x1, x2, z1, z2 }
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x1, self.x2, self.z1, self.z2]
    }

    pub fn total_output(&self) -> f64 {
        self.x1 + self.x2
    }

    pub fn output(&self, firm: Firm) -> f64 {
        match firm {
            Firm::First => self.x1,
            Firm::Second => self.x2,
        }
    }

    pub fn declared(&self, firm: Firm) -> f64 {
        match firm {
            Firm::First => self.z1,
            Firm::Second => self.z2,
        }
    }

    /// Component-wise `self + delta`.
    pub fn offset(self, delta: [f64; 4]) -> Self {
        let v = self.to_array();
        Self::from_array([
            v[0] + delta[0],
            v[1] + delta[1],
            v[2] + delta[2],
            v[3] + delta[3],
        ])
    }

    /// Max-norm distance.
    pub fn distance(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Price, penalty and cost primitives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Primitives {
    pub price: f64,
    pub price_slope: f64,
    pub price_curvature: f64,
    pub penalty: f64,
    pub marginal_penalty: f64,
    pub cost1: f64,
    pub cost2: f64,
}

pub(crate) fn check_total(total: f64) -> Result<()> {
    if total > 0.0 {
        Ok(())
    } else {
        Err(Error::PriceSingularity { total })
    }
}

pub fn evaluate_primitives(
    x_total: f64,
    evasion: f64,
    output: f64,
    params: &ModelParams,
) -> Result<Primitives> {
    check_total(x_total)?;
    let st = params.s * params.t1;
    Ok(Primitives {
        price: 1.0 / x_total,
        price_slope: -1.0 / (x_total * x_total),
        price_curvature: 2.0 / (x_total * x_total * x_total),
        penalty: 0.5 * st * evasion * evasion,
        marginal_penalty: st * evasion,
        cost1: params.c1 * output,
        cost2: params.c2 * output,
    })
}

/// Expected profit of `firm`: undetected with probability `1-q`, audited with probability `q`.
pub fn profit(firm: Firm, state: &MarketState, params: &ModelParams) -> Result<f64> {
    let total = state.total_output();
    check_total(total)?;
    let (q, t1) = (params.q, params.t1);
    let x = state.output(firm);
    let z = state.declared(firm);
    let revenue = x / total;
    let cost = params.cost(firm) * x;
    let evaded = revenue - z;
    let fine = 0.5 * params.s * t1 * evaded * evaded;
    Ok((1.0 - q) * (revenue - cost - t1 * z) + q * ((1.0 - t1) * revenue - cost - fine))
}

/// Marginal profits `(dP1/dx1, dP2/dx2, dP1/dz1, dP2/dz2)`, using the marginal cost `c_i`.
pub fn foc_residual(state: &MarketState, params: &ModelParams) -> Result<[f64; 4]> {
    let total = state.total_output();
    check_total(total)?;
    let price = 1.0 / total;
    let slope = -price * price;
    let qst = params.qst();
    let (q, t1) = (params.q, params.t1);

    let evaded1 = state.x1 * price - state.z1;
    let evaded2 = state.x2 * price - state.z2;
    let output_foc =
        |evaded: f64, x: f64, c: f64| (1.0 - q * t1 - qst * evaded) * (price + x * slope) - c;
    let declaration_foc = |evaded: f64| -(1.0 - q) * t1 + qst * evaded;

    Ok([
        output_foc(evaded1, state.x1, params.c1),
        output_foc(evaded2, state.x2, params.c2),
        declaration_foc(evaded1),
        declaration_foc(evaded2),
    ])
}

/// Admissible range for `c2` given `c1` under which both declarations are nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub c2_lower: Option<f64>,
    pub c2_upper: Option<f64>,
    pub reason: Option<String>,
}

/// Relative slack on the cost bounds, so boundary cases such as `z_i* = 0`
/// are not lost to rounding.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

pub fn feasibility_check(params: &ModelParams) -> Feasibility {
    let margin = params.declaration_margin();
    if margin <= 0.0 {
        return Feasibility {
            feasible: false,
            c2_lower: None,
            c2_upper: None,
            reason: Some(format!(
                "declaration nonnegativity unattainable: q*s + q - 1 = {margin} <= 0"
            )),
        };
    }
    let honest = 1.0 - params.q;
    let lower = honest * params.c1 / margin;
    let upper = margin * params.c1 / honest;
    let slack = 1.0 + FEASIBILITY_SLACK;
    let feasible = lower <= params.c2 * slack && params.c2 <= upper * slack;
    Feasibility {
        feasible,
        c2_lower: Some(lower),
        c2_upper: Some(upper),
        reason: (!feasible).then(|| format!("c2 = {} outside [{lower}, {upper}]", params.c2)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub state: MarketState,
    /// Common evaded revenue `(1-q)/(q s)`.
    pub evaded: f64,
    pub feasible: bool,
    pub profits: [f64; 2],
}

/// Closed-form stationary point of the first-order conditions.
///
/// Infeasible points (some `z_i* < 0`) are still returned, with `feasible = false`.
pub fn equilibrium(params: &ModelParams) -> Result<EquilibriumReport> {
    params.validate()?;
    let (c1, c2) = (params.c1, params.c2);
    let sum = c1 + c2;
    let net = 1.0 - params.t1;
    let evaded = params.equilibrium_evasion();
    let state = MarketState {
        x1: c2 * net / (sum * sum),
        x2: c1 * net / (sum * sum),
        z1: c2 / sum - evaded,
        z2: c1 / sum - evaded,
    };
    let profits = [
        profit(Firm::First, &state, params)?,
        profit(Firm::Second, &state, params)?,
    ];
    Ok(EquilibriumReport {
        state,
        evaded,
        feasible: feasibility_check(params).feasible,
        profits,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub s_value: f64,
    pub z1_star: f64,
    pub z2_star: f64,
    pub p1_star: f64,
    pub p2_star: f64,
    pub feasible: bool,
}

/// Equilibrium declarations and profits along a grid of penalty scales.
pub fn static_sweep(base: &ModelParams, s_grid: &[f64]) -> Result<Vec<SweepRow>> {
    s_grid
        .iter()
        .map(|&s| {
            let params = base.with_s(s);
            params.validate()?;
            let eq = equilibrium(&params)?;
            Ok(SweepRow {
                s_value: s,
                z1_star: eq.state.z1,
                z2_star: eq.state.z2,
                p1_star: eq.profits[0],
                p2_star: eq.profits[1],
                feasible: eq.feasible,
            })
        })
        .collect()
}

/// `points` uniformly spaced values from `from` to `to`, both ends included.
pub fn uniform_grid(from: f64, to: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![from],
        n => {
            let h = (to - from) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { to } else { from + h * i as f64 })
                .collect()
        }
    }
}
