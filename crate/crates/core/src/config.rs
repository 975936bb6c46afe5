//! JSON run configuration.
//!
//! ```json
//! { "q": 0.3, "s": 40, "t1": 0.16, "c1": 0.2, "c2": 2,
//!   "k1": 0.05, "k2": 0.01, "h1": 0.05, "h2": 0.01,
//!   "tau": 150, "step": 0.05, "t_end": 4000 }
//! ```
//!
//! `x10, x20, z10, z20` are optional but must be given together.

use std::path::Path;

use serde_json::{Map, Value};

use crate::dynamics::AdjustmentSpeeds;
use crate::error::{Error, Result};
use crate::model::{equilibrium, MarketState, ModelParams};

pub const DEFAULT_STEP: f64 = 0.05;
/// Leader output offset applied to the equilibrium when no initial state is given.
pub const DEFAULT_KICK: [f64; 4] = [0.01, 0.0, 0.0, 0.0];

const REQUIRED: [&str; 9] = ["q", "s", "t1", "c1", "c2", "k1", "k2", "h1", "h2"];
const INITIAL: [&str; 4] = ["x10", "x20", "z10", "z20"];
const OPTIONAL: [&str; 3] = ["tau", "step", "t_end"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub speeds: AdjustmentSpeeds,
    pub initial: Option<MarketState>,
    pub tau: Option<f64>,
    pub step: Option<f64>,
    pub t_end: Option<f64>,
}

impl RunConfig {
    pub fn new(params: ModelParams, speeds: AdjustmentSpeeds) -> Self {
        Self {
            params,
            speeds,
            initial: None,
            tau: None,
            step: None,
            t_end: None,
        }
    }

    /// The configured initial state, or the equilibrium shifted by [`DEFAULT_KICK`].
    pub fn initial_state(&self) -> Result<MarketState> {
        match self.initial {
            Some(s) => Ok(s),
            None => Ok(equilibrium(&self.params)?.state.offset(DEFAULT_KICK)),
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed JSON: {e}")))?;
    let Value::Object(obj) = value else {
        return Err(Error::Config("top level must be a JSON object".into()));
    };
    for key in obj.keys() {
        let known = REQUIRED.contains(&key.as_str())
            || INITIAL.contains(&key.as_str())
            || OPTIONAL.contains(&key.as_str());
        if !known {
            return Err(Error::Config(format!("unknown field `{key}`")));
        }
    }

    let req = |name: &str| -> Result<f64> {
        number(&obj, name)?.ok_or_else(|| Error::Config(format!("missing field `{name}`")))
    };
    let params = ModelParams::new(req("q")?, req("s")?, req("t1")?, req("c1")?, req("c2")?)?;
    let speeds = AdjustmentSpeeds::new(req("k1")?, req("k2")?, req("h1")?, req("h2")?)?;

    let given: Vec<Option<f64>> = INITIAL
        .iter()
        .map(|n| number(&obj, n))
        .collect::<Result<_>>()?;
    let initial = if given.iter().all(Option::is_none) {
        None
    } else {
        let mut v = [0.0; 4];
        for (i, name) in INITIAL.iter().enumerate() {
            v[i] = given[i].ok_or_else(|| {
                Error::Config(format!(
                    "missing field `{name}` (initial state needs x10, x20, z10, z20)"
                ))
            })?;
        }
        let state = MarketState::from_array(v);
        if state.total_output() <= 0.0 {
            return Err(Error::Config(format!(
                "field `x10`/`x20`: initial total output must be > 0, got {}",
                state.total_output()
            )));
        }
        Some(state)
    };

    let tau = number(&obj, "tau")?;
    if let Some(t) = tau {
        if t < 0.0 {
            return Err(Error::Config(format!("field `tau` must be >= 0, got {t}")));
        }
    }
    let step = number(&obj, "step")?;
    if let Some(h) = step {
        if h <= 0.0 {
            return Err(Error::Config(format!("field `step` must be > 0, got {h}")));
        }
    }
    let t_end = number(&obj, "t_end")?;
    if let Some(t) = t_end {
        if t <= 0.0 {
            return Err(Error::Config(format!("field `t_end` must be > 0, got {t}")));
        }
    }

    Ok(RunConfig {
        params,
        speeds,
        initial,
        tau,
        step,
        t_end,
    })
}

fn number(obj: &Map<String, Value>, name: &str) -> Result<Option<f64>> {
    match obj.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Number(n)) => n
            .as_f64()
            .filter(|v| v.is_finite())
            .map(Some)
            .ok_or_else(|| Error::Config(format!("field `{name}` is not a finite number"))),
        Some(other) => Err(Error::Config(format!(
            "field `{name}` must be a number, got {other}"
        ))),
    }
}
