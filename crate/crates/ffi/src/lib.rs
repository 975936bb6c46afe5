//! C ABI over `duopoly-core`.
//!
//! Every fallible function returns a [`DuopolyStatus`]. On failure the message
//! is kept per thread and can be read with [`duopoly_last_error_message`].
//! Handles are created by `*_new`/`*_simulate` and released by the matching
//! `*_free`; passing a freed handle is undefined behaviour.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use duopoly_core::bifurcation::{classify, Classification};
use duopoly_core::dynamics::{integrate_dde, AdjustmentSpeeds, HistorySpec, Trajectory};
use duopoly_core::linear::{
    char_poly_no_delay, eigenvalue_oracle, jacobian_coefficients, jacobian_matrix, routh_hurwitz,
};
use duopoly_core::model::{equilibrium, MarketState, ModelParams};
use duopoly_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuopolyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    PriceSingularity = 3,
    Infeasible = 4,
    /// Integration, root-finding or degenerate-crossing failure.
    Numerical = 5,
    IndexOutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DuopolyParams {
    pub q: f64,
    pub s: f64,
    pub t1: f64,
    pub c1: f64,
    pub c2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DuopolySpeeds {
    pub k1: f64,
    pub k2: f64,
    pub h1: f64,
    pub h2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DuopolyState {
    pub x1: f64,
    pub x2: f64,
    pub z1: f64,
    pub z2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DuopolyEquilibrium {
    pub state: DuopolyState,
    pub evaded: f64,
    pub feasible: bool,
    pub profit1: f64,
    pub profit2: f64,
}

/// Undelayed characteristic quartic `l^4 + m43 l^3 + m42 l^2 + m41 l + m40`
/// and its Hurwitz determinants.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DuopolyStability {
    pub m43: f64,
    pub m42: f64,
    pub m41: f64,
    pub m40: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub stable: bool,
    pub max_real_part: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuopolyClassification {
    StableForAllDelays = 0,
    StableUntilTau0 = 1,
    UnstableAtZeroDelay = 2,
}

/// Delay-stability summary. `omega0`, `tau0`, `transversality` and
/// `crossing_residual` are NaN unless `has_crossing`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DuopolyHopf {
    pub classification: DuopolyClassification,
    pub has_crossing: bool,
    pub omega0: f64,
    pub tau0: f64,
    pub transversality: f64,
    pub crossing_residual: f64,
}

/// Economic parameters together with adjustment speeds.
pub struct DuopolyModel {
    params: ModelParams,
    speeds: AdjustmentSpeeds,
}

pub struct DuopolyTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DuopolyStatus {
    match err {
        Error::InvalidParameter { .. } | Error::Config(_) | Error::Io(_) => {
            DuopolyStatus::InvalidParameter
        }
        Error::PriceSingularity { .. } => DuopolyStatus::PriceSingularity,
        Error::Infeasible(_) => DuopolyStatus::Infeasible,
        Error::Integration(_)
        | Error::NoConvergence { .. }
        | Error::DegenerateCrossing { .. }
        | Error::DegenerateTransversality { .. } => DuopolyStatus::Numerical,
    }
}

fn fail(err: Error) -> DuopolyStatus {
    let status = status_of(&err);
    set_last_error(err.to_string());
    status
}

fn null(what: &str) -> DuopolyStatus {
    set_last_error(format!("null pointer: {what}"));
    DuopolyStatus::NullPointer
}

/// Runs `body`, turning a panic into [`DuopolyStatus::Panic`].
fn guard(body: impl FnOnce() -> DuopolyStatus) -> DuopolyStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == DuopolyStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            DuopolyStatus::Panic
        }
    }
}

impl From<MarketState> for DuopolyState {
    fn from(s: MarketState) -> Self {
        Self {
            x1: s.x1,
            x2: s.x2,
            z1: s.z1,
            z2: s.z2,
        }
    }
}

impl From<DuopolyState> for MarketState {
    fn from(s: DuopolyState) -> Self {
        MarketState::new(s.x1, s.x2, s.z1, s.z2)
    }
}

/// Version string of this library, statically allocated.
#[no_mangle]
pub extern "C" fn duopoly_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length.
/// Returns 0 when there is no error. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn duopoly_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Validates `params` and `speeds` and allocates a model handle in `*out`.
///
/// # Safety
/// All pointers must be null or valid; `*out` is overwritten.
#[no_mangle]
pub unsafe extern "C" fn duopoly_model_new(
    params: *const DuopolyParams,
    speeds: *const DuopolySpeeds,
    out: *mut *mut DuopolyModel,
) -> DuopolyStatus {
    guard(|| {
        if params.is_null() {
            return null("params");
        }
        if speeds.is_null() {
            return null("speeds");
        }
        if out.is_null() {
            return null("out");
        }
        let (p, k) = (*params, *speeds);
        let model = ModelParams::new(p.q, p.s, p.t1, p.c1, p.c2).and_then(|params| {
            Ok(DuopolyModel {
                params,
                speeds: AdjustmentSpeeds::new(k.k1, k.k2, k.h1, k.h2)?,
            })
        });
        match model {
            Ok(m) => {
                *out = Box::into_raw(Box::new(m));
                DuopolyStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `model` must be null or a handle from [`duopoly_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn duopoly_model_free(model: *mut DuopolyModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle (or null); `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn duopoly_model_equilibrium(
    model: *const DuopolyModel,
    out: *mut DuopolyEquilibrium,
) -> DuopolyStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), out.is_null()) else {
            return null("model or out");
        };
        match equilibrium(&m.params) {
            Ok(eq) => {
                *out = DuopolyEquilibrium {
                    state: eq.state.into(),
                    evaded: eq.evaded,
                    feasible: eq.feasible,
                    profit1: eq.profits[0],
                    profit2: eq.profits[1],
                };
                DuopolyStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `model` must be a live handle (or null); `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn duopoly_model_stability(
    model: *const DuopolyModel,
    out: *mut DuopolyStability,
) -> DuopolyStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), out.is_null()) else {
            return null("model or out");
        };
        let result = jacobian_coefficients(&m.params).and_then(|j| {
            let poly = char_poly_no_delay(&jacobian_matrix(&j, &m.speeds));
            let roots = eigenvalue_oracle(&poly)?;
            Ok((poly, roots))
        });
        match result {
            Ok((poly, roots)) => {
                let rh = routh_hurwitz(&poly);
                *out = DuopolyStability {
                    m43: poly.m43,
                    m42: poly.m42,
                    m41: poly.m41,
                    m40: poly.m40,
                    d1: rh.d1,
                    d2: rh.d2,
                    d3: rh.d3,
                    d4: rh.d4,
                    stable: rh.stable,
                    max_real_part: roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max),
                };
                DuopolyStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `model` must be a live handle (or null); `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn duopoly_model_hopf(
    model: *const DuopolyModel,
    out: *mut DuopolyHopf,
) -> DuopolyStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), out.is_null()) else {
            return null("model or out");
        };
        match classify(&m.params, &m.speeds) {
            Ok(h) => {
                *out = DuopolyHopf {
                    classification: match h.classification {
                        Classification::StableForAllDelays => {
                            DuopolyClassification::StableForAllDelays
                        }
                        Classification::StableUntilTau0 => DuopolyClassification::StableUntilTau0,
                        Classification::UnstableAtZeroDelay => {
                            DuopolyClassification::UnstableAtZeroDelay
                        }
                    },
                    has_crossing: h.omega0.is_some(),
                    omega0: h.omega0.unwrap_or(f64::NAN),
                    tau0: h.tau0.unwrap_or(f64::NAN),
                    transversality: h.transversality.unwrap_or(f64::NAN),
                    crossing_residual: h.crossing_residual.unwrap_or(f64::NAN),
                };
                DuopolyStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Integrates from `initial` (constant history for `x1` on `[-tau, 0]`).
///
/// When integration stops early, `*out` still receives the partial
/// trajectory and the failure status is returned; free it either way.
///
/// # Safety
/// `model` must be a live handle; `initial` readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn duopoly_model_simulate(
    model: *const DuopolyModel,
    initial: *const DuopolyState,
    tau: f64,
    step: f64,
    t_end: f64,
    out: *mut *mut DuopolyTrajectory,
) -> DuopolyStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return null("model");
        };
        if initial.is_null() {
            return null("initial");
        }
        if out.is_null() {
            return null("out");
        }
        let history = HistorySpec::constant((*initial).into());
        match integrate_dde(&history, &m.params, &m.speeds, tau, step, t_end) {
            Ok(traj) => {
                let failure = traj.failure.clone();
                *out = Box::into_raw(Box::new(DuopolyTrajectory { inner: traj }));
                match failure {
                    Some(e) => fail(e),
                    None => DuopolyStatus::Ok,
                }
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `traj` must be null or a handle from [`duopoly_model_simulate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn duopoly_trajectory_free(traj: *mut DuopolyTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of stored samples, 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn duopoly_trajectory_len(traj: *const DuopolyTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.inner.len())
}

/// Step actually used (the requested step snapped to divide the delay), NaN for null.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn duopoly_trajectory_step(traj: *const DuopolyTrajectory) -> f64 {
    traj.as_ref().map_or(f64::NAN, |t| t.inner.step)
}

/// Sample `index`: time into `*time`, state into `*state`.
///
/// # Safety
/// `traj` must be a live handle; `time` and `state` null or writable.
#[no_mangle]
pub unsafe extern "C" fn duopoly_trajectory_get(
    traj: *const DuopolyTrajectory,
    index: usize,
    time: *mut f64,
    state: *mut DuopolyState,
) -> DuopolyStatus {
    guard(|| {
        let Some(t) = traj.as_ref() else {
            return null("traj");
        };
        if time.is_null() || state.is_null() {
            return null("time or state");
        }
        if index >= t.inner.len() {
            set_last_error(format!(
                "index {index} out of range for {} samples",
                t.inner.len()
            ));
            return DuopolyStatus::IndexOutOfRange;
        }
        *time = t.inner.times[index];
        *state = t.inner.states[index].into();
        DuopolyStatus::Ok
    })
}

/// Copies up to `capacity` samples into `times` and `states`; the number
/// copied goes to `*written`.
///
/// # Safety
/// `times` and `states` must each hold `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn duopoly_trajectory_copy(
    traj: *const DuopolyTrajectory,
    times: *mut f64,
    states: *mut DuopolyState,
    capacity: usize,
    written: *mut usize,
) -> DuopolyStatus {
    guard(|| {
        let Some(t) = traj.as_ref() else {
            return null("traj");
        };
        if times.is_null() || states.is_null() || written.is_null() {
            return null("times, states or written");
        }
        let n = capacity.min(t.inner.len());
        for i in 0..n {
            *times.add(i) = t.inner.times[i];
            *states.add(i) = t.inner.states[i].into();
        }
        *written = n;
        DuopolyStatus::Ok
    })
}
