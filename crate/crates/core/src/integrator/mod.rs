//! Adaptive integration of the Liénard field with event location.
//!
//! Steps are Dormand–Prince 5(4) with a PI controller. Every accepted step
//! keeps its continuous extension, so events are located by bisection on
//! the interpolant and path integrals can be evaluated after the fact.

mod dopri5;
mod potential;

pub use dopri5::DenseStep;
pub use potential::{path_integrals, path_potential_delta, PotentialDelta};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::LienardSystem;
use dopri5::{error_norm, try_step, State};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl PhaseState {
    pub fn new(t: f64, x: f64, y: f64) -> Self {
        Self { t, x, y }
    }
}

/// Crossing equations the integrator can locate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// y = 0.
    XAxisCross,
    /// x = 0.
    YAxisCross,
    /// y = F(x), where orbits are vertical.
    #[serde(rename = "curve_F_cross")]
    CurveFCross,
    /// x = a for a fixed level `a`.
    XLevel(f64),
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventKind::XAxisCross => f.write_str("x_axis_cross"),
            EventKind::YAxisCross => f.write_str("y_axis_cross"),
            EventKind::CurveFCross => f.write_str("curve_F_cross"),
            EventKind::XLevel(a) => write!(f, "x_level={a}"),
        }
    }
}

impl EventKind {
    /// Event function whose zero set is the crossing.
    pub fn residual(&self, system: &LienardSystem, x: f64, y: f64) -> f64 {
        match *self {
            EventKind::XAxisCross => y,
            EventKind::YAxisCross => x,
            EventKind::CurveFCross => y - system.f.value(x),
            EventKind::XLevel(a) => x - a,
        }
    }

    /// Time derivative of the residual along the flow.
    fn rate(&self, system: &LienardSystem, x: f64, y: f64) -> f64 {
        let dx = y - system.f.value(x);
        let dy = -system.g.value(x);
        match self {
            EventKind::XAxisCross => dy,
            EventKind::YAxisCross | EventKind::XLevel(_) => dx,
            EventKind::CurveFCross => dy - system.f.derivative(x) * dx,
        }
    }
}

/// Sign change of the event function: rising is − → +.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Rising,
    Falling,
    Any,
}

impl Direction {
    fn admits(self, actual: Direction) -> bool {
        self == Direction::Any || self == actual
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    pub kind: EventKind,
    pub direction: Direction,
    /// Stop at this many matching crossings (at least 1).
    pub count: usize,
}

impl EventSpec {
    pub fn new(kind: EventKind, direction: Direction, count: usize) -> Self {
        Self {
            kind,
            direction,
            count,
        }
    }
}

/// A located crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub direction: Direction,
    pub state: PhaseState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    EventReached,
    MaxTime,
    MaxSteps,
    DomainExit,
}

/// Step-size control and run limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Limit on elapsed time (absolute value for backward runs).
    pub max_time: f64,
    /// `|x|` or `|y|` beyond this ends the run with `DomainExit`.
    pub escape_radius: f64,
    pub h_max: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 10_000_000,
            max_time: 1e4,
            escape_radius: 1e3,
            h_max: f64::INFINITY,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.max_time > 0.0 && self.escape_radius > 0.0)
            || self.max_steps == 0
            || !(self.h_max > 0.0)
        {
            return Err(Error::Config(format!("invalid step control {self:?}")));
        }
        Ok(())
    }
}

/// What to stop on and what to record along the way.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntegrateOptions {
    pub stop: Option<EventSpec>,
    /// Crossings logged without stopping.
    pub record: Vec<(EventKind, Direction)>,
    /// Integrate the time-reversed field.
    pub backward: bool,
}

/// Integrated path: accepted states, located events and the final status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<PhaseState>,
    pub events: Vec<Event>,
    pub status: Status,
    /// Continuous extension of each accepted step, `dense[i]` joining
    /// `states[i]` and `states[i + 1]`.
    #[serde(skip)]
    pub dense: Vec<DenseStep>,
}

impl Trajectory {
    pub fn first(&self) -> PhaseState {
        self.states[0]
    }

    pub fn last(&self) -> PhaseState {
        *self
            .states
            .last()
            .expect("trajectory has at least its start state")
    }

    /// Events of one kind, in time order.
    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    /// CSV with columns `t,x,y`.
    pub fn states_csv(&self) -> String {
        let rows: Vec<[f64; 3]> = self.states.iter().map(|s| [s.t, s.x, s.y]).collect();
        crate::report::numeric_csv(&["t", "x", "y"], rows.iter().map(|r| &r[..]))
    }

    /// CSV with columns `kind,t,x,y`.
    pub fn events_csv(&self) -> String {
        let mut out = String::from("kind,t,x,y\n");
        for e in &self.events {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.kind, e.state.t, e.state.x, e.state.y
            ));
        }
        out
    }
}

/// Integrate from `start` until `stop` fires or a limit is hit.
pub fn integrate(
    system: &LienardSystem,
    start: PhaseState,
    stop: EventSpec,
    ctrl: &StepControl,
) -> Result<Trajectory> {
    integrate_with(
        system,
        start,
        &IntegrateOptions {
            stop: Some(stop),
            ..Default::default()
        },
        ctrl,
    )
}

struct Tracker {
    kind: EventKind,
    record: Option<Direction>,
    stop: Option<Direction>,
    last_sign: i8,
    last_theta: f64,
    hits: usize,
}

/// Sign change of one tracker between θ = `lo` and θ = `hi`.
struct Crossing {
    lo: f64,
    hi: f64,
    tracker: usize,
    direction: Direction,
}

const PI_BETA: f64 = 0.04;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const SAMPLES_PER_STEP: usize = 4;

/// General driver behind [`integrate`].
pub fn integrate_with(
    system: &LienardSystem,
    start: PhaseState,
    opts: &IntegrateOptions,
    ctrl: &StepControl,
) -> Result<Trajectory> {
    ctrl.validate()?;
    if let Some(stop) = &opts.stop {
        if stop.count == 0 {
            return Err(Error::Config("event count must be at least 1".into()));
        }
    }
    if !(start.t.is_finite() && start.x.is_finite() && start.y.is_finite()) {
        return Err(Error::Config(format!("non-finite start state {start:?}")));
    }
    if !system.in_domain(start.x) {
        return Err(Error::Domain {
            x: start.x,
            d: system.d,
        });
    }
    let sigma = if opts.backward { -1.0 } else { 1.0 };
    let rhs = |s: State| -> Option<State> {
        if !(s[0].is_finite() && s[1].is_finite()) || !system.in_domain(s[0]) {
            return None;
        }
        let d = [s[1] - system.f.value(s[0]), -system.g.value(s[0])];
        (d[0].is_finite() && d[1].is_finite()).then(|| [sigma * d[0], sigma * d[1]])
    };

    let mut trackers = build_trackers(system, start, opts, sigma);
    let mut traj = Trajectory {
        states: vec![start],
        events: Vec::new(),
        status: Status::MaxTime,
        dense: Vec::new(),
    };

    let mut y: State = [start.x, start.y];
    let mut k1 = rhs(y).ok_or(Error::Domain {
        x: start.x,
        d: system.d,
    })?;
    let mut tau = 0.0;
    let mut h = initial_step(&rhs, y, k1, ctrl)
        .min(ctrl.h_max)
        .min(ctrl.max_time);
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;
    let mut steps = 0usize;

    loop {
        if steps >= ctrl.max_steps {
            traj.status = Status::MaxSteps;
            return Ok(traj);
        }
        if tau >= ctrl.max_time {
            traj.status = Status::MaxTime;
            return Ok(traj);
        }
        if tau + h > ctrl.max_time {
            h = ctrl.max_time - tau;
        }
        if h <= 16.0 * f64::EPSILON * tau.abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "step size underflow at t = {}, state ({}, {})",
                start.t + sigma * tau,
                y[0],
                y[1]
            )));
        }
        let Some(trial) = try_step(&rhs, y, k1, h) else {
            // A stage left the domain or blew up. Near the domain edge this
            // shrinks the step until the boundary is effectively reached.
            h *= 0.25;
            if h <= 16.0 * f64::EPSILON * tau.abs().max(1.0) {
                traj.status = Status::DomainExit;
                return Ok(traj);
            }
            last_rejected = true;
            continue;
        };
        let err = error_norm(trial.err, y, trial.y1, ctrl.atol, ctrl.rtol);
        let fac11 = err.powf(0.2 - PI_BETA * 0.75);
        if !(err <= 1.0) {
            let shrink = if err.is_finite() {
                (fac11 / SAFETY).min(1.0 / FAC_MIN)
            } else {
                1.0 / FAC_MIN
            };
            h /= shrink;
            last_rejected = true;
            continue;
        }

        steps += 1;
        let t0 = start.t + sigma * tau;
        let dense = DenseStep::new(t0, sigma * h, h, y, &trial);
        tau += h;
        let y1 = trial.y1;
        let new_state = PhaseState::new(start.t + sigma * tau, y1[0], y1[1]);

        let mut located: Vec<(f64, Crossing)> = scan_step(system, &dense, y1, &mut trackers)
            .into_iter()
            .map(|c| {
                (
                    refine_root(system, &dense, trackers[c.tracker].kind, c.lo, c.hi),
                    c,
                )
            })
            .collect();
        located.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut stopped = None;
        for (theta, c) in located {
            let tr = &mut trackers[c.tracker];
            let p = dense.state(theta);
            let ev = Event {
                kind: tr.kind,
                direction: c.direction,
                state: PhaseState::new(dense.time(theta), p[0], p[1]),
            };
            let logs = tr.record.is_some_and(|d| d.admits(c.direction));
            let counts = tr.stop.is_some_and(|d| d.admits(c.direction));
            if logs || counts {
                traj.events.push(ev);
            }
            if counts {
                tr.hits += 1;
                if opts.stop.is_some_and(|s| tr.hits >= s.count) {
                    stopped = Some((theta, ev.state));
                    break;
                }
            }
        }

        if let Some((theta, ev_state)) = stopped {
            if theta > 0.0 {
                traj.dense.push(dense);
                traj.states.push(ev_state);
            } else if let Some(last) = traj.states.last_mut() {
                // The event sits on the previous step's end point.
                *last = ev_state;
            }
            traj.status = Status::EventReached;
            return Ok(traj);
        }

        traj.dense.push(dense);
        traj.states.push(new_state);
        if y1[0].abs() > ctrl.escape_radius || y1[1].abs() > ctrl.escape_radius {
            traj.status = Status::DomainExit;
            return Ok(traj);
        }

        // PI step-size update.
        let mut fac = fac11 / fac_old.powf(PI_BETA);
        fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h / fac;
        fac_old = err.max(1e-4);
        if last_rejected {
            h_new = h_new.min(h);
        }
        last_rejected = false;
        h = h_new.min(ctrl.h_max);
        y = y1;
        k1 = trial.k[6];
    }
}

fn build_trackers(
    system: &LienardSystem,
    start: PhaseState,
    opts: &IntegrateOptions,
    sigma: f64,
) -> Vec<Tracker> {
    let mut trackers: Vec<Tracker> = Vec::new();
    let mut add = |kind: EventKind, record: Option<Direction>, stop: Option<Direction>| {
        if let Some(t) = trackers.iter_mut().find(|t| t.kind == kind) {
            t.record = t.record.or(record);
            t.stop = t.stop.or(stop);
            return;
        }
        let v = kind.residual(system, start.x, start.y);
        // Starting on the crossing: take the side the flow moves into.
        let s = if v != 0.0 {
            sign(v)
        } else {
            sign(sigma * kind.rate(system, start.x, start.y))
        };
        trackers.push(Tracker {
            kind,
            record,
            stop,
            last_sign: s,
            last_theta: 0.0,
            hits: 0,
        });
    };
    if let Some(stop) = &opts.stop {
        add(stop.kind, None, Some(stop.direction));
    }
    for &(kind, dir) in &opts.record {
        add(kind, Some(dir), None);
    }
    trackers
}

fn sign(v: f64) -> i8 {
    crate::roots::sign(v)
}

/// Sample every event function across the step and report sign changes.
/// Each tracker's memory of the last nonzero sign is updated.
fn scan_step(
    system: &LienardSystem,
    dense: &DenseStep,
    y1: State,
    trackers: &mut [Tracker],
) -> Vec<Crossing> {
    let mut out = Vec::new();
    let samples: Vec<(f64, State)> = (1..=SAMPLES_PER_STEP)
        .map(|j| {
            let theta = j as f64 / SAMPLES_PER_STEP as f64;
            let s = if j == SAMPLES_PER_STEP {
                y1
            } else {
                dense.state(theta)
            };
            (theta, s)
        })
        .collect();
    for (idx, tr) in trackers.iter_mut().enumerate() {
        tr.last_theta = 0.0;
        for &(theta, s) in &samples {
            let v = tr.kind.residual(system, s[0], s[1]);
            let sv = sign(v);
            if sv == 0 || v.is_nan() {
                continue;
            }
            if tr.last_sign != 0 && sv != tr.last_sign {
                out.push(Crossing {
                    lo: tr.last_theta,
                    hi: theta,
                    tracker: idx,
                    direction: if sv > 0 {
                        Direction::Rising
                    } else {
                        Direction::Falling
                    },
                });
            }
            tr.last_sign = sv;
            tr.last_theta = theta;
        }
    }
    out
}

/// Bisection in θ on the interpolant until the bracket cannot shrink.
fn refine_root(
    system: &LienardSystem,
    dense: &DenseStep,
    kind: EventKind,
    mut lo: f64,
    mut hi: f64,
) -> f64 {
    let res = |th: f64| {
        let s = dense.state(th);
        kind.residual(system, s[0], s[1])
    };
    let mut flo = res(lo);
    let mut fhi = res(hi);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = res(mid);
        if fm == 0.0 {
            return mid;
        }
        if sign(fm) == sign(flo) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    if flo.abs() <= fhi.abs() {
        lo
    } else {
        hi
    }
}

/// Starting step from Hairer's heuristic.
fn initial_step<F>(rhs: &F, y0: State, f0: State, ctrl: &StepControl) -> f64
where
    F: Fn(State) -> Option<State>,
{
    let norm = |v: State| -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            s += (v[i] / (ctrl.atol + ctrl.rtol * y0[i].abs())).powi(2);
        }
        (s / 2.0).sqrt()
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1 = [y0[0] + h0 * f0[0], y0[1] + h0 * f0[1]];
    let Some(f1) = rhs(y1) else {
        return h0 * 1e-2;
    };
    let d2 = norm([f1[0] - f0[0], f1[1] - f0[1]]) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(0.2)
    };
    (100.0 * h0).min(h1)
}
