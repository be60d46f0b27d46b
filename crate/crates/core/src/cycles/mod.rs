//! Limit cycles from the half-return map on the positive y-axis.
//!
//! For odd F and g the orbit through `(0, y0)` is closed exactly when its
//! first crossing of the negative y-axis is at `−y0`, so the zeros of
//! `D(y0) = |y_return| − y0` are the cycles. `D` is sampled on a log grid,
//! sign changes are bisected and tangential touches are flagged.

mod potential;

pub use potential::{
    potential_decomposition, potential_scan, potential_value, PotentialDecomposition,
    PotentialPoint, PotentialScan,
};

use std::convert::Infallible;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{
    integrate_with, Direction, EventKind, EventSpec, IntegrateOptions, PhaseState, Status,
    StepControl, Trajectory,
};
use crate::roots::{bisect, golden_min, logspace, sign, sign_changes, touch_candidates};
use crate::system::LienardSystem;

/// Width to which cycle intercepts are bisected.
pub const ROOT_TOL: f64 = 1e-10;
/// `|D|` at a touching extremum below which a double cycle is reported.
pub const TOUCH_TOL: f64 = 1e-7;
pub const MIN_GRID: usize = 200;
const MAX_DOUBLINGS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    SemiStable,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::SemiStable => "semi_stable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCycle {
    /// Crossing of the positive y-axis.
    pub y_plus0: f64,
    /// Crossing of the negative y-axis; `−y_plus0` by symmetry.
    pub y_minus0: f64,
    /// Largest `|x|` on the orbit, attained on the isocline y = F(x).
    pub amplitude: f64,
    pub stability: Stability,
    /// 1 for a simple cycle, 2 for a tangential one.
    pub multiplicity: u32,
    /// `|D(y_plus0)|` after refinement.
    pub closure_residual: f64,
}

/// Settings for [`find_limit_cycles`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleOptions {
    /// Top of the y0 scan; `None` selects the automatic bound.
    pub y_max: Option<f64>,
    /// Number of log-spaced y0 samples.
    pub grid_n: usize,
    /// Bottom of the scan as a fraction of `y_max`.
    pub y_min_ratio: f64,
    pub ctrl: StepControl,
}

impl Default for CycleOptions {
    fn default() -> Self {
        Self {
            y_max: None,
            grid_n: MIN_GRID,
            y_min_ratio: 1e-3,
            ctrl: StepControl::default(),
        }
    }
}

/// Detected cycles together with the sampled return map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleScan {
    pub y_max: f64,
    /// `(y0, D(y0))`. Escapes are `+inf`, non-returns NaN.
    pub samples: Vec<(f64, f64)>,
    pub cycles: Vec<LimitCycle>,
}

impl CycleScan {
    /// CSV with columns `y0,D`.
    pub fn samples_csv(&self) -> String {
        let rows: Vec<[f64; 2]> = self.samples.iter().map(|&(a, b)| [a, b]).collect();
        crate::report::numeric_csv(&["y0", "D"], rows.iter().map(|r| &r[..]))
    }
}

fn half_orbit_opts(record_curve: bool) -> IntegrateOptions {
    IntegrateOptions {
        stop: Some(EventSpec::new(EventKind::YAxisCross, Direction::Falling, 1)),
        record: if record_curve {
            vec![(EventKind::CurveFCross, Direction::Any)]
        } else {
            Vec::new()
        },
        backward: false,
    }
}

/// Orbit from `(0, y0)` up to its first crossing of the negative y-axis.
pub fn half_orbit(system: &LienardSystem, y0: f64, ctrl: &StepControl) -> Result<Trajectory> {
    half_orbit_with(system, y0, ctrl, false)
}

fn half_orbit_with(
    system: &LienardSystem,
    y0: f64,
    ctrl: &StepControl,
    record_curve: bool,
) -> Result<Trajectory> {
    if !(y0 > 0.0 && y0.is_finite()) {
        return Err(Error::Config(format!("y0 = {y0} must be positive")));
    }
    let traj = integrate_with(
        system,
        PhaseState::new(0.0, 0.0, y0),
        &half_orbit_opts(record_curve),
        ctrl,
    )?;
    if traj.status != Status::EventReached {
        let reason = match traj.status {
            Status::MaxTime => "time limit reached",
            Status::MaxSteps => "step limit reached",
            Status::DomainExit => "left the domain",
            Status::EventReached => unreachable!(),
        };
        return Err(Error::NoReturn {
            y0,
            reason: reason.into(),
            partial: Box::new(traj),
        });
    }
    Ok(traj)
}

/// `|y|` at the first return to the y-axis with `y < 0`.
pub fn half_return(system: &LienardSystem, y0: f64, ctrl: &StepControl) -> Result<f64> {
    Ok(half_orbit(system, y0, ctrl)?.last().y.abs())
}

/// `D(y0)` for scanning: leaving the domain counts as `+inf` (outward),
/// any other failure to return as NaN.
pub fn return_displacement(system: &LienardSystem, y0: f64, ctrl: &StepControl) -> f64 {
    match half_orbit(system, y0, ctrl) {
        Ok(t) => t.last().y.abs() - y0,
        Err(Error::NoReturn { partial, .. }) if partial.status == Status::DomainExit => {
            f64::INFINITY
        }
        Err(_) => f64::NAN,
    }
}

/// Largest `|x|` over the curve_F crossings of the half orbit from `(0, y0)`.
pub fn amplitude(system: &LienardSystem, y0: f64, ctrl: &StepControl) -> Result<f64> {
    let t = half_orbit_with(system, y0, ctrl, true)?;
    t.events_of(EventKind::CurveFCross)
        .map(|e| e.state.x.abs())
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))))
        .ok_or_else(|| Error::Analysis(format!("orbit from y0 = {y0} never met y = F(x)")))
}

/// Default top of the scan before doubling:
/// `2·(max |F| at extrema + √(2·G(a_N + 1)))`.
pub fn default_y_max(system: &LienardSystem) -> Result<f64> {
    let z = system.zero_structure()?;
    let peak = z
        .values_at_extrema
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let last_zero = z.zeros.last().copied().unwrap_or(0.0);
    let mut reach = last_zero + 1.0;
    if system.d.is_finite() {
        reach = reach.min(system.horizon());
    }
    Ok(2.0 * (peak + (2.0 * system.big_g(reach)).sqrt()))
}

/// Sign D must have above the outermost cycle: negative when F grows
/// to +∞ (inward flow), positive when F falls to −∞.
fn expected_outer_sign(system: &LienardSystem) -> i8 {
    let h = system.horizon();
    if system.f.value(h) >= 0.0 {
        -1
    } else {
        1
    }
}

/// Escape radius used while scanning up to `y_top`. Returning orbits stay
/// well inside it, and runaway orbits are caught long before a finite-time
/// blow-up drives the step size to underflow.
fn escape_radius(system: &LienardSystem, y_top: f64) -> f64 {
    10.0 * y_top.max(system.horizon())
}

/// Scan the half-return map and return every cycle found below `y_max`.
pub fn find_limit_cycles(system: &LienardSystem, opts: &CycleOptions) -> Result<CycleScan> {
    if system.is_center() {
        return Err(Error::Analysis(
            "F vanishes identically: every orbit is closed and no cycle is isolated".into(),
        ));
    }
    if opts.grid_n < MIN_GRID {
        return Err(Error::Config(format!(
            "grid_n = {} is below {MIN_GRID}",
            opts.grid_n
        )));
    }
    if !(opts.y_min_ratio > 0.0 && opts.y_min_ratio < 1.0) {
        return Err(Error::Config("y_min_ratio must lie in (0, 1)".into()));
    }
    opts.ctrl.validate()?;
    let scan_ctrl = |y_top: f64| StepControl {
        escape_radius: opts.ctrl.escape_radius.min(escape_radius(system, y_top)),
        ..opts.ctrl
    };

    let y_max = match opts.y_max {
        Some(y) if y > 0.0 && y.is_finite() => y,
        Some(y) => return Err(Error::Config(format!("y_max = {y} must be positive"))),
        None => {
            let want = expected_outer_sign(system);
            let mut y = default_y_max(system)?;
            for _ in 0..MAX_DOUBLINGS {
                if sign(return_displacement(system, y, &scan_ctrl(y))) == want {
                    break;
                }
                y *= 2.0;
            }
            y
        }
    };
    let ctrl = &scan_ctrl(y_max);
    let d_of = |y: f64| return_displacement(system, y, ctrl);

    let grid = logspace(y_max * opts.y_min_ratio, y_max, opts.grid_n);
    let values: Vec<f64> = grid.par_iter().map(|&y| d_of(y)).collect();

    let refine_root = |lo: f64, hi: f64| -> Result<f64> {
        let r = bisect(|y| Ok::<_, Infallible>(d_of(y)), lo, hi, ROOT_TOL)
            .unwrap_or_else(|e| match e {});
        if d_of(r).is_nan() {
            return Err(Error::Analysis(format!(
                "return map undefined near y0 = {r}; increase grid_n"
            )));
        }
        Ok(r)
    };

    // (y0, stability, multiplicity)
    let mut found: Vec<(f64, Stability, u32)> = Vec::new();
    for (i, j) in sign_changes(&values) {
        if values[i + 1..j].iter().any(|v| v.is_nan()) {
            continue;
        }
        let r = refine_root(grid[i], grid[j])?;
        let st = if values[i] > 0.0 {
            Stability::Stable
        } else {
            Stability::Unstable
        };
        found.push((r, st, 1));
    }
    for i in touch_candidates(&values) {
        let (lo, hi) = (grid[i - 1], grid[i + 1]);
        let s = sign(values[i - 1]) as f64;
        let (xm, m) = golden_min(|y| Ok::<_, Infallible>(s * d_of(y)), lo, hi, ROOT_TOL)
            .unwrap_or_else(|e| match e {});
        if m.is_nan() {
            continue;
        }
        if m < -TOUCH_TOL {
            // The dip crosses zero between two grid points: two simple cycles.
            let (inner, outer) = if s > 0.0 {
                (Stability::Stable, Stability::Unstable)
            } else {
                (Stability::Unstable, Stability::Stable)
            };
            found.push((refine_root(lo, xm)?, inner, 1));
            found.push((refine_root(xm, hi)?, outer, 1));
        } else if m < TOUCH_TOL {
            found.push((xm, Stability::SemiStable, 2));
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in found.windows(2) {
        if w[1].0 - w[0].0 < 10.0 * ROOT_TOL {
            return Err(Error::Analysis(format!(
                "cycles near y0 = {} are not separated; increase grid_n",
                w[0].0
            )));
        }
    }

    let cycles = found
        .into_par_iter()
        .map(|(y, stability, multiplicity)| {
            let amp = amplitude(system, y, ctrl)?;
            Ok(LimitCycle {
                y_plus0: y,
                y_minus0: -y,
                amplitude: amp,
                stability,
                multiplicity,
                closure_residual: d_of(y).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CycleScan {
        y_max,
        samples: grid.into_iter().zip(values).collect(),
        cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn ctrl() -> StepControl {
        StepControl::default()
    }

    #[test]
    fn center_returns_to_start() {
        let s = builtin::vdp(0.0).unwrap();
        assert!((half_return(&s, 1.0, &ctrl()).unwrap() - 1.0).abs() < 1e-9);
        assert!(find_limit_cycles(&s, &CycleOptions::default()).is_err());
    }

    #[test]
    fn vdp_unit_cycle() {
        let s = builtin::vdp(1.0).unwrap();
        assert!((half_return(&s, 2.1727135, &ctrl()).unwrap() - 2.1727135).abs() < 1e-4);
        let scan = find_limit_cycles(&s, &CycleOptions::default()).unwrap();
        assert_eq!(scan.cycles.len(), 1);
        let c = scan.cycles[0];
        assert_eq!(c.stability, Stability::Stable);
        assert!((c.y_plus0 - 2.1727137).abs() < 1e-5, "{c:?}");
        assert!(c.closure_residual < 1e-9);
        assert!(c.amplitude > 2.0 && c.amplitude < 2.0327737, "{c:?}");
    }

    #[test]
    fn quintic_two_cycles_alternate() {
        let s = builtin::quintic(3.5, 0.1).unwrap();
        let scan = find_limit_cycles(&s, &CycleOptions::default()).unwrap();
        let ys: Vec<f64> = scan.cycles.iter().map(|c| c.y_plus0).collect();
        assert_eq!(ys.len(), 2, "{:?}", scan.cycles);
        assert!((ys[0] - 0.6362401703).abs() < 1e-7);
        assert!((ys[1] - 0.6766488562).abs() < 1e-7);
        assert_eq!(scan.cycles[0].stability, Stability::Stable);
        assert_eq!(scan.cycles[1].stability, Stability::Unstable);
    }

    #[test]
    fn quintic_without_cycles() {
        let s = builtin::quintic(3.65, 0.1).unwrap();
        let scan = find_limit_cycles(&s, &CycleOptions::default()).unwrap();
        assert!(scan.cycles.is_empty(), "{:?}", scan.cycles);
    }

    #[test]
    fn escape_counts_as_outward() {
        let s = builtin::quintic(3.0, 0.1).unwrap();
        assert_eq!(return_displacement(&s, 3.0, &ctrl()), f64::INFINITY);
        match half_return(&s, 3.0, &ctrl()) {
            Err(Error::NoReturn { partial, .. }) => assert_eq!(partial.status, Status::DomainExit),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_grid_rejected() {
        let s = builtin::vdp(1.0).unwrap();
        let o = CycleOptions {
            grid_n: 50,
            ..Default::default()
        };
        assert!(find_limit_cycles(&s, &o).is_err());
    }
}
