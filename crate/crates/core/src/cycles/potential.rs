//! Potential change V along the orbit through a point Q(α, F(α)) of the
//! isocline, from its last upper crossing Y of the y-axis to its next
//! lower crossing Y′. V vanishes exactly on closed orbits, so its roots in
//! α are cycle amplitudes.

use std::convert::Infallible;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{
    integrate_with, path_integrals, Direction, EventKind, EventSpec, IntegrateOptions, PhaseState,
    Status, StepControl, Trajectory,
};
use crate::roots::{bisect, linspace, sign_changes};
use crate::system::LienardSystem;

const ALPHA_TOL: f64 = 1e-12;

/// The two arcs through Q and the resulting V.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialPoint {
    pub alpha: f64,
    /// Upper crossing Y = (0, y_top).
    pub y_top: f64,
    /// Lower crossing Y′ = (0, y_bottom), y_bottom < 0.
    pub y_bottom: f64,
    /// v(Y′) − v(Y).
    #[serde(rename = "V")]
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialScan {
    pub alphas: Vec<f64>,
    /// V per α; NaN where an arc failed to reach x = 0.
    #[serde(rename = "V_values")]
    pub v_values: Vec<f64>,
    /// Refined roots of V.
    pub sign_changes: Vec<f64>,
    /// α values whose arcs failed.
    pub failed: Vec<f64>,
}

impl PotentialScan {
    /// CSV with columns `alpha,V`.
    pub fn csv(&self) -> String {
        let rows: Vec<[f64; 2]> = self
            .alphas
            .iter()
            .zip(&self.v_values)
            .map(|(&a, &v)| [a, v])
            .collect();
        crate::report::numeric_csv(&["alpha", "V"], rows.iter().map(|r| &r[..]))
    }
}

/// V split into the arcs between successive crossings of the zero levels
/// `x = aᵢ`, plus the cap beyond the last level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialDecomposition {
    pub alpha: f64,
    /// Zero levels aᵢ < α at which the path was split.
    pub crossings: Vec<f64>,
    /// Arc names in path order: `upper_1..upper_N`, `cap`, `lower_N..lower_1`.
    pub labels: Vec<String>,
    /// ∫F dy over each arc, in path order.
    pub terms: Vec<f64>,
    /// V from the end points.
    pub total: f64,
}

impl PotentialDecomposition {
    pub fn cap(&self) -> f64 {
        self.terms[self.crossings.len()]
    }
}

struct Arcs {
    /// Q → Y, integrated backward in time.
    upper: Trajectory,
    /// Q → Y′.
    lower: Trajectory,
}

fn arcs(system: &LienardSystem, alpha: f64, levels: &[f64], ctrl: &StepControl) -> Result<Arcs> {
    if !(alpha > 0.0 && system.in_domain(alpha)) {
        return Err(Error::Domain {
            x: alpha,
            d: system.d,
        });
    }
    let q = PhaseState::new(0.0, alpha, system.f.value(alpha));
    let record: Vec<(EventKind, Direction)> = levels
        .iter()
        .map(|&a| (EventKind::XLevel(a), Direction::Falling))
        .collect();
    let run = |backward: bool| -> Result<Trajectory> {
        let t = integrate_with(
            system,
            q,
            &IntegrateOptions {
                stop: Some(EventSpec::new(EventKind::YAxisCross, Direction::Falling, 1)),
                record: record.clone(),
                backward,
            },
            ctrl,
        )?;
        if t.status != Status::EventReached {
            return Err(Error::NoReturn {
                y0: q.y,
                reason: format!(
                    "{} arc from Q(α = {alpha}) did not reach x = 0",
                    if backward { "upper" } else { "lower" }
                ),
                partial: Box::new(t),
            });
        }
        Ok(t)
    };
    Ok(Arcs {
        upper: run(true)?,
        lower: run(false)?,
    })
}

/// V for the orbit through Q(α, F(α)).
pub fn potential_value(
    system: &LienardSystem,
    alpha: f64,
    ctrl: &StepControl,
) -> Result<PotentialPoint> {
    let a = arcs(system, alpha, &[], ctrl)?;
    let (yt, yb) = (a.upper.last().y, a.lower.last().y);
    Ok(PotentialPoint {
        alpha,
        y_top: yt,
        y_bottom: yb,
        v: 0.5 * (yb * yb - yt * yt),
    })
}

/// Sample V on `grid_n` intervals of `alpha_range` and bisect its sign changes.
pub fn potential_scan(
    system: &LienardSystem,
    alpha_range: (f64, f64),
    grid_n: usize,
    ctrl: &StepControl,
) -> Result<PotentialScan> {
    let (lo, hi) = alpha_range;
    if !(lo > 0.0 && hi > lo && hi < system.d && hi.is_finite()) {
        return Err(Error::Config(format!(
            "alpha range [{lo}, {hi}] must lie in (0, d = {})",
            system.d
        )));
    }
    if grid_n < 2 {
        return Err(Error::Config("potential scan needs grid_n >= 2".into()));
    }
    ctrl.validate()?;
    let v_of = |a: f64| potential_value(system, a, ctrl).map_or(f64::NAN, |p| p.v);
    let alphas = linspace(lo, hi, grid_n);
    let v_values: Vec<f64> = alphas.par_iter().map(|&a| v_of(a)).collect();
    let failed = alphas
        .iter()
        .zip(&v_values)
        .filter(|(_, v)| v.is_nan())
        .map(|(&a, _)| a)
        .collect();
    let mut roots = Vec::new();
    for (i, j) in sign_changes(&v_values) {
        if v_values[i + 1..j].iter().any(|v| v.is_nan()) {
            continue;
        }
        let r = bisect(
            |a| Ok::<_, Infallible>(v_of(a)),
            alphas[i],
            alphas[j],
            ALPHA_TOL,
        )
        .unwrap_or_else(|e| match e {});
        roots.push(r);
    }
    Ok(PotentialScan {
        alphas,
        v_values,
        sign_changes: roots,
        failed,
    })
}

/// Split V at the crossings of the positive zeros of F that lie below α.
pub fn potential_decomposition(
    system: &LienardSystem,
    alpha: f64,
    ctrl: &StepControl,
) -> Result<PotentialDecomposition> {
    let z = system.zero_structure()?;
    let levels: Vec<f64> = z.zeros.iter().copied().filter(|&a| a < alpha).collect();
    let a = arcs(system, alpha, &levels, ctrl)?;
    let (yt, yb) = (a.upper.last().y, a.lower.last().y);

    // Crossing times of each level, ordered from the y-axis towards Q.
    let times = |t: &Trajectory| -> Result<Vec<f64>> {
        levels
            .iter()
            .map(|&lv| {
                t.events_of(EventKind::XLevel(lv))
                    .next()
                    .map(|e| e.state.t)
                    .ok_or_else(|| Error::Analysis(format!("path never crossed x = {lv}")))
            })
            .collect()
    };
    let up_t = times(&a.upper)?;
    let low_t = times(&a.lower)?;
    let up_end = a.upper.last().t;
    let low_end = a.lower.last().t;

    let mut labels = Vec::new();
    let mut terms = Vec::new();
    // Upper arcs run Y → Q; the backward trajectory runs Q → Y, hence the sign.
    let mut from = up_end;
    for (i, &t) in up_t.iter().enumerate() {
        labels.push(format!("upper_{}", i + 1));
        terms.push(-path_integrals(system, &a.upper, t, from).0);
        from = t;
    }
    let cap_up = -path_integrals(system, &a.upper, 0.0, from).0;
    let to = low_t.last().copied().unwrap_or(low_end);
    let cap_low = path_integrals(system, &a.lower, 0.0, to).0;
    labels.push("cap".into());
    terms.push(cap_up + cap_low);
    let mut from = to;
    for i in (0..low_t.len()).rev() {
        let end = if i == 0 { low_end } else { low_t[i - 1] };
        labels.push(format!("lower_{}", i + 1));
        terms.push(path_integrals(system, &a.lower, from, end).0);
        from = end;
    }

    Ok(PotentialDecomposition {
        alpha,
        crossings: levels,
        labels,
        terms,
        total: 0.5 * (yb * yb - yt * yt),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn vdp_positive_just_past_zero() {
        let s = builtin::vdp(1.0).unwrap();
        let p = potential_value(&s, 3f64.sqrt() + 0.01, &StepControl::default()).unwrap();
        assert!(p.v > 0.0);
    }

    #[test]
    fn vdp_single_root_below_alpha_bar() {
        let s = builtin::vdp(1.0).unwrap();
        let scan = potential_scan(&s, (1.8, 3.0), 60, &StepControl::default()).unwrap();
        assert_eq!(scan.sign_changes.len(), 1);
        let r = scan.sign_changes[0];
        assert!(r > 2.0 && r < 2.0327737, "{r}");
    }

    #[test]
    fn decomposition_sums_to_total() {
        let s = builtin::quintic(3.0, 0.1).unwrap();
        let d = potential_decomposition(&s, 0.9, &StepControl::default()).unwrap();
        assert_eq!(d.crossings.len(), 2);
        assert_eq!(d.terms.len(), 5);
        let sum: f64 = d.terms.iter().sum();
        assert!((sum - d.total).abs() < 1e-8, "{d:?}");
        assert!(d.cap() > 0.0);
    }

    #[test]
    fn vdp_cap_is_negative() {
        let s = builtin::vdp(1.0).unwrap();
        let d = potential_decomposition(&s, 2.5, &StepControl::default()).unwrap();
        let sum: f64 = d.terms.iter().sum();
        assert!((sum - d.total).abs() < 1e-8, "{d:?}");
        assert!(d.cap() < 0.0);
    }
}
