//! Potential change along an integrated path.
//!
//! With v(x, y) = G(x) + y²/2 one has dv/dt = −g(x)F(x) on solutions, so
//! Δv can be read off the end points or accumulated as ∫F dy or −∫gF dt.
//! The two integrals are evaluated by Gauss–Legendre on each step's
//! interpolant, split where |x| crosses a joint of F or g.

use serde::{Deserialize, Serialize};

use super::{DenseStep, Trajectory};
use crate::error::{Error, Result};
use crate::quadrature::gl8;
use crate::system::LienardSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialDelta {
    /// v(end) − v(start).
    pub delta_v: f64,
    /// ∫ F(x) dy along the path.
    pub integral_f_dy: f64,
    /// −∫ g(x) F(x) dt along the path.
    pub integral_gf_dt: f64,
}

/// Δv from the end points and both path integrals over the whole trajectory.
pub fn path_potential_delta(system: &LienardSystem, traj: &Trajectory) -> Result<PotentialDelta> {
    if traj.states.len() < 2 {
        return Err(Error::Analysis(
            "path potential needs at least two states".into(),
        ));
    }
    let (a, b) = (traj.first(), traj.last());
    let (integral_f_dy, integral_gf_dt) = path_integrals(system, traj, a.t, b.t);
    Ok(PotentialDelta {
        delta_v: system.potential(b.x, b.y) - system.potential(a.x, a.y),
        integral_f_dy,
        integral_gf_dt,
    })
}

/// `(∫F dy, −∫gF dt)` over the part of `traj` between times `t_from` and
/// `t_to` (in the trajectory's own time direction).
pub fn path_integrals(
    system: &LienardSystem,
    traj: &Trajectory,
    t_from: f64,
    t_to: f64,
) -> (f64, f64) {
    let joints = joints(system);
    let mut f_dy = 0.0;
    let mut gf_dt = 0.0;
    for (i, step) in traj.dense.iter().enumerate() {
        let theta_end = (traj.states[i + 1].t - step.t0) / step.dt;
        let lo = ((t_from - step.t0) / step.dt).clamp(0.0, theta_end);
        let hi = ((t_to - step.t0) / step.dt).clamp(0.0, theta_end);
        if hi <= lo {
            continue;
        }
        let (a, b) = step_integrals(system, step, lo, hi, &joints);
        f_dy += a;
        gf_dt += b;
    }
    (f_dy, gf_dt)
}

fn joints(system: &LienardSystem) -> Vec<f64> {
    let mut j: Vec<f64> = system
        .f
        .breakpoints()
        .into_iter()
        .chain(system.g.breakpoints())
        .collect();
    j.sort_by(f64::total_cmp);
    j.dedup();
    j
}

fn step_integrals(
    system: &LienardSystem,
    step: &DenseStep,
    lo: f64,
    hi: f64,
    joints: &[f64],
) -> (f64, f64) {
    let mut cuts = vec![lo, hi];
    if !joints.is_empty() {
        // The interpolant of x is a quartic in θ, so a few samples suffice
        // to bracket every passage through a joint.
        const N: usize = 8;
        let xs: Vec<f64> = (0..=N)
            .map(|j| step.state(lo + (hi - lo) * j as f64 / N as f64)[0].abs())
            .collect();
        for &b in joints {
            for j in 0..N {
                let (u, w) = (xs[j] - b, xs[j + 1] - b);
                if u * w < 0.0 {
                    let th_a = lo + (hi - lo) * j as f64 / N as f64;
                    let th_b = lo + (hi - lo) * (j + 1) as f64 / N as f64;
                    cuts.push(bisect_theta(step, b, th_a, th_b));
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
    }
    let rule = gl8();
    let mut f_dy = 0.0;
    let mut gf_dt = 0.0;
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        f_dy += rule.integrate(
            |th| {
                let s = step.state(th);
                system.f.value(s[0]) * step.dstate(th)[1]
            },
            w[0],
            w[1],
        );
        gf_dt += rule.integrate(
            |th| {
                let x = step.state(th)[0];
                -system.g.value(x) * system.f.value(x)
            },
            w[0],
            w[1],
        ) * step.dt;
    }
    (f_dy, gf_dt)
}

fn bisect_theta(step: &DenseStep, level: f64, mut a: f64, mut b: f64) -> f64 {
    let r = |th: f64| step.state(th)[0].abs() - level;
    let ra = r(a);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (r(m) < 0.0) == (ra < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
