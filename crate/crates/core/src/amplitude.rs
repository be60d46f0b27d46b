//! The amplitude estimate ᾱ: the smallest root, past a zero of F, of
//! `r(α) = G(α) + F(α)²/2 − y0²/2`, taken for both axis intercepts of a
//! cycle.

use std::convert::Infallible;

use serde::{Deserialize, Serialize};

use crate::cycles::LimitCycle;
use crate::error::{Error, Result};
use crate::roots::{bisect, linspace, sign_changes};
use crate::system::LienardSystem;

pub const ALPHA_TOL: f64 = 1e-12;
/// Tolerance on α′ = α″ for odd F and g.
pub const SYMMETRY_TOL: f64 = 1e-10;
const SCAN_N: usize = 2000;
const MAX_EXTEND: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBarResult {
    /// Interval `(a_i, a_{i+1})` the bound belongs to, counted from 1;
    /// 0 when F has a single positive zero.
    pub interval_index: usize,
    pub alpha_prime: f64,
    pub alpha_double_prime: f64,
    pub alpha_bar: f64,
    pub y_plus0: f64,
    pub y_minus0: f64,
}

/// `G(α) + F(α)²/2 − y0²/2`.
pub fn residual(system: &LienardSystem, y0: f64, alpha: f64) -> f64 {
    let f = system.f.value(alpha);
    system.big_g(alpha) + 0.5 * f * f - 0.5 * y0 * y0
}

/// Smallest root of the ᾱ equation in `bracket`. An infinite upper end is
/// replaced by the first doubling of `max(lo, 1)` at which the residual is
/// positive (capped at the domain edge).
pub fn solve_alpha(system: &LienardSystem, y0: f64, bracket: (f64, f64)) -> Result<f64> {
    if !(y0 > 0.0 && y0.is_finite()) {
        return Err(Error::Config(format!("y0 = {y0} must be positive")));
    }
    let (lo, mut hi) = bracket;
    if !(lo >= 0.0 && hi > lo && lo < system.d) {
        return Err(Error::Config(format!("invalid bracket [{lo}, {hi}]")));
    }
    let edge = if system.d.is_finite() {
        system.d * (1.0 - 1e-12)
    } else {
        f64::INFINITY
    };
    hi = hi.min(edge);
    if !hi.is_finite() {
        let mut h = lo.max(1.0) * 2.0;
        for _ in 0..MAX_EXTEND {
            if residual(system, y0, h) > 0.0 {
                break;
            }
            h *= 2.0;
        }
        hi = h;
    }
    let r = |a: f64| residual(system, y0, a);
    let grid = linspace(lo, hi, SCAN_N);
    let values: Vec<f64> = grid.iter().map(|&a| r(a)).collect();
    if values[0] == 0.0 {
        return Ok(lo);
    }
    let no_root = || Error::NoRoot {
        what: format!("G + F²/2 = {}", 0.5 * y0 * y0),
        lo,
        hi,
    };
    let &(i, j) = sign_changes(&values).first().ok_or_else(no_root)?;
    Ok(
        bisect(|a| Ok::<_, Infallible>(r(a)), grid[i], grid[j], ALPHA_TOL)
            .unwrap_or_else(|e| match e {}),
    )
}

/// α′ from `y_plus0`, α″ from `|y_minus0|`, and ᾱ = max(α′, α″).
pub fn alpha_bar(
    system: &LienardSystem,
    cycle: &LimitCycle,
    bracket: (f64, f64),
) -> Result<AlphaBarResult> {
    let alpha_prime = solve_alpha(system, cycle.y_plus0, bracket)?;
    let alpha_double_prime = solve_alpha(system, cycle.y_minus0.abs(), bracket)?;
    if cycle.y_minus0 == -cycle.y_plus0 && (alpha_prime - alpha_double_prime).abs() > SYMMETRY_TOL {
        return Err(Error::Numerical(format!(
            "α′ = {alpha_prime} and α″ = {alpha_double_prime} differ for a symmetric cycle"
        )));
    }
    Ok(AlphaBarResult {
        interval_index: interval_index(system, bracket.0)?,
        alpha_prime,
        alpha_double_prime,
        alpha_bar: alpha_prime.max(alpha_double_prime),
        y_plus0: cycle.y_plus0,
        y_minus0: cycle.y_minus0,
    })
}

/// ᾱ for a bare intercept `y0`, before any cycle is known.
pub fn alpha_bar_from_y0(
    system: &LienardSystem,
    y0: f64,
    bracket: (f64, f64),
) -> Result<AlphaBarResult> {
    let c = LimitCycle {
        y_plus0: y0,
        y_minus0: -y0,
        amplitude: f64::NAN,
        stability: crate::cycles::Stability::Stable,
        multiplicity: 1,
        closure_residual: f64::NAN,
    };
    alpha_bar(system, &c, bracket)
}

fn interval_index(system: &LienardSystem, lo: f64) -> Result<usize> {
    let z = system.zero_structure()?;
    if z.zeros.len() <= 1 {
        return Ok(0);
    }
    Ok(z.zeros
        .iter()
        .position(|&a| (a - lo).abs() < 1e-9)
        .map_or(0, |i| i + 1))
}

/// Intervals `(a_1, a_2), …, (a_{N−1}, a_N), (a_N, d)` from the positive
/// zeros of F.
pub fn zero_intervals(system: &LienardSystem) -> Result<Vec<(f64, f64)>> {
    let z = system.zero_structure()?;
    let mut out: Vec<(f64, f64)> = z.zeros.windows(2).map(|w| (w[0], w[1])).collect();
    if let Some(&last) = z.zeros.last() {
        out.push((last, system.d));
    }
    Ok(out)
}

/// ᾱ for each cycle, pairing the i-th innermost cycle with the i-th
/// zero interval. Entries are `None` when the root equation has no root.
pub fn alpha_bars_for_cycles(
    system: &LienardSystem,
    cycles: &[LimitCycle],
) -> Result<Vec<Option<AlphaBarResult>>> {
    let intervals = zero_intervals(system)?;
    Ok(cycles
        .iter()
        .zip(&intervals)
        .map(|(c, &b)| alpha_bar(system, c, b).ok())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::functions::FunctionModel;

    #[test]
    fn harmonic_root_is_y0() {
        let s = LienardSystem::new(
            "c",
            FunctionModel::polynomial("F", vec![0.0]),
            FunctionModel::polynomial("g", vec![0.0, 1.0]),
            f64::INFINITY,
        )
        .unwrap();
        assert!((solve_alpha(&s, 2.0, (0.0, 4.0)).unwrap() - 2.0).abs() < 1e-12);
        assert!((solve_alpha(&s, 2.0, (0.0, f64::INFINITY)).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn vdp_table_row() {
        let s = builtin::vdp(1.0).unwrap();
        let a = solve_alpha(&s, 2.1727135, (3f64.sqrt(), 4.0)).unwrap();
        assert!((a - 2.0327736318).abs() < 1e-6, "{a}");
        let r = alpha_bar_from_y0(&s, 2.1727135, (3f64.sqrt(), f64::INFINITY)).unwrap();
        assert_eq!(r.alpha_bar, r.alpha_prime);
        assert_eq!(r.interval_index, 0);
        assert!(residual(&s, 2.1727135, r.alpha_prime).abs() < 1e-10);
    }

    #[test]
    fn quintic_from_published_intercept() {
        let s = builtin::quintic(3.5, 0.1).unwrap();
        let z = s.zero_structure().unwrap();
        let a = solve_alpha(&s, 0.624499, (z.zeros[0], z.zeros[1])).unwrap();
        assert!((a - 0.62393).abs() < 1e-4, "{a}");
    }

    #[test]
    fn missing_root_is_reported() {
        let s = builtin::vdp(1.0).unwrap();
        assert!(matches!(
            solve_alpha(&s, 0.1, (3f64.sqrt(), 4.0)),
            Err(Error::NoRoot { .. })
        ));
    }
}
