use std::convert::Infallible;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{bisect, golden_min, linspace, sign_changes, touch_candidates};
use crate::system::LienardSystem;

/// A zero `a` counts as simple when `|F'(a)| > SIMPLICITY_TOL`.
pub const SIMPLICITY_TOL: f64 = 1e-8;

const BRACKET_WIDTH: f64 = 1e-12;
/// `|F|` below this at a touch point means a double root.
const TOUCH_TOL: f64 = 1e-10;

/// Positive zeros and local extrema of F on a scan range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroStructure {
    /// Sign-changing zeros with `|f| > SIMPLICITY_TOL`, increasing.
    pub zeros: Vec<f64>,
    /// `f(a)` at each simple zero.
    pub slopes_at_zeros: Vec<f64>,
    /// Zeros that are tangential or have `|f| <= SIMPLICITY_TOL`.
    pub non_simple: Vec<f64>,
    /// Abscissae where f changes sign, increasing.
    pub extrema: Vec<f64>,
    pub values_at_extrema: Vec<f64>,
}

impl ZeroStructure {
    /// Extrema lying strictly inside `(lo, hi)`.
    pub fn extrema_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.extrema
            .iter()
            .copied()
            .filter(|&x| x > lo && x < hi)
            .collect()
    }
}

/// Scan F and f = F' on a uniform grid of `grid_n` intervals over
/// `scan_range` and refine every sign change by bisection.
pub fn find_zero_structure(
    system: &LienardSystem,
    scan_range: (f64, f64),
    grid_n: usize,
) -> Result<ZeroStructure> {
    let (lo, hi) = scan_range;
    if !(lo >= 0.0 && hi > lo && hi <= system.d) {
        return Err(Error::Config(format!(
            "scan range [{lo}, {hi}] must lie in [0, d = {}]",
            system.d
        )));
    }
    if grid_n < 100 {
        return Err(Error::Config(format!("grid_n = {grid_n} is below 100")));
    }
    let f = &system.f;
    let grid = linspace(lo, hi, grid_n);
    let values: Vec<f64> = grid.iter().map(|&x| f.value(x)).collect();
    let slopes: Vec<f64> = grid.iter().map(|&x| f.derivative(x)).collect();

    let refine = |h: &dyn Fn(f64) -> f64, a: f64, b: f64| -> f64 {
        bisect(|x| Ok::<_, Infallible>(h(x)), a, b, BRACKET_WIDTH).unwrap_or_else(|e| match e {})
    };

    let mut zeros = Vec::new();
    let mut slopes_at_zeros = Vec::new();
    let mut non_simple = Vec::new();
    for (i, j) in sign_changes(&values) {
        let a = refine(&|x| f.value(x), grid[i], grid[j]);
        let s = f.derivative(a);
        if s.abs() > SIMPLICITY_TOL {
            zeros.push(a);
            slopes_at_zeros.push(s);
        } else {
            non_simple.push(a);
        }
    }
    for i in touch_candidates(&values) {
        let (a, b) = (grid[i - 1], grid[i + 1]);
        // |F| is flat at a double root, so locate it as the extremum where
        // f changes sign; fall back to a direct minimisation otherwise.
        let x = if f.derivative(a) * f.derivative(b) < 0.0 {
            refine(&|x| f.derivative(x), a, b)
        } else {
            golden_min(
                |x| Ok::<_, Infallible>(f.value(x).abs()),
                a,
                b,
                BRACKET_WIDTH,
            )
            .unwrap_or_else(|e| match e {})
            .0
        };
        if f.value(x).abs() <= TOUCH_TOL && f.derivative(x).abs() < SIMPLICITY_TOL {
            non_simple.push(x);
        }
    }
    non_simple.sort_by(f64::total_cmp);

    let mut extrema = Vec::new();
    for (i, j) in sign_changes(&slopes) {
        extrema.push(refine(&|x| f.derivative(x), grid[i], grid[j]));
    }
    let values_at_extrema = extrema.iter().map(|&x| f.value(x)).collect();

    Ok(ZeroStructure {
        zeros,
        slopes_at_zeros,
        non_simple,
        extrema,
        values_at_extrema,
    })
}
