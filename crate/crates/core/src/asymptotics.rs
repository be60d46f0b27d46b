//! First-order averaging for `ẍ + x + μ p(x) ẋ = 0`.
//!
//! As μ → 0 the cycles approach circles of radius r with Φ(r) = 0, where
//! `Φ(r) = ∫₀^{2π} p(r sin u) · r cos u · cos u du`.

use std::convert::Infallible;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::FunctionModel;
use crate::quadrature::integrate_composite;
use crate::roots::{bisect, golden_min, linspace, sign, sign_changes, touch_candidates};

pub const PHI_TOL: f64 = 1e-12;
pub const ROOT_TOL: f64 = 1e-12;
/// `|Φ|` at a touching minimum below which a repeated root is reported.
pub const TOUCH_TOL: f64 = 1e-10;

/// Perturbation `h(x, ẋ) = p(x)·ẋ` with polynomial `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiProblem {
    /// Coefficients of p, lowest degree first.
    pub p: Vec<f64>,
    pub mu: f64,
    pub r_range: (f64, f64),
}

impl PhiProblem {
    pub fn new(p: Vec<f64>, mu: f64, r_range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = r_range;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Config(format!(
                "r range [{lo}, {hi}] must lie in (0, inf)"
            )));
        }
        Ok(Self { p, mu, r_range })
    }

    /// `p(x) = −4 + 75x² − 50k x⁴`, so that μ·∫p = F of the quintic family.
    pub fn quintic(k: f64, mu: f64, r_range: (f64, f64)) -> Result<Self> {
        Self::new(vec![-4.0, 0.0, 75.0, 0.0, -50.0 * k], mu, r_range)
    }

    /// `p(x) = x² − 1`.
    pub fn van_der_pol(mu: f64, r_range: (f64, f64)) -> Result<Self> {
        Self::new(vec![-1.0, 0.0, 1.0], mu, r_range)
    }

    fn p_at(&self, x: f64) -> f64 {
        self.p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiRoots {
    /// Radii where Φ changes sign.
    pub roots: Vec<f64>,
    /// Radii where Φ touches zero without changing sign.
    pub tangential: Vec<f64>,
    /// `(r, Φ(r))` samples.
    pub values: Vec<(f64, f64)>,
}

impl PhiRoots {
    /// CSV with columns `r,phi`.
    pub fn csv(&self) -> String {
        let rows: Vec<[f64; 2]> = self.values.iter().map(|&(a, b)| [a, b]).collect();
        crate::report::numeric_csv(&["r", "phi"], rows.iter().map(|r| &r[..]))
    }
}

/// Φ(r) by composite Gauss–Legendre on [0, 2π].
pub fn phi(problem: &PhiProblem, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Config(format!("r = {r} must be positive")));
    }
    integrate_composite(
        |u| {
            let c = u.cos();
            problem.p_at(r * u.sin()) * r * c * c
        },
        0.0,
        2.0 * std::f64::consts::PI,
        PHI_TOL,
    )
}

/// Sample Φ on `grid_n` intervals of the problem's range, bisect sign
/// changes and flag tangential touches.
pub fn phi_roots(problem: &PhiProblem, grid_n: usize) -> Result<PhiRoots> {
    if grid_n < 100 {
        return Err(Error::Config(format!("grid_n = {grid_n} is below 100")));
    }
    let (lo, hi) = problem.r_range;
    let grid = linspace(lo, hi, grid_n);
    let values = grid
        .par_iter()
        .map(|&r| phi(problem, r))
        .collect::<Result<Vec<f64>>>()?;
    let f = |r: f64| phi(problem, r).unwrap_or(f64::NAN);
    let root = |a: f64, b: f64| {
        bisect(|r| Ok::<_, Infallible>(f(r)), a, b, ROOT_TOL).unwrap_or_else(|e| match e {})
    };

    let mut roots: Vec<f64> = sign_changes(&values)
        .into_iter()
        .map(|(i, j)| root(grid[i], grid[j]))
        .collect();
    let mut tangential = Vec::new();
    for i in touch_candidates(&values) {
        let (a, b) = (grid[i - 1], grid[i + 1]);
        let s = sign(values[i]) as f64;
        let s = if s == 0.0 {
            sign(values[i - 1]) as f64
        } else {
            s
        };
        let (rm, m) = golden_min(|r| Ok::<_, Infallible>(s * f(r)), a, b, ROOT_TOL)
            .unwrap_or_else(|e| match e {});
        // A dip shallower than the tolerance is rounding noise on a touch.
        if m < -TOUCH_TOL {
            roots.push(root(a, rm));
            roots.push(root(rm, b));
        } else if m < TOUCH_TOL {
            tangential.push(rm);
        }
    }
    roots.sort_by(f64::total_cmp);
    Ok(PhiRoots {
        roots,
        tangential,
        values: grid.into_iter().zip(values).collect(),
    })
}

/// Closed-form averaging radii of the quintic family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuinticRadii {
    /// Smaller real positive radius, if any.
    pub r1: Option<f64>,
    /// Larger real positive radius, if any.
    pub r2: Option<f64>,
    /// `225 − 64k`.
    pub discriminant: f64,
    /// Lower estimate for ᾱ of the inner cycle (equal to r1).
    pub alpha_bar_estimate: Option<f64>,
}

/// Radii from `r² = (15 ± √(225 − 64k)) / (10k)`, keeping only real
/// positive values.
pub fn quintic_radii(k: f64) -> Result<QuinticRadii> {
    if k == 0.0 || !k.is_finite() {
        return Err(Error::Config(format!("k = {k} must be finite and nonzero")));
    }
    let disc = 225.0 - 64.0 * k;
    let mut radii: Vec<f64> = if disc < 0.0 {
        vec![]
    } else {
        let s = disc.sqrt();
        [15.0 - s, 15.0 + s]
            .iter()
            .map(|n| n / (10.0 * k))
            .filter(|&r2| r2 > 0.0)
            .map(f64::sqrt)
            .collect()
    };
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let r1 = radii.first().copied();
    let r2 = if radii.len() > 1 {
        radii.last().copied()
    } else {
        r1.filter(|_| disc == 0.0)
    };
    Ok(QuinticRadii {
        r1,
        r2,
        discriminant: disc,
        alpha_bar_estimate: r1,
    })
}

/// Canonical-plane point `(u, v)` to the Liénard plane: `x = −u`,
/// `y = F(x) − v`.
pub fn canonical_to_lienard(u: f64, v: f64, f: &FunctionModel) -> (f64, f64) {
    let x = -u;
    (x, f.value(x) - v)
}

/// Inverse of [`canonical_to_lienard`].
pub fn lienard_to_canonical(x: f64, y: f64, f: &FunctionModel) -> (f64, f64) {
    (-x, f.value(x) - y)
}
