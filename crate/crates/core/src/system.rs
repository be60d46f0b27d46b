use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{find_zero_structure, FunctionModel, ZeroStructure};

/// Samples used to check `g > 0` at construction.
const G_POSITIVITY_SAMPLES: usize = 1000;
/// Default grid for the zero/extremum scan of F.
pub const DEFAULT_ZERO_GRID: usize = 10_000;

/// `ẋ = y − F(x)`, `ẏ = −g(x)` on `|x| < d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LienardSystem {
    pub name: String,
    #[serde(rename = "F")]
    pub f: FunctionModel,
    pub g: FunctionModel,
    /// Half-width of the validity domain; `f64::INFINITY` when unbounded.
    #[serde(with = "crate::report::f64_or_inf")]
    pub d: f64,
}

impl LienardSystem {
    /// Build a system and check that `g > 0` on sampled points of `(0, d)`.
    pub fn new(
        name: impl Into<String>,
        f: FunctionModel,
        g: FunctionModel,
        d: f64,
    ) -> Result<Self> {
        if !(d > 0.0) {
            return Err(Error::Config(format!(
                "domain half-width d = {d} must be positive"
            )));
        }
        let s = Self {
            name: name.into(),
            f,
            g,
            d,
        };
        if let Some(x) = s.g_nonpositive_sample(G_POSITIVITY_SAMPLES) {
            return Err(Error::Structure(format!(
                "g({x}) = {} is not positive",
                s.g.value(x)
            )));
        }
        Ok(s)
    }

    /// First sampled `x` in `(0, horizon]` with `g(x) <= 0`, if any.
    pub fn g_nonpositive_sample(&self, n: usize) -> Option<f64> {
        let h = self.horizon();
        (1..=n)
            .map(|i| h * i as f64 / n as f64)
            .find(|&x| !(self.g.value(x) > 0.0))
    }

    /// Right end of the default scan window: `min(d, 10·max(1, last joint))`.
    /// A finite `d` is pulled in slightly so every scan point is admissible.
    pub fn horizon(&self) -> f64 {
        let last = self
            .f
            .breakpoints()
            .into_iter()
            .chain(self.g.breakpoints())
            .filter(|b| b.is_finite())
            .fold(1.0f64, f64::max);
        let h = 10.0 * last;
        if self.d.is_finite() {
            h.min(self.d * (1.0 - 1e-9))
        } else {
            h
        }
    }

    pub fn in_domain(&self, x: f64) -> bool {
        x.is_finite() && x.abs() < self.d
    }

    /// `(y − F(x), −g(x))`.
    pub fn vector_field(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        if !self.in_domain(x) {
            return Err(Error::Domain { x, d: self.d });
        }
        Ok((y - self.f.value(x), -self.g.value(x)))
    }

    /// Phase-path slope dy/dx; infinite on the isocline y = F(x).
    pub fn slope(&self, x: f64, y: f64) -> Result<f64> {
        let (dx, dy) = self.vector_field(x, y)?;
        Ok(dy / dx)
    }

    /// G(x) = ∫₀ˣ g.
    pub fn big_g(&self, x: f64) -> f64 {
        self.g.antiderivative(x)
    }

    /// v(x, y) = G(x) + y²/2.
    pub fn potential(&self, x: f64, y: f64) -> f64 {
        self.big_g(x) + 0.5 * y * y
    }

    /// Zero structure of F on `(0, horizon]` with the default grid.
    pub fn zero_structure(&self) -> Result<ZeroStructure> {
        find_zero_structure(self, (0.0, self.horizon()), DEFAULT_ZERO_GRID)
    }

    /// True when F vanishes identically, which makes the origin a center.
    pub fn is_center(&self) -> bool {
        self.f.is_identically_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(coeffs: Vec<f64>) -> LienardSystem {
        LienardSystem::new(
            "t",
            FunctionModel::polynomial("F", coeffs),
            FunctionModel::polynomial("g", vec![0.0, 1.0]),
            f64::INFINITY,
        )
        .unwrap()
    }

    #[test]
    fn vector_field_examples() {
        let vdp = sys(vec![0.0, -1.0, 0.0, 1.0 / 3.0]);
        assert_eq!(vdp.vector_field(0.0, 2.0).unwrap(), (2.0, 0.0));
        let q = sys(vec![0.0, -0.4, 0.0, 2.5, 0.0, -3.5]);
        let (dx, dy) = q.vector_field(1.0, 0.0).unwrap();
        assert!((dx - 1.4).abs() < 1e-14);
        assert_eq!(dy, -1.0);
        let x = 0.7;
        let (dx, dy) = q.vector_field(x, q.f.value(x)).unwrap();
        assert_eq!(dx, 0.0);
        assert!(dy < 0.0);
    }

    #[test]
    fn domain_is_enforced() {
        let s = LienardSystem::new(
            "bounded",
            FunctionModel::polynomial("F", vec![0.0, 1.0]),
            FunctionModel::polynomial("g", vec![0.0, 1.0]),
            3.0,
        )
        .unwrap();
        assert!(s.vector_field(2.9, 0.0).is_ok());
        assert!(matches!(
            s.vector_field(-3.0, 0.0),
            Err(Error::Domain { .. })
        ));
        assert!(s.horizon() < 3.0);
    }

    #[test]
    fn rejects_nonpositive_g() {
        let r = LienardSystem::new(
            "bad",
            FunctionModel::polynomial("F", vec![0.0, 1.0]),
            FunctionModel::polynomial("g", vec![0.0, 1.0, -1.0]),
            f64::INFINITY,
        );
        assert!(matches!(r, Err(Error::Structure(_))));
    }

    #[test]
    fn potential_for_linear_g() {
        let s = sys(vec![0.0]);
        assert_eq!(s.potential(3.0, 4.0), 12.5);
        assert!(s.is_center());
    }
}
