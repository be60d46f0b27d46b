//! Odd piecewise closed-form scalar functions.
//!
//! A [`FunctionModel`] is described on `x >= 0` by segments that tile
//! `[0, end)`; negative arguments are handled by odd extension. Every form
//! has an analytic derivative and antiderivative, so evaluation never falls
//! back to numerical differentiation.

mod validate;
mod zeros;

pub use validate::{validate_model, BoundaryResidual, ValidationReport, JOINT_TOL};
pub use zeros::{find_zero_structure, ZeroStructure, SIMPLICITY_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed-form expression used on one segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Form {
    /// `Σ coeffs[k] x^k`.
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// `offset + amplitude·sin(angular_frequency·x + phase)`.
    Sinusoid {
        amplitude: f64,
        angular_frequency: f64,
        phase: f64,
        offset: f64,
    },
    /// `offset + sign·semi_y·√(1 − ((x − center_x)/semi_x)²)`.
    EllipseArc {
        offset: f64,
        semi_y: f64,
        center_x: f64,
        semi_x: f64,
        sign: f64,
    },
    /// `offset + scale·√(x − shift)`.
    SqrtBranch {
        offset: f64,
        scale: f64,
        shift: f64,
    },
    Constant {
        value: f64,
    },
}

impl Form {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Form::Polynomial { ref coeffs } => coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c),
            Form::Sinusoid {
                amplitude,
                angular_frequency,
                phase,
                offset,
            } => offset + amplitude * (angular_frequency * x + phase).sin(),
            Form::EllipseArc {
                offset,
                semi_y,
                center_x,
                semi_x,
                sign,
            } => {
                let t = (x - center_x) / semi_x;
                offset + sign * semi_y * (1.0 - t * t).max(0.0).sqrt()
            }
            Form::SqrtBranch {
                offset,
                scale,
                shift,
            } => offset + scale * (x - shift).max(0.0).sqrt(),
            Form::Constant { value } => value,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Form::Polynomial { ref coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c),
            Form::Sinusoid {
                amplitude,
                angular_frequency,
                phase,
                ..
            } => amplitude * angular_frequency * (angular_frequency * x + phase).cos(),
            Form::EllipseArc {
                semi_y,
                center_x,
                semi_x,
                sign,
                ..
            } => {
                let t = (x - center_x) / semi_x;
                -sign * semi_y * t / ((1.0 - t * t).max(0.0).sqrt() * semi_x)
            }
            Form::SqrtBranch { scale, shift, .. } => 0.5 * scale / (x - shift).max(0.0).sqrt(),
            Form::Constant { .. } => 0.0,
        }
    }

    /// A primitive of the form (any fixed constant of integration).
    pub fn primitive(&self, x: f64) -> f64 {
        match *self {
            Form::Polynomial { ref coeffs } => {
                x * coeffs
                    .iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (k, &c)| acc * x + c / (k as f64 + 1.0))
            }
            Form::Sinusoid {
                amplitude,
                angular_frequency,
                phase,
                offset,
            } => {
                if angular_frequency == 0.0 {
                    (offset + amplitude * phase.sin()) * x
                } else {
                    offset * x
                        - amplitude / angular_frequency * (angular_frequency * x + phase).cos()
                }
            }
            Form::EllipseArc {
                offset,
                semi_y,
                center_x,
                semi_x,
                sign,
            } => {
                let t = ((x - center_x) / semi_x).clamp(-1.0, 1.0);
                let s = (1.0 - t * t).max(0.0).sqrt();
                offset * x + sign * semi_y * semi_x * 0.5 * (t * s + t.asin())
            }
            Form::SqrtBranch {
                offset,
                scale,
                shift,
            } => offset * x + scale * 2.0 / 3.0 * (x - shift).max(0.0).powf(1.5),
            Form::Constant { value } => value * x,
        }
    }
}

/// One piece of a model, valid on `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    #[serde(with = "crate::report::f64_or_inf")]
    pub hi: f64,
    pub form: Form,
}

/// Which quantity [`FunctionModel::eval`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Value,
    Derivative,
    Antiderivative,
}

/// Odd function described by its restriction to `x >= 0`.
///
/// Immutable once built; the cumulative integrals at segment starts are
/// precomputed so the antiderivative is an O(log n) lookup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct FunctionModel {
    name: String,
    segments: Vec<Segment>,
    c1: bool,
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    #[serde(default)]
    name: String,
    #[serde(default)]
    c1: bool,
    segments: Vec<Segment>,
}

impl TryFrom<ModelRepr> for FunctionModel {
    type Error = Error;
    fn try_from(r: ModelRepr) -> Result<Self> {
        FunctionModel::new(r.name, r.segments, r.c1)
    }
}

impl From<FunctionModel> for ModelRepr {
    fn from(m: FunctionModel) -> Self {
        ModelRepr {
            name: m.name,
            c1: m.c1,
            segments: m.segments,
        }
    }
}

impl FunctionModel {
    /// Build a model, checking the segment tiling and each form's domain.
    /// `c1` marks models whose derivative is meant to be continuous.
    pub fn new(name: impl Into<String>, segments: Vec<Segment>, c1: bool) -> Result<Self> {
        check_structure(&segments)?;
        let mut cumulative = Vec::with_capacity(segments.len());
        let mut acc = 0.0;
        for s in &segments {
            cumulative.push(acc);
            if s.hi.is_finite() {
                acc += s.form.primitive(s.hi) - s.form.primitive(s.lo);
            }
        }
        Ok(Self {
            name: name.into(),
            segments,
            c1,
            cumulative,
        })
    }

    /// Single-segment polynomial on `[0, ∞)`.
    pub fn polynomial(name: impl Into<String>, coeffs: Vec<f64>) -> Self {
        Self::new(
            name,
            vec![Segment {
                lo: 0.0,
                hi: f64::INFINITY,
                form: Form::Polynomial { coeffs },
            }],
            true,
        )
        .expect("a single segment on [0, inf) is always well formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_c1(&self) -> bool {
        self.c1
    }

    /// Right end of the tiling (may be infinite).
    pub fn end(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.hi)
    }

    /// Interior joints `lo` of every segment after the first.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.lo).collect()
    }

    /// Index of the segment holding `x >= 0` (`lo` inclusive). Points at or
    /// beyond the end are assigned to the last segment.
    fn locate(&self, x: f64) -> usize {
        let i = self.segments.partition_point(|s| s.lo <= x);
        i.saturating_sub(1)
    }

    /// F(x). Exactly zero at the origin; odd for negative arguments.
    pub fn value(&self, x: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else if x < 0.0 {
            -self.value_pos(-x)
        } else {
            self.value_pos(x)
        }
    }

    fn value_pos(&self, x: f64) -> f64 {
        self.segments[self.locate(x)].form.value(x)
    }

    /// Value of the first segment at `0`, before oddness is imposed.
    pub fn raw_value_at_origin(&self) -> f64 {
        self.segments[0].form.value(0.0)
    }

    /// F'(x), even in `x`. At a joint the left one-sided value is used.
    pub fn derivative(&self, x: f64) -> f64 {
        let a = x.abs();
        let mut i = self.locate(a);
        if i > 0 && self.segments[i].lo == a {
            i -= 1;
        }
        self.segments[i].form.derivative(a)
    }

    /// ∫₀ˣ F, even in `x`.
    pub fn antiderivative(&self, x: f64) -> f64 {
        let a = x.abs();
        if a == 0.0 {
            return 0.0;
        }
        let i = self.locate(a);
        let s = &self.segments[i];
        self.cumulative[i] + s.form.primitive(a) - s.form.primitive(s.lo)
    }

    /// Checked evaluation against the domain bound `d`.
    pub fn eval(&self, which: Which, x: f64, d: f64) -> Result<f64> {
        if !x.is_finite() || x.abs() >= d {
            return Err(Error::Domain { x, d });
        }
        Ok(match which {
            Which::Value => self.value(x),
            Which::Derivative => self.derivative(x),
            Which::Antiderivative => self.antiderivative(x),
        })
    }

    /// True when every coefficient/value is identically zero.
    pub fn is_identically_zero(&self) -> bool {
        self.segments.iter().all(|s| match &s.form {
            Form::Polynomial { coeffs } => coeffs.iter().all(|&c| c == 0.0),
            Form::Constant { value } => *value == 0.0,
            Form::Sinusoid {
                amplitude, offset, ..
            } => *amplitude == 0.0 && *offset == 0.0,
            Form::EllipseArc { offset, semi_y, .. } => *semi_y == 0.0 && *offset == 0.0,
            Form::SqrtBranch { offset, scale, .. } => *scale == 0.0 && *offset == 0.0,
        })
    }
}

/// Slack allowed when a form's own domain is checked at segment ends.
const FORM_DOMAIN_SLACK: f64 = 1e-12;

fn check_structure(segments: &[Segment]) -> Result<()> {
    let first = segments
        .first()
        .ok_or_else(|| Error::Structure("model has no segments".into()))?;
    if first.lo != 0.0 {
        return Err(Error::Structure(format!(
            "first segment starts at {} instead of 0",
            first.lo
        )));
    }
    for (i, s) in segments.iter().enumerate() {
        if s.lo.is_nan() || s.hi.is_nan() || !(s.lo < s.hi) || !s.lo.is_finite() {
            return Err(Error::Structure(format!(
                "segment {i} has invalid bounds [{}, {})",
                s.lo, s.hi
            )));
        }
        if let Some(next) = segments.get(i + 1) {
            if next.lo != s.hi {
                let what = if next.lo > s.hi { "gap" } else { "overlap" };
                return Err(Error::Structure(format!(
                    "{what} between segment {i} (ends {}) and segment {} (starts {})",
                    s.hi,
                    i + 1,
                    next.lo
                )));
            }
        }
        check_form_domain(i, s)?;
    }
    Ok(())
}

fn check_form_domain(i: usize, s: &Segment) -> Result<()> {
    match s.form {
        Form::EllipseArc {
            center_x,
            semi_x,
            sign,
            ..
        } => {
            if sign != 1.0 && sign != -1.0 {
                return Err(Error::Structure(format!(
                    "segment {i}: ellipse sign must be +1 or -1, got {sign}"
                )));
            }
            if !(semi_x > 0.0) {
                return Err(Error::Structure(format!(
                    "segment {i}: ellipse semi_x must be positive"
                )));
            }
            let reach = semi_x * (1.0 + FORM_DOMAIN_SLACK) + FORM_DOMAIN_SLACK;
            if !s.hi.is_finite()
                || (s.lo - center_x).abs() > reach
                || (s.hi - center_x).abs() > reach
            {
                return Err(Error::Structure(format!(
                    "segment {i}: ellipse arc centred at {center_x} with semi_x {semi_x} \
                     does not cover [{}, {})",
                    s.lo, s.hi
                )));
            }
        }
        Form::SqrtBranch { shift, .. } => {
            if s.lo < shift - FORM_DOMAIN_SLACK {
                return Err(Error::Structure(format!(
                    "segment {i}: sqrt branch shifted to {shift} is undefined at {}",
                    s.lo
                )));
            }
        }
        Form::Polynomial { ref coeffs } if coeffs.is_empty() => {
            return Err(Error::Structure(format!(
                "segment {i}: polynomial has no coefficients"
            )));
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quintic(k: f64) -> FunctionModel {
        FunctionModel::polynomial("quintic", vec![0.0, -0.4, 0.0, 2.5, 0.0, -k])
    }

    #[test]
    fn quintic_value_at_one() {
        assert!((quintic(3.5).value(1.0) + 1.4).abs() < 1e-15);
    }

    #[test]
    fn linear_antiderivative_is_half_square() {
        let g = FunctionModel::polynomial("g", vec![0.0, 1.0]);
        assert_eq!(g.antiderivative(2.0), 2.0);
        assert_eq!(g.antiderivative(-2.0), 2.0);
    }

    #[test]
    fn vdp_root_at_sqrt3() {
        let f = FunctionModel::polynomial("vdp", vec![0.0, -1.0, 0.0, 1.0 / 3.0]);
        assert!(f.value(3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_out_of_domain() {
        let f = quintic(3.0);
        assert!(matches!(
            f.eval(Which::Value, 2.0, 2.0),
            Err(Error::Domain { .. })
        ));
        assert!(f.eval(Which::Value, 1.9, 2.0).is_ok());
    }

    #[test]
    fn piecewise_antiderivative_matches_quadrature() {
        let m = FunctionModel::new(
            "mixed",
            vec![
                Segment {
                    lo: 0.0,
                    hi: 0.5,
                    form: Form::Sinusoid {
                        amplitude: 0.3,
                        angular_frequency: 2.0,
                        phase: 0.1,
                        offset: -0.03,
                    },
                },
                Segment {
                    lo: 0.5,
                    hi: 0.9,
                    form: Form::EllipseArc {
                        offset: 0.1,
                        semi_y: 0.2,
                        center_x: 0.7,
                        semi_x: 0.25,
                        sign: -1.0,
                    },
                },
                Segment {
                    lo: 0.9,
                    hi: f64::INFINITY,
                    form: Form::SqrtBranch {
                        offset: 0.1,
                        scale: 0.5,
                        shift: 0.85,
                    },
                },
            ],
            false,
        )
        .unwrap();
        for &x in &[0.3, 0.5, 0.77, 0.9, 1.7] {
            let mut q = 0.0;
            let mut a = 0.0;
            for &b in m.breakpoints().iter().chain(std::iter::once(&x)) {
                let b: f64 = b.min(x);
                if b > a {
                    q += crate::quadrature::integrate_composite(|t| m.value(t), a, b, 1e-13)
                        .unwrap();
                    a = b;
                }
            }
            assert!((m.antiderivative(x) - q).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn derivative_at_joint_takes_left_value() {
        let m = FunctionModel::new(
            "kink",
            vec![
                Segment {
                    lo: 0.0,
                    hi: 1.0,
                    form: Form::Polynomial {
                        coeffs: vec![0.0, 1.0],
                    },
                },
                Segment {
                    lo: 1.0,
                    hi: f64::INFINITY,
                    form: Form::Constant { value: 1.0 },
                },
            ],
            false,
        )
        .unwrap();
        assert_eq!(m.derivative(1.0), 1.0);
        assert_eq!(m.derivative(1.5), 0.0);
        assert_eq!(m.value(1.0), 1.0);
        assert_eq!(m.value(-1.5), -1.0);
    }

    #[test]
    fn structure_errors() {
        let poly = |lo, hi| Segment {
            lo,
            hi,
            form: Form::Constant { value: 0.0 },
        };
        assert!(FunctionModel::new("e", vec![], false).is_err());
        assert!(FunctionModel::new("gap", vec![poly(0.0, 1.0), poly(1.1, 2.0)], false).is_err());
        assert!(FunctionModel::new("ovl", vec![poly(0.0, 1.0), poly(0.9, 2.0)], false).is_err());
        assert!(FunctionModel::new("start", vec![poly(0.1, 1.0)], false).is_err());
        let bad_sqrt = Segment {
            lo: 0.0,
            hi: 1.0,
            form: Form::SqrtBranch {
                offset: 0.0,
                scale: 1.0,
                shift: 0.5,
            },
        };
        assert!(FunctionModel::new("sqrt", vec![bad_sqrt], false).is_err());
        let bad_ellipse = Segment {
            lo: 0.0,
            hi: 1.0,
            form: Form::EllipseArc {
                offset: 0.0,
                semi_y: 1.0,
                center_x: 0.5,
                semi_x: 0.4,
                sign: 1.0,
            },
        };
        assert!(FunctionModel::new("ell", vec![bad_ellipse], false).is_err());
    }
}
