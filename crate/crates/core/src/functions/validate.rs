use serde::{Deserialize, Serialize};

use super::FunctionModel;
use crate::error::Result;

/// Joint tolerance for value and derivative matching. The hand-built
/// multi-cycle examples are only matched to this level.
pub const JOINT_TOL: f64 = 5e-7;

/// Mismatch at one joint. At the origin the value residual is the jump
/// `2|F₊(0)|` that the odd extension creates; the derivative is even, so
/// its residual there is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResidual {
    pub x: f64,
    pub value_residual: f64,
    pub derivative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub model: String,
    pub c1_required: bool,
    pub boundaries: Vec<BoundaryResidual>,
    pub max_value_residual: f64,
    pub max_derivative_residual: f64,
    pub pass: bool,
}

/// Check continuity (and, if `c1_required`, derivative continuity) at the
/// origin and at every interior joint, using the one-sided closed forms.
pub fn validate_model(model: &FunctionModel, c1_required: bool) -> Result<ValidationReport> {
    let segs = model.segments();
    let mut boundaries = Vec::with_capacity(segs.len());
    boundaries.push(BoundaryResidual {
        x: 0.0,
        value_residual: 2.0 * segs[0].form.value(0.0).abs(),
        derivative_residual: 0.0,
    });
    for pair in segs.windows(2) {
        let (left, right) = (&pair[0], &pair[1]);
        let x = right.lo;
        boundaries.push(BoundaryResidual {
            x,
            value_residual: (right.form.value(x) - left.form.value(x)).abs(),
            derivative_residual: (right.form.derivative(x) - left.form.derivative(x)).abs(),
        });
    }
    let max_value_residual = boundaries
        .iter()
        .map(|b| b.value_residual)
        .fold(0.0, f64::max);
    let max_derivative_residual = boundaries
        .iter()
        .map(|b| b.derivative_residual)
        .fold(0.0, f64::max);
    let pass =
        max_value_residual <= JOINT_TOL && (!c1_required || max_derivative_residual <= JOINT_TOL);
    Ok(ValidationReport {
        model: model.name().to_string(),
        c1_required,
        boundaries,
        max_value_residual,
        max_derivative_residual,
        pass,
    })
}
