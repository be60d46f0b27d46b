//! Catalog of the named example systems.
//!
//! Every builtin uses `g(x) = x`. Parameters are passed as a string-keyed
//! map so the CLI can forward `--mu` / `--k` without knowing each model.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::functions::{Form, FunctionModel, Segment};
use crate::system::LienardSystem;

pub type Params = BTreeMap<String, f64>;

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 5] = ["vdp", "vdp_bounded", "quintic", "two_cycle", "three_cycle"];

/// Build a named system.
///
/// | name          | params                 |
/// |---------------|------------------------|
/// | `vdp`         | `mu`                   |
/// | `vdp_bounded` | `mu`, optional `d`     |
/// | `quintic`     | `k`, optional `mu` (0.1) |
/// | `two_cycle`   | none                   |
/// | `three_cycle` | none                   |
pub fn builtin(name: &str, params: &Params) -> Result<LienardSystem> {
    let allowed: &[&str] = match name {
        "vdp" => &["mu"],
        "vdp_bounded" => &["mu", "d"],
        "quintic" => &["k", "mu"],
        "two_cycle" | "three_cycle" => &[],
        other => return Err(Error::UnknownModel(other.to_string())),
    };
    if let Some(extra) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Config(format!(
            "parameter `{extra}` is not used by builtin `{name}`"
        )));
    }
    let get = |key: &str| -> Result<f64> {
        let v = *params
            .get(key)
            .ok_or_else(|| Error::Config(format!("builtin `{name}` requires parameter `{key}`")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Config(format!("parameter `{key}` must be finite")))
        }
    };
    match name {
        "vdp" => vdp(get("mu")?),
        "vdp_bounded" => {
            let d = params.get("d").copied().unwrap_or(f64::INFINITY);
            vdp_bounded(get("mu")?, d)
        }
        "quintic" => quintic(get("k")?, params.get("mu").copied().unwrap_or(0.1)),
        "two_cycle" => two_cycle(),
        _ => three_cycle(),
    }
}

fn identity_g() -> FunctionModel {
    FunctionModel::polynomial("g", vec![0.0, 1.0])
}

/// F(x) = μ(x³/3 − x).
pub fn vdp(mu: f64) -> Result<LienardSystem> {
    LienardSystem::new(
        format!("vdp(mu={mu})"),
        FunctionModel::polynomial("F", vec![0.0, -mu, 0.0, mu / 3.0]),
        identity_g(),
        f64::INFINITY,
    )
}

/// Van der Pol cubic on `[0, 2.4)`, a cosine bridge on `[2.4, 3)` matched in
/// value and slope, then a constant tail. F is C¹ and bounded.
pub fn vdp_bounded(mu: f64, d: f64) -> Result<LienardSystem> {
    let base = mu * (2.4f64.powi(3) / 3.0 - 2.4);
    let c = 4.76 * mu / 0.6f64.sin();
    let segments = vec![
        Segment {
            lo: 0.0,
            hi: 2.4,
            form: Form::Polynomial {
                coeffs: vec![0.0, -mu, 0.0, mu / 3.0],
            },
        },
        // base − c(cos 0.6 − cos(x − 3)), written as a shifted sine.
        Segment {
            lo: 2.4,
            hi: 3.0,
            form: Form::Sinusoid {
                amplitude: c,
                angular_frequency: 1.0,
                phase: FRAC_PI_2 - 3.0,
                offset: base - c * 0.6f64.cos(),
            },
        },
        Segment {
            lo: 3.0,
            hi: f64::INFINITY,
            form: Form::Constant {
                value: base - c * (0.6f64.cos() - 1.0),
            },
        },
    ];
    LienardSystem::new(
        format!("vdp_bounded(mu={mu})"),
        FunctionModel::new("F", segments, true)?,
        identity_g(),
        d,
    )
}

/// F(x) = μ(−4x + 25x³ − 10k·x⁵); at μ = 0.1 this is −0.4x + 2.5x³ − kx⁵.
pub fn quintic(k: f64, mu: f64) -> Result<LienardSystem> {
    LienardSystem::new(
        format!("quintic(k={k},mu={mu})"),
        FunctionModel::polynomial(
            "F",
            vec![0.0, -4.0 * mu, 0.0, 25.0 * mu, 0.0, -10.0 * k * mu],
        ),
        identity_g(),
        f64::INFINITY,
    )
}

/// Sine / ellipse / square-root model with zeros at 0.1 and ≈ 0.2505.
pub fn two_cycle() -> Result<LienardSystem> {
    let joint = 0.15 + 1.0 / 101f64.sqrt();
    let segments = vec![
        Segment {
            lo: 0.0,
            hi: 0.15,
            form: Form::Sinusoid {
                amplitude: -0.01,
                angular_frequency: 10.0 * PI,
                phase: 0.0,
                offset: 0.0,
            },
        },
        Segment {
            lo: 0.15,
            hi: joint,
            form: Form::EllipseArc {
                offset: 0.0,
                semi_y: 0.01,
                center_x: 0.15,
                semi_x: 0.1,
                sign: 1.0,
            },
        },
        Segment {
            lo: joint,
            hi: f64::INFINITY,
            form: Form::SqrtBranch {
                offset: 0.02099503719021,
                scale: -0.2,
                shift: 0.2395037190209989,
            },
        },
    ];
    LienardSystem::new(
        "two_cycle",
        FunctionModel::new("F", segments, true)?,
        identity_g(),
        f64::INFINITY,
    )
}

/// Published joints of the three-ellipse model.
pub const THREE_CYCLE_JOINTS: [f64; 3] = [0.097979588, 0.197647912, 0.397273968];

/// Three ellipse arcs and a square-root branch, matched to about 1e-7.
pub fn three_cycle() -> Result<LienardSystem> {
    let [a1, a2, a3] = THREE_CYCLE_JOINTS;
    let segments = vec![
        Segment {
            lo: 0.0,
            hi: a1,
            form: Form::EllipseArc {
                offset: 0.005,
                semi_y: 0.025,
                center_x: 0.048989794,
                semi_x: 0.05,
                sign: -1.0,
            },
        },
        Segment {
            lo: a1,
            hi: a2,
            form: Form::EllipseArc {
                offset: -0.0008137888130718,
                semi_y: 0.01,
                center_x: 0.14781375,
                semi_x: 0.05,
                sign: 1.0,
            },
        },
        Segment {
            lo: a2,
            hi: a3,
            form: Form::EllipseArc {
                offset: 0.0009168416064002765,
                semi_y: 0.015,
                center_x: 0.29746094,
                semi_x: 0.1,
                sign: -1.0,
            },
        },
        Segment {
            lo: a3,
            hi: f64::INFINITY,
            form: Form::SqrtBranch {
                offset: -0.0003265987749816556,
                scale: 0.04,
                shift: 0.3972073012751128,
            },
        },
    ];
    LienardSystem::new(
        "three_cycle",
        FunctionModel::new("F", segments, true)?,
        identity_g(),
        f64::INFINITY,
    )
}
