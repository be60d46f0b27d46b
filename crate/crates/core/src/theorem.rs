//! Numerical checks of the hypotheses of four exact-count theorems for
//! Liénard systems, and the cycle count they predict.
//!
//! * classical: one simple zero a, F < 0 on (0, a), F increasing to +∞ past a.
//! * extension: as classical, but past a only up to ᾱ must F increase;
//!   beyond ᾱ it need only be nondecreasing, and the domain may be bounded.
//! * two_cycle: simple zeros a₁ < a₂ with ᾱ < L (first maximum of F in
//!   [a₁, a₂]), F increasing on (a₁, ᾱ], F decreasing to −∞ past a₂.
//! * n_cycle: N ≥ 3 simple zeros, ᾱᵢ below the extremum Lᵢ of each
//!   [aᵢ, aᵢ₊₁], F monotone on (aᵢ, ᾱᵢ], |F| monotone to ∞ past a_N.
//!
//! ᾱ values come from detected cycles, so the checks that need them run
//! the cycle scan once per system.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::amplitude::{alpha_bar, AlphaBarResult};
use crate::cycles::{find_limit_cycles, CycleOptions, LimitCycle};
use crate::error::Result;
use crate::functions::{validate_model, ZeroStructure, JOINT_TOL};
use crate::system::LienardSystem;

pub const SAMPLES: usize = 1000;
pub const ODD_TOL: f64 = 1e-10;
/// Slack on the sign of f in monotonicity checks; admits flat joints.
pub const MONOTONE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    Classical,
    Extension,
    TwoCycle,
    NCycle,
}

impl Theorem {
    /// Strongest first, the order [`predict_count`] tries them in.
    pub const ALL: [Theorem; 4] = [
        Theorem::NCycle,
        Theorem::TwoCycle,
        Theorem::Extension,
        Theorem::Classical,
    ];
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::Classical => "classical",
            Theorem::Extension => "extension",
            Theorem::TwoCycle => "two_cycle",
            Theorem::NCycle => "n_cycle",
        })
    }
}

impl std::str::FromStr for Theorem {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Theorem::Classical),
            "extension" => Ok(Theorem::Extension),
            "two_cycle" => Ok(Theorem::TwoCycle),
            "n_cycle" => Ok(Theorem::NCycle),
            other => Err(crate::Error::Config(format!("unknown theorem `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotChecked,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotChecked => "not_checked",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub id: String,
    pub statement: String,
    pub verdict: Verdict,
    pub witness: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: Theorem,
    pub hypotheses: Vec<Hypothesis>,
    #[serde(rename = "predicted_N")]
    pub predicted_n: Option<usize>,
    pub notes: Vec<String>,
}

impl TheoremReport {
    pub fn all_pass(&self) -> bool {
        self.hypotheses.iter().all(|h| h.verdict == Verdict::Pass)
    }

    pub fn hypothesis(&self, id: &str) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.id == id)
    }

    /// Plain-text pass/fail table.
    pub fn render(&self) -> String {
        let mut out = format!("theorem: {}\n", self.theorem);
        for h in &self.hypotheses {
            let w: Vec<String> = h.witness.iter().map(|v| format!("{v:.10}")).collect();
            out.push_str(&format!(
                "  ({:<3}) {:<12} {}\n        witness: [{}]\n",
                h.id,
                h.verdict.to_string(),
                h.statement,
                w.join(", ")
            ));
        }
        match self.predicted_n {
            Some(n) => out.push_str(&format!("predicted_N: {n}\n")),
            None => out.push_str("predicted_N: none\n"),
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

/// Shared, lazily computed inputs of the checks.
pub struct Checker<'a> {
    system: &'a LienardSystem,
    zeros: ZeroStructure,
    cycle_opts: CycleOptions,
    cycles: Option<std::result::Result<Vec<LimitCycle>, String>>,
}

impl<'a> Checker<'a> {
    pub fn new(system: &'a LienardSystem) -> Result<Self> {
        Self::with_options(system, CycleOptions::default())
    }

    pub fn with_options(system: &'a LienardSystem, cycle_opts: CycleOptions) -> Result<Self> {
        Ok(Self {
            system,
            zeros: system.zero_structure()?,
            cycle_opts,
            cycles: None,
        })
    }

    fn cycles(&mut self) -> std::result::Result<&[LimitCycle], String> {
        if self.cycles.is_none() {
            let r = find_limit_cycles(self.system, &self.cycle_opts)
                .map(|s| s.cycles)
                .map_err(|e| e.to_string());
            self.cycles = Some(r);
        }
        match self.cycles.as_ref().unwrap() {
            Ok(c) => Ok(c),
            Err(e) => Err(e.clone()),
        }
    }

    /// ᾱ of the `i`-th innermost cycle on `bracket`.
    fn alpha_bar_of(
        &mut self,
        i: usize,
        bracket: (f64, f64),
    ) -> std::result::Result<AlphaBarResult, String> {
        let system = self.system;
        let cycles = self.cycles()?;
        let c = cycles.get(i).ok_or_else(|| {
            format!(
                "only {} cycle(s) detected, ᾱ{} unavailable",
                cycles.len(),
                i + 1
            )
        })?;
        alpha_bar(system, c, bracket).map_err(|e| e.to_string())
    }

    pub fn check(&mut self, theorem: Theorem) -> TheoremReport {
        let mut notes = Vec::new();
        let mut hyps = vec![self.continuity(&mut notes), self.symmetry()];
        match theorem {
            Theorem::Classical => self.classical(&mut hyps),
            Theorem::Extension => self.extension(&mut hyps, &mut notes),
            Theorem::TwoCycle => self.two_cycle(&mut hyps, &mut notes),
            Theorem::NCycle => self.n_cycle(&mut hyps, &mut notes),
        }
        let n = match theorem {
            Theorem::Classical | Theorem::Extension => 1,
            _ => self.zeros.zeros.len(),
        };
        let predicted_n = hyps.iter().all(|h| h.verdict == Verdict::Pass).then_some(n);
        TheoremReport {
            theorem,
            hypotheses: hyps,
            predicted_n,
            notes,
        }
    }

    fn continuity(&self, notes: &mut Vec<String>) -> Hypothesis {
        let rf = validate_model(&self.system.f, false);
        let rg = validate_model(&self.system.g, false);
        let (verdict, witness) = match (rf, rg) {
            (Ok(rf), Ok(rg)) => {
                if rf.max_derivative_residual > JOINT_TOL {
                    notes.push(format!(
                        "f = F' jumps by up to {:.3e} at a joint of F",
                        rf.max_derivative_residual
                    ));
                }
                (
                    pass_if(rf.pass && rg.pass),
                    vec![
                        rf.max_value_residual,
                        rf.max_derivative_residual,
                        rg.max_value_residual,
                    ],
                )
            }
            (Err(e), _) | (_, Err(e)) => {
                notes.push(format!("continuity check failed: {e}"));
                (Verdict::Fail, vec![])
            }
        };
        Hypothesis {
            id: "i".into(),
            statement: format!(
                "F and g are continuous; joints match to {JOINT_TOL:e} (witness: F value, F slope, g value residuals)"
            ),
            verdict,
            witness,
        }
    }

    fn symmetry(&self) -> Hypothesis {
        let s = self.system;
        let h = s.horizon();
        let mut odd = 0.0f64;
        let mut g_min = f64::INFINITY;
        for i in 1..=SAMPLES {
            let x = h * i as f64 / SAMPLES as f64;
            odd = odd
                .max((s.f.value(-x) + s.f.value(x)).abs())
                .max((s.g.value(-x) + s.g.value(x)).abs());
            g_min = g_min.min(s.g.value(x));
        }
        Hypothesis {
            id: "ii".into(),
            statement: "F and g are odd and g(x) > 0 for x > 0 (witness: odd residual, min g)"
                .into(),
            verdict: pass_if(odd <= ODD_TOL && g_min > 0.0),
            witness: vec![odd, g_min],
        }
    }

    fn simple_zeros(&self, n: usize, exact: bool) -> bool {
        let z = &self.zeros;
        z.non_simple.is_empty()
            && if exact {
                z.zeros.len() == n
            } else {
                z.zeros.len() >= n
            }
    }

    /// F < 0 on (0, a₁).
    fn negative_below_first_zero(&self) -> bool {
        let a = self.zeros.zeros[0];
        min_of(|x| -self.system.f.value(x), 0.0, a * (1.0 - 1e-9)) > 0.0
    }

    /// End of the asymptotic window past `a`.
    fn tail_end(&self, a: f64) -> f64 {
        let h = 10.0 * a.max(0.1);
        if self.system.d.is_finite() {
            h.min(self.system.d * (1.0 - 1e-9))
        } else {
            h
        }
    }

    /// Smallest `sign·f` on `(lo, hi]`.
    fn slope_min(&self, sign: f64, lo: f64, hi: f64) -> f64 {
        min_of(|x| sign * self.system.f.derivative(x), lo, hi)
    }

    /// Whether `sign·F` is monotone and still growing on `(a, tail_end]`.
    fn tail(&self, sign: f64, a: f64) -> (Verdict, Vec<f64>) {
        let h = self.tail_end(a);
        let worst = self.slope_min(sign, a, h);
        let mid = 0.5 * (a + h);
        let growth = sign * (self.system.f.value(h) - self.system.f.value(mid));
        let unbounded = self.system.d.is_infinite();
        (
            pass_if(worst >= -MONOTONE_TOL && growth > 0.0 && unbounded),
            vec![h, worst, growth],
        )
    }

    fn classical(&mut self, hyps: &mut Vec<Hypothesis>) {
        let ok = self.simple_zeros(1, true);
        let (v3, w3) = if ok {
            let a = self.zeros.zeros[0];
            (
                pass_if(self.negative_below_first_zero()),
                vec![a, self.zeros.slopes_at_zeros[0]],
            )
        } else {
            (Verdict::Fail, self.zeros.zeros.clone())
        };
        hyps.push(Hypothesis {
            id: "iii".into(),
            statement: "F has exactly one positive zero a, simple, with F < 0 on (0, a)".into(),
            verdict: v3,
            witness: w3,
        });
        let (v4, w4) = if ok {
            self.tail(1.0, self.zeros.zeros[0])
        } else {
            (Verdict::NotChecked, vec![])
        };
        hyps.push(Hypothesis {
            id: "iv".into(),
            statement: "F increases monotonically to +inf for x > a on an unbounded domain (witness: horizon, min f, growth)".into(),
            verdict: v4,
            witness: w4,
        });
    }

    fn extension(&mut self, hyps: &mut Vec<Hypothesis>, notes: &mut Vec<String>) {
        let ok = self.simple_zeros(1, true) && self.zeros.zeros[0] < self.system.d;
        let (v3, w3) = if ok {
            (
                pass_if(self.negative_below_first_zero()),
                vec![self.zeros.zeros[0], self.zeros.slopes_at_zeros[0]],
            )
        } else {
            (Verdict::Fail, self.zeros.zeros.clone())
        };
        hyps.push(Hypothesis {
            id: "iii".into(),
            statement: "F has exactly one positive zero 0 < a < d, simple, with F < 0 on (0, a)"
                .into(),
            verdict: v3,
            witness: w3,
        });
        let statement =
            "ᾱ exists, F is increasing on (a, ᾱ] and nondecreasing on (ᾱ, d) (witness: ᾱ, min f up to ᾱ, min f beyond)"
                .to_string();
        if !ok {
            hyps.push(not_checked("iv", statement));
            return;
        }
        let a = self.zeros.zeros[0];
        let (verdict, witness) = match self.alpha_bar_of(0, (a, self.system.d)) {
            Ok(r) => {
                let ab = r.alpha_bar;
                let inner = self.slope_min(1.0, a, ab);
                let outer = self.slope_min(1.0, ab, self.tail_end(a));
                (
                    pass_if(inner >= -MONOTONE_TOL && outer >= -MONOTONE_TOL),
                    vec![ab, inner, outer],
                )
            }
            Err(e) => {
                notes.push(format!("ᾱ unavailable: {e}"));
                (Verdict::Fail, vec![])
            }
        };
        hyps.push(Hypothesis {
            id: "iv".into(),
            statement,
            verdict,
            witness,
        });
    }

    fn two_cycle(&mut self, hyps: &mut Vec<Hypothesis>, notes: &mut Vec<String>) {
        let s3 = "F has exactly two positive zeros a1 < a2, both simple, F < 0 on (0, a1), and ᾱ < L < a2 with L the first maximum of F in [a1, a2] (witness: a1, a2, ᾱ, L)".to_string();
        let s4 = "F is increasing on (a1, ᾱ] and decreases monotonically to -inf for x > a2 (witness: min f on (a1, ᾱ], horizon, max f, decrease)".to_string();
        if !self.simple_zeros(2, true) {
            hyps.push(Hypothesis {
                id: "iii".into(),
                statement: s3,
                verdict: Verdict::Fail,
                witness: self.zeros.zeros.clone(),
            });
            hyps.push(not_checked("iv", s4));
            return;
        }
        let (a1, a2) = (self.zeros.zeros[0], self.zeros.zeros[1]);
        let l = self
            .zeros
            .extrema_in(a1, a2)
            .into_iter()
            .find(|&x| self.system.f.derivative(x - 1e-9) > 0.0);
        let ab = self.alpha_bar_of(0, (a1, a2));
        if let Err(e) = &ab {
            notes.push(format!("ᾱ unavailable: {e}"));
        }
        let ab = ab.ok().map(|r| r.alpha_bar);
        if let (Some(ab), Some(l)) = (ab, l) {
            notes.push(format!("ᾱ = {ab} vs L = {l}"));
        }
        let v3 = match (ab, l) {
            (Some(ab), Some(l)) => pass_if(self.negative_below_first_zero() && ab < l && l < a2),
            _ => Verdict::Fail,
        };
        hyps.push(Hypothesis {
            id: "iii".into(),
            statement: s3,
            verdict: v3,
            witness: vec![a1, a2, ab.unwrap_or(f64::NAN), l.unwrap_or(f64::NAN)],
        });
        let (v4, w4) = match ab {
            Some(ab) => {
                let inner = self.slope_min(1.0, a1, ab);
                let (tv, tw) = self.tail(-1.0, a2);
                let v = pass_if(inner >= -MONOTONE_TOL && tv == Verdict::Pass);
                (v, vec![inner, tw[0], -tw[1], tw[2]])
            }
            None => (Verdict::Fail, vec![]),
        };
        hyps.push(Hypothesis {
            id: "iv".into(),
            statement: s4,
            verdict: v4,
            witness: w4,
        });
    }

    fn n_cycle(&mut self, hyps: &mut Vec<Hypothesis>, notes: &mut Vec<String>) {
        let s3 = "F has N >= 3 simple positive zeros a1 < ... < aN, F < 0 on (0, a1), and ᾱi < Li for i < N, with Li the unique extremum of F in [ai, ai+1] (first one for i = N-1) (witness: pairs ᾱi, Li)".to_string();
        let s4 = "F is monotone on each (ai, ᾱi] and |F| grows monotonically to inf for x > aN (witness: min signed f per interval, then horizon, min signed f, growth)".to_string();
        if !self.simple_zeros(3, false) {
            hyps.push(Hypothesis {
                id: "iii".into(),
                statement: s3,
                verdict: Verdict::Fail,
                witness: self.zeros.zeros.clone(),
            });
            hyps.push(not_checked("iv", s4));
            return;
        }
        let zs = self.zeros.zeros.clone();
        let n = zs.len();
        let mut ok3 = self.negative_below_first_zero();
        let mut ok4 = true;
        let mut w3 = Vec::new();
        let mut w4 = Vec::new();
        let mut alpha_bars = Vec::new();
        for i in 0..n - 1 {
            let (lo, hi) = (zs[i], zs[i + 1]);
            let ext = self.zeros.extrema_in(lo, hi);
            let l = if i + 1 < n - 1 && ext.len() != 1 {
                notes.push(format!(
                    "[a{}, a{}] holds {} extrema, expected one",
                    i + 1,
                    i + 2,
                    ext.len()
                ));
                None
            } else {
                ext.first().copied()
            };
            let ab = match self.alpha_bar_of(i, (lo, hi)) {
                Ok(r) => Some(r.alpha_bar),
                Err(e) => {
                    notes.push(format!("ᾱ{} unavailable: {e}", i + 1));
                    None
                }
            };
            match (ab, l) {
                (Some(ab), Some(l)) if ab < l => {}
                _ => ok3 = false,
            }
            w3.push(ab.unwrap_or(f64::NAN));
            w3.push(l.unwrap_or(f64::NAN));
            match ab {
                Some(ab) => {
                    let sign = self.zeros.slopes_at_zeros[i].signum();
                    let m = self.slope_min(sign, lo, ab);
                    ok4 &= m >= -MONOTONE_TOL;
                    w4.push(m);
                    alpha_bars.push(ab);
                }
                None => {
                    ok4 = false;
                    w4.push(f64::NAN);
                }
            }
        }
        let sign = self.zeros.slopes_at_zeros[n - 1].signum();
        let (tv, tw) = self.tail(sign, zs[n - 1]);
        ok4 &= tv == Verdict::Pass;
        w4.extend(tw);

        // Informal observation on the extrema below a1 and in the last interval.
        let first = self.zeros.extrema_in(0.0, zs[0]).first().copied();
        let last = self.zeros.extrema_in(zs[n - 2], zs[n - 1]).first().copied();
        if let (Some(l0), Some(ll)) = (first, last) {
            let (f0, fl) = (self.system.f.value(l0).abs(), self.system.f.value(ll).abs());
            let rel = if f0 > fl { ">" } else { "<=" };
            notes.push(format!(
                "|F(L0)| = {f0:.6e} {rel} |F(L{})| = {fl:.6e} (L0 = {l0}, L{} = {ll})",
                n - 1,
                n - 1
            ));
        }
        hyps.push(Hypothesis {
            id: "iii".into(),
            statement: s3,
            verdict: pass_if(ok3),
            witness: w3,
        });
        hyps.push(Hypothesis {
            id: "iv".into(),
            statement: s4,
            verdict: pass_if(ok4),
            witness: w4,
        });
    }
}

fn pass_if(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn not_checked(id: &str, statement: String) -> Hypothesis {
    Hypothesis {
        id: id.into(),
        statement,
        verdict: Verdict::NotChecked,
        witness: vec![],
    }
}

/// Minimum of `h` over `SAMPLES` points of `(lo, hi]`.
fn min_of(h: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    (1..=SAMPLES)
        .map(|i| h(lo + (hi - lo) * i as f64 / SAMPLES as f64))
        .fold(f64::INFINITY, f64::min)
}

/// Check the hypotheses of one theorem.
pub fn check_hypotheses(system: &LienardSystem, theorem: Theorem) -> Result<TheoremReport> {
    Ok(Checker::new(system)?.check(theorem))
}

/// Try the theorems strongest first and return the first prediction.
/// Rejections are recorded in the notes of the returned report.
pub fn predict_count(system: &LienardSystem) -> (Option<usize>, TheoremReport) {
    let mut checker = match Checker::new(system) {
        Ok(c) => c,
        Err(e) => {
            let r = TheoremReport {
                theorem: Theorem::Classical,
                hypotheses: vec![],
                predicted_n: None,
                notes: vec![format!("zero structure unavailable: {e}")],
            };
            return (None, r);
        }
    };
    // On total failure the report returned is that of the theorem written
    // for this many zeros, which carries the informative verdicts.
    let fitting = match checker.zeros.zeros.len() {
        0 | 1 => Theorem::Extension,
        2 => Theorem::TwoCycle,
        _ => Theorem::NCycle,
    };
    let mut rejected = Vec::new();
    let mut kept = None;
    for t in Theorem::ALL {
        let mut r = checker.check(t);
        if r.predicted_n.is_some() {
            r.notes.splice(0..0, rejected);
            return (r.predicted_n, r);
        }
        let failed: Vec<String> = r
            .hypotheses
            .iter()
            .filter(|h| h.verdict != Verdict::Pass)
            .map(|h| format!("({}) {}", h.id, h.verdict))
            .collect();
        rejected.push(format!("{t} rejected: {}", failed.join(", ")));
        if t == fitting {
            kept = Some(r);
        }
    }
    let mut r = kept.expect("the fitting theorem is among those tried");
    r.notes.splice(0..0, rejected);
    (None, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn vdp_classical() {
        let s = builtin::vdp(1.0).unwrap();
        let r = check_hypotheses(&s, Theorem::Classical).unwrap();
        assert!(r.all_pass(), "{}", r.render());
        assert_eq!(r.predicted_n, Some(1));
    }

    #[test]
    fn bounded_tail_needs_extension() {
        let s = builtin::vdp_bounded(1.0, f64::INFINITY).unwrap();
        let r = check_hypotheses(&s, Theorem::Classical).unwrap();
        assert_eq!(r.hypothesis("iv").unwrap().verdict, Verdict::Fail);
        let (n, r) = predict_count(&s);
        assert_eq!(n, Some(1));
        assert_eq!(r.theorem, Theorem::Extension);
    }

    #[test]
    fn quintic_k3_two_cycle() {
        let s = builtin::quintic(3.0, 0.1).unwrap();
        let r = check_hypotheses(&s, Theorem::TwoCycle).unwrap();
        assert!(r.all_pass(), "{}", r.render());
        assert_eq!(r.predicted_n, Some(2));
    }

    #[test]
    fn quintic_k35_fails_monotonicity() {
        let s = builtin::quintic(3.5, 0.1).unwrap();
        let r = check_hypotheses(&s, Theorem::TwoCycle).unwrap();
        assert_eq!(r.hypothesis("iv").unwrap().verdict, Verdict::Fail);
        assert_eq!(r.predicted_n, None);
        let (n, r) = predict_count(&s);
        assert_eq!(n, None);
        assert_eq!(r.theorem, Theorem::TwoCycle);
    }

    #[test]
    fn theorem_names_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.to_string().parse::<Theorem>().unwrap(), t);
        }
    }
}
