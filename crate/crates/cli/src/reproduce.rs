//! Regeneration of the published amplitude table and example summaries.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use lienard_core::amplitude::{
    alpha_bar, alpha_bar_from_y0, alpha_bars_for_cycles, zero_intervals,
};
use lienard_core::builtin;
use lienard_core::cycles::{find_limit_cycles, Stability};
use lienard_core::reference::{QUINTIC_EXAMPLES, QUINTIC_MU};
use lienard_core::report::{render_table, to_json, TableRow};
use lienard_core::theorem::predict_count;
use lienard_core::LienardSystem;

use crate::args::{CommonArgs, Target};
use crate::commands::{cycle_options, Failure, Outcome, Sink};
use crate::golden::{diff_json, parse_table, rel_err};

const VDP_GOLDEN: &str = include_str!("../golden/vdp_table.txt");
const EXAMPLES_GOLDEN: &str = include_str!("../golden/examples.json");

/// Detected y₊(0) against the published column.
pub const Y_PLUS_REL: f64 = 2e-3;
/// ᾱ from our own y₊(0) against the published ᾱ. Near μ = 0, ᾱ ≈ y₊(0),
/// so this inherits the y₊(0) tolerance.
pub const ALPHA_BAR_REL: f64 = Y_PLUS_REL;
/// ᾱ recomputed from the published y₊(0) against the published ᾱ. This is
/// the tight check; the golden-cell bound is 1e-4 and this is stricter.
pub const ALPHA_BAR_FROM_PUBLISHED_REL: f64 = 1e-5;
/// Example summaries against their committed snapshot.
pub const EXAMPLES_REL: f64 = 1e-6;

pub fn reproduce(target: Target, golden: Option<&Path>, c: &CommonArgs) -> Outcome {
    let read = |name: &str, fallback: &str| -> Outcome<String> {
        match golden {
            Some(dir) => fs::read_to_string(dir.join(name)).map_err(|e| {
                Failure::Golden(format!("cannot read {}: {e}", dir.join(name).display()))
            }),
            None => Ok(fallback.to_string()),
        }
    };
    match target {
        Target::VdpTable => vdp_table(&read("vdp_table.txt", VDP_GOLDEN)?, c),
        Target::Examples => examples(&read("examples.json", EXAMPLES_GOLDEN)?, c),
    }
}

#[derive(Debug, Serialize)]
struct VdpRow {
    mu: f64,
    y_plus0: f64,
    alpha_bar: f64,
    /// ᾱ recomputed from the published y₊(0).
    alpha_bar_from_published: f64,
    published_y_plus0: f64,
    published_alpha_bar: f64,
}

fn vdp_row(mu: f64, golden_y: f64, golden_a: f64, c: &CommonArgs) -> Outcome<VdpRow> {
    let system = builtin::vdp(mu)?;
    let scan = find_limit_cycles(&system, &cycle_options(c)?)?;
    let [cycle] = scan.cycles[..] else {
        return Err(Failure::Numerical(format!(
            "vdp mu = {mu}: expected one cycle, found {}",
            scan.cycles.len()
        )));
    };
    let bracket = zero_intervals(&system)?[0];
    Ok(VdpRow {
        mu,
        y_plus0: cycle.y_plus0,
        alpha_bar: alpha_bar(&system, &cycle, bracket)?.alpha_bar,
        alpha_bar_from_published: alpha_bar_from_y0(&system, golden_y, bracket)?.alpha_bar,
        published_y_plus0: golden_y,
        published_alpha_bar: golden_a,
    })
}

fn vdp_table(golden: &str, c: &CommonArgs) -> Outcome {
    let want = parse_table(golden).map_err(Failure::Golden)?;
    if want.is_empty() {
        return Err(Failure::Golden("golden table has no rows".into()));
    }
    let rows = want
        .par_iter()
        .map(|&[mu, y, a]| vdp_row(mu, y, a, c))
        .collect::<Outcome<Vec<_>>>()?;

    let table: Vec<TableRow> = rows
        .iter()
        .map(|r| TableRow {
            mu: r.mu,
            y_plus0: r.y_plus0,
            alpha_bar: r.alpha_bar,
        })
        .collect();
    let text = render_table(&table)?;
    let sink = Sink::new(c);
    sink.text("vdp_table.txt", &text)?;
    sink.json("vdp_table.json", &rows)?;
    sink.csv(
        "vdp_table.csv",
        &lienard_core::report::numeric_csv(
            &[
                "mu",
                "y_plus0",
                "alpha_bar",
                "alpha_bar_from_published",
                "published_y_plus0",
                "published_alpha_bar",
            ],
            rows.iter()
                .map(|r| {
                    [
                        r.mu,
                        r.y_plus0,
                        r.alpha_bar,
                        r.alpha_bar_from_published,
                        r.published_y_plus0,
                        r.published_alpha_bar,
                    ]
                })
                .collect::<Vec<_>>()
                .iter()
                .map(|r| &r[..]),
        ),
    )?;
    print!("{text}");

    let mut bad = Vec::new();
    for r in &rows {
        let checks = [
            (
                "y_plus0",
                rel_err(r.y_plus0, r.published_y_plus0),
                Y_PLUS_REL,
            ),
            (
                "alpha_bar",
                rel_err(r.alpha_bar, r.published_alpha_bar),
                ALPHA_BAR_REL,
            ),
            (
                "alpha_bar from published y_plus0",
                rel_err(r.alpha_bar_from_published, r.published_alpha_bar),
                ALPHA_BAR_FROM_PUBLISHED_REL,
            ),
        ];
        for (what, err, tol) in checks {
            if !(err <= tol) {
                bad.push(format!(
                    "mu = {}: {what} rel err {err:.2e} > {tol:.0e}",
                    r.mu
                ));
            }
        }
    }
    if bad.is_empty() {
        println!("{} rows match the golden table", rows.len());
        Ok(())
    } else {
        Err(Failure::Golden(bad.join("; ")))
    }
}

#[derive(Debug, Serialize)]
struct CycleSummary {
    y_plus0: f64,
    amplitude: f64,
    stability: Stability,
    multiplicity: u32,
}

#[derive(Debug, Serialize)]
struct ExampleSummary {
    model: String,
    k: Option<f64>,
    zeros: Vec<f64>,
    extrema: Vec<f64>,
    cycles: Vec<CycleSummary>,
    alpha_bars: Vec<Option<f64>>,
    theorem: String,
    #[serde(rename = "predicted_N")]
    predicted_n: Option<usize>,
}

fn summarize(system: &LienardSystem, k: Option<f64>, c: &CommonArgs) -> Outcome<ExampleSummary> {
    let z = system.zero_structure()?;
    let scan = find_limit_cycles(system, &cycle_options(c)?)?;
    let alpha_bars = alpha_bars_for_cycles(system, &scan.cycles)?
        .into_iter()
        .map(|r| r.map(|r| r.alpha_bar))
        .collect();
    let (predicted_n, report) = predict_count(system);
    Ok(ExampleSummary {
        model: system.name.clone(),
        k,
        zeros: z.zeros,
        extrema: z.extrema,
        cycles: scan
            .cycles
            .iter()
            .map(|cy| CycleSummary {
                y_plus0: cy.y_plus0,
                amplitude: cy.amplitude,
                stability: cy.stability,
                multiplicity: cy.multiplicity,
            })
            .collect(),
        alpha_bars,
        theorem: report.theorem.to_string(),
        predicted_n,
    })
}

fn examples(golden: &str, c: &CommonArgs) -> Outcome {
    let want: serde_json::Value = serde_json::from_str(golden)
        .map_err(|e| Failure::Golden(format!("unreadable golden JSON: {e}")))?;
    let mut jobs: Vec<(Option<f64>, LienardSystem)> = QUINTIC_EXAMPLES
        .iter()
        .map(|ex| Ok((Some(ex.k), builtin::quintic(ex.k, QUINTIC_MU)?)))
        .collect::<Outcome<_>>()?;
    jobs.push((None, builtin::two_cycle()?));
    jobs.push((None, builtin::three_cycle()?));
    let summaries = jobs
        .par_iter()
        .map(|(k, system)| summarize(system, *k, c))
        .collect::<Outcome<Vec<_>>>()?;

    let sink = Sink::new(c);
    sink.json("examples.json", &summaries)?;
    for s in &summaries {
        let ys: Vec<String> = s
            .cycles
            .iter()
            .map(|c| format!("{:.8} {}", c.y_plus0, c.stability))
            .collect();
        let n = s.predicted_n.map_or("none".to_string(), |n| n.to_string());
        println!(
            "{:<28} cycles: {} [{}]  predicted_N: {n}",
            s.model,
            s.cycles.len(),
            ys.join(", ")
        );
    }

    let got: serde_json::Value = serde_json::from_str(&to_json(&summaries)?)
        .map_err(|e| Failure::Numerical(e.to_string()))?;
    let diffs = diff_json(&got, &want, EXAMPLES_REL);
    if diffs.is_empty() {
        println!("{} examples match the golden summaries", summaries.len());
        Ok(())
    } else {
        Err(Failure::Golden(diffs.join("; ")))
    }
}
