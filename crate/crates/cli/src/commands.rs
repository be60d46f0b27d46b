use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use lienard_core::amplitude::{
    alpha_bar_from_y0, alpha_bars_for_cycles, zero_intervals, AlphaBarResult,
};
use lienard_core::asymptotics::{phi_roots, quintic_radii, PhiProblem, QuinticRadii};
use lienard_core::builtin::{builtin, Params};
use lienard_core::cycles::potential_scan;
use lienard_core::cycles::{find_limit_cycles, CycleOptions, LimitCycle};
use lienard_core::integrator::{
    integrate_with, Direction, Event, EventKind, EventSpec, IntegrateOptions, PhaseState, Status,
    StepControl,
};
use lienard_core::report::{to_json, write_atomic};
use lienard_core::theorem::{check_hypotheses, predict_count, Theorem};
use lienard_core::{model_file, Error, LienardSystem};

use crate::args::{Command, CommonArgs, Format, ModelArgs};

pub const DEFAULT_PHI_GRID: usize = 400;

/// A failed run, classified by exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Model(String),
    Numerical(String),
    Golden(String),
}

impl Failure {
    pub const USAGE: u8 = 1;

    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => Self::USAGE,
            Failure::Model(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Golden(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Model(m) | Failure::Numerical(m) => f.write_str(m),
            Failure::Golden(m) => write!(f, "golden-file mismatch: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Config(_) | Error::Io(_) => Failure::Usage(msg),
            Error::Domain { .. }
            | Error::Structure(_)
            | Error::UnknownModel(_)
            | Error::Parse(_) => Failure::Model(msg),
            Error::Numerical(_)
            | Error::NoRoot { .. }
            | Error::Analysis(_)
            | Error::NoReturn { .. } => Failure::Numerical(msg),
        }
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Simulate {
            model,
            y0,
            crossings,
            common,
        } => simulate(&model, y0, crossings, &common),
        Command::Cycles {
            model,
            alpha_range,
            common,
        } => cycles(&model, alpha_range, &common),
        Command::Alphabar {
            model,
            y0,
            alpha_range,
            common,
        } => alphabar(&model, y0, alpha_range, &common),
        Command::Check {
            model,
            theorem,
            common,
        } => check(&model, theorem.as_deref(), &common),
        Command::Phi {
            model,
            alpha_range,
            common,
        } => phi(&model, alpha_range, &common),
        Command::Reproduce {
            target,
            golden,
            common,
        } => crate::reproduce::reproduce(target, golden.as_deref(), &common),
    }
}

pub fn load_model(m: &ModelArgs) -> Outcome<LienardSystem> {
    match (&m.builtin, &m.model) {
        (Some(name), None) => {
            let mut params = Params::new();
            params.extend(m.mu.map(|v| ("mu".to_string(), v)));
            params.extend(m.k.map(|v| ("k".to_string(), v)));
            Ok(builtin(name, &params)?)
        }
        (None, Some(path)) => {
            if m.mu.is_some() || m.k.is_some() {
                return Err(Failure::Usage(
                    "--mu and --k apply to builtin models only".into(),
                ));
            }
            model_file::load(path).map_err(|e| match e {
                Error::Io(io) => Failure::Model(format!("cannot read {}: {io}", path.display())),
                other => other.into(),
            })
        }
        _ => Err(Failure::Usage(
            "give exactly one of --builtin or --model".into(),
        )),
    }
}

pub fn step_control(c: &CommonArgs) -> Outcome<StepControl> {
    let mut ctrl = StepControl::default();
    if let Some(r) = c.rtol {
        ctrl.rtol = r;
    }
    if let Some(a) = c.atol {
        ctrl.atol = a;
    }
    ctrl.validate()?;
    Ok(ctrl)
}

pub fn cycle_options(c: &CommonArgs) -> Outcome<CycleOptions> {
    let mut opts = CycleOptions {
        ctrl: step_control(c)?,
        ..CycleOptions::default()
    };
    if let Some(n) = c.grid {
        opts.grid_n = n;
    }
    Ok(opts)
}

/// Artifact sink honouring `--out` and `--format`.
pub struct Sink {
    dir: PathBuf,
    format: Format,
}

impl Sink {
    pub fn new(c: &CommonArgs) -> Self {
        Self {
            dir: c.out.clone(),
            format: c.format,
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Outcome {
        if self.format.json() {
            write(&self.path(name), &to_json(value)?)?;
        }
        Ok(())
    }

    pub fn csv(&self, name: &str, text: &str) -> Outcome {
        if self.format.csv() {
            write(&self.path(name), text)?;
        }
        Ok(())
    }

    /// Written whatever the format.
    pub fn text(&self, name: &str, text: &str) -> Outcome {
        write(&self.path(name), text)
    }
}

fn write(path: &Path, text: &str) -> Outcome {
    write_atomic(path, text.as_bytes())
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize)]
struct SimulateSummary<'a> {
    model: &'a str,
    y0: f64,
    status: Status,
    steps: usize,
    final_state: PhaseState,
    events: &'a [Event],
}

fn simulate(m: &ModelArgs, y0: f64, crossings: usize, c: &CommonArgs) -> Outcome {
    let system = load_model(m)?;
    if crossings == 0 {
        return Err(Failure::Usage("--crossings must be at least 1".into()));
    }
    if !y0.is_finite() {
        return Err(Failure::Usage(format!("--y0 {y0} must be finite")));
    }
    let opts = IntegrateOptions {
        stop: Some(EventSpec::new(
            EventKind::YAxisCross,
            Direction::Any,
            crossings,
        )),
        record: vec![(EventKind::CurveFCross, Direction::Any)],
        backward: false,
    };
    let traj = integrate_with(
        &system,
        PhaseState::new(0.0, 0.0, y0),
        &opts,
        &step_control(c)?,
    )?;
    let sink = Sink::new(c);
    sink.csv("trajectory.csv", &traj.states_csv())?;
    sink.csv("events.csv", &traj.events_csv())?;
    sink.json(
        "trajectory.json",
        &SimulateSummary {
            model: &system.name,
            y0,
            status: traj.status,
            steps: traj.states.len().saturating_sub(1),
            final_state: traj.last(),
            events: &traj.events,
        },
    )?;
    let end = traj.last();
    println!(
        "{}: {:?} after {} steps, final state t = {}, x = {}, y = {}",
        system.name,
        traj.status,
        traj.states.len().saturating_sub(1),
        end.t,
        end.x,
        end.y
    );
    Ok(())
}

#[derive(Serialize)]
struct CyclesSummary<'a> {
    model: &'a str,
    y_max: f64,
    count: usize,
    cycles: &'a [LimitCycle],
    alpha_range: Option<(f64, f64)>,
    potential_roots: Vec<f64>,
}

/// Potential scan range: from the first positive zero of F to a quarter past
/// the outermost cycle, or to twice the last zero when there is none.
fn default_alpha_range(
    system: &LienardSystem,
    cycles: &[LimitCycle],
) -> Outcome<Option<(f64, f64)>> {
    let z = system.zero_structure()?;
    let (Some(&first), Some(&last)) = (z.zeros.first(), z.zeros.last()) else {
        return Ok(None);
    };
    let outer = cycles.iter().map(|c| c.amplitude).fold(f64::NAN, f64::max);
    let hi = if outer.is_finite() {
        1.25 * outer
    } else {
        2.0 * last
    };
    let hi = hi.min(system.d * (1.0 - 1e-9));
    Ok((hi > first).then_some((first, hi)))
}

fn cycles(m: &ModelArgs, alpha_range: Option<(f64, f64)>, c: &CommonArgs) -> Outcome {
    let system = load_model(m)?;
    let opts = cycle_options(c)?;
    let scan = find_limit_cycles(&system, &opts)?;
    let range = match alpha_range {
        Some(r) => Some(r),
        None => default_alpha_range(&system, &scan.cycles)?,
    };
    let sink = Sink::new(c);
    let mut potential_roots = Vec::new();
    if let Some(r) = range {
        let v = potential_scan(&system, r, opts.grid_n, &opts.ctrl)?;
        sink.csv("potential.csv", &v.csv())?;
        potential_roots = v.sign_changes;
    }
    sink.csv("return_map.csv", &scan.samples_csv())?;
    sink.json(
        "cycles.json",
        &CyclesSummary {
            model: &system.name,
            y_max: scan.y_max,
            count: scan.cycles.len(),
            cycles: &scan.cycles,
            alpha_range: range,
            potential_roots,
        },
    )?;
    println!("{}: {} limit cycle(s)", system.name, scan.cycles.len());
    for cy in &scan.cycles {
        println!(
            "  y_plus0 = {:.10}  amplitude = {:.10}  {} (multiplicity {})",
            cy.y_plus0, cy.amplitude, cy.stability, cy.multiplicity
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct AlphaBarSummary<'a> {
    model: &'a str,
    results: Vec<Option<AlphaBarResult>>,
}

fn alphabar(
    m: &ModelArgs,
    y0: Option<f64>,
    alpha_range: Option<(f64, f64)>,
    c: &CommonArgs,
) -> Outcome {
    let system = load_model(m)?;
    let results = match y0 {
        Some(y0) => {
            let bracket = match alpha_range {
                Some(r) => r,
                None => *zero_intervals(&system)?.first().ok_or_else(|| {
                    Failure::Numerical("F has no positive zero to bracket from".into())
                })?,
            };
            vec![Some(alpha_bar_from_y0(&system, y0, bracket)?)]
        }
        None => {
            if alpha_range.is_some() {
                return Err(Failure::Usage("--alpha-range needs --y0".into()));
            }
            let scan = find_limit_cycles(&system, &cycle_options(c)?)?;
            alpha_bars_for_cycles(&system, &scan.cycles)?
        }
    };
    Sink::new(c).json(
        "alphabar.json",
        &AlphaBarSummary {
            model: &system.name,
            results: results.clone(),
        },
    )?;
    for r in &results {
        match r {
            Some(r) => println!(
                "interval {}: y_plus0 = {:.10}  alpha' = {:.10}  alpha'' = {:.10}  alpha_bar = {:.10}",
                r.interval_index, r.y_plus0, r.alpha_prime, r.alpha_double_prime, r.alpha_bar
            ),
            None => println!("no root of the amplitude equation"),
        }
    }
    Ok(())
}

fn check(m: &ModelArgs, theorem: Option<&str>, c: &CommonArgs) -> Outcome {
    let system = load_model(m)?;
    let report = match theorem {
        Some(t) => check_hypotheses(&system, t.parse::<Theorem>()?)?,
        None => predict_count(&system).1,
    };
    let sink = Sink::new(c);
    let text = report.render();
    sink.json("theorem_report.json", &report)?;
    sink.text("theorem_report.txt", &text)?;
    print!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct PhiSummary<'a> {
    model: &'a str,
    problem: &'a PhiProblem,
    roots: &'a [f64],
    tangential: &'a [f64],
    closed_form: Option<QuinticRadii>,
}

fn phi(m: &ModelArgs, alpha_range: Option<(f64, f64)>, c: &CommonArgs) -> Outcome {
    let name = m.builtin.as_deref().ok_or_else(|| {
        Failure::Model("phi needs a builtin with a polynomial perturbation".into())
    })?;
    if m.model.is_some() {
        return Err(Failure::Usage("phi takes --builtin only".into()));
    }
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Failure::Usage(format!("{name} needs --{flag}")))
    };
    let (problem, closed) = match name {
        "quintic" => {
            let k = need(m.k, "k")?;
            let r = alpha_range.unwrap_or((0.05, 1.2));
            (
                PhiProblem::quintic(k, m.mu.unwrap_or(0.1), r)?,
                Some(quintic_radii(k)?),
            )
        }
        "vdp" => {
            if m.k.is_some() {
                return Err(Failure::Usage("vdp takes no --k".into()));
            }
            let r = alpha_range.unwrap_or((0.05, 4.0));
            (PhiProblem::van_der_pol(need(m.mu, "mu")?, r)?, None)
        }
        other => {
            return Err(Failure::Model(format!(
                "builtin `{other}` has no polynomial perturbation; phi supports quintic and vdp"
            )))
        }
    };
    let roots = phi_roots(&problem, c.grid.unwrap_or(DEFAULT_PHI_GRID))?;
    let sink = Sink::new(c);
    sink.csv("phi.csv", &roots.csv())?;
    sink.json(
        "phi.json",
        &PhiSummary {
            model: name,
            problem: &problem,
            roots: &roots.roots,
            tangential: &roots.tangential,
            closed_form: closed,
        },
    )?;
    println!(
        "{name}: {} root(s) {:?}, tangential {:?}",
        roots.roots.len(),
        roots.roots,
        roots.tangential
    );
    Ok(())
}
