use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "lienard-lab",
    version,
    about = "Limit cycles, amplitude bounds and exact-count checks for Lienard systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one orbit from (0, y0) and write the trajectory.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        y0: f64,
        /// Stop after this many crossings of the y-axis.
        #[arg(long, default_value_t = 2)]
        crossings: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Detect limit cycles from the half-return map.
    Cycles {
        #[command(flatten)]
        model: ModelArgs,
        /// Range of the potential scan, as A:B.
        #[arg(long, value_parser = parse_range)]
        alpha_range: Option<(f64, f64)>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Amplitude bound for a given intercept, or for every detected cycle.
    Alphabar {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        y0: Option<f64>,
        /// Bracket searched for the root, as A:B.
        #[arg(long, value_parser = parse_range)]
        alpha_range: Option<(f64, f64)>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check theorem hypotheses and predict the number of cycles.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        /// One of classical, extension, two_cycle, n_cycle. Default: predict.
        #[arg(long)]
        theorem: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Averaging function and its roots for a polynomial perturbation.
    Phi {
        #[command(flatten)]
        model: ModelArgs,
        /// Radius range, as A:B.
        #[arg(long, value_parser = parse_range)]
        alpha_range: Option<(f64, f64)>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Regenerate a published table or example set and diff it against the golden files.
    Reproduce {
        #[arg(long, value_enum)]
        target: Target,
        /// Directory holding replacement golden files.
        #[arg(long)]
        golden: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Builtin model name.
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    pub builtin: Option<String>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    /// Model definition file (TOML).
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Grid size of the scan.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        self != Format::Json
    }

    pub fn json(self) -> bool {
        self != Format::Csv
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    VdpTable,
    Examples,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("`{s}` is not of the form A:B"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    let (a, b) = (parse(a)?, parse(b)?);
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(format!("range {a}:{b} must be finite and increasing"));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.5:2").unwrap(), (0.5, 2.0));
        assert!(parse_range("2:1").is_err());
        assert!(parse_range("1").is_err());
        assert!(parse_range("a:1").is_err());
    }

    #[test]
    fn definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
