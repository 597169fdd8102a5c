//! Command-line front end: `covariance`, `sweep` and `validate`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::OpoConfig;
use crate::error::{Error, Result};
use crate::export;
use crate::pipeline::{solve, sweep, Grid, SweepAxis};
use crate::validate::validate;

#[derive(Debug, Parser)]
#[command(name = "opo-sideband", version, about = "Sideband covariance of a triply resonant OPO above threshold")]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug, -vvv trace).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Covariance matrix, S/A blocks and physicality report at one operating point.
    Covariance(Common),
    /// Long-format covariance table over a grid of sigma or analysis frequency.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: SweepAxis,
        /// Inclusive linear grid, `start:stop:count`.
        #[arg(long, value_parser = parse_grid)]
        grid: Grid,
    },
    /// Invariant and oracle suite; exit status 0 only when every check passes.
    Validate(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration; the bundled reference configuration when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for output files; results go to stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Override `phonons.enabled`.
    #[arg(long, value_enum)]
    pub phonons: Option<Switch>,
    /// Override `detection.enabled`.
    #[arg(long, value_enum)]
    pub detection: Option<Switch>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Table => "txt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load_config(common: &Common) -> Result<OpoConfig> {
    let mut cfg = match &common.config {
        Some(path) => OpoConfig::load(path)?,
        None => OpoConfig::reference(),
    };
    if let Some(s) = common.phonons {
        cfg = cfg.with_phonons(s == Switch::On);
    }
    if let Some(s) = common.detection {
        cfg = cfg.with_detection(s == Switch::On);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Writes every `(stem, contents)` pair under `dir`, or prints them when no
/// directory was given.
fn emit(dir: Option<&Path>, format: Format, docs: &[(&str, String)]) -> Result<()> {
    match dir {
        None => {
            for (_, text) in docs {
                print!("{text}");
                if !text.ends_with('\n') {
                    println!();
                }
            }
        }
        Some(dir) => {
            let io = |path: &Path, source| Error::Io { path: path.display().to_string(), source };
            fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
            for (stem, text) in docs {
                let path = dir.join(format!("{stem}.{}", format.extension()));
                fs::write(&path, text).map_err(|e| io(&path, e))?;
                log::info!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn cmd_covariance(common: &Common) -> Result<i32> {
    let cfg = load_config(common)?;
    let sol = solve(&cfg)?;
    let docs = match common.format {
        Format::Csv => vec![("covariance", export::covariance_csv(&sol)?), ("report", export::report_csv(&sol)?)],
        Format::Json => vec![("covariance", export::solution_json(&sol)?)],
        Format::Table => vec![("covariance", export::solution_table(&sol))],
    };
    emit(common.output.as_deref(), common.format, &docs)?;
    Ok(0)
}

fn cmd_sweep(common: &Common, axis: SweepAxis, grid: &Grid) -> Result<i32> {
    let cfg = load_config(common)?;
    let points = sweep(&cfg, axis, grid);
    let failed = points.iter().filter(|p| p.outcome.is_err()).count();
    if failed > 0 {
        log::warn!("{failed} of {} sweep points failed", points.len());
    }
    let text = match common.format {
        Format::Csv => export::sweep_csv(axis, &points)?,
        Format::Json => export::sweep_json(axis, &points)?,
        Format::Table => export::sweep_table(axis, &points),
    };
    emit(common.output.as_deref(), common.format, &[("sweep", text)])?;
    Ok(0)
}

fn cmd_validate(common: &Common) -> Result<i32> {
    let cfg = load_config(common)?;
    let summary = validate(&cfg)?;
    let text = match common.format {
        Format::Csv => export::validation_csv(&summary)?,
        Format::Json => export::validation_json(&summary)?,
        Format::Table => export::validation_table(&summary),
    };
    emit(common.output.as_deref(), common.format, &[("validation", text)])?;
    for r in summary.failures() {
        eprintln!("error: check `{}` failed", r.name);
    }
    Ok(if summary.passed() {
        0
    } else if summary.at_boundary {
        3
    } else {
        1
    })
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Covariance(c) => cmd_covariance(c),
        Command::Sweep { common, axis, grid } => cmd_sweep(common, *axis, grid),
        Command::Validate(c) => cmd_validate(c),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_sweep_flags() {
        let cli = Cli::try_parse_from([
            "opo-sideband",
            "sweep",
            "--axis",
            "omega",
            "--grid",
            "1e6:2e8:5",
            "--format",
            "csv",
            "--phonons",
            "on",
        ])
        .unwrap();
        match cli.command {
            Command::Sweep { common, axis, grid } => {
                assert_eq!(axis, SweepAxis::Omega);
                assert_eq!(grid.count, 5);
                assert_eq!(common.format, Format::Csv);
                assert_eq!(common.phonons, Some(Switch::On));
                assert!(common.config.is_none());
            }
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["opo-sideband", "sweep", "--axis", "sigma", "--grid", "1:2"]).is_err());
    }

    #[test]
    fn missing_config_file_is_a_config_error() {
        let cli = Cli::try_parse_from(["opo-sideband", "covariance", "--config", "/nonexistent/opo.toml"]).unwrap();
        assert_eq!(run(&cli), 2);
    }
}
