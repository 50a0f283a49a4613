//! Command-line front end: load a scenario, run it, write tables and
//! matrices.

pub mod error;
pub mod output;
pub mod recipes;
pub mod run;
pub mod scenario;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use error::{CliError, Result};
pub use run::{run_scenario, Report};
pub use scenario::Scenario;

pub const OUT_DIR_ENV: &str = "DEGROOT_OUT_DIR";
const DEFAULT_OUT: &str = "out";

#[derive(Debug, Parser)]
#[command(name = "degroot", version, about = "DeGroot learning scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run a built-in recipe.
    Recipe {
        name: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// List built-in recipes.
    List,
}

#[derive(Debug, clap::Args)]
pub struct RunOpts {
    /// Output directory; overrides $DEGROOT_OUT_DIR and the config's `out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override any config field, e.g. `--set kernel.alpha=2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// Parses `text`, applies command-line overrides and validates the result.
pub fn load(text: &str, opts: &RunOpts) -> Result<Scenario> {
    let mut table = scenario::parse_table(text)?;
    for kv in &opts.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        scenario::apply_set(&mut table, k.trim(), v.trim())?;
    }
    if let Some(seed) = opts.seed {
        table.insert("seed".into(), toml::Value::Integer(seed as i64));
    }
    scenario::from_table(table)
}

/// Command line, then environment, then config file, then `out`.
pub fn out_dir(opts: &RunOpts, env: Option<String>, scenario: &Scenario, base: &Path) -> PathBuf {
    if let Some(p) = &opts.out {
        return p.clone();
    }
    if let Some(p) = env.filter(|s| !s.is_empty()) {
        return PathBuf::from(p);
    }
    match &scenario.out {
        Some(p) => base.join(p),
        None => PathBuf::from(DEFAULT_OUT),
    }
}

fn execute(text: &str, base: &Path, opts: &RunOpts, stdout: &mut dyn Write) -> Result<()> {
    let scenario = load(text, opts)?;
    let report = run_scenario(&scenario, base)?;
    let dir = out_dir(opts, std::env::var(OUT_DIR_ENV).ok(), &scenario, base);
    let written = output::write_report(&report, &dir)?;
    let stdout_err = |e| CliError::io("<stdout>", e);
    for (k, v) in &report.summary {
        writeln!(stdout, "{k} = {v}").map_err(stdout_err)?;
    }
    for p in written {
        writeln!(stdout, "wrote {}", p.display()).map_err(stdout_err)?;
    }
    Ok(())
}

/// Runs one command and returns the process exit code.
pub fn run_cli(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::List => {
            for r in recipes::RECIPES {
                let _ = writeln!(stdout, "{:<24} {}", r.name, r.about);
            }
            Ok(())
        }
        Command::Recipe { name, opts } => match recipes::find(&name) {
            Some(r) => execute(r.config, Path::new("."), &opts, stdout),
            None => Err(CliError::config(format!(
                "unknown recipe `{name}`; run `degroot list`"
            ))),
        },
        Command::Run { config, opts } => std::fs::read_to_string(&config)
            .map_err(|e| CliError::io(&config, e))
            .and_then(|text| {
                let base = config.parent().unwrap_or(Path::new("."));
                execute(&text, base, &opts, stdout)
            }),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
