//! Command-line front end: `analyze`, `sweep`, `optimize` and `validate`.
//!
//! Every key in [`keys::KEYS`] can come from built-in defaults, a
//! `--config` file, `--set KEY=VALUE`, or its own flag, later sources
//! overriding earlier ones.

mod commands;
pub mod keys;
pub mod output;
pub mod run_config;
mod validate;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};

use crate::error::Error;
use keys::{Dimension, KeySpec, RawConfig, Subcommand, KEYS};
use run_config::RunConfig;

/// Failure of a CLI run, carrying its process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad arguments or configuration (exit 1).
    Usage(String),
    /// Reading or writing files failed (exit 1).
    Io(String),
    /// A numerical integral did not converge (exit 2).
    Convergence(String),
    /// The validation suite found a failing check (exit 3).
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Convergence(_) => 2,
            CliError::Validation(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Convergence(m) | CliError::Validation(m) => m,
        }
    }
}

fn is_convergence(e: &Error) -> bool {
    match e {
        Error::Quadrature(_) => true,
        Error::Objective { source, .. } => is_convergence(source),
        _ => false,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if is_convergence(&e) {
            CliError::Convergence(format!("numerical convergence failure: {e}"))
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

fn value_name(dim: Dimension) -> &'static str {
    match dim {
        Dimension::Power => "POWER",
        Dimension::Ratio => "RATIO",
        Dimension::Rate => "RATE",
        Dimension::Frequency => "FREQ",
        Dimension::Length => "LENGTH",
        Dimension::Density => "DENSITY",
        Dimension::Plain => "NUMBER",
        Dimension::Count => "N",
        Dimension::Flag => "BOOL",
        Dimension::Text => "TEXT",
    }
}

fn key_arg(k: &'static KeySpec) -> Arg {
    let help = if k.default.is_empty() {
        k.help.to_string()
    } else {
        format!("{} [default: {}]", k.help, k.default)
    };
    Arg::new(k.name)
        .long(k.flag)
        .value_name(value_name(k.dim))
        .num_args(1)
        .allow_hyphen_values(true)
        .help(help)
}

pub fn command() -> Command {
    let mut cmd = Command::new("fdnet")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Coverage and throughput analysis of full-duplex cellular networks with downlink power control")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for sc in Subcommand::ALL {
        let mut sub = Command::new(sc.name())
            .about(sc.about())
            .arg(
                Arg::new("config")
                    .long("config")
                    .value_name("FILE")
                    .value_parser(value_parser!(PathBuf))
                    .help("Config file of `key = value` lines"),
            )
            .arg(
                Arg::new("set")
                    .long("set")
                    .value_name("KEY=VALUE")
                    .action(ArgAction::Append)
                    .allow_hyphen_values(true)
                    .help("Override one key (repeatable)"),
            );
        for k in KEYS.iter().filter(|k| k.scope.admits(sc)) {
            sub = sub.arg(key_arg(k));
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

/// Layers the config file, `--set` assignments and flags.
pub fn raw_config(command: Subcommand, matches: &ArgMatches) -> Result<RawConfig, CliError> {
    let mut raw = RawConfig::new(command);
    if let Some(path) = matches.get_one::<PathBuf>("config") {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        raw.merge_file_text(&text, &path.display().to_string())?;
    }
    for assignment in matches.get_many::<String>("set").into_iter().flatten() {
        raw.set_assignment(assignment)?;
    }
    for k in KEYS.iter().filter(|k| k.scope.admits(command)) {
        if let Some(v) = matches.get_one::<String>(k.name) {
            raw.set(k.name, v)?;
        }
    }
    Ok(raw)
}

fn execute(raw: &RawConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let run = RunConfig::resolve(raw)?;
    match raw.command() {
        Subcommand::Analyze => commands::analyze(&run, stdout),
        Subcommand::Sweep => commands::sweep(&run, raw, stdout),
        Subcommand::Optimize => commands::optimize(&run, stdout, stderr),
        Subcommand::Validate => validate::validate(&run, stdout),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                1
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let command = Subcommand::from_name(name).expect("every subcommand is registered");
    let result = raw_config(command, sub).and_then(|raw| execute(&raw, stdout, stderr));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}
