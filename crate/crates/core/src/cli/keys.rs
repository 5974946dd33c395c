//! Configuration keys, their units, and the layered raw key/value store.

use std::collections::BTreeMap;

use crate::model::{db_to_linear, dbm_to_watts};

use super::CliError;

/// Physical dimension of a key; decides which unit suffixes it accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// W (default), mW, dBm, dBW.
    Power,
    /// Linear (default) or dB.
    Ratio,
    /// bps (default), kbps, Mbps, Gbps.
    Rate,
    /// Hz (default), kHz, MHz, GHz.
    Frequency,
    /// m (default), km.
    Length,
    /// Per m² (default) or per km².
    Density,
    /// Dimensionless number without suffix.
    Plain,
    /// Non-negative integer.
    Count,
    Flag,
    Text,
}

impl Dimension {
    fn units(self) -> &'static str {
        match self {
            Dimension::Power => "W, mW, dBm, dBW",
            Dimension::Ratio => "linear or dB",
            Dimension::Rate => "bps, kbps, Mbps, Gbps",
            Dimension::Frequency => "Hz, kHz, MHz, GHz",
            Dimension::Length => "m, km",
            Dimension::Density => "/m^2, /km^2",
            Dimension::Plain => "no unit",
            Dimension::Count => "integer",
            Dimension::Flag => "true/false",
            Dimension::Text => "text",
        }
    }

    pub fn is_numeric(self) -> bool {
        !matches!(self, Dimension::Count | Dimension::Flag | Dimension::Text)
    }
}

/// Subcommand a key belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    Sweep,
    Optimize,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Analyze,
    Sweep,
    Optimize,
    Validate,
}

impl Subcommand {
    pub const ALL: [Subcommand; 4] = [
        Subcommand::Analyze,
        Subcommand::Sweep,
        Subcommand::Optimize,
        Subcommand::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Analyze => "analyze",
            Subcommand::Sweep => "sweep",
            Subcommand::Optimize => "optimize",
            Subcommand::Validate => "validate",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn about(self) -> &'static str {
        match self {
            Subcommand::Analyze => "Coverage, rates, ASE and EE for each scheme and engine",
            Subcommand::Sweep => "Sweep one parameter and tabulate metrics",
            Subcommand::Optimize => "Tune one scheme family's parameters",
            Subcommand::Validate => "Cross-check bounds, exact analysis and simulation",
        }
    }
}

impl Scope {
    pub fn admits(self, command: Subcommand) -> bool {
        matches!(
            (self, command),
            (Scope::All, _)
                | (Scope::Sweep, Subcommand::Sweep)
                | (Scope::Optimize, Subcommand::Optimize)
                | (Scope::Validate, Subcommand::Validate)
        )
    }

    fn owner(self) -> &'static str {
        match self {
            Scope::All => "every command",
            Scope::Sweep => "sweep",
            Scope::Optimize => "optimize",
            Scope::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub flag: &'static str,
    pub dim: Dimension,
    pub scope: Scope,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(
    name: &'static str,
    flag: &'static str,
    dim: Dimension,
    scope: Scope,
    default: &'static str,
    help: &'static str,
) -> KeySpec {
    KeySpec {
        name,
        flag,
        dim,
        scope,
        default,
        help,
    }
}

use Dimension as D;
use Scope as S;

pub const KEYS: &[KeySpec] = &[
    key("lambda_bs", "lambda-bs", D::Density, S::All, "1e-6", "BS density"),
    key("lambda_ue", "lambda-ue", D::Density, S::All, "1e-5", "UE density"),
    key("alpha", "alpha", D::Plain, S::All, "4", "path-loss exponent (> 2)"),
    key("beta", "beta", D::Ratio, S::All, "-100 dB", "residual self-interference ratio"),
    key("p_ue", "p-ue", D::Power, S::All, "0.2 W", "UE transmit power"),
    key("p_static", "p-static", D::Power, S::All, "0.15 W", "static circuit power per pair"),
    key("p_max", "p-max", D::Power, S::All, "2 W", "BS peak power"),
    key("p_min", "p-min", D::Power, S::All, "0.2 W", "BS minimum power"),
    key("bandwidth", "bandwidth", D::Frequency, S::All, "10 MHz", "system bandwidth"),
    key("rate_bs", "rate-bs", D::Rate, S::All, "10 Mbps", "UL target rate at the BS"),
    key("rate_ue", "rate-ue", D::Rate, S::All, "10 Mbps", "DL target rate at the UE"),
    key("theta", "theta", D::Ratio, S::All, "", "SIR threshold for both links (overrides rates)"),
    key("theta_b", "theta-b", D::Ratio, S::All, "", "UL SIR threshold (overrides rate_bs)"),
    key("theta_u", "theta-u", D::Ratio, S::All, "", "DL SIR threshold (overrides rate_ue)"),
    key("apc_ue_always_on", "apc-ue-always-on", D::Flag, S::All, "true", "UEs transmit while their APC BS sleeps"),
    key("apc_rate_includes_xi", "apc-rate-includes-xi", D::Flag, S::All, "true", "APC DL rate counts only awake slots"),
    key("scheme", "scheme", D::Text, S::All, "cpc", "comma list of cpc, upc, fpc, apc, hd"),
    key("upc_p_min", "upc-p-min", D::Power, S::All, "p_min", "UPC lower power"),
    key("upc_p_max", "upc-p-max", D::Power, S::All, "p_max", "UPC upper power"),
    key("fpc_p_bar", "fpc-p-bar", D::Power, S::All, "", "FPC base power"),
    key("fpc_epsilon", "fpc-epsilon", D::Plain, S::All, "0.1", "FPC compensation fraction in [0, 1]"),
    key("apc_p_bar", "apc-p-bar", D::Power, S::All, "", "APC on-state power"),
    key("apc_xi", "apc-xi", D::Plain, S::All, "", "APC on probability in [0, 1]"),
    key("kind", "kind", D::Text, S::All, "lower", "comma list of lower, upper, exact, mc"),
    key("distance", "distance", D::Length, S::All, "", "frozen serving link distance"),
    key("n_trials", "n-trials", D::Count, S::All, "37000", "Monte-Carlo trials"),
    key("seed", "seed", D::Count, S::All, "0x5eedf00d", "Monte-Carlo seed"),
    key("window_radius", "window-radius", D::Length, S::All, "10/sqrt(lambda_bs)", "simulation window radius"),
    key("edge_handling", "edge-handling", D::Text, S::All, "guard_zone", "guard_zone or torus"),
    key("target_ci", "target-ci", D::Plain, S::All, "0.005", "coverage CI half-width target (0 disables)"),
    key("axis", "axis", D::Text, S::Sweep, "", "swept key"),
    key("from", "from", D::Text, S::Sweep, "", "first axis value, in the axis key's units"),
    key("to", "to", D::Text, S::Sweep, "", "last axis value"),
    key("points", "points", D::Count, S::Sweep, "11", "number of axis values"),
    key("scale", "scale", D::Text, S::Sweep, "linear", "linear or log"),
    key("metrics", "metrics", D::Text, S::Sweep, "p_ul,p_dl", "comma list of metrics"),
    key("objective", "objective", D::Text, S::Optimize, "max_min", "max_min, max_ase or max_ee"),
    key("dl_demand", "dl-demand", D::Plain, S::Optimize, "1", "DL weight of the max-min objective"),
    key("ul_demand", "ul-demand", D::Plain, S::Optimize, "1", "UL weight of the max-min objective"),
    key("grid_points", "grid-points", D::Count, S::Optimize, "32", "grid points per parameter"),
    key("tolerance", "tolerance", D::Plain, S::Optimize, "1e-3", "golden-section width per box side"),
    key("validate_points", "validate-points", D::Count, S::Validate, "8", "transform points per scheme"),
    key("output", "output", D::Text, S::All, "", "CSV path (stdout when unset)"),
];

pub fn lookup(name: &str) -> Option<&'static KeySpec> {
    let name = name.trim().replace('-', "_");
    KEYS.iter().find(|k| k.name == name)
}

fn split_number(text: &str) -> (&str, &str) {
    let text = text.trim();
    let end = text
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit()
                || c == '.'
                || ((c == '+' || c == '-') && (i == 0 || matches!(text.as_bytes()[i - 1], b'e' | b'E')))
                || ((c == 'e' || c == 'E') && i > 0 && text[i + 1..].starts_with(|n: char| n.is_ascii_digit() || n == '-' || n == '+')))
        })
        .map_or(text.len(), |(i, _)| i);
    (&text[..end], text[end..].trim())
}

/// Parse a quantity into SI base units (W, linear, bps, Hz, m, 1/m²).
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, String> {
    let (number, unit) = split_number(text);
    let x: f64 = number
        .parse()
        .map_err(|_| format!("expected a number with unit ({}), got '{}'", dim.units(), text.trim()))?;
    let unit = unit.strip_prefix("per").map_or(unit, str::trim);
    let value = match (dim, unit) {
        (D::Power, "" | "W" | "w") => x,
        (D::Power, "mW" | "mw") => x * 1e-3,
        (D::Power, "dBm" | "dbm") => dbm_to_watts(x),
        (D::Power, "dBW" | "dbw" | "dBw") => db_to_linear(x),
        (D::Ratio, "") => x,
        (D::Ratio, "dB" | "db") => db_to_linear(x),
        (D::Rate, "" | "bps" | "bit/s") => x,
        (D::Rate, "kbps" | "kbit/s") => x * 1e3,
        (D::Rate, "Mbps" | "mbps" | "Mbit/s") => x * 1e6,
        (D::Rate, "Gbps" | "gbps" | "Gbit/s") => x * 1e9,
        (D::Frequency, "" | "Hz" | "hz") => x,
        (D::Frequency, "kHz" | "khz") => x * 1e3,
        (D::Frequency, "MHz") => x * 1e6,
        (D::Frequency, "GHz" | "ghz") => x * 1e9,
        (D::Length, "" | "m") => x,
        (D::Length, "km") => x * 1e3,
        (D::Density, "" | "/m2" | "/m^2" | "m^-2" | "m2") => x,
        (D::Density, "/km2" | "/km^2" | "km^-2" | "km2") => x * 1e-6,
        (D::Plain, "") => x,
        _ => {
            return Err(format!(
                "unknown unit '{unit}' in '{}' (expected {})",
                text.trim(),
                dim.units()
            ))
        }
    };
    if value.is_nan() {
        return Err(format!("'{}' is not a number", text.trim()));
    }
    Ok(value)
}

pub fn parse_count(text: &str) -> Result<u64, String> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => t.replace('_', "").parse(),
    };
    parsed.map_err(|_| format!("expected a non-negative integer, got '{t}'"))
}

pub fn parse_flag(text: &str) -> Result<bool, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(format!("expected true or false, got '{other}'")),
    }
}

/// Raw key values after layering defaults, config file, `--set` and flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RawConfig {
    command: Subcommand,
    values: BTreeMap<&'static str, String>,
}

impl RawConfig {
    pub fn new(command: Subcommand) -> Self {
        Self {
            command,
            values: BTreeMap::new(),
        }
    }

    pub fn command(&self) -> Subcommand {
        self.command
    }

    pub fn set(&mut self, name: &str, value: &str) -> Result<(), CliError> {
        let spec = lookup(name).ok_or_else(|| CliError::Usage(format!("unknown key '{}'", name.trim())))?;
        if !spec.scope.admits(self.command) {
            return Err(CliError::Usage(format!(
                "key '{}' only applies to {}, not {}",
                spec.name,
                spec.scope.owner(),
                self.command.name()
            )));
        }
        self.values.insert(spec.name, value.trim().to_string());
        Ok(())
    }

    /// `KEY=VALUE` as given to `--set`.
    pub fn set_assignment(&mut self, assignment: &str) -> Result<(), CliError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected KEY=VALUE, got '{assignment}'")))?;
        self.set(k, v)
    }

    /// `key = value` lines; `#` starts a comment.
    pub fn merge_file_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{origin}:{}: expected 'key = value', got '{line}'", n + 1))
            })?;
            let v = v.trim();
            let v = v
                .strip_prefix('"')
                .and_then(|s| s.strip_suffix('"'))
                .unwrap_or(v);
            self.set(k, v)
                .map_err(|e| CliError::Usage(format!("{origin}:{}: {}", n + 1, e.message())))?;
        }
        Ok(())
    }

    pub fn raw(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(String::as_str)
    }

    fn spec(name: &str) -> &'static KeySpec {
        lookup(name).unwrap_or_else(|| panic!("key '{name}' missing from the key table"))
    }

    fn field<T>(&self, name: &str, parse: impl FnOnce(&str) -> Result<T, String>) -> Result<Option<T>, CliError> {
        self.raw(name)
            .map(|v| parse(v).map_err(|e| CliError::Usage(format!("{name}: {e}"))))
            .transpose()
    }

    pub fn quantity(&self, name: &str) -> Result<Option<f64>, CliError> {
        let dim = Self::spec(name).dim;
        self.field(name, |v| parse_quantity(v, dim))
    }

    pub fn count(&self, name: &str) -> Result<Option<u64>, CliError> {
        self.field(name, parse_count)
    }

    pub fn flag(&self, name: &str) -> Result<Option<bool>, CliError> {
        self.field(name, parse_flag)
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        self.raw(name)
    }
}
