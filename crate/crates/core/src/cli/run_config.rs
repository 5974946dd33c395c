//! Typed run configuration resolved from a [`RawConfig`].

use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::analytic::BoundKind;
use crate::model::{threshold_to_rate, NetworkConfig};
use crate::montecarlo::{EdgeHandling, SimulationSpec};
use crate::optimizer::{Evaluation, Objective, SchemeFamily};
use crate::power_control::PowerControlScheme;

use super::keys::{lookup, RawConfig, Subcommand};
use super::CliError;

/// One entry of the `scheme` list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeChoice {
    Family(SchemeFamily),
    /// Half-duplex baseline at peak power.
    Hd,
}

impl SchemeChoice {
    pub fn name(self) -> &'static str {
        match self {
            SchemeChoice::Family(f) => f.as_str(),
            SchemeChoice::Hd => "hd",
        }
    }

    fn parse(text: &str) -> Result<Self, CliError> {
        let t = text.trim().to_ascii_lowercase();
        if t == "hd" {
            return Ok(SchemeChoice::Hd);
        }
        SchemeFamily::ALL
            .into_iter()
            .find(|f| f.as_str() == t)
            .map(SchemeChoice::Family)
            .ok_or_else(|| CliError::Usage(format!("scheme: unknown scheme '{t}' (cpc, upc, fpc, apc, hd)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Analytic(BoundKind),
    MonteCarlo,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Analytic(k) => k.as_str(),
            EngineKind::MonteCarlo => "mc",
        }
    }

    fn parse(text: &str) -> Result<Self, CliError> {
        let t = text.trim().to_ascii_lowercase();
        if t == "mc" || t == "monte_carlo" {
            return Ok(EngineKind::MonteCarlo);
        }
        BoundKind::ALL
            .into_iter()
            .find(|k| k.as_str() == t)
            .map(EngineKind::Analytic)
            .ok_or_else(|| CliError::Usage(format!("kind: unknown engine '{t}' (lower, upper, exact, mc)")))
    }
}

/// Scheme parameters as configured; missing ones are reported when a scheme
/// needs them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub upc_p_min: Option<f64>,
    pub upc_p_max: Option<f64>,
    pub fpc_p_bar: Option<f64>,
    pub fpc_epsilon: f64,
    pub apc_p_bar: Option<f64>,
    pub apc_xi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeSettings {
    pub objective: Objective,
    pub grid_points: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Subcommand,
    pub network: NetworkConfig,
    pub schemes: Vec<SchemeChoice>,
    pub params: SchemeParams,
    pub kinds: Vec<EngineKind>,
    pub simulation: SimulationSpec,
    pub distance: Option<f64>,
    pub optimize: OptimizeSettings,
    pub validate_points: usize,
    pub output: Option<PathBuf>,
}

fn dedup<T: PartialEq>(items: Vec<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(items.len());
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn list<T: PartialEq>(text: &str, parse: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    let items = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(dedup(items))
}

fn usize_of(raw: &RawConfig, name: &str, default: usize) -> Result<usize, CliError> {
    Ok(raw.count(name)?.map_or(Ok(default), |n| {
        usize::try_from(n).map_err(|_| CliError::Usage(format!("{name}: {n} is too large")))
    })?)
}

impl RunConfig {
    pub fn resolve(raw: &RawConfig) -> Result<Self, CliError> {
        let mut net = NetworkConfig::default();
        let q = |name: &str, slot: &mut f64| -> Result<(), CliError> {
            if let Some(v) = raw.quantity(name)? {
                *slot = v;
            }
            Ok(())
        };
        q("lambda_bs", &mut net.lambda_bs)?;
        q("lambda_ue", &mut net.lambda_ue)?;
        q("alpha", &mut net.alpha)?;
        q("beta", &mut net.beta)?;
        q("p_ue", &mut net.p_ue)?;
        q("p_static", &mut net.p_static)?;
        q("p_max", &mut net.p_max)?;
        q("p_min", &mut net.p_min)?;
        q("bandwidth", &mut net.bandwidth_w)?;
        q("rate_bs", &mut net.rate_bs)?;
        q("rate_ue", &mut net.rate_ue)?;
        if let Some(t) = raw.quantity("theta")? {
            net.rate_bs = threshold_to_rate(t, net.bandwidth_w);
            net.rate_ue = net.rate_bs;
        }
        if let Some(t) = raw.quantity("theta_b")? {
            net.rate_bs = threshold_to_rate(t, net.bandwidth_w);
        }
        if let Some(t) = raw.quantity("theta_u")? {
            net.rate_ue = threshold_to_rate(t, net.bandwidth_w);
        }
        if let Some(b) = raw.flag("apc_ue_always_on")? {
            net.apc_ue_always_on = b;
        }
        if let Some(b) = raw.flag("apc_rate_includes_xi")? {
            net.apc_rate_includes_xi = b;
        }
        net.validate().map_err(|e| CliError::Usage(format!("invalid network: {e}")))?;

        let schemes = list(raw.text("scheme").unwrap_or("cpc"), SchemeChoice::parse)?;
        let kinds = list(raw.text("kind").unwrap_or("lower"), EngineKind::parse)?;
        if schemes.is_empty() || kinds.is_empty() {
            return Err(CliError::Usage("scheme and kind need at least one entry".into()));
        }

        let params = SchemeParams {
            upc_p_min: raw.quantity("upc_p_min")?,
            upc_p_max: raw.quantity("upc_p_max")?,
            fpc_p_bar: raw.quantity("fpc_p_bar")?,
            fpc_epsilon: raw.quantity("fpc_epsilon")?.unwrap_or(0.1),
            apc_p_bar: raw.quantity("apc_p_bar")?,
            apc_xi: raw.quantity("apc_xi")?,
        };

        let mut simulation = SimulationSpec::for_config(&net);
        if let Some(n) = raw.count("n_trials")? {
            simulation.n_trials = n;
        }
        if let Some(s) = raw.count("seed")? {
            simulation.seed = s;
        }
        if let Some(w) = raw.quantity("window_radius")? {
            simulation.window_radius = w;
        }
        if let Some(t) = raw.quantity("target_ci")? {
            simulation.target_ci_halfwidth = t;
        }
        if let Some(e) = raw.text("edge_handling") {
            simulation.edge_handling = match e.to_ascii_lowercase().replace('-', "_").as_str() {
                "guard_zone" | "guard" => EdgeHandling::GuardZone,
                "torus" => EdgeHandling::Torus,
                other => {
                    return Err(CliError::Usage(format!(
                        "edge_handling: unknown mode '{other}' (guard_zone, torus)"
                    )))
                }
            };
        }
        simulation
            .validate(&net)
            .map_err(|e| CliError::Usage(e.to_string()))?;

        let distance = raw.quantity("distance")?;
        if let Some(r) = distance {
            if !(r > 0.0 && r.is_finite()) {
                return Err(CliError::Usage(format!("distance: must be positive, got {r}")));
            }
        }

        let dl_demand = raw.quantity("dl_demand")?.unwrap_or(1.0);
        let ul_demand = raw.quantity("ul_demand")?.unwrap_or(1.0);
        let objective = match raw.text("objective").unwrap_or("max_min").to_ascii_lowercase().as_str() {
            "max_min" | "max_min_rate" => Objective::MaxMinRate { dl_demand, ul_demand },
            "max_ase" | "ase" => Objective::MaxAse,
            "max_ee" | "ee" => Objective::MaxEe,
            other => {
                return Err(CliError::Usage(format!(
                    "objective: unknown objective '{other}' (max_min, max_ase, max_ee)"
                )))
            }
        };
        let optimize = OptimizeSettings {
            objective,
            grid_points: usize_of(raw, "grid_points", 32)?,
            tolerance: raw.quantity("tolerance")?.unwrap_or(1e-3),
        };

        let run = Self {
            command: raw.command(),
            network: net,
            schemes,
            params,
            kinds,
            simulation,
            distance,
            optimize,
            validate_points: usize_of(raw, "validate_points", 8)?,
            output: raw.text("output").filter(|s| !s.is_empty()).map(PathBuf::from),
        };
        for choice in &run.schemes {
            if let SchemeChoice::Family(f) = choice {
                run.scheme(*f)?;
            }
        }
        Ok(run)
    }

    /// Concrete scheme of a family, checked against the network.
    pub fn scheme(&self, family: SchemeFamily) -> Result<PowerControlScheme, CliError> {
        let p = &self.params;
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| CliError::Usage(format!("scheme {} needs {key}", family.as_str())))
        };
        let scheme = match family {
            SchemeFamily::Cpc => PowerControlScheme::Cpc,
            SchemeFamily::Upc => PowerControlScheme::Upc {
                p_min: p.upc_p_min.unwrap_or(self.network.p_min),
                p_max: p.upc_p_max.unwrap_or(self.network.p_max),
            },
            SchemeFamily::Fpc => PowerControlScheme::Fpc {
                p_bar: need(p.fpc_p_bar, "fpc_p_bar")?,
                epsilon: p.fpc_epsilon,
            },
            SchemeFamily::Apc => PowerControlScheme::Apc {
                p_bar: need(p.apc_p_bar, "apc_p_bar")?,
                xi: need(p.apc_xi, "apc_xi")?,
            },
        };
        scheme.validate(&self.network).map_err(|e| {
            let crate::error::SchemeError::Parameter { scheme, name, .. } = &e;
            let key = format!("{scheme}_{name}");
            match lookup(&key) {
                Some(k) => CliError::Usage(format!("{}: {e}", k.name)),
                None => CliError::Usage(e.to_string()),
            }
        })?;
        Ok(scheme)
    }

    pub fn evaluation(&self, kind: EngineKind) -> Evaluation {
        match kind {
            EngineKind::Analytic(k) => Evaluation::Analytic(k),
            EngineKind::MonteCarlo => Evaluation::MonteCarlo(self.simulation),
        }
    }

    /// SHA-256 over every resolved setting except the output path.
    pub fn hash(&self, extra: &str) -> String {
        let mut text = String::new();
        let _ = write!(
            text,
            "{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{extra}",
            self.command,
            self.network,
            self.schemes,
            self.params,
            self.kinds,
            self.simulation,
            self.distance,
            self.optimize,
            self.validate_points,
            self.network.thresholds(),
        );
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(pairs: &[(&str, &str)]) -> RawConfig {
        let mut r = RawConfig::new(Subcommand::Analyze);
        for (k, v) in pairs {
            r.set(k, v).unwrap();
        }
        r
    }

    #[test]
    fn defaults_match_network_defaults() {
        let run = RunConfig::resolve(&raw(&[])).unwrap();
        assert_eq!(run.network, NetworkConfig::default());
        assert_eq!(run.schemes, vec![SchemeChoice::Family(SchemeFamily::Cpc)]);
        assert_eq!(run.kinds, vec![EngineKind::Analytic(BoundKind::Lower)]);
    }

    #[test]
    fn thresholds_override_rates() {
        let run = RunConfig::resolve(&raw(&[("theta", "0 dB")])).unwrap();
        let (tb, tu) = run.network.thresholds();
        assert!((tb - 1.0).abs() < 1e-12 && (tu - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_parameter_is_named() {
        let err = RunConfig::resolve(&raw(&[("scheme", "cpc,apc"), ("apc_xi", "0.5")])).unwrap_err();
        assert!(err.message().contains("apc_p_bar"), "{}", err.message());
        let err = RunConfig::resolve(&raw(&[("scheme", "apc"), ("apc_p_bar", "1"), ("apc_xi", "2")])).unwrap_err();
        assert!(err.message().contains("apc_xi"), "{}", err.message());
    }

    #[test]
    fn alpha_at_two_is_rejected() {
        assert!(RunConfig::resolve(&raw(&[("alpha", "2")])).is_err());
        assert!(RunConfig::resolve(&raw(&[("alpha", "2.05")])).is_ok());
    }

    #[test]
    fn hash_ignores_output_and_spelling() {
        let a = RunConfig::resolve(&raw(&[("p_max", "2 W"), ("output", "a.csv")])).unwrap();
        let b = RunConfig::resolve(&raw(&[("p_max", "2000 mW")])).unwrap();
        let c = RunConfig::resolve(&raw(&[("p_max", "1 W")])).unwrap();
        assert_eq!(a.hash(""), b.hash(""));
        assert_ne!(a.hash(""), c.hash(""));
        assert_eq!(a.hash("").len(), 64);
    }
}
