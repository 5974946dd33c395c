//! `analyze`, `sweep` and `optimize`.

use std::collections::HashMap;
use std::io::Write;

use crate::analytic::{hd_report, Analyzer, DuplexMode};
use crate::model::PerformanceReport;
use crate::montecarlo::{estimate_hd_report, estimate_report, SimulationMode, Simulator};
use crate::optimizer::{crossover_distance, fd_hd_rates, optimize as run_optimizer, OptimizationProblem, SchemeFamily};
use crate::power_control::PowerControlScheme;

use super::keys::{lookup, parse_quantity, RawConfig};
use super::output::{emit, Cell, Metadata, Table};
use super::run_config::{EngineKind, RunConfig, SchemeChoice};
use super::CliError;

fn metadata(run: &RunConfig, extra: &str) -> Metadata {
    Metadata {
        config_hash: run.hash(extra),
        seed: run.simulation.seed,
        command: run.command.name(),
    }
}

pub(super) fn report(run: &RunConfig, choice: SchemeChoice, kind: EngineKind) -> Result<PerformanceReport, CliError> {
    let net = &run.network;
    Ok(match (choice, kind) {
        (SchemeChoice::Hd, EngineKind::Analytic(_)) => hd_report(net),
        (SchemeChoice::Hd, EngineKind::MonteCarlo) => estimate_hd_report(net, &run.simulation)?,
        (SchemeChoice::Family(f), EngineKind::Analytic(k)) => Analyzer::new(net, &run.scheme(f)?)?.report(k)?,
        (SchemeChoice::Family(f), EngineKind::MonteCarlo) => estimate_report(net, &run.scheme(f)?, &run.simulation)?,
    })
}

/// HD sum rate with the serving link frozen at `r`.
fn hd_rate_at(run: &RunConfig, kind: EngineKind, r: f64) -> Result<f64, CliError> {
    let net = &run.network;
    Ok(match kind {
        EngineKind::Analytic(k) => Analyzer::new(net, &PowerControlScheme::Cpc)?.rate_given_distance(r, k, DuplexMode::Half)?,
        EngineKind::MonteCarlo => Simulator::new(net, &PowerControlScheme::Cpc, &run.simulation)?
            .at_distance(r)?
            .with_mode(SimulationMode::HalfDuplex)
            .report()
            .rate_sum(),
    })
}

/// FD sum rate at `r`; the HD baseline reports its own rate.
fn fd_rate_at(run: &RunConfig, choice: SchemeChoice, kind: EngineKind, r: f64) -> Result<f64, CliError> {
    match choice {
        SchemeChoice::Hd => hd_rate_at(run, kind, r),
        SchemeChoice::Family(f) => Ok(fd_hd_rates(&run.scheme(f)?, &run.network, &run.evaluation(kind), r)?.0),
    }
}

pub(super) fn analyze(run: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut header = vec![
        "scheme", "kind", "p_ul", "p_dl", "rate_ul", "rate_dl", "rate_sum", "ase", "ee", "ci_p_ul", "ci_p_dl",
        "ci_rate_ul", "ci_rate_dl", "ci_ase", "ci_ee",
    ];
    if run.distance.is_some() {
        header.extend(["fd_rate_at_distance", "hd_rate_at_distance"]);
    }
    let mut table = Table::new(header);
    for &choice in &run.schemes {
        for &kind in &run.kinds {
            let r = report(run, choice, kind)?;
            let ci = r.ci_halfwidth;
            let mut row: Vec<Cell> = vec![
                choice.name().into(),
                kind.name().into(),
                r.p_ul.into(),
                r.p_dl.into(),
                r.rate_ul.into(),
                r.rate_dl.into(),
                r.rate_sum().into(),
                r.ase.into(),
                r.ee.into(),
                ci.map(|c| c.p_ul).into(),
                ci.map(|c| c.p_dl).into(),
                ci.map(|c| c.rate_ul).into(),
                ci.map(|c| c.rate_dl).into(),
                ci.map(|c| c.ase).into(),
                ci.map(|c| c.ee).into(),
            ];
            if let Some(d) = run.distance {
                row.push(fd_rate_at(run, choice, kind, d)?.into());
                row.push(hd_rate_at(run, kind, d)?.into());
            }
            table.push(row);
        }
    }
    emit(&table, &metadata(run, ""), run.output.as_deref(), None, stdout, &mut std::io::sink())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Metric {
    PUl,
    PDl,
    RateUl,
    RateDl,
    RateSum,
    Ase,
    Ee,
    FdRate,
    HdRate,
    HdRateSum,
    Crossover,
}

impl Metric {
    const ALL: [Metric; 11] = [
        Metric::PUl,
        Metric::PDl,
        Metric::RateUl,
        Metric::RateDl,
        Metric::RateSum,
        Metric::Ase,
        Metric::Ee,
        Metric::FdRate,
        Metric::HdRate,
        Metric::HdRateSum,
        Metric::Crossover,
    ];

    fn name(self) -> &'static str {
        match self {
            Metric::PUl => "p_ul",
            Metric::PDl => "p_dl",
            Metric::RateUl => "rate_ul",
            Metric::RateDl => "rate_dl",
            Metric::RateSum => "rate_sum",
            Metric::Ase => "ase",
            Metric::Ee => "ee",
            Metric::FdRate => "fd_rate",
            Metric::HdRate => "hd_rate",
            Metric::HdRateSum => "hd_rate_sum",
            Metric::Crossover => "crossover",
        }
    }

    fn from_report(self) -> bool {
        matches!(
            self,
            Metric::PUl | Metric::PDl | Metric::RateUl | Metric::RateDl | Metric::RateSum | Metric::Ase | Metric::Ee
        )
    }

    fn needs_distance(self) -> bool {
        matches!(self, Metric::FdRate | Metric::HdRate)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct SweepSpec {
    axis: &'static str,
    values: Vec<f64>,
    metrics: Vec<Metric>,
}

fn sweep_spec(raw: &RawConfig) -> Result<SweepSpec, CliError> {
    let axis_name = raw
        .text("axis")
        .ok_or_else(|| CliError::Usage("sweep needs axis".into()))?;
    let axis = lookup(axis_name)
        .filter(|k| k.dim.is_numeric() && k.scope == super::keys::Scope::All)
        .ok_or_else(|| {
            let names: Vec<&str> = super::keys::KEYS
                .iter()
                .filter(|k| k.dim.is_numeric() && k.scope == super::keys::Scope::All)
                .map(|k| k.name)
                .collect();
            CliError::Usage(format!("axis: '{axis_name}' cannot be swept (one of {})", names.join(", ")))
        })?;
    let bound = |key: &str| -> Result<f64, CliError> {
        let text = raw
            .text(key)
            .ok_or_else(|| CliError::Usage(format!("sweep needs {key}")))?;
        parse_quantity(text, axis.dim).map_err(|e| CliError::Usage(format!("{key}: {e}")))
    };
    let (from, to) = (bound("from")?, bound("to")?);
    let points = raw.count("points")?.unwrap_or(11);
    if points == 0 {
        return Err(CliError::Usage("points: must be at least 1".into()));
    }
    let log = match raw.text("scale").unwrap_or("linear").to_ascii_lowercase().as_str() {
        "linear" | "lin" => false,
        "log" => true,
        other => return Err(CliError::Usage(format!("scale: unknown scale '{other}' (linear, log)"))),
    };
    if log && !(from > 0.0 && to > 0.0) {
        return Err(CliError::Usage("scale: log sweeps need positive from and to".into()));
    }
    let n = points as usize;
    let values = (0..n)
        .map(|i| {
            if n == 1 {
                return from;
            }
            let t = i as f64 / (n - 1) as f64;
            if i == n - 1 {
                to
            } else if log {
                (from.ln() + t * (to.ln() - from.ln())).exp()
            } else {
                from + t * (to - from)
            }
        })
        .collect();
    let metrics = raw
        .text("metrics")
        .unwrap_or("p_ul,p_dl")
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let s = s.trim().to_ascii_lowercase();
            Metric::ALL
                .into_iter()
                .find(|m| m.name() == s)
                .ok_or_else(|| {
                    let names: Vec<&str> = Metric::ALL.iter().map(|m| m.name()).collect();
                    CliError::Usage(format!("metrics: unknown metric '{s}' (one of {})", names.join(", ")))
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if metrics.is_empty() {
        return Err(CliError::Usage("metrics: at least one metric is needed".into()));
    }
    Ok(SweepSpec {
        axis: axis.name,
        values,
        metrics,
    })
}

/// Metrics of one sweep point, computing each report or rate at most once.
struct PointEval<'a> {
    run: &'a RunConfig,
    reports: HashMap<(&'static str, &'static str), PerformanceReport>,
}

impl<'a> PointEval<'a> {
    fn value(&mut self, metric: Metric, choice: SchemeChoice, kind: EngineKind) -> Result<Option<f64>, CliError> {
        let run = self.run;
        if metric.from_report() {
            let key = (choice.name(), kind.name());
            if !self.reports.contains_key(&key) {
                self.reports.insert(key, report(run, choice, kind)?);
            }
            let r = &self.reports[&key];
            return Ok(Some(match metric {
                Metric::PUl => r.p_ul,
                Metric::PDl => r.p_dl,
                Metric::RateUl => r.rate_ul,
                Metric::RateDl => r.rate_dl,
                Metric::RateSum => r.rate_sum(),
                Metric::Ase => r.ase,
                _ => r.ee,
            }));
        }
        let distance = || run.distance.ok_or_else(|| CliError::Usage(format!("metric {} needs distance", metric.name())));
        Ok(match metric {
            Metric::FdRate => Some(fd_rate_at(run, choice, kind, distance()?)?),
            Metric::HdRate => Some(hd_rate_at(run, kind, distance()?)?),
            Metric::HdRateSum => {
                let key = ("hd", kind.name());
                if !self.reports.contains_key(&key) {
                    self.reports.insert(key, report(run, SchemeChoice::Hd, kind)?);
                }
                Some(self.reports[&key].rate_sum())
            }
            Metric::Crossover => match choice {
                SchemeChoice::Hd => None,
                SchemeChoice::Family(f) => Some(
                    crossover_distance(&run.scheme(f)?, run.network.beta, &run.network, &run.evaluation(kind))?
                        .distance(),
                ),
            },
            _ => unreachable!("report metrics handled above"),
        })
    }
}

pub(super) fn sweep(run: &RunConfig, raw: &RawConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let spec = sweep_spec(raw)?;
    if run.distance.is_none() && spec.axis != "distance" {
        if let Some(m) = spec.metrics.iter().find(|m| m.needs_distance()) {
            return Err(CliError::Usage(format!("metric {} needs distance", m.name())));
        }
    }
    let mut header = vec![spec.axis.to_string()];
    for m in &spec.metrics {
        for choice in &run.schemes {
            for kind in &run.kinds {
                header.push(format!("{}:{}:{}", m.name(), choice.name(), kind.name()));
            }
        }
    }
    let mut table = Table::new(header);
    for &x in &spec.values {
        let mut point_raw = raw.clone();
        point_raw.set(spec.axis, &format!("{x:e}"))?;
        let point = RunConfig::resolve(&point_raw)?;
        let mut eval = PointEval {
            run: &point,
            reports: HashMap::new(),
        };
        let mut row = vec![Cell::from(x)];
        for &m in &spec.metrics {
            for &choice in &run.schemes {
                for &kind in &run.kinds {
                    row.push(eval.value(m, choice, kind)?.into());
                }
            }
        }
        table.push(row);
    }
    let extra = format!("{spec:?}");
    emit(&table, &metadata(run, &extra), run.output.as_deref(), None, stdout, &mut std::io::sink())
}

pub(super) fn optimize(run: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let family = match run.schemes.as_slice() {
        [SchemeChoice::Family(f)] => *f,
        _ => return Err(CliError::Usage("scheme: optimize takes exactly one of cpc, upc, fpc, apc".into())),
    };
    let kind = match run.kinds.as_slice() {
        [k] => *k,
        _ => return Err(CliError::Usage("kind: optimize takes exactly one engine".into())),
    };
    let mut problem = OptimizationProblem::new(family, &run.network, run.optimize.objective)
        .with_evaluation(run.evaluation(kind))
        .with_grid_points(run.optimize.grid_points);
    problem.tolerance = run.optimize.tolerance;
    let result = run_optimizer(&problem, &run.network)?;

    let names = family.parameter_names();
    let mut header = vec!["step".to_string()];
    header.extend(names.iter().map(|n| n.to_string()));
    header.extend(["objective", "rate_ul", "rate_dl", "mean_power"].map(String::from));
    let mut trace = Table::new(header.clone());
    for (i, t) in result.trace.iter().enumerate() {
        let mut row = vec![Cell::from(i.to_string())];
        row.extend(t.params.iter().map(|&p| Cell::from(p)));
        row.extend([t.value, t.rate_ul, t.rate_dl, t.mean_power].map(Cell::from));
        trace.push(row);
    }
    header[0] = "scheme".into();
    let mut best = Table::new(header);
    let b = &result.best;
    let mut row = vec![Cell::from(summary_name(family))];
    row.extend(b.params.iter().map(|&p| Cell::from(p)));
    row.extend([b.value, b.rate_ul, b.rate_dl, b.mean_power].map(Cell::from));
    best.push(row);
    emit(&trace, &metadata(run, ""), run.output.as_deref(), Some(&best), stdout, stderr)
}

fn summary_name(family: SchemeFamily) -> String {
    format!("{} (best)", family.as_str())
}
