//! `validate`: bound sandwich, monotonicity, and simulation-versus-analysis
//! suites.

use std::fs;
use std::io::Write;

use crate::analytic::{hd_coverage, Analyzer, BoundKind};
use crate::montecarlo::{estimate_hd_report, estimate_report};
use crate::model::NetworkConfig;
use crate::optimizer::SchemeFamily;
use crate::power_control::PowerControlScheme;
use crate::quadrature::{self, QuadratureSpec};
use crate::stats::bernoulli_halfwidth;

use super::output::{Metadata, Table};
use super::run_config::{RunConfig, SchemeChoice};
use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Debug, Clone)]
struct Check {
    suite: &'static str,
    scheme: String,
    case: String,
    value: Option<f64>,
    lower: Option<f64>,
    upper: Option<f64>,
    /// Distance to the nearest acceptance edge; negative when violated.
    gap: Option<f64>,
    status: Status,
    note: String,
}

impl Check {
    fn within(suite: &'static str, scheme: &str, case: String, value: f64, lower: f64, upper: f64) -> Self {
        let gap = (value - lower).min(upper - value);
        Self {
            suite,
            scheme: scheme.to_string(),
            case,
            value: Some(value),
            lower: Some(lower),
            upper: Some(upper),
            gap: Some(gap),
            status: if gap >= 0.0 { Status::Pass } else { Status::Fail },
            note: String::new(),
        }
    }

    fn skipped(suite: &'static str, scheme: &str, case: String, note: String) -> Self {
        Self {
            suite,
            scheme: scheme.to_string(),
            case,
            value: None,
            lower: None,
            upper: None,
            gap: None,
            status: Status::Skip,
            note,
        }
    }
}

fn families(run: &RunConfig) -> Vec<SchemeFamily> {
    let fs: Vec<SchemeFamily> = run
        .schemes
        .iter()
        .filter_map(|c| match c {
            SchemeChoice::Family(f) => Some(*f),
            SchemeChoice::Hd => None,
        })
        .collect();
    if fs.is_empty() {
        vec![SchemeFamily::Cpc]
    } else {
        fs
    }
}

/// Lower bound ≤ exact ≤ upper bound on an s-grid where the lower bound
/// falls from 0.95 to 0.05.
fn sandwich(run: &RunConfig, checks: &mut Vec<Check>) -> Result<(), CliError> {
    for family in families(run) {
        let scheme = run.scheme(family)?;
        let a = Analyzer::new(&run.network, &scheme)?;
        let name = family.as_str();
        let k = -a.laplace_bound(1.0, BoundKind::Lower).ln();
        if !(k > 0.0 && k.is_finite()) {
            checks.push(Check::skipped("sandwich", name, "transform".into(), "no interference".into()));
            continue;
        }
        let d = run.network.delta().value();
        let s_at = |l: f64| (-l.ln() / k).powf(1.0 / d);
        let (s_lo, s_hi) = (s_at(0.95), s_at(0.05));
        let n = run.validate_points.max(1);
        for i in 0..n {
            let t = if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
            let s = (s_lo.ln() + t * (s_hi.ln() - s_lo.ln())).exp();
            let lo = a.laplace_bound(s, BoundKind::Lower);
            let hi = a.laplace_bound(s, BoundKind::Upper);
            let ex = a.laplace_exact(s)?;
            // Quadrature error of the exact transform scales with |ln L|.
            let slack = 1e-3 * ex * ex.ln().abs().max(1e-3);
            let mut c = Check::within("sandwich", name, format!("s={s:.4e}"), ex, lo - slack, hi + slack);
            c.lower = Some(lo);
            c.upper = Some(hi);
            c.gap = Some((ex - lo).min(hi - ex));
            checks.push(c);
        }
    }
    Ok(())
}

/// Records whether `values` move strictly in direction `sign`.
fn monotone(suite: &'static str, scheme: &str, case: String, values: &[f64], sign: f64) -> Check {
    let min_step = values
        .windows(2)
        .map(|w| sign * (w[1] - w[0]))
        .fold(f64::INFINITY, f64::min);
    Check {
        suite,
        scheme: scheme.to_string(),
        case,
        value: Some(min_step),
        lower: values.first().copied(),
        upper: values.last().copied(),
        gap: Some(min_step),
        status: if min_step > 0.0 { Status::Pass } else { Status::Fail },
        note: "value = smallest step in the expected direction".into(),
    }
}

fn coverages(cfg: &NetworkConfig, scheme: &PowerControlScheme, kind: BoundKind) -> Result<(f64, f64), CliError> {
    let a = Analyzer::new(cfg, scheme)?;
    Ok((a.coverage_ul(kind)?, a.coverage_dl(kind)?))
}

fn monotonicity(run: &RunConfig, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let base = &run.network;
    for kind in [BoundKind::Lower, BoundKind::Upper] {
        let tag = kind.as_str();
        let mut ul = Vec::new();
        let mut dl = Vec::new();
        for p in [0.2, 0.5, 1.0, 2.0] {
            let cfg = NetworkConfig {
                p_max: p,
                p_min: base.p_min.min(p),
                ..base.clone()
            };
            let (u, d) = coverages(&cfg, &PowerControlScheme::Cpc, kind)?;
            ul.push(u);
            dl.push(d);
        }
        checks.push(monotone("monotonicity", "cpc", format!("p_dl up in power ({tag})"), &dl, 1.0));
        checks.push(monotone("monotonicity", "cpc", format!("p_ul down in power ({tag})"), &ul, -1.0));

        for family in families(run) {
            let scheme = run.scheme(family)?;
            let name = family.as_str();
            let mut ul = Vec::new();
            let mut dl = Vec::new();
            for beta in [0.0, 1e-12, 1e-10, 1e-8] {
                let (u, d) = coverages(&NetworkConfig { beta, ..base.clone() }, &scheme, kind)?;
                ul.push(u);
                dl.push(d);
            }
            checks.push(monotone("monotonicity", name, format!("p_ul down in beta ({tag})"), &ul, -1.0));
            checks.push(monotone("monotonicity", name, format!("p_dl down in beta ({tag})"), &dl, -1.0));
            let mut ul = Vec::new();
            let mut dl = Vec::new();
            for theta_db in [-3.0, 0.0, 3.0, 6.0] {
                let rate = crate::model::threshold_to_rate(crate::model::db_to_linear(theta_db), base.bandwidth_w);
                let cfg = NetworkConfig {
                    rate_bs: rate,
                    rate_ue: rate,
                    ..base.clone()
                };
                let (u, d) = coverages(&cfg, &scheme, kind)?;
                ul.push(u);
                dl.push(d);
            }
            checks.push(monotone("monotonicity", name, format!("p_ul down in theta ({tag})"), &ul, -1.0));
            checks.push(monotone("monotonicity", name, format!("p_dl down in theta ({tag})"), &dl, -1.0));
        }
    }
    Ok(())
}

/// First-order coverage loss from dropping interferers beyond the window:
/// `E_R[w(R)·min(1, K·θ·R^α)]` with `K` the mean out-of-window interference
/// per unit signal power and `w` a closed-form coverage weight.
fn truncation_bias(
    cfg: &NetworkConfig,
    window: f64,
    theta: f64,
    signal: f64,
    interferer_power: f64,
) -> Result<f64, CliError> {
    let alpha = cfg.alpha;
    let d = cfg.delta().value();
    let lambda_b = cfg.active_density().lambda_b;
    let k = 2.0 * std::f64::consts::PI * lambda_b * interferer_power / signal * window.powf(2.0 - alpha) / (alpha - 2.0);
    let c = lambda_b * cfg.delta().interference_constant() * (theta * interferer_power / signal).powf(d);
    let spec = QuadratureSpec::default().with_rel_tol(1e-6);
    Ok(quadrature::expect_over_link_distance(
        |r| (-c * r * r).exp() * (k * theta * r.powf(alpha)).min(1.0),
        cfg.lambda_bs,
        &spec,
    )
    .map_err(crate::error::Error::from)?
    .value)
}

fn mc_vs_analytic(run: &RunConfig, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let cfg = &run.network;
    let sim = &run.simulation;
    let n = sim.n_trials;
    let (theta_b, theta_u) = cfg.thresholds();
    let window = sim.window_radius;
    let skip_note = |bias: f64, ci: f64| format!("window truncation bias {bias:.3e} exceeds CI half-width {ci:.3e}");

    for family in families(run) {
        let scheme = run.scheme(family)?;
        let name = family.as_str();
        let a = Analyzer::new(cfg, &scheme)?;
        let lo = (a.coverage_ul(BoundKind::Lower)?, a.coverage_dl(BoundKind::Lower)?);
        let hi = (a.coverage_ul(BoundKind::Upper)?, a.coverage_dl(BoundKind::Upper)?);
        let mean_bs = scheme.mean_power(cfg);
        let bias_ul = truncation_bias(cfg, window, theta_b, cfg.p_ue, mean_bs + cfg.p_ue)?;
        let bias_dl = truncation_bias(cfg, window, theta_u, mean_bs.max(f64::MIN_POSITIVE), mean_bs + cfg.p_ue)?;
        let ci_ul = bernoulli_halfwidth(lo.0, n);
        let ci_dl = bernoulli_halfwidth(lo.1, n);
        if bias_ul > ci_ul || bias_dl > ci_dl {
            let (bias, ci) = if bias_ul / ci_ul > bias_dl / ci_dl { (bias_ul, ci_ul) } else { (bias_dl, ci_dl) };
            checks.push(Check::skipped("mc_vs_analytic", name, "p_ul, p_dl in bound bracket".into(), skip_note(bias, ci)));
            continue;
        }
        let r = estimate_report(cfg, &scheme, sim)?;
        let ci = r.ci_halfwidth.unwrap_or_default();
        for (label, value, half, (l, h)) in [
            ("p_ul in bound bracket", r.p_ul, ci.p_ul, (lo.0, hi.0)),
            ("p_dl in bound bracket", r.p_dl, ci.p_dl, (lo.1, hi.1)),
        ] {
            let mut c = Check::within("mc_vs_analytic", name, label.into(), value, l - 2.0 * half, h + 2.0 * half);
            c.note = format!("ci={half:.3e}");
            checks.push(c);
        }
    }

    let hd_ul = hd_coverage(theta_b, cfg);
    let hd_dl = hd_coverage(theta_u, cfg);
    let bias = truncation_bias(cfg, window, theta_b.max(theta_u), cfg.p_max, cfg.p_max)?;
    let ci = bernoulli_halfwidth(hd_ul.min(hd_dl), n);
    if bias > ci {
        checks.push(Check::skipped("mc_vs_analytic", "hd", "coverage vs closed form".into(), skip_note(bias, ci)));
        return Ok(());
    }
    let r = estimate_hd_report(cfg, sim)?;
    let half = r.ci_halfwidth.unwrap_or_default();
    for (label, value, h, exact) in [
        ("p_ul vs closed form", r.p_ul, half.p_ul, hd_ul),
        ("p_dl vs closed form", r.p_dl, half.p_dl, hd_dl),
    ] {
        let mut c = Check::within("mc_vs_analytic", "hd", label.into(), value, exact - 2.0 * h, exact + 2.0 * h);
        c.note = format!("ci={h:.3e} closed_form={exact:.6}");
        checks.push(c);
    }
    Ok(())
}

pub(super) fn validate(run: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut checks = Vec::new();
    sandwich(run, &mut checks)?;
    monotonicity(run, &mut checks)?;
    mc_vs_analytic(run, &mut checks)?;

    let mut table = Table::new([
        "suite", "scheme", "case", "value", "lower", "upper", "gap", "status", "note",
    ]);
    for c in &checks {
        table.push(vec![
            c.suite.into(),
            c.scheme.as_str().into(),
            c.case.as_str().into(),
            c.value.into(),
            c.lower.into(),
            c.upper.into(),
            c.gap.into(),
            c.status.name().into(),
            c.note.as_str().into(),
        ]);
    }
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    let (passed, failed, skipped) = (count(Status::Pass), count(Status::Fail), count(Status::Skip));
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    stdout.write_all(table.to_text().as_bytes()).map_err(io)?;
    writeln!(stdout, "{} checks: {passed} passed, {failed} failed, {skipped} skipped", checks.len()).map_err(io)?;
    if let Some(path) = &run.output {
        let meta = Metadata {
            config_hash: run.hash(""),
            seed: run.simulation.seed,
            command: run.command.name(),
        };
        fs::write(path, table.to_csv(&meta)?)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    if failed > 0 {
        return Err(CliError::Validation(format!("{failed} of {} validation checks failed", checks.len())));
    }
    Ok(())
}
