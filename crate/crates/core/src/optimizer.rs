//! Parameter search over power-control schemes, and the FD-vs-HD crossover
//! and self-interference requirement drivers built on fixed-distance rates.
//!
//! The search evaluates a tensor grid over the scheme's parameter box,
//! refines the best point of every axis-aligned grid line by golden-section
//! search, then runs coordinate-wise golden-section sweeps from the overall
//! best. Ties go to the lower mean transmit power.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::analytic::{Analyzer, BoundKind, DuplexMode};
use crate::error::{Error, Result};
use crate::model::{db_to_linear, linear_to_db, NetworkConfig};
use crate::montecarlo::{SimulationMode, SimulationSpec, Simulator};
use crate::power_control::PowerControlScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeFamily {
    Cpc,
    Upc,
    Fpc,
    Apc,
}

impl SchemeFamily {
    pub const ALL: [SchemeFamily; 4] = [
        SchemeFamily::Cpc,
        SchemeFamily::Upc,
        SchemeFamily::Fpc,
        SchemeFamily::Apc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeFamily::Cpc => "cpc",
            SchemeFamily::Upc => "upc",
            SchemeFamily::Fpc => "fpc",
            SchemeFamily::Apc => "apc",
        }
    }

    /// Names of the free parameters, in box order.
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            SchemeFamily::Cpc => &["power"],
            SchemeFamily::Upc => &["upper", "lower_fraction"],
            SchemeFamily::Fpc => &["epsilon", "p_bar"],
            SchemeFamily::Apc => &["p_bar", "xi"],
        }
    }

    /// Scheme and network configuration at a parameter point. CPC moves the
    /// peak power itself, dragging `p_min` down with it if needed; UPC draws
    /// from `[lower_fraction·upper, upper]`.
    pub fn instantiate(self, params: &[f64], config: &NetworkConfig) -> (PowerControlScheme, NetworkConfig) {
        let mut cfg = config.clone();
        let scheme = match self {
            SchemeFamily::Cpc => {
                cfg.p_max = params[0];
                cfg.p_min = cfg.p_min.min(params[0]);
                PowerControlScheme::Cpc
            }
            SchemeFamily::Upc => PowerControlScheme::Upc {
                p_min: params[1] * params[0],
                p_max: params[0],
            },
            SchemeFamily::Fpc => PowerControlScheme::Fpc {
                epsilon: params[0],
                p_bar: params[1],
            },
            SchemeFamily::Apc => PowerControlScheme::Apc {
                p_bar: params[0],
                xi: params[1],
            },
        };
        (scheme, cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    /// Search on a logarithmic scale; requires `lo > 0`.
    pub log: bool,
}

impl ParamRange {
    pub fn linear(lo: f64, hi: f64) -> Self {
        Self { lo, hi, log: false }
    }

    pub fn log(lo: f64, hi: f64) -> Self {
        Self { lo, hi, log: true }
    }

    fn to_unit(&self, x: f64) -> f64 {
        if self.hi == self.lo {
            return 0.0;
        }
        if self.log {
            (x / self.lo).ln() / (self.hi / self.lo).ln()
        } else {
            (x - self.lo) / (self.hi - self.lo)
        }
    }

    fn from_unit(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        if self.log {
            let x = self.lo * (self.hi / self.lo).powf(t);
            x.clamp(self.lo, self.hi)
        } else {
            (self.lo + t * (self.hi - self.lo)).clamp(self.lo, self.hi)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// `min(rate_ul/ul_demand, rate_dl/dl_demand)`.
    MaxMinRate { dl_demand: f64, ul_demand: f64 },
    MaxAse,
    MaxEe,
}

impl Objective {
    pub fn max_min() -> Self {
        Objective::MaxMinRate {
            dl_demand: 1.0,
            ul_demand: 1.0,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::MaxMinRate { .. } => "max_min_rate",
            Objective::MaxAse => "max_ase",
            Objective::MaxEe => "max_ee",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluation {
    Analytic(BoundKind),
    MonteCarlo(SimulationSpec),
}

impl Evaluation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Evaluation::Analytic(k) => k.as_str(),
            Evaluation::MonteCarlo(_) => "mc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationProblem {
    pub family: SchemeFamily,
    pub ranges: Vec<ParamRange>,
    pub objective: Objective,
    pub evaluation: Evaluation,
    pub grid_points: usize,
    /// Golden-section stopping width as a fraction of each box side.
    pub tolerance: f64,
}

impl OptimizationProblem {
    /// Full parameter box of a family under `config`.
    pub fn new(family: SchemeFamily, config: &NetworkConfig, objective: Objective) -> Self {
        let peak = config.p_max;
        let ranges = match family {
            SchemeFamily::Cpc => vec![ParamRange::log(1e-3 * peak, peak)],
            SchemeFamily::Upc => vec![ParamRange::log(1e-3 * peak, peak), ParamRange::linear(0.0, 1.0)],
            SchemeFamily::Fpc => vec![ParamRange::linear(0.0, 1.0), ParamRange::log(1e-16 * peak, peak)],
            SchemeFamily::Apc => vec![ParamRange::log(1e-3 * peak, peak), ParamRange::linear(0.0, 1.0)],
        };
        Self {
            family,
            ranges,
            objective,
            evaluation: Evaluation::Analytic(BoundKind::Lower),
            grid_points: 32,
            tolerance: 1e-3,
        }
    }

    pub fn with_evaluation(mut self, evaluation: Evaluation) -> Self {
        self.evaluation = evaluation;
        self
    }

    pub fn with_ranges(mut self, ranges: Vec<ParamRange>) -> Self {
        self.ranges = ranges;
        self
    }

    pub fn with_grid_points(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let want = self.family.parameter_names().len();
        if self.ranges.len() != want {
            return Err(Error::Problem(format!(
                "{} takes {want} parameter ranges, got {}",
                self.family.as_str(),
                self.ranges.len()
            )));
        }
        for (r, name) in self.ranges.iter().zip(self.family.parameter_names()) {
            if !(r.lo <= r.hi) || !r.lo.is_finite() || !r.hi.is_finite() {
                return Err(Error::Problem(format!("empty range for {name}: [{}, {}]", r.lo, r.hi)));
            }
            if r.log && !(r.lo > 0.0) {
                return Err(Error::Problem(format!("log range for {name} must start above 0")));
            }
        }
        if self.grid_points == 0 || !(self.tolerance > 0.0) {
            return Err(Error::Problem("grid_points and tolerance must be positive".into()));
        }
        if let Objective::MaxMinRate { dl_demand, ul_demand } = self.objective {
            if !(dl_demand > 0.0 && ul_demand > 0.0) {
                return Err(Error::Problem("rate demands must be positive".into()));
            }
        }
        Ok(())
    }
}

/// One objective evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    pub params: Vec<f64>,
    pub value: f64,
    pub rate_ul: f64,
    pub rate_dl: f64,
    pub mean_power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub family: SchemeFamily,
    pub best: TracePoint,
    pub scheme: PowerControlScheme,
    pub config: NetworkConfig,
    pub trace: Vec<TracePoint>,
}

/// Whether `a` beats `b`: larger value, then smaller mean power.
fn better(a: &TracePoint, b: &TracePoint) -> bool {
    let scale = a.value.abs().max(b.value.abs());
    let tie = (a.value - b.value).abs() <= 1e-12 * scale;
    if tie {
        a.mean_power < b.mean_power
    } else {
        a.value > b.value
    }
}

/// Rates and objective value at one parameter point.
pub fn evaluate(
    problem: &OptimizationProblem,
    config: &NetworkConfig,
    params: &[f64],
) -> Result<TracePoint> {
    let (scheme, cfg) = problem.family.instantiate(params, config);
    let wrap = |e: Error| Error::Objective {
        point: params.to_vec(),
        source: Box::new(e),
    };
    let (rate_ul, rate_dl, ase, ee) = match problem.evaluation {
        Evaluation::Analytic(kind) => {
            let a = Analyzer::new(&cfg, &scheme).map_err(wrap)?;
            match problem.objective {
                Objective::MaxEe => {
                    let r = a.report(kind).map_err(wrap)?;
                    (r.rate_ul, r.rate_dl, r.ase, r.ee)
                }
                _ => {
                    let r = a.fd_sum_rate(kind).map_err(wrap)?;
                    let ase = a.lambda_b() * r.total / cfg.bandwidth_w;
                    (r.rate_ul, r.rate_dl, ase, f64::NAN)
                }
            }
        }
        Evaluation::MonteCarlo(spec) => {
            let r = Simulator::new(&cfg, &scheme, &spec).map_err(wrap)?.report();
            (r.rate_ul, r.rate_dl, r.ase, r.ee)
        }
    };
    let value = match problem.objective {
        Objective::MaxMinRate { dl_demand, ul_demand } => (rate_ul / ul_demand).min(rate_dl / dl_demand),
        Objective::MaxAse => ase,
        Objective::MaxEe => ee,
    };
    if !value.is_finite() {
        return Err(wrap(Error::Problem(format!("objective is not finite: {value}"))));
    }
    Ok(TracePoint {
        params: params.to_vec(),
        value,
        rate_ul,
        rate_dl,
        mean_power: scheme.mean_power(&cfg),
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const MAX_SWEEPS: usize = 8;

pub fn optimize(problem: &OptimizationProblem, config: &NetworkConfig) -> Result<OptimizationResult> {
    problem.validate()?;
    config.validate()?;
    let dims = problem.ranges.len();
    let g = problem.grid_points;
    let axis = |t: usize| if g == 1 { 0.5 } else { t as f64 / (g - 1) as f64 };

    // Grid in unit coordinates, row-major over dimensions.
    let total = g.pow(dims as u32);
    let points: Vec<Vec<f64>> = (0..total)
        .map(|mut k| {
            (0..dims)
                .map(|d| {
                    let t = axis(k % g);
                    k /= g;
                    problem.ranges[d].from_unit(t)
                })
                .collect()
        })
        .collect();
    let mut trace: Vec<TracePoint> = points
        .par_iter()
        .map(|p| evaluate(problem, config, p))
        .collect::<Result<Vec<_>>>()?;

    let cell = if g > 1 { 1.0 / (g - 1) as f64 } else { 0.0 };

    // Refine the best point of every axis-aligned grid line, so a ridge that
    // leaves the grid's best cell cannot hide a better slice.
    if dims > 1 && g > 1 {
        let mut line_best: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (k, point) in trace.iter().enumerate() {
            for d in 0..dims {
                let stride = g.pow(d as u32);
                let line = k - (k / stride % g) * stride;
                let slot = line_best.entry((d, line)).or_insert(k);
                if better(point, &trace[*slot]) {
                    *slot = k;
                }
            }
        }
        let starts: Vec<(usize, Vec<f64>)> = line_best
            .into_iter()
            .map(|((d, _), k)| (d, trace[k].params.clone()))
            .collect();
        let refined = starts
            .par_iter()
            .map(|(d, p)| golden_slice(problem, config, p, *d, cell))
            .collect::<Result<Vec<_>>>()?;
        trace.extend(refined.into_iter().flatten());
    }

    let mut best = best_of(&trace).clone();
    for _ in 0..MAX_SWEEPS {
        let before = best.clone();
        for d in 0..dims {
            trace.extend(golden_slice(problem, config, &best.params, d, cell)?);
            best = best_of(&trace).clone();
        }
        if best == before {
            break;
        }
    }

    let (scheme, cfg) = problem.family.instantiate(&best.params, config);
    Ok(OptimizationResult {
        family: problem.family,
        best,
        scheme,
        config: cfg,
        trace,
    })
}

/// Golden-section search along coordinate `d` within one grid cell either
/// side of `base`; returns every evaluation in order.
fn golden_slice(
    problem: &OptimizationProblem,
    config: &NetworkConfig,
    base: &[f64],
    d: usize,
    cell: f64,
) -> Result<Vec<TracePoint>> {
    let range = problem.ranges[d];
    if range.lo == range.hi {
        return Ok(Vec::new());
    }
    let at = |t: f64| {
        let mut p = base.to_vec();
        p[d] = range.from_unit(t);
        p
    };
    let centre = range.to_unit(base[d]);
    let (mut a, mut b) = ((centre - cell).max(0.0), (centre + cell).min(1.0));
    let mut c = b - INV_PHI * (b - a);
    let mut e = a + INV_PHI * (b - a);
    let mut fc = evaluate(problem, config, &at(c))?;
    let mut fe = evaluate(problem, config, &at(e))?;
    let mut out = vec![fc.clone(), fe.clone()];
    while b - a > problem.tolerance {
        if better(&fe, &fc) {
            a = c;
            c = e;
            fc = fe;
            e = a + INV_PHI * (b - a);
            fe = evaluate(problem, config, &at(e))?;
            out.push(fe.clone());
        } else {
            b = e;
            e = c;
            fe = fc;
            c = b - INV_PHI * (b - a);
            fc = evaluate(problem, config, &at(c))?;
            out.push(fc.clone());
        }
    }
    Ok(out)
}

fn best_of(trace: &[TracePoint]) -> &TracePoint {
    let mut best = &trace[0];
    for t in &trace[1..] {
        if better(t, best) {
            best = t;
        }
    }
    best
}

/// Searched link-distance interval for crossovers (m).
pub const CROSSOVER_RANGE: (f64, f64) = (1.0, 5000.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossover {
    /// FD beats HD below this distance (m).
    At(f64),
    /// HD already wins at the shortest distance searched.
    Never,
    /// FD still wins at the longest distance searched.
    BeyondRange(f64),
}

impl Crossover {
    /// Distance in metres, with `Never` as 0 and an open range as its end.
    pub fn distance(self) -> f64 {
        match self {
            Crossover::At(r) | Crossover::BeyondRange(r) => r,
            Crossover::Never => 0.0,
        }
    }
}

/// Sum rate of FD and HD at a fixed serving distance under one evaluation.
pub fn fd_hd_rates(
    scheme: &PowerControlScheme,
    config: &NetworkConfig,
    evaluation: &Evaluation,
    r: f64,
) -> Result<(f64, f64)> {
    match evaluation {
        Evaluation::Analytic(kind) => {
            let a = Analyzer::new(config, scheme)?;
            Ok((
                a.rate_given_distance(r, *kind, DuplexMode::Full)?,
                a.rate_given_distance(r, *kind, DuplexMode::Half)?,
            ))
        }
        Evaluation::MonteCarlo(spec) => {
            let fd = Simulator::new(config, scheme, spec)?.at_distance(r)?.sum_rate().mean;
            let hd = Simulator::new(config, &PowerControlScheme::Cpc, spec)?
                .at_distance(r)?
                .with_mode(SimulationMode::HalfDuplex)
                .report()
                .rate_sum();
            Ok((fd, hd))
        }
    }
}

/// Largest link distance, to 1 m, below which FD out-rates HD.
pub fn crossover_distance(
    scheme: &PowerControlScheme,
    beta: f64,
    config: &NetworkConfig,
    evaluation: &Evaluation,
) -> Result<Crossover> {
    let cfg = NetworkConfig {
        beta,
        ..config.clone()
    };
    cfg.validate()?;
    let gap = |r: f64| -> Result<f64> {
        let (fd, hd) = fd_hd_rates(scheme, &cfg, evaluation, r)?;
        Ok(fd - hd)
    };
    let (mut lo, mut hi) = CROSSOVER_RANGE;
    if gap(lo)? <= 0.0 {
        return Ok(Crossover::Never);
    }
    if gap(hi)? > 0.0 {
        return Ok(Crossover::BeyondRange(hi));
    }
    while hi - lo > 1.0 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Crossover::At(0.5 * (lo + hi)))
}

/// Searched self-interference range (dB).
pub const SI_RANGE_DB: (f64, f64) = (-300.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SiRequirement {
    /// Any self-interference level meets the target.
    Unbounded,
    /// Largest linear `β` whose crossover reaches the target.
    Beta(f64),
    /// Even the smallest `β` searched falls short.
    Infeasible,
}

/// Weakest self-interference cancellation that keeps FD ahead of HD out to
/// `target_distance`, bisected on `β` in dB to 0.01 dB.
pub fn si_requirement(
    scheme: &PowerControlScheme,
    target_distance: f64,
    config: &NetworkConfig,
    evaluation: &Evaluation,
) -> Result<SiRequirement> {
    if target_distance <= 0.0 {
        return Ok(SiRequirement::Unbounded);
    }
    let reaches = |db: f64| -> Result<bool> {
        Ok(crossover_distance(scheme, db_to_linear(db), config, evaluation)?.distance() >= target_distance)
    };
    let (mut lo, mut hi) = SI_RANGE_DB;
    if reaches(hi)? {
        return Ok(SiRequirement::Beta(db_to_linear(hi)));
    }
    if !reaches(lo)? {
        return Ok(SiRequirement::Infeasible);
    }
    while hi - lo > 0.01 {
        let mid = 0.5 * (lo + hi);
        if reaches(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SiRequirement::Beta(db_to_linear(lo)))
}

impl SiRequirement {
    pub fn beta_db(self) -> Option<f64> {
        match self {
            SiRequirement::Beta(b) => Some(linear_to_db(b)),
            _ => None,
        }
    }
}
