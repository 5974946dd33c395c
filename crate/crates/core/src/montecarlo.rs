//! Monte-Carlo estimator over full network realizations.
//!
//! Every trial places a typical pair with its UE at the origin and its BS at
//! the serving link distance, drops the other active pairs as a Poisson field
//! of density `λ_b` in the simulation window, and draws fresh Rayleigh fading
//! on every link. The typical pair never interferes with itself.
//!
//! Trial `k` runs on ChaCha stream `k` of the configured seed, and trials are
//! folded in fixed-size chunks merged in index order, so estimates are
//! bit-identical whatever the thread count.

use std::f64::consts::PI;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    sample_link_distance, NetworkConfig, PerformanceReport, ReportCi, ReportSource,
};
use crate::power_control::{sample_power, PowerControlScheme};
use crate::stats::EstimateWithCi;

pub type Point = [f64; 2];

/// Fraction of the window radius kept clear around the receivers.
pub const GUARD_FRACTION: f64 = 0.2;

const CHUNK: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeHandling {
    /// Disk window centred on the typical UE; receivers must stay within
    /// `(1 − GUARD_FRACTION)` of its radius.
    GuardZone,
    /// Square of side `2·window_radius` with wrap-around distances.
    Torus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Ul,
    Dl,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSpec {
    pub window_radius: f64,
    pub n_trials: u64,
    pub seed: u64,
    pub edge_handling: EdgeHandling,
    /// Coverage estimates keep adding trials, up to four times `n_trials`,
    /// until their half-width is at most this. Zero disables the extension.
    pub target_ci_halfwidth: f64,
}

impl SimulationSpec {
    pub const DEFAULT_TRIALS: u64 = 37_000;
    pub const DEFAULT_SEED: u64 = 0x5eed_f00d;

    pub fn for_config(config: &NetworkConfig) -> Self {
        Self {
            window_radius: Self::min_window(config),
            n_trials: Self::DEFAULT_TRIALS,
            seed: Self::DEFAULT_SEED,
            edge_handling: EdgeHandling::GuardZone,
            target_ci_halfwidth: 0.005,
        }
    }

    pub fn min_window(config: &NetworkConfig) -> f64 {
        10.0 / config.lambda_bs.sqrt()
    }

    pub fn with_trials(self, n_trials: u64) -> Self {
        Self { n_trials, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_window(self, window_radius: f64) -> Self {
        Self {
            window_radius,
            ..self
        }
    }

    pub fn with_edge_handling(self, edge_handling: EdgeHandling) -> Self {
        Self {
            edge_handling,
            ..self
        }
    }

    pub fn with_target(self, target_ci_halfwidth: f64) -> Self {
        Self {
            target_ci_halfwidth,
            ..self
        }
    }

    pub fn validate(&self, config: &NetworkConfig) -> Result<()> {
        let min = Self::min_window(config);
        if !(self.window_radius >= min * (1.0 - 1e-12)) {
            return Err(Error::Simulation(format!(
                "window_radius {} m is below the minimum 10/sqrt(lambda_bs) = {min} m",
                self.window_radius
            )));
        }
        if self.n_trials == 0 {
            return Err(Error::Simulation("n_trials must be at least 1".into()));
        }
        if !(self.target_ci_halfwidth >= 0.0) {
            return Err(Error::Simulation(format!(
                "target_ci_halfwidth must be non-negative, got {}",
                self.target_ci_halfwidth
            )));
        }
        Ok(())
    }

    fn area(&self) -> f64 {
        match self.edge_handling {
            EdgeHandling::GuardZone => PI * self.window_radius * self.window_radius,
            EdgeHandling::Torus => 4.0 * self.window_radius * self.window_radius,
        }
    }
}

/// One network realization. Index 0 is the typical pair, whose UE sits at
/// the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub bs_positions: Vec<Point>,
    /// Position of each BS's paired UE.
    pub ue_positions: Vec<Point>,
    pub link_distances: Vec<f64>,
    pub powers: Vec<f64>,
    /// BS transmitting; a sleeping BS has power 0.
    pub active: Vec<bool>,
    pub ue_active: Vec<bool>,
    /// Half side of the torus, when distances wrap.
    pub torus_half_side: Option<f64>,
}

impl Deployment {
    pub const TYPICAL: usize = 0;

    pub fn len(&self) -> usize {
        self.bs_positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bs_positions.is_empty()
    }

    pub fn interferer_count(&self) -> usize {
        self.len().saturating_sub(1)
    }

    fn distance_sq(&self, a: Point, b: Point) -> f64 {
        let (mut dx, mut dy) = (a[0] - b[0], a[1] - b[1]);
        if let Some(h) = self.torus_half_side {
            let side = 2.0 * h;
            dx -= side * (dx / side).round();
            dy -= side * (dy / side).round();
        }
        dx * dx + dy * dy
    }
}

fn polar(r: f64, angle: f64) -> Point {
    [r * angle.cos(), r * angle.sin()]
}

fn wrap(p: Point, half: f64) -> Point {
    let side = 2.0 * half;
    [
        p[0] - side * (p[0] / side).round(),
        p[1] - side * (p[1] / side).round(),
    ]
}

fn ue_on(scheme: &PowerControlScheme, config: &NetworkConfig, power: f64) -> bool {
    power > 0.0 || !matches!(scheme, PowerControlScheme::Apc { .. }) || config.apc_ue_always_on
}

/// Samples one realization. `serving_distance` freezes the typical link;
/// otherwise it is drawn from the nearest-BS law.
pub fn sample_deployment<R: Rng + ?Sized>(
    config: &NetworkConfig,
    scheme: &PowerControlScheme,
    spec: &SimulationSpec,
    serving_distance: Option<f64>,
    rng: &mut R,
) -> Deployment {
    let r0 = match serving_distance {
        Some(r) => r,
        None => sample_link_distance(rng, config.lambda_bs),
    };
    let angle0 = 2.0 * PI * rng.random::<f64>();
    let p0 = sample_power(scheme, config, r0, rng);
    let lambda_b = config.active_density().lambda_b;
    let mean_count = lambda_b * spec.area();
    let count = if mean_count > 0.0 {
        Poisson::new(mean_count)
            .map(|d| d.sample(rng) as usize)
            .unwrap_or(0)
    } else {
        0
    };
    let torus = matches!(spec.edge_handling, EdgeHandling::Torus).then_some(spec.window_radius);

    let n = count + 1;
    let mut dep = Deployment {
        bs_positions: Vec::with_capacity(n),
        ue_positions: Vec::with_capacity(n),
        link_distances: Vec::with_capacity(n),
        powers: Vec::with_capacity(n),
        active: Vec::with_capacity(n),
        ue_active: Vec::with_capacity(n),
        torus_half_side: torus,
    };
    let mut push = |bs: Point, ue: Point, r: f64, p: f64| {
        dep.bs_positions.push(bs);
        dep.ue_positions.push(ue);
        dep.link_distances.push(r);
        dep.powers.push(p);
        dep.active.push(p > 0.0);
        dep.ue_active.push(ue_on(scheme, config, p));
    };
    push(polar(r0, angle0), [0.0, 0.0], r0, p0);

    let w = spec.window_radius;
    for _ in 0..count {
        let bs = match torus {
            None => polar(w * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>()),
            Some(h) => [h * (2.0 * rng.random::<f64>() - 1.0), h * (2.0 * rng.random::<f64>() - 1.0)],
        };
        let r = sample_link_distance(rng, config.lambda_bs);
        let offset = polar(r, 2.0 * PI * rng.random::<f64>());
        let mut ue = [bs[0] + offset[0], bs[1] + offset[1]];
        if let Some(h) = torus {
            ue = wrap(ue, h);
        }
        let p = sample_power(scheme, config, r, rng);
        push(bs, ue, r, p);
    }
    dep
}

/// Sum of faded received powers at `receiver` from every pair except
/// `exclude`. `fading` is called once per transmitting node, BS before UE,
/// in pair order.
pub fn aggregate_interference<F: FnMut() -> f64>(
    dep: &Deployment,
    receiver: Point,
    exclude: usize,
    config: &NetworkConfig,
    mut fading: F,
) -> f64 {
    let half_alpha = 0.5 * config.alpha;
    let mut total = 0.0;
    for i in 0..dep.len() {
        if i == exclude {
            continue;
        }
        if dep.active[i] {
            let d2 = dep.distance_sq(dep.bs_positions[i], receiver);
            total += dep.powers[i] * fading() / d2.powf(half_alpha);
        }
        if dep.ue_active[i] {
            let d2 = dep.distance_sq(dep.ue_positions[i], receiver);
            total += config.p_ue * fading() / d2.powf(half_alpha);
        }
    }
    total
}

/// Interference at `receiver` when every other BS transmits at `p_max` and
/// UEs are silent.
fn bs_only_interference<F: FnMut() -> f64>(
    dep: &Deployment,
    receiver: Point,
    config: &NetworkConfig,
    mut fading: F,
) -> f64 {
    let half_alpha = 0.5 * config.alpha;
    (1..dep.len())
        .map(|i| {
            let d2 = dep.distance_sq(dep.bs_positions[i], receiver);
            config.p_max * fading() / d2.powf(half_alpha)
        })
        .sum()
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Per-trial outcome of the typical pair.
#[derive(Debug, Clone, Copy, Default)]
struct Outcome {
    ul_ok: bool,
    dl_ok: bool,
    /// Typical BS transmitting this slot.
    awake: bool,
    /// Actual transmit power of the typical BS.
    power: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn add(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(&mut self, o: Moments) {
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    fn estimate(&self, n: u64) -> EstimateWithCi {
        EstimateWithCi::from_moments(self.sum, self.sum_sq, n)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    n: u64,
    ul_ok: u64,
    dl_ok: u64,
    rate_ul: Moments,
    rate_dl: Moments,
    rate_sum: Moments,
    ee: Moments,
}

impl Tally {
    fn merge(&mut self, o: Tally) {
        self.n += o.n;
        self.ul_ok += o.ul_ok;
        self.dl_ok += o.dl_ok;
        self.rate_ul.merge(o.rate_ul);
        self.rate_dl.merge(o.rate_dl);
        self.rate_sum.merge(o.rate_sum);
        self.ee.merge(o.ee);
    }
}

/// Which network the trials simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulationMode {
    FullDuplex,
    /// BS-only interference at full power and no self-interference; each
    /// direction is tested against its own threshold.
    HalfDuplex,
}

/// Monte-Carlo driver for one (configuration, scheme, spec) triple.
#[derive(Debug, Clone)]
pub struct Simulator {
    config: NetworkConfig,
    scheme: PowerControlScheme,
    spec: SimulationSpec,
    serving_distance: Option<f64>,
    mode: SimulationMode,
    seed_bytes: [u8; 32],
}

impl Simulator {
    pub fn new(config: &NetworkConfig, scheme: &PowerControlScheme, spec: &SimulationSpec) -> Result<Self> {
        config.validate()?;
        scheme.validate(config)?;
        spec.validate(config)?;
        Ok(Self {
            config: config.clone(),
            scheme: *scheme,
            spec: *spec,
            serving_distance: None,
            mode: SimulationMode::FullDuplex,
            seed_bytes: ChaCha8Rng::seed_from_u64(spec.seed).get_seed(),
        })
    }

    /// Freezes the typical link distance.
    pub fn at_distance(mut self, r: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Simulation(format!("serving distance must be finite and non-negative, got {r}")));
        }
        if self.spec.edge_handling == EdgeHandling::GuardZone
            && r > (1.0 - GUARD_FRACTION) * self.spec.window_radius
        {
            return Err(Error::Simulation(format!(
                "serving distance {r} m leaves the guard zone of a {} m window",
                self.spec.window_radius
            )));
        }
        self.serving_distance = Some(r);
        Ok(self)
    }

    pub fn with_mode(mut self, mode: SimulationMode) -> Self {
        self.mode = mode;
        self
    }

    fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.seed_bytes);
        rng.set_stream(trial);
        rng
    }

    fn deployment(&self, rng: &mut ChaCha8Rng) -> Deployment {
        sample_deployment(&self.config, &self.scheme, &self.spec, self.serving_distance, rng)
    }

    /// Folds trials `range` in fixed chunks merged in index order.
    fn fold<A, T, M>(&self, range: Range<u64>, trial: T, merge: M) -> A
    where
        A: Default + Send,
        T: Fn(&mut A, u64) + Sync,
        M: Fn(&mut A, A),
    {
        let chunks: Vec<Range<u64>> = (range.start..range.end)
            .step_by(CHUNK as usize)
            .map(|s| s..(s + CHUNK).min(range.end))
            .collect();
        let parts: Vec<A> = chunks
            .into_par_iter()
            .map(|c| {
                let mut acc = A::default();
                for k in c {
                    trial(&mut acc, k);
                }
                acc
            })
            .collect();
        let mut total = A::default();
        for p in parts {
            merge(&mut total, p);
        }
        total
    }

    fn outcome(&self, trial: u64) -> Outcome {
        let cfg = &self.config;
        let mut rng = self.rng(trial);
        let dep = self.deployment(&mut rng);
        let t = Deployment::TYPICAL;
        let r0 = dep.link_distances[t];
        let x0 = dep.bs_positions[t];
        let p0 = dep.powers[t];
        let path = r0.powf(-cfg.alpha);
        let (theta_b, theta_u) = cfg.thresholds();

        if self.mode == SimulationMode::HalfDuplex {
            let h: f64 = exp1(&mut rng);
            let i = bs_only_interference(&dep, [0.0, 0.0], cfg, || exp1(&mut rng));
            let signal = cfg.p_max * h * path;
            return Outcome {
                ul_ok: signal > theta_b * i,
                dl_ok: signal > theta_u * i,
                awake: true,
                power: cfg.p_max,
            };
        }

        // APC's DL and a silenced UE's UL are conditioned on the BS being awake.
        let (p_dl, p_si) = match self.scheme {
            PowerControlScheme::Apc { p_bar, .. } => {
                (p_bar, if cfg.apc_ue_always_on { p0 } else { p_bar })
            }
            _ => (p0, p0),
        };
        let h_dl: f64 = exp1(&mut rng);
        let i_dl = aggregate_interference(&dep, [0.0, 0.0], t, cfg, || exp1(&mut rng));
        let h_ul: f64 = exp1(&mut rng);
        let i_ul = aggregate_interference(&dep, x0, t, cfg, || exp1(&mut rng));
        Outcome {
            dl_ok: p_dl * h_dl * path > theta_u * (cfg.beta * cfg.p_ue + i_dl),
            ul_ok: cfg.p_ue * h_ul * path > theta_b * (cfg.beta * p_si + i_ul),
            awake: p0 > 0.0,
            power: p0,
        }
    }

    fn tally_trial(&self, acc: &mut Tally, trial: u64) {
        let cfg = &self.config;
        let o = self.outcome(trial);
        if self.mode == SimulationMode::HalfDuplex {
            // Each direction gets half the slots; radios are on half the time.
            let x_ul = if o.ul_ok { 0.5 * cfg.rate_bs } else { 0.0 };
            let x_dl = if o.dl_ok { 0.5 * cfg.rate_ue } else { 0.0 };
            acc.n += 1;
            acc.ul_ok += o.ul_ok as u64;
            acc.dl_ok += o.dl_ok as u64;
            acc.rate_ul.add(x_ul);
            acc.rate_dl.add(x_dl);
            acc.rate_sum.add(x_ul + x_dl);
            acc.ee.add((x_ul + x_dl) / (0.5 * (cfg.p_max + cfg.p_ue) + cfg.p_static));
            return;
        }
        let apc = matches!(self.scheme, PowerControlScheme::Apc { .. });
        let ul_counts = !apc || cfg.apc_ue_always_on || o.awake;
        let dl_counts = !apc || !cfg.apc_rate_includes_xi || o.awake;
        let ue_power = if ul_counts { cfg.p_ue } else { 0.0 };
        let x_ul = if o.ul_ok && ul_counts { cfg.rate_bs } else { 0.0 };
        let x_dl = if o.dl_ok && dl_counts { cfg.rate_ue } else { 0.0 };
        acc.n += 1;
        acc.ul_ok += o.ul_ok as u64;
        acc.dl_ok += o.dl_ok as u64;
        acc.rate_ul.add(x_ul);
        acc.rate_dl.add(x_dl);
        acc.rate_sum.add(x_ul + x_dl);
        acc.ee.add((x_ul + x_dl) / (o.power + ue_power + cfg.p_static));
    }

    /// Runs `n_trials`, then extends in quarter batches until both coverage
    /// half-widths meet the target or four times `n_trials` have run.
    fn tally(&self) -> Tally {
        let n = self.spec.n_trials;
        let mut t = self.fold(0..n, |a, k| self.tally_trial(a, k), Tally::merge);
        let cap = 4 * n;
        let step = (n / 4).max(1);
        let target = self.spec.target_ci_halfwidth;
        while target > 0.0 && t.n < cap {
            let worst = EstimateWithCi::bernoulli(t.ul_ok, t.n)
                .ci_halfwidth_95
                .max(EstimateWithCi::bernoulli(t.dl_ok, t.n).ci_halfwidth_95);
            if worst <= target {
                break;
            }
            let end = (t.n + step).min(cap);
            let more = self.fold(t.n..end, |a, k| self.tally_trial(a, k), Tally::merge);
            t.merge(more);
        }
        t
    }

    pub fn coverage(&self, direction: Direction) -> EstimateWithCi {
        let t = self.tally();
        match direction {
            Direction::Ul => EstimateWithCi::bernoulli(t.ul_ok, t.n),
            Direction::Dl => EstimateWithCi::bernoulli(t.dl_ok, t.n),
        }
    }

    pub fn report(&self) -> PerformanceReport {
        let t = self.tally();
        let p_ul = EstimateWithCi::bernoulli(t.ul_ok, t.n);
        let p_dl = EstimateWithCi::bernoulli(t.dl_ok, t.n);
        let rate_ul = t.rate_ul.estimate(t.n);
        let rate_dl = t.rate_dl.estimate(t.n);
        let ase = t
            .rate_sum
            .estimate(t.n)
            .scaled(self.config.active_density().lambda_b / self.config.bandwidth_w, 0.0);
        let ee = t.ee.estimate(t.n);
        PerformanceReport {
            p_ul: p_ul.mean,
            p_dl: p_dl.mean,
            rate_ul: rate_ul.mean,
            rate_dl: rate_dl.mean,
            ase: ase.mean,
            ee: ee.mean,
            ci_halfwidth: Some(ReportCi {
                p_ul: p_ul.ci_halfwidth_95,
                p_dl: p_dl.ci_halfwidth_95,
                rate_ul: rate_ul.ci_halfwidth_95,
                rate_dl: rate_dl.ci_halfwidth_95,
                ase: ase.ci_halfwidth_95,
                ee: ee.ci_halfwidth_95,
            }),
            source: ReportSource::MonteCarlo,
        }
    }

    /// FD sum rate with its CI.
    pub fn sum_rate(&self) -> EstimateWithCi {
        let t = self.tally();
        t.rate_sum.estimate(t.n)
    }

    /// `E[exp(−s·I)]` at the typical UE for every `s`, from one shared set of
    /// realizations.
    pub fn laplace_grid(&self, s: &[f64]) -> Vec<EstimateWithCi> {
        let n = self.spec.n_trials;
        let m = s.len();
        let zero = || vec![Moments::default(); m];
        #[derive(Default)]
        struct Acc(Vec<Moments>);
        let acc = self.fold(
            0..n,
            |a: &mut Acc, k| {
                if a.0.is_empty() {
                    a.0 = zero();
                }
                let mut rng = self.rng(k);
                let dep = self.deployment(&mut rng);
                let i = aggregate_interference(&dep, [0.0, 0.0], Deployment::TYPICAL, &self.config, || {
                    exp1(&mut rng)
                });
                for (mo, &sv) in a.0.iter_mut().zip(s) {
                    mo.add(if sv == 0.0 { 1.0 } else { (-sv * i).exp() });
                }
            },
            |total, part| {
                if total.0.is_empty() {
                    total.0 = zero();
                }
                for (t, p) in total.0.iter_mut().zip(part.0) {
                    t.merge(p);
                }
            },
        );
        let mut moments = acc.0;
        if moments.is_empty() {
            moments = zero();
        }
        moments.iter().map(|mo| mo.estimate(n)).collect()
    }
}

pub fn empirical_laplace(
    s: f64,
    config: &NetworkConfig,
    scheme: &PowerControlScheme,
    spec: &SimulationSpec,
) -> Result<EstimateWithCi> {
    Ok(Simulator::new(config, scheme, spec)?.laplace_grid(&[s])[0])
}

pub fn empirical_laplace_grid(
    s: &[f64],
    config: &NetworkConfig,
    scheme: &PowerControlScheme,
    spec: &SimulationSpec,
) -> Result<Vec<EstimateWithCi>> {
    Ok(Simulator::new(config, scheme, spec)?.laplace_grid(s))
}

pub fn estimate_coverage(
    direction: Direction,
    config: &NetworkConfig,
    scheme: &PowerControlScheme,
    spec: &SimulationSpec,
) -> Result<EstimateWithCi> {
    Ok(Simulator::new(config, scheme, spec)?.coverage(direction))
}

/// HD DL coverage: BS-only interference at full power.
pub fn estimate_hd_coverage(config: &NetworkConfig, spec: &SimulationSpec) -> Result<EstimateWithCi> {
    Ok(Simulator::new(config, &PowerControlScheme::Cpc, spec)?
        .with_mode(SimulationMode::HalfDuplex)
        .coverage(Direction::Dl))
}

/// HD report with halved pre-log and half-time transmit power.
pub fn estimate_hd_report(config: &NetworkConfig, spec: &SimulationSpec) -> Result<PerformanceReport> {
    Ok(Simulator::new(config, &PowerControlScheme::Cpc, spec)?
        .with_mode(SimulationMode::HalfDuplex)
        .report())
}

pub fn estimate_report(
    config: &NetworkConfig,
    scheme: &PowerControlScheme,
    spec: &SimulationSpec,
) -> Result<PerformanceReport> {
    Ok(Simulator::new(config, scheme, spec)?.report())
}

/// Fraction of BSs left without any UE when UEs attach to their nearest BS,
/// over `spec.n_trials` joint BS/UE realizations. Only BSs in the inner half
/// of the window are counted; the half-width treats them as independent.
pub fn empirical_idle_fraction(config: &NetworkConfig, spec: &SimulationSpec) -> Result<EstimateWithCi> {
    config.validate()?;
    spec.validate(config)?;
    let sim = Simulator::new(config, &PowerControlScheme::Cpc, spec)?;
    let w = spec.window_radius;
    let inner_sq = (0.5 * w) * (0.5 * w);
    let area = PI * w * w;
    #[derive(Default)]
    struct Acc {
        idle: u64,
        total: u64,
    }
    let acc = sim.fold(
        0..spec.n_trials,
        |a: &mut Acc, k| {
            let mut rng = sim.rng(k);
            let field = |lambda: f64, rng: &mut ChaCha8Rng| -> Vec<Point> {
                let n = Poisson::new(lambda * area).map(|d| d.sample(rng) as usize).unwrap_or(0);
                (0..n)
                    .map(|_| polar(w * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>()))
                    .collect()
            };
            let bss = field(config.lambda_bs, &mut rng);
            let ues = field(config.lambda_ue, &mut rng);
            let mut served = vec![false; bss.len()];
            for u in &ues {
                let nearest = bss
                    .iter()
                    .enumerate()
                    .map(|(i, b)| (i, (b[0] - u[0]).powi(2) + (b[1] - u[1]).powi(2)))
                    .min_by(|x, y| x.1.total_cmp(&y.1));
                if let Some((i, _)) = nearest {
                    served[i] = true;
                }
            }
            for (b, s) in bss.iter().zip(&served) {
                if b[0] * b[0] + b[1] * b[1] <= inner_sq {
                    a.total += 1;
                    a.idle += (!s) as u64;
                }
            }
        },
        |t, p| {
            t.idle += p.idle;
            t.total += p.total;
        },
    );
    Ok(EstimateWithCi::bernoulli(acc.idle, acc.total))
}
