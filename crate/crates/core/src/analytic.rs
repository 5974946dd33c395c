//! Closed-form and quadrature evaluation of the interference Laplace
//! transform, UL/DL coverage, FD and HD rates, area spectrum efficiency and
//! energy efficiency.
//!
//! Both bounds share the form `exp(−λ_b·C(δ)·g·s^δ)` with
//! `C(δ) = π²δ/sin(πδ)`; they differ only in the power functional `g`:
//!
//! * upper (co-located BS/UE pairs): `g = E[(P_u^{1+δ} − P^{1+δ})/(P_u − P)]`
//! * lower (independent BS and UE fields): `g = P_u^δ + E[P^δ]`
//!
//! The exact transform integrates over the displaced-UE geometry:
//!
//! ```text
//! log L(s) = −2πλ_b ∫₀^∞ [ (1 − F(v)) + F(v)·B(v) ] v dv
//! F(v) = E_P[ v^α / (v^α + sP) ]
//! B(v) = (1/π) ∫₀^π ∫₀^∞ s P_u / (d^α + s P_u) · 2πλ r e^{−πλr²} dr dφ
//! d²   = v² + r² + 2vr·cos φ
//! ```
//!
//! which is `1 − F·A` rearranged so that no term suffers cancellation.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, QuadratureError, Result};
use crate::model::{NetworkConfig, PerformanceReport, ReportSource};
use crate::power_control::{
    compound_moment, fpc_power, marginal_distribution, moment_delta, MixedPowerDistribution,
    PowerControlScheme,
};
use crate::quadrature::{self, QuadratureSpec, SemiInfiniteMap};

/// Which Laplace-transform evaluation backs a metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Upper,
    Lower,
    Exact,
}

impl BoundKind {
    pub const ALL: [BoundKind; 3] = [BoundKind::Lower, BoundKind::Upper, BoundKind::Exact];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Upper => "upper",
            BoundKind::Lower => "lower",
            BoundKind::Exact => "exact",
        }
    }

    pub fn report_source(self) -> ReportSource {
        match self {
            BoundKind::Upper => ReportSource::BoundUpper,
            BoundKind::Lower => ReportSource::BoundLower,
            BoundKind::Exact => ReportSource::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DuplexMode {
    Full,
    Half,
}

/// Geometry of an interfering UE relative to its BS.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkModel {
    /// UE displaced from its BS by a Rayleigh link distance.
    Displaced,
    /// UE on top of its BS.
    CoLocated,
    /// UE field independent of the BS field.
    Independent,
}

/// Argument of the interference Laplace transform for one network.
#[derive(Debug, Clone, Copy)]
pub struct LaplaceQuery<'a> {
    pub s: f64,
    pub config: &'a NetworkConfig,
    pub scheme: &'a PowerControlScheme,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticOptions {
    /// One-dimensional expectations (link distance, serving power).
    pub one_dim: QuadratureSpec,
    /// Outer integral of the exact transform and the link-distance average
    /// wrapped around it.
    pub exact_outer: QuadratureSpec,
    /// Mark-geometry average inside the exact transform.
    pub exact_inner: QuadratureSpec,
    /// Use `E[exp(−cR²)] = πλ/(πλ + c)` when the exponent is quadratic in R.
    pub rayleigh_shortcut: bool,
}

impl Default for AnalyticOptions {
    fn default() -> Self {
        let base = QuadratureSpec::default().with_abs_tol(1e-300);
        Self {
            one_dim: base.with_rel_tol(1e-10),
            exact_outer: base.with_rel_tol(1e-4),
            exact_inner: base.with_rel_tol(1e-5),
            rayleigh_shortcut: true,
        }
    }
}

/// Exponents below this get [`AnalyticOptions::widened`] budgets by default.
pub const NEAR_SINGULAR_ALPHA: f64 = 2.5;

impl AnalyticOptions {
    /// Defaults, widened when `alpha` is close to 2.
    pub fn for_config(config: &NetworkConfig) -> Self {
        if config.alpha < NEAR_SINGULAR_ALPHA {
            Self::default().widened()
        } else {
            Self::default()
        }
    }

    /// Larger subdivision budgets for path-loss exponents close to 2.
    pub fn widened(self) -> Self {
        Self {
            one_dim: self.one_dim.with_max_subdivisions(20_000),
            exact_outer: self.exact_outer.with_max_subdivisions(20_000),
            exact_inner: self.exact_inner.with_max_subdivisions(20_000),
            ..self
        }
    }
}

/// FD achievable rates (bps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdRates {
    pub rate_ul: f64,
    pub rate_dl: f64,
    pub total: f64,
}

/// Analytic evaluator for one (configuration, scheme) pair.
#[derive(Debug, Clone)]
pub struct Analyzer {
    config: NetworkConfig,
    scheme: PowerControlScheme,
    marginal: MixedPowerDistribution,
    options: AnalyticOptions,
    delta: f64,
    /// `λ_b·π²δ/sin(πδ)`
    lambda_c: f64,
    lambda_b: f64,
    theta_b: f64,
    theta_u: f64,
    g_upper: f64,
    g_lower: f64,
    /// Probability that a pair is fully silent: an APC BS asleep with its UE
    /// switched off as well.
    silent: f64,
}

/// Runs `f` inside an infallible integrand, keeping the first error.
struct Fallible {
    failure: Option<Error>,
}

impl Fallible {
    fn new() -> Self {
        Self { failure: None }
    }

    fn eval(&mut self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                if self.failure.is_none() {
                    self.failure = Some(e);
                }
                0.0
            }
        }
    }

    fn finish(self, r: std::result::Result<quadrature::Integral, QuadratureError>) -> Result<f64> {
        if let Some(e) = self.failure {
            return Err(e);
        }
        Ok(r?.value)
    }
}

impl Analyzer {
    pub fn new(config: &NetworkConfig, scheme: &PowerControlScheme) -> Result<Self> {
        config.validate()?;
        scheme.validate(config)?;
        let delta = config.delta();
        let active = config.active_density();
        let marginal = marginal_distribution(scheme, config);
        let (theta_b, theta_u) = config.thresholds();
        let d = delta.value();
        let silent = match scheme {
            PowerControlScheme::Apc { xi, .. } if !config.apc_ue_always_on => 1.0 - xi,
            _ => 0.0,
        };
        let pu_d = config.p_ue.powf(d);
        Ok(Self {
            config: config.clone(),
            scheme: *scheme,
            // A silent pair has kernel value P_u^δ at P = 0 and contributes nothing.
            g_upper: compound_moment(&marginal, config.p_ue, d) - silent * pu_d,
            g_lower: (1.0 - silent) * pu_d + moment_delta(&marginal, d),
            silent,
            marginal,
            options: AnalyticOptions::for_config(config),
            delta: d,
            lambda_c: active.lambda_b * delta.interference_constant(),
            lambda_b: active.lambda_b,
            theta_b,
            theta_u,
        })
    }

    pub fn with_options(mut self, options: AnalyticOptions) -> Self {
        self.options = options;
        self
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn scheme(&self) -> &PowerControlScheme {
        &self.scheme
    }

    pub fn marginal(&self) -> &MixedPowerDistribution {
        &self.marginal
    }

    pub fn lambda_b(&self) -> f64 {
        self.lambda_b
    }

    /// Power functional of the bound of the given kind.
    pub fn g(&self, kind: BoundKind) -> Option<f64> {
        match kind {
            BoundKind::Upper => Some(self.g_upper),
            BoundKind::Lower => Some(self.g_lower),
            BoundKind::Exact => None,
        }
    }

    /// `λ_b·π²δ/sin(πδ)`.
    pub fn interference_coefficient(&self) -> f64 {
        self.lambda_c
    }

    pub fn laplace(&self, s: f64, kind: BoundKind) -> Result<f64> {
        match kind {
            BoundKind::Exact => self.laplace_exact(s),
            _ => Ok(self.laplace_bound(s, kind)),
        }
    }

    /// Closed-form bound; `kind = Exact` falls back to the lower bound's
    /// functional and should not be used.
    pub fn laplace_bound(&self, s: f64, kind: BoundKind) -> f64 {
        if s <= 0.0 {
            return 1.0;
        }
        let g = match kind {
            BoundKind::Upper => self.g_upper,
            _ => self.g_lower,
        };
        (-self.lambda_c * g * s.powf(self.delta)).exp()
    }

    pub fn laplace_exact(&self, s: f64) -> Result<f64> {
        self.laplace_quadrature(s, MarkModel::Displaced)
    }

    /// Laplace transform by direct integration under a given mark geometry.
    /// `CoLocated` and `Independent` reproduce the upper and lower bounds.
    pub fn laplace_quadrature(&self, s: f64, model: MarkModel) -> Result<f64> {
        if s <= 0.0 {
            return Ok(1.0);
        }
        let alpha = self.config.alpha;
        let s_pu = s * self.config.p_ue;
        let outer = self
            .options
            .exact_outer
            .with_semi_infinite(tail_map(alpha));
        let inner = self.options.exact_inner;
        let mean_power = self.marginal.mean();
        let scale = (s * (mean_power + self.config.p_ue)).powf(1.0 / alpha);
        // Per-axis variance of a UE's Gaussian offset from its BS.
        let sigma2 = 0.5 / (PI * self.config.lambda_bs);

        // 1 − F(v) for atoms and continuous parts alike.
        let bs_term = |v: f64| -> Result<f64> {
            let va = v.powf(alpha);
            Ok(self
                .marginal
                .expect(|p| s * p / (va + s * p), &self.options.one_dim)?)
        };
        // `abs_budget` bounds the absolute error of B; it only has to be small
        // next to the interferer-BS term it is added to.
        let ue_term = |v: f64, abs_budget: f64| -> Result<f64> {
            match model {
                MarkModel::CoLocated => Ok(s_pu / (v.powf(alpha) + s_pu)),
                MarkModel::Independent => Ok(0.0),
                MarkModel::Displaced => {
                    let spec = inner.with_abs_tol(inner.abs_tol.max(abs_budget));
                    displaced_ue_term(v, s_pu, alpha, sigma2, &spec)
                }
            }
        };

        let mut fail = Fallible::new();
        let res = quadrature::integrate_semi_infinite(
            |v| {
                let value = (|| -> Result<f64> {
                    let one_minus_f = bs_term(v)?;
                    // Silent pairs sit in F with weight `silent` but have no UE term.
                    let f_talking = (1.0 - one_minus_f - self.silent).max(0.0);
                    if f_talking == 0.0 {
                        return Ok(v * one_minus_f);
                    }
                    let budget = inner.rel_tol * one_minus_f / f_talking;
                    let b = ue_term(v, budget)?;
                    Ok(v * (one_minus_f + f_talking * b))
                })();
                fail.eval(value)
            },
            0.0,
            scale,
            &outer,
        );
        let integral = fail.finish(res)?;
        let log_l = -2.0 * PI * self.lambda_b * integral;
        let log_l = match model {
            // The independent UE field contributes exactly P_u^δ to g.
            MarkModel::Independent => {
                log_l
                    - (1.0 - self.silent)
                        * self.lambda_c
                        * self.config.p_ue.powf(self.delta)
                        * s.powf(self.delta)
            }
            _ => log_l,
        };
        Ok(log_l.exp())
    }

    /// Success probability of one link at distance `r`, conditioned on the
    /// powers: `exp(−θ r^α β p_r / p_t)·L(θ r^α / p_t)`.
    pub fn link_success(
        &self,
        p_t: f64,
        p_r: f64,
        theta: f64,
        r: f64,
        kind: BoundKind,
    ) -> Result<f64> {
        if p_t <= 0.0 {
            return Ok(0.0);
        }
        let s = theta * r.powf(self.config.alpha) / p_t;
        let si = (-s * p_r * self.config.beta).exp();
        if si == 0.0 {
            return Ok(0.0);
        }
        Ok(si * self.laplace(s, kind)?)
    }

    fn r_spec(&self, kind: BoundKind) -> QuadratureSpec {
        match kind {
            BoundKind::Exact => self.options.exact_outer,
            _ => self.options.one_dim,
        }
    }

    fn expect_r<F: FnMut(f64) -> Result<f64>>(&self, mut f: F, kind: BoundKind) -> Result<f64> {
        let mut fail = Fallible::new();
        let res = quadrature::expect_over_link_distance(
            |r| fail.eval(f(r)),
            self.config.lambda_bs,
            &self.r_spec(kind),
        );
        fail.finish(res)
    }

    /// Coverage `E_R[exp(−s p_r β)·L(s)]` at `s = θR^α/p_t` with fixed powers.
    pub fn coverage_generic(&self, p_t: f64, p_r: f64, theta: f64, kind: BoundKind) -> Result<f64> {
        if theta <= 0.0 {
            return Ok(1.0);
        }
        if let (true, Some(c)) = (self.shortcut_applies(p_r, kind), self.no_si_exponent(p_t, theta, kind)) {
            return Ok(rayleigh_average(self.config.lambda_bs, c));
        }
        self.expect_r(|r| self.link_success(p_t, p_r, theta, r, kind), kind)
    }

    fn shortcut_applies(&self, p_r: f64, kind: BoundKind) -> bool {
        self.options.rayleigh_shortcut
            && kind != BoundKind::Exact
            && (self.config.beta == 0.0 || p_r == 0.0)
    }

    /// `c` in `L = exp(−c R²)` for a bound at fixed transmit power.
    fn no_si_exponent(&self, p_t: f64, theta: f64, kind: BoundKind) -> Option<f64> {
        let g = self.g(kind)?;
        Some(self.lambda_c * g * theta.powf(self.delta) / p_t.powf(self.delta))
    }

    /// `E[f(P) | R = r]` over the serving BS power. With
    /// `transmitting_only`, the APC off state is conditioned away.
    fn expect_serving<F: FnMut(f64) -> Result<f64>>(
        &self,
        r: f64,
        transmitting_only: bool,
        mut f: F,
    ) -> Result<f64> {
        match self.scheme {
            PowerControlScheme::Cpc => f(self.config.p_max),
            PowerControlScheme::Upc { p_min, p_max } => {
                if p_max <= p_min {
                    return f(p_max);
                }
                let mut fail = Fallible::new();
                let spec = self.options.one_dim.with_rel_tol(self.options.one_dim.rel_tol.max(1e-9));
                let res = quadrature::integrate(|p| fail.eval(f(p)), p_min, p_max, &spec);
                Ok(fail.finish(res)? / (p_max - p_min))
            }
            PowerControlScheme::Fpc { p_bar, epsilon } => f(fpc_power(
                p_bar,
                epsilon,
                self.config.alpha,
                self.config.p_max,
                r,
            )),
            PowerControlScheme::Apc { p_bar, xi } => {
                if transmitting_only {
                    f(p_bar)
                } else {
                    let on = if xi > 0.0 { xi * f(p_bar)? } else { 0.0 };
                    let off = if xi < 1.0 { (1.0 - xi) * f(0.0)? } else { 0.0 };
                    Ok(on + off)
                }
            }
        }
    }

    fn fixed_serving_power(&self) -> Option<f64> {
        match self.scheme {
            PowerControlScheme::Cpc => Some(self.config.p_max),
            PowerControlScheme::Upc { p_min, p_max } if p_max <= p_min => Some(p_max),
            PowerControlScheme::Fpc { p_bar, epsilon } if epsilon == 0.0 => {
                Some(p_bar.min(self.config.p_max))
            }
            PowerControlScheme::Apc { p_bar, xi } if xi == 1.0 => Some(p_bar),
            _ => None,
        }
    }

    /// UL success at link distance `r` averaged over the serving BS power,
    /// which sets the self-interference at the BS receiver. A UE that goes
    /// silent with its BS is conditioned on the BS transmitting.
    pub fn ul_success_at(&self, r: f64, kind: BoundKind) -> Result<f64> {
        let (p_ue, theta) = (self.config.p_ue, self.theta_b);
        let awake_only = self.silent > 0.0;
        self.expect_serving(r, awake_only, |p| self.link_success(p_ue, p, theta, r, kind))
    }

    /// DL success at link distance `r`, conditioned on the serving BS
    /// transmitting.
    pub fn dl_success_at(&self, r: f64, kind: BoundKind) -> Result<f64> {
        let (p_ue, theta) = (self.config.p_ue, self.theta_u);
        self.expect_serving(r, true, |p| self.link_success(p, p_ue, theta, r, kind))
    }

    pub fn coverage_ul(&self, kind: BoundKind) -> Result<f64> {
        if let Some(p) = self.fixed_serving_power() {
            return self.coverage_generic(self.config.p_ue, p, self.theta_b, kind);
        }
        if let PowerControlScheme::Apc { p_bar, .. } = self.scheme {
            if self.silent > 0.0 {
                return self.coverage_generic(self.config.p_ue, p_bar, self.theta_b, kind);
            }
        }
        self.expect_r(|r| self.ul_success_at(r, kind), kind)
    }

    pub fn coverage_dl(&self, kind: BoundKind) -> Result<f64> {
        if let Some(p) = self.fixed_serving_power() {
            return self.coverage_generic(p, self.config.p_ue, self.theta_u, kind);
        }
        self.expect_r(|r| self.dl_success_at(r, kind), kind)
    }

    /// Factor on the DL rate for the fraction of slots the serving BS sends.
    fn dl_duty(&self) -> f64 {
        match self.scheme {
            PowerControlScheme::Apc { xi, .. } if self.config.apc_rate_includes_xi => xi,
            _ => 1.0,
        }
    }

    fn rates_from_coverage(&self, p_ul: f64, p_dl: f64) -> FdRates {
        let rate_ul = self.config.rate_bs * p_ul * (1.0 - self.silent);
        let rate_dl = self.config.rate_ue * p_dl * self.dl_duty();
        FdRates {
            rate_ul,
            rate_dl,
            total: rate_ul + rate_dl,
        }
    }

    pub fn fd_sum_rate(&self, kind: BoundKind) -> Result<FdRates> {
        Ok(self.rates_from_coverage(self.coverage_ul(kind)?, self.coverage_dl(kind)?))
    }

    /// `(UL, DL)` HD rates.
    pub fn hd_rates(&self) -> (f64, f64) {
        hd_rates(&self.config)
    }

    fn ase_from_rates(&self, rates: &FdRates) -> f64 {
        self.lambda_b * rates.total / self.config.bandwidth_w
    }

    /// Area spectrum efficiency (bps/Hz/m²).
    pub fn ase(&self, kind: BoundKind) -> Result<f64> {
        Ok(self.ase_from_rates(&self.fd_sum_rate(kind)?))
    }

    /// Energy efficiency (bps/J); the consumed power depends on the serving
    /// BS power, so it stays inside the expectation.
    pub fn ee(&self, kind: BoundKind) -> Result<f64> {
        let cfg = &self.config;
        let fixed_power = self.fixed_serving_power();
        if let Some(p) = fixed_power {
            let rates = self.fd_sum_rate(kind)?;
            return Ok(rates.total / (p + cfg.p_ue + cfg.p_static));
        }
        let duty_off_state = !cfg.apc_rate_includes_xi;
        let apc_bar = match self.scheme {
            PowerControlScheme::Apc { p_bar, .. } => Some(p_bar),
            _ => None,
        };
        self.expect_r(
            |r| {
                self.expect_serving(r, false, |p| {
                    let ul = if p == 0.0 && self.silent > 0.0 {
                        0.0
                    } else {
                        self.link_success(cfg.p_ue, p, self.theta_b, r, kind)?
                    };
                    let dl = if p > 0.0 {
                        self.link_success(p, cfg.p_ue, self.theta_u, r, kind)?
                    } else if let (true, Some(pb)) = (duty_off_state, apc_bar) {
                        self.link_success(pb, cfg.p_ue, self.theta_u, r, kind)?
                    } else {
                        0.0
                    };
                    let ue_power = if p == 0.0 && self.silent > 0.0 { 0.0 } else { cfg.p_ue };
                    Ok((cfg.rate_ue * dl + cfg.rate_bs * ul) / (p + ue_power + cfg.p_static))
                })
            },
            kind,
        )
    }

    /// Sum rate with the serving link frozen at distance `r`; the
    /// interference field keeps its random link distances.
    pub fn rate_given_distance(&self, r: f64, kind: BoundKind, mode: DuplexMode) -> Result<f64> {
        match mode {
            DuplexMode::Half => Ok(hd_rate_at(&self.config, self.lambda_c, r)),
            DuplexMode::Full => {
                let ul = self.ul_success_at(r, kind)?;
                let dl = self.dl_success_at(r, kind)?;
                Ok(self.rates_from_coverage(ul, dl).total)
            }
        }
    }

    pub fn report(&self, kind: BoundKind) -> Result<PerformanceReport> {
        let p_ul = self.coverage_ul(kind)?;
        let p_dl = self.coverage_dl(kind)?;
        let rates = self.rates_from_coverage(p_ul, p_dl);
        Ok(PerformanceReport {
            p_ul,
            p_dl,
            rate_ul: rates.rate_ul,
            rate_dl: rates.rate_dl,
            ase: self.ase_from_rates(&rates),
            ee: self.ee(kind)?,
            ci_halfwidth: None,
            source: kind.report_source(),
        })
    }
}

/// Tail-flattening power for the outer integral of the exact transform,
/// whose integrand decays as `v^{1−α}`.
fn tail_map(alpha: f64) -> SemiInfiniteMap {
    SemiInfiniteMap::Rational {
        power: (2.0 / (alpha - 2.0)).max(1.0),
    }
}

/// `I0(x)·e^{−x}` for `x ≥ 0`.
fn bessel_i0_scaled(x: f64) -> f64 {
    if x < 500.0 {
        puruspe::In(0, x) * (-x).exp()
    } else {
        // Leading terms of the large-argument expansion; the next is below 1e-9.
        let inv = 1.0 / x;
        (1.0 + inv / 8.0 + 9.0 * inv * inv / 128.0) / (2.0 * PI * x).sqrt()
    }
}

/// `E[s_pu/(D^α + s_pu)]` where `D` is the distance from the receiver to a UE
/// offset by an isotropic Gaussian (per-axis variance `sigma2`) from a BS at
/// distance `v`, so `D` is Rician.
fn displaced_ue_term(v: f64, s_pu: f64, alpha: f64, sigma2: f64, spec: &QuadratureSpec) -> Result<f64> {
    let sigma = sigma2.sqrt();
    let kernel_radius = s_pu.powf(1.0 / alpha);
    // Offset `u = D − v` keeps the Gaussian factor exact when `v ≫ σ`.
    let integrand = |u: f64| {
        let d = v + u;
        if d <= 0.0 {
            return 0.0;
        }
        let rice = d / sigma2 * (-u * u / (2.0 * sigma2)).exp() * bessel_i0_scaled(d * v / sigma2);
        rice * s_pu / (d.powf(alpha) + s_pu)
    };
    // One feature per piece: the kernel knee and both flanks of the Rice body.
    let mut breaks = vec![-v, kernel_radius - v, (-6.0 * sigma).max(-v), 6.0 * sigma];
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            total += quadrature::integrate(integrand, w[0], w[1], spec)?.value;
        }
    }
    let last = *breaks.last().expect("breaks are non-empty");
    total += quadrature::integrate_semi_infinite(integrand, last, sigma, spec)?.value;
    Ok(total)
}

/// `E[exp(−c R²)]` under the link-distance law of density `lambda`.
pub fn rayleigh_average(lambda: f64, c: f64) -> f64 {
    PI * lambda / (PI * lambda + c)
}

/// HD coverage `E_R[exp(−λ_b·C(δ)·(θR^α)^δ)]` in closed form.
pub fn hd_coverage(theta: f64, config: &NetworkConfig) -> f64 {
    let lambda_c = config.active_density().lambda_b * config.delta().interference_constant();
    rayleigh_average(config.lambda_bs, lambda_c * theta.powf(config.delta().value()))
}

/// HD coverage by quadrature over the link distance.
pub fn hd_coverage_quadrature(theta: f64, config: &NetworkConfig) -> Result<f64> {
    let lambda_c = config.active_density().lambda_b * config.delta().interference_constant();
    let d = config.delta().value();
    let spec = AnalyticOptions::for_config(config).one_dim;
    Ok(quadrature::expect_over_link_distance(
        |r| (-lambda_c * (theta * r.powf(config.alpha)).powf(d)).exp(),
        config.lambda_bs,
        &spec,
    )?
    .value)
}

/// `(UL, DL)` HD rates: `0.5·W·log2(1+θ)·coverage`.
pub fn hd_rates(config: &NetworkConfig) -> (f64, f64) {
    let (theta_b, theta_u) = config.thresholds();
    let half = |theta: f64| 0.5 * config.bandwidth_w * theta.ln_1p() / LN_2;
    (
        half(theta_b) * hd_coverage(theta_b, config),
        half(theta_u) * hd_coverage(theta_u, config),
    )
}

/// HD counterpart of [`Analyzer::report`]: each direction holds half the
/// slots and every radio transmits half the time.
pub fn hd_report(config: &NetworkConfig) -> PerformanceReport {
    let (theta_b, theta_u) = config.thresholds();
    let (rate_ul, rate_dl) = hd_rates(config);
    let lambda_b = config.active_density().lambda_b;
    PerformanceReport {
        p_ul: hd_coverage(theta_b, config),
        p_dl: hd_coverage(theta_u, config),
        rate_ul,
        rate_dl,
        ase: lambda_b * (rate_ul + rate_dl) / config.bandwidth_w,
        ee: (rate_ul + rate_dl) / (0.5 * (config.p_max + config.p_ue) + config.p_static),
        ci_halfwidth: None,
        source: ReportSource::Exact,
    }
}

fn hd_rate_at(config: &NetworkConfig, lambda_c: f64, r: f64) -> f64 {
    let (theta_b, theta_u) = config.thresholds();
    let d = config.delta().value();
    let one = |theta: f64| {
        0.5 * config.bandwidth_w * theta.ln_1p() / LN_2
            * (-lambda_c * (theta * r.powf(config.alpha)).powf(d)).exp()
    };
    one(theta_b) + one(theta_u)
}

pub fn laplace_exact(s: f64, config: &NetworkConfig, scheme: &PowerControlScheme) -> Result<f64> {
    Analyzer::new(config, scheme)?.laplace_exact(s)
}

pub fn laplace_bound(
    s: f64,
    config: &NetworkConfig,
    scheme: &PowerControlScheme,
    kind: BoundKind,
) -> Result<f64> {
    Analyzer::new(config, scheme)?.laplace(s, kind)
}

pub fn laplace(query: LaplaceQuery<'_>, kind: BoundKind) -> Result<f64> {
    Analyzer::new(query.config, query.scheme)?.laplace(query.s, kind)
}

pub fn coverage_generic(
    p_t: f64,
    p_r: f64,
    theta: f64,
    config: &NetworkConfig,
    scheme: &PowerControlScheme,
    kind: BoundKind,
) -> Result<f64> {
    Analyzer::new(config, scheme)?.coverage_generic(p_t, p_r, theta, kind)
}

pub fn coverage_ul(config: &NetworkConfig, scheme: &PowerControlScheme, kind: BoundKind) -> Result<f64> {
    Analyzer::new(config, scheme)?.coverage_ul(kind)
}

pub fn coverage_dl(config: &NetworkConfig, scheme: &PowerControlScheme, kind: BoundKind) -> Result<f64> {
    Analyzer::new(config, scheme)?.coverage_dl(kind)
}

pub fn fd_sum_rate(
    config: &NetworkConfig,
    scheme: &PowerControlScheme,
    kind: BoundKind,
) -> Result<FdRates> {
    Analyzer::new(config, scheme)?.fd_sum_rate(kind)
}

pub fn ase(config: &NetworkConfig, scheme: &PowerControlScheme, kind: BoundKind) -> Result<f64> {
    Analyzer::new(config, scheme)?.ase(kind)
}

pub fn ee(config: &NetworkConfig, scheme: &PowerControlScheme, kind: BoundKind) -> Result<f64> {
    Analyzer::new(config, scheme)?.ee(kind)
}

pub fn rate_given_distance(
    r: f64,
    config: &NetworkConfig,
    scheme: &PowerControlScheme,
    kind: BoundKind,
    mode: DuplexMode,
) -> Result<f64> {
    Analyzer::new(config, scheme)?.rate_given_distance(r, kind, mode)
}
