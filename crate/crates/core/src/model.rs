//! Network parameters, unit conversions and the deployment-independent
//! distributional primitives: link-distance law, idle probability and the
//! density of active base stations.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::ModelError;

/// Shape parameter of the gamma cell-area approximation behind the idle
/// probability.
const CELL_AREA_SHAPE: f64 = 3.5;

/// Physical-layer and deployment parameters, SI linear units throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// BS density (1/m²).
    pub lambda_bs: f64,
    /// UE density (1/m²).
    pub lambda_ue: f64,
    /// Path-loss exponent, must exceed 2.
    pub alpha: f64,
    /// Residual self-interference to transmit-power ratio (linear).
    pub beta: f64,
    /// UE transmit power (W).
    pub p_ue: f64,
    /// Static circuit power (W).
    pub p_static: f64,
    /// BS peak transmit power (W).
    pub p_max: f64,
    /// BS minimum transmit power (W).
    pub p_min: f64,
    /// Spectrum width (Hz).
    pub bandwidth_w: f64,
    /// Target rate of the link received at the BS, i.e. the uplink (bps).
    pub rate_bs: f64,
    /// Target rate of the link received at the UE, i.e. the downlink (bps).
    pub rate_ue: f64,
    /// A sleeping APC base station keeps its paired UE transmitting.
    pub apc_ue_always_on: bool,
    /// APC downlink rate carries the transmit probability as a factor.
    pub apc_rate_includes_xi: bool,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            lambda_bs: 1e-6,
            lambda_ue: 1e-5,
            alpha: 4.0,
            beta: 1e-10,
            p_ue: 0.2,
            p_static: 0.15,
            p_max: 2.0,
            p_min: 0.2,
            bandwidth_w: 10e6,
            rate_bs: 10e6,
            rate_ue: 10e6,
            apc_ue_always_on: true,
            apc_rate_includes_xi: true,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        fn positive(name: &'static str, value: f64) -> Result<(), ModelError> {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(ModelError::NonPositive { name, value })
            }
        }
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return Err(ModelError::PathLossExponent(self.alpha));
        }
        positive("lambda_bs", self.lambda_bs)?;
        positive("lambda_ue", self.lambda_ue)?;
        positive("p_ue", self.p_ue)?;
        positive("p_static", self.p_static)?;
        positive("p_max", self.p_max)?;
        positive("p_min", self.p_min)?;
        positive("bandwidth_w", self.bandwidth_w)?;
        positive("rate_bs", self.rate_bs)?;
        positive("rate_ue", self.rate_ue)?;
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(ModelError::Negative {
                name: "beta",
                value: self.beta,
            });
        }
        if self.p_min > self.p_max {
            return Err(ModelError::PowerRange {
                p_min: self.p_min,
                p_max: self.p_max,
            });
        }
        Ok(())
    }

    pub fn delta(&self) -> Delta {
        Delta::from_alpha(self.alpha)
    }

    pub fn active_density(&self) -> ActiveDensity {
        ActiveDensity::new(self.lambda_bs, self.lambda_ue)
    }

    /// `(theta_b, theta_u)`: the UL and DL SIR thresholds.
    pub fn thresholds(&self) -> (f64, f64) {
        thresholds(self)
    }
}

/// `δ = 2/α`, the exponent governing interference under power-law path loss.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Delta(f64);

impl Delta {
    pub fn from_alpha(alpha: f64) -> Self {
        Self(2.0 / alpha)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `π²δ / sin(πδ)`, which equals `π·Γ(1+δ)Γ(1−δ)`.
    pub fn interference_constant(self) -> f64 {
        PI * PI * self.0 / (PI * self.0).sin()
    }
}

/// Density of base stations that have at least one UE to serve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveDensity {
    pub lambda_b: f64,
    pub p0: f64,
}

impl ActiveDensity {
    pub fn new(lambda_bs: f64, lambda_ue: f64) -> Self {
        let p0 = idle_probability(lambda_bs, lambda_ue).unwrap_or(1.0);
        Self {
            lambda_b: (1.0 - p0) * lambda_bs,
            p0,
        }
    }
}

/// Probability that a BS has no UE in its cell.
pub fn idle_probability(lambda_bs: f64, lambda_ue: f64) -> Result<f64, ModelError> {
    if !(lambda_bs > 0.0) {
        return Err(ModelError::NonPositive {
            name: "lambda_bs",
            value: lambda_bs,
        });
    }
    if !(lambda_ue >= 0.0) {
        return Err(ModelError::Negative {
            name: "lambda_ue",
            value: lambda_ue,
        });
    }
    Ok((1.0 + lambda_ue / (CELL_AREA_SHAPE * lambda_bs)).powf(-CELL_AREA_SHAPE))
}

/// Density of the nearest-BS link distance, `2πλ r exp(−λπr²)`.
pub fn link_distance_pdf(r: f64, lambda_bs: f64) -> Result<f64, ModelError> {
    if !(r >= 0.0) {
        return Err(ModelError::Negative {
            name: "r",
            value: r,
        });
    }
    Ok(2.0 * PI * lambda_bs * r * (-lambda_bs * PI * r * r).exp())
}

pub fn link_distance_cdf(r: f64, lambda_bs: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        -(-lambda_bs * PI * r * r).exp_m1()
    }
}

/// Quantile of the link-distance law evaluated at `u ∈ (0, 1]` in the
/// survival parametrisation: `u = 1` maps to zero distance.
pub fn link_distance_from_uniform(u: f64, lambda_bs: f64) -> f64 {
    (-u.ln() / (PI * lambda_bs)).max(0.0).sqrt()
}

/// Inverse-transform draw of a link distance. Consumes one `f64`.
pub fn sample_link_distance<R: Rng + ?Sized>(rng: &mut R, lambda_bs: f64) -> f64 {
    // gen::<f64>() is in [0, 1); flip it onto (0, 1].
    let u = 1.0 - rng.random::<f64>();
    link_distance_from_uniform(u, lambda_bs)
}

/// `(theta_b, theta_u) = (2^{R_b/W} − 1, 2^{R_u/W} − 1)`.
pub fn thresholds(config: &NetworkConfig) -> (f64, f64) {
    (
        rate_to_threshold(config.rate_bs, config.bandwidth_w),
        rate_to_threshold(config.rate_ue, config.bandwidth_w),
    )
}

pub fn rate_to_threshold(rate: f64, bandwidth: f64) -> f64 {
    (rate / bandwidth).exp2() - 1.0
}

pub fn threshold_to_rate(theta: f64, bandwidth: f64) -> f64 {
    bandwidth * theta.ln_1p() / std::f64::consts::LN_2
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Which engine produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReportSource {
    MonteCarlo,
    Exact,
    BoundUpper,
    BoundLower,
}

impl ReportSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportSource::MonteCarlo => "monte_carlo",
            ReportSource::Exact => "exact",
            ReportSource::BoundUpper => "bound_upper",
            ReportSource::BoundLower => "bound_lower",
        }
    }
}

/// 95% confidence half-widths of an estimated report.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReportCi {
    pub p_ul: f64,
    pub p_dl: f64,
    pub rate_ul: f64,
    pub rate_dl: f64,
    pub ase: f64,
    pub ee: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceReport {
    pub p_ul: f64,
    pub p_dl: f64,
    /// Achievable UL rate (bps).
    pub rate_ul: f64,
    /// Achievable DL rate (bps).
    pub rate_dl: f64,
    /// Area spectrum efficiency (bps/Hz/m²).
    pub ase: f64,
    /// Energy efficiency (bps/J).
    pub ee: f64,
    pub ci_halfwidth: Option<ReportCi>,
    pub source: ReportSource,
}

impl PerformanceReport {
    pub fn rate_sum(&self) -> f64 {
        self.rate_ul + self.rate_dl
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn idle_probability_values() {
        // (1 + 10/3.5)^-3.5 evaluated in extended precision.
        assert_relative_eq!(
            idle_probability(1e-6, 1e-5).unwrap(),
            0.008_872_989_457,
            max_relative = 1e-9
        );
        assert_eq!(idle_probability(1e-6, 0.0).unwrap(), 1.0);
        assert_relative_eq!(
            idle_probability(1e-6, 3.5e-6).unwrap(),
            2f64.powf(-3.5),
            max_relative = 1e-12
        );
        assert!(idle_probability(0.0, 1e-5).is_err());
        assert!(idle_probability(-1.0, 1e-5).is_err());
    }

    #[test]
    fn idle_probability_monotone_on_grid() {
        let grid = [1e-7, 3e-7, 1e-6, 3e-6, 1e-5, 3e-5];
        for &lb in &grid {
            for w in grid.windows(2) {
                let a = idle_probability(lb, w[0]).unwrap();
                let b = idle_probability(lb, w[1]).unwrap();
                assert!(b < a, "not decreasing in lambda_ue");
            }
        }
        for &lu in &grid {
            for w in grid.windows(2) {
                let a = idle_probability(w[0], lu).unwrap();
                let b = idle_probability(w[1], lu).unwrap();
                assert!(b > a, "not increasing in lambda_bs");
            }
        }
    }

    #[test]
    fn active_density_thins() {
        let cfg = NetworkConfig::default();
        let ad = cfg.active_density();
        assert!(ad.lambda_b < cfg.lambda_bs);
        assert_relative_eq!(ad.lambda_b, (1.0 - ad.p0) * cfg.lambda_bs);
        assert_relative_eq!(ad.lambda_b, 9.911_270_105e-7, max_relative = 1e-9);
    }

    #[test]
    fn link_distance_pdf_edges() {
        assert_eq!(link_distance_pdf(0.0, 1e-6).unwrap(), 0.0);
        assert!(link_distance_pdf(-1.0, 1e-6).is_err());
    }

    #[test]
    fn link_distance_pdf_normalised_and_mean() {
        // Composite Simpson on [0, 5000] m; the tail beyond carries e^{-25π}.
        let lambda = 1e-6;
        let n = 200_000;
        let h = 5000.0 / n as f64;
        let (mut mass, mut mean) = (0.0, 0.0);
        for i in 0..=n {
            let r = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let f = link_distance_pdf(r, lambda).unwrap();
            mass += w * f;
            mean += w * r * f;
        }
        mass *= h / 3.0;
        mean *= h / 3.0;
        assert!((mass - 1.0).abs() < 1e-10, "mass {mass}");
        assert_relative_eq!(mean, 500.0, max_relative = 1e-9);
    }

    #[test]
    fn sampled_distance_endpoint_and_moments() {
        assert_eq!(link_distance_from_uniform(1.0, 1e-6), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let (mut sum, mut below) = (0.0, 0usize);
        for _ in 0..n {
            let r = sample_link_distance(&mut rng, 1e-6);
            sum += r;
            if r <= 500.0 {
                below += 1;
            }
        }
        let mean = sum / n as f64;
        // Rayleigh standard deviation is 500·sqrt(4/π − 1) ≈ 261 m, so the
        // standard error of the mean is 0.26 m.
        assert!((mean - 500.0).abs() < 1.0, "mean {mean}");
        let cdf = below as f64 / n as f64;
        assert!((cdf - (1.0 - (-PI / 4.0).exp())).abs() < 2e-3, "cdf {cdf}");
        assert_relative_eq!(link_distance_cdf(500.0, 1e-6), 0.544_061_872_2, max_relative = 1e-9);
    }

    #[test]
    fn sampled_distance_ks() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n).map(|_| sample_link_distance(&mut rng, 1e-6)).collect();
        let d = crate::stats::ks_statistic(&mut xs, |r| link_distance_cdf(r, 1e-6));
        assert!(d < crate::stats::ks_critical_001(n), "KS D = {d}");
    }

    #[test]
    fn thresholds_from_rates() {
        let cfg = NetworkConfig::default();
        assert_eq!(thresholds(&cfg), (1.0, 1.0));
        assert_eq!(rate_to_threshold(0.0, 10e6), 0.0);
        assert_relative_eq!(rate_to_threshold(20e6, 10e6), 3.0);
        assert_relative_eq!(threshold_to_rate(3.0, 10e6), 20e6);
    }

    #[test]
    fn table_units_to_linear() {
        assert_relative_eq!(dbm_to_watts(23.0), 0.2, max_relative = 3e-3);
        assert_relative_eq!(dbm_to_watts(43.0), 20.0, max_relative = 3e-3);
        assert_relative_eq!(db_to_linear(-100.0), 1e-10, max_relative = 1e-12);
        let cfg = NetworkConfig::default();
        assert_relative_eq!(cfg.p_max, 2.0);
        assert_relative_eq!(cfg.beta, 1e-10, max_relative = 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(NetworkConfig::default().validate().is_ok());
        let bad_alpha = NetworkConfig {
            alpha: 2.0,
            ..Default::default()
        };
        assert!(matches!(
            bad_alpha.validate(),
            Err(ModelError::PathLossExponent(_))
        ));
        let bad_power = NetworkConfig {
            p_min: 3.0,
            ..Default::default()
        };
        assert!(bad_power.validate().is_err());
        let bad_beta = NetworkConfig {
            beta: -1.0,
            ..Default::default()
        };
        assert!(bad_beta.validate().is_err());
    }

    #[test]
    fn interference_constant_at_half() {
        assert_relative_eq!(
            Delta::from_alpha(4.0).interference_constant(),
            PI * PI / 2.0,
            max_relative = 1e-14
        );
    }
}
