//! Downlink power-control schemes: per-BS power draws, the FPC
//! distance-to-power map, and the marginal BS power law with the moment
//! queries the interference bounds need.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{QuadratureError, SchemeError};
use crate::model::NetworkConfig;
use crate::quadrature::{self, QuadratureSpec};

/// Downlink power-control scheme. CPC and FPC read the peak power from the
/// network configuration; UPC and APC carry their own levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerControlScheme {
    /// Every BS transmits at the peak power.
    Cpc,
    /// Each BS draws its power uniformly from `[p_min, p_max]`.
    Upc { p_min: f64, p_max: f64 },
    /// `min(p_bar·R^{α·epsilon}, p_max)` with `R` the BS's own link distance.
    Fpc { p_bar: f64, epsilon: f64 },
    /// Transmit at `p_bar` with probability `xi`, otherwise sleep.
    Apc { p_bar: f64, xi: f64 },
}

impl PowerControlScheme {
    pub fn name(&self) -> &'static str {
        match self {
            PowerControlScheme::Cpc => "cpc",
            PowerControlScheme::Upc { .. } => "upc",
            PowerControlScheme::Fpc { .. } => "fpc",
            PowerControlScheme::Apc { .. } => "apc",
        }
    }

    /// UPC over the configured `[p_min, p_max]` range.
    pub fn upc_from(config: &NetworkConfig) -> Self {
        PowerControlScheme::Upc {
            p_min: config.p_min,
            p_max: config.p_max,
        }
    }

    pub fn validate(&self, config: &NetworkConfig) -> Result<(), SchemeError> {
        let err = |name, value, range| {
            Err(SchemeError::Parameter {
                scheme: self.name(),
                name,
                value,
                range,
            })
        };
        let peak = config.p_max;
        match *self {
            PowerControlScheme::Cpc => Ok(()),
            PowerControlScheme::Upc { p_min, p_max } => {
                if !(p_min >= 0.0) {
                    err("p_min", p_min, "[0, p_max]")
                } else if !(p_max >= p_min && p_max > 0.0) {
                    err("p_max", p_max, "[p_min, peak power] and > 0")
                } else if p_max > peak * (1.0 + 1e-12) {
                    err("p_max", p_max, "[p_min, peak power]")
                } else {
                    Ok(())
                }
            }
            PowerControlScheme::Fpc { p_bar, epsilon } => {
                if !(0.0..=1.0).contains(&epsilon) {
                    err("epsilon", epsilon, "[0, 1]")
                } else if !(p_bar > 0.0 && p_bar.is_finite()) {
                    err("p_bar", p_bar, "(0, inf)")
                } else {
                    Ok(())
                }
            }
            PowerControlScheme::Apc { p_bar, xi } => {
                if !(0.0..=1.0).contains(&xi) {
                    err("xi", xi, "[0, 1]")
                } else if !(p_bar > 0.0 && p_bar <= peak * (1.0 + 1e-12)) {
                    err("p_bar", p_bar, "(0, peak power]")
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Mean transmit power of a BS, used to break optimiser ties.
    pub fn mean_power(&self, config: &NetworkConfig) -> f64 {
        marginal_distribution(self, config).mean()
    }
}

/// FPC transmit power for link distance `r`.
pub fn fpc_power(p_bar: f64, epsilon: f64, alpha: f64, p_max: f64, r: f64) -> f64 {
    let exponent = alpha * epsilon;
    let p = if exponent == 0.0 {
        p_bar
    } else {
        p_bar * r.powf(exponent)
    };
    p.min(p_max)
}

/// Link distance above which FPC saturates at the peak power.
fn fpc_saturation_distance(p_bar: f64, epsilon: f64, alpha: f64, p_max: f64) -> f64 {
    (p_max / p_bar).powf(1.0 / (alpha * epsilon))
}

/// Draws the transmit power of a BS whose own link distance is
/// `link_distance`. Every scheme consumes exactly one `f64` from `rng`, so
/// schemes that coincide in law also coincide draw for draw.
pub fn sample_power<R: Rng + ?Sized>(
    scheme: &PowerControlScheme,
    config: &NetworkConfig,
    link_distance: f64,
    rng: &mut R,
) -> f64 {
    let u: f64 = rng.random();
    match *scheme {
        PowerControlScheme::Cpc => config.p_max,
        PowerControlScheme::Upc { p_min, p_max } => p_min + u * (p_max - p_min),
        PowerControlScheme::Fpc { p_bar, epsilon } => {
            fpc_power(p_bar, epsilon, config.alpha, config.p_max, link_distance)
        }
        PowerControlScheme::Apc { p_bar, xi } => {
            if u < xi {
                p_bar
            } else {
                0.0
            }
        }
    }
}

/// Point mass of a mixed power law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Absolutely continuous part of a mixed power law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuousPart {
    /// Uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Law of `p_bar·R^{α·epsilon}` below the peak, `R` Rayleigh with
    /// density `lambda`.
    FractionalPower {
        lambda: f64,
        alpha: f64,
        epsilon: f64,
        p_bar: f64,
        p_max: f64,
    },
}

impl ContinuousPart {
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            ContinuousPart::Uniform { lo, hi } => {
                if x >= lo && x <= hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            ContinuousPart::FractionalPower {
                lambda,
                alpha,
                epsilon,
                p_bar,
                p_max,
            } => {
                if !(x > 0.0 && x < p_max) {
                    return 0.0;
                }
                let k = 2.0 / (alpha * epsilon);
                let ratio = (x / p_bar).powf(k);
                2.0 * PI * lambda * x.powf(k - 1.0) * (-PI * lambda * ratio).exp()
                    / (alpha * epsilon * p_bar.powf(k))
            }
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            ContinuousPart::Uniform { lo, hi } => (lo, hi),
            ContinuousPart::FractionalPower { p_max, .. } => (0.0, p_max),
        }
    }

    /// `∫ g(x)·density(x) dx`. The FPC part is integrated on the
    /// link-distance scale where the integrand is smooth.
    pub fn expect<F: FnMut(f64) -> f64>(
        &self,
        mut g: F,
        spec: &QuadratureSpec,
    ) -> Result<f64, QuadratureError> {
        match *self {
            ContinuousPart::Uniform { lo, hi } => {
                let width = hi - lo;
                Ok(quadrature::integrate(|x| g(x), lo, hi, spec)?.value / width)
            }
            ContinuousPart::FractionalPower {
                lambda,
                alpha,
                epsilon,
                p_bar,
                p_max,
            } => {
                let r_sat = fpc_saturation_distance(p_bar, epsilon, alpha, p_max);
                Ok(quadrature::expect_over_link_distance_below(
                    |r| g(p_bar * r.powf(alpha * epsilon)),
                    lambda,
                    r_sat,
                    spec,
                )?
                .value)
            }
        }
    }
}

/// Marginal law of a BS transmit power: continuous density plus atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedPowerDistribution {
    pub continuous: Option<ContinuousPart>,
    pub atoms: Vec<Atom>,
    pub p_max: f64,
}

impl MixedPowerDistribution {
    pub fn point(location: f64, p_max: f64) -> Self {
        Self {
            continuous: None,
            atoms: vec![Atom {
                location,
                mass: 1.0,
            }],
            p_max,
        }
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn continuous_mass(&self) -> f64 {
        self.continuous
            .map(|c| c.expect(|_| 1.0, &moment_spec()).unwrap_or(f64::NAN))
            .unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.atom_mass() + self.continuous_mass()
    }

    pub fn support(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for a in self.atoms.iter().filter(|a| a.mass > 0.0) {
            lo = lo.min(a.location);
            hi = hi.max(a.location);
        }
        if let Some(c) = self.continuous {
            let (a, b) = c.support();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }

    /// `E[g(P)]`.
    pub fn expect<F: FnMut(f64) -> f64>(
        &self,
        mut g: F,
        spec: &QuadratureSpec,
    ) -> Result<f64, QuadratureError> {
        let mut total = match self.continuous {
            Some(c) => c.expect(&mut g, spec)?,
            None => 0.0,
        };
        for a in &self.atoms {
            if a.mass > 0.0 {
                total += a.mass * g(a.location);
            }
        }
        Ok(total)
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x, &moment_spec()).unwrap_or(f64::NAN)
    }
}

fn moment_spec() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-12).with_abs_tol(1e-15)
}

/// Marginal law of the transmit power of an arbitrary BS.
pub fn marginal_distribution(
    scheme: &PowerControlScheme,
    config: &NetworkConfig,
) -> MixedPowerDistribution {
    let peak = config.p_max;
    match *scheme {
        PowerControlScheme::Cpc => MixedPowerDistribution::point(peak, peak),
        PowerControlScheme::Upc { p_min, p_max } => {
            if p_max > p_min {
                MixedPowerDistribution {
                    continuous: Some(ContinuousPart::Uniform {
                        lo: p_min,
                        hi: p_max,
                    }),
                    atoms: Vec::new(),
                    p_max: peak,
                }
            } else {
                MixedPowerDistribution::point(p_max, peak)
            }
        }
        PowerControlScheme::Fpc { p_bar, epsilon } => {
            if epsilon == 0.0 {
                return MixedPowerDistribution::point(p_bar.min(peak), peak);
            }
            let k = 2.0 / (config.alpha * epsilon);
            let atom = (-PI * config.lambda_bs * (peak / p_bar).powf(k)).exp();
            MixedPowerDistribution {
                continuous: Some(ContinuousPart::FractionalPower {
                    lambda: config.lambda_bs,
                    alpha: config.alpha,
                    epsilon,
                    p_bar,
                    p_max: peak,
                }),
                atoms: vec![Atom {
                    location: peak,
                    mass: atom,
                }],
                p_max: peak,
            }
        }
        PowerControlScheme::Apc { p_bar, xi } => MixedPowerDistribution {
            continuous: None,
            atoms: vec![
                Atom {
                    location: p_bar,
                    mass: xi,
                },
                Atom {
                    location: 0.0,
                    mass: 1.0 - xi,
                },
            ],
            p_max: peak,
        },
    }
}

/// `E[P^δ]`; atoms at zero contribute nothing.
pub fn moment_delta(dist: &MixedPowerDistribution, delta: f64) -> f64 {
    dist.expect(|x| if x > 0.0 { x.powf(delta) } else { 0.0 }, &moment_spec())
        .unwrap_or(f64::NAN)
}

/// `h(P) = (p_ue^{1+δ} − P^{1+δ}) / (p_ue − P)`, continuously extended at
/// `P = p_ue` by its Taylor expansion.
pub fn compound_kernel(p: f64, p_ue: f64, delta: f64) -> f64 {
    let diff = p - p_ue;
    if diff.abs() <= 1e-4 * p_ue {
        // f(x) = x^{1+δ}: h = f'(u) + f''(u)/2·d + f'''(u)/6·d²
        let d1 = (1.0 + delta) * p_ue.powf(delta);
        let d2 = (1.0 + delta) * delta * p_ue.powf(delta - 1.0);
        let d3 = (1.0 + delta) * delta * (delta - 1.0) * p_ue.powf(delta - 2.0);
        d1 + 0.5 * d2 * diff + d3 * diff * diff / 6.0
    } else {
        (p_ue.powf(1.0 + delta) - p.max(0.0).powf(1.0 + delta)) / (p_ue - p)
    }
}

/// `E[h(P)]` with `h` from [`compound_kernel`]. Divided by `Γ(1+δ)`, this is
/// the δ-th moment of the combined fading-weighted power of a co-located
/// BS/UE pair.
pub fn compound_moment(dist: &MixedPowerDistribution, p_ue: f64, delta: f64) -> f64 {
    dist.expect(|x| compound_kernel(x, p_ue, delta), &moment_spec())
        .unwrap_or(f64::NAN)
}
