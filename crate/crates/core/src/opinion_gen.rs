//! Innate opinions and resistances for synthetic experiments.
//!
//! Innate opinions follow one of three distributions. The exponential and
//! power-law samples are drawn by inverse CDF on the support `x ≥ x_min` and
//! then divided by their observed maximum, so the most extreme agent always
//! holds opinion exactly 1.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OpinionDistribution {
    #[default]
    Uniform,
    /// Density `e^{x_min} e^{−x}` on `x ≥ x_min`.
    Exponential,
    /// Density `(a − 1) x_min^{a−1} x^{−a}` on `x ≥ x_min`.
    PowerLaw,
}

impl OpinionDistribution {
    pub const ALL: [Self; 3] = [Self::Uniform, Self::Exponential, Self::PowerLaw];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::Exponential => "exponential",
            Self::PowerLaw => "power-law",
        }
    }
}

impl fmt::Display for OpinionDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OpinionDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "exponential" => Ok(Self::Exponential),
            "power-law" | "powerlaw" => Ok(Self::PowerLaw),
            _ => Err(Error::InvalidConfig(
                "distribution must be uniform, exponential or power-law",
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub distribution: OpinionDistribution,
    pub x_min: f64,
    /// Power-law exponent `a`; unrelated to the resistances.
    pub exponent: f64,
    pub seed: u64,
    pub n: usize,
}

impl GenSpec {
    pub const DEFAULT_X_MIN: f64 = 1.0;
    pub const DEFAULT_EXPONENT: f64 = 2.5;

    pub fn new(distribution: OpinionDistribution, n: usize, seed: u64) -> Self {
        Self {
            distribution,
            x_min: Self::DEFAULT_X_MIN,
            exponent: Self::DEFAULT_EXPONENT,
            seed,
            n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1"));
        }
        if !(self.x_min > 0.0 && self.x_min.is_finite()) {
            return Err(Error::InvalidConfig("x_min must be positive"));
        }
        if !(self.exponent > 1.0 && self.exponent.is_finite()) {
            return Err(Error::InvalidConfig("power-law exponent must exceed 1"));
        }
        Ok(())
    }
}

/// Inverse CDF of the shifted exponential: `x_min − ln(1 − u)`.
pub fn exponential_inverse_cdf(u: f64, x_min: f64) -> f64 {
    x_min - libm::log(1.0 - u)
}

/// Inverse CDF of the Pareto law: `x_min (1 − u)^{−1/(a−1)}`.
pub fn power_law_inverse_cdf(u: f64, x_min: f64, exponent: f64) -> f64 {
    x_min * libm::pow(1.0 - u, -1.0 / (exponent - 1.0))
}

/// Raw (unnormalised) draws for the heavy-tailed distributions, or the
/// uniform opinions themselves.
pub fn raw_samples(spec: &GenSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut rng = rng::stream(spec.seed, rng::INNATE_STREAM);
    let mut draw = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
        (0..spec.n).map(|_| f(rng.random::<f64>())).collect()
    };
    Ok(match spec.distribution {
        OpinionDistribution::Uniform => draw(&|u| u),
        OpinionDistribution::Exponential => draw(&|u| exponential_inverse_cdf(u, spec.x_min)),
        OpinionDistribution::PowerLaw => {
            draw(&|u| power_law_inverse_cdf(u, spec.x_min, spec.exponent))
        }
    })
}

pub fn generate_innate(spec: &GenSpec) -> Result<Vec<f64>> {
    let mut values = raw_samples(spec)?;
    if spec.distribution != OpinionDistribution::Uniform {
        let max = values.iter().copied().fold(f64::MIN, f64::max);
        values.iter_mut().for_each(|v| *v /= max);
    }
    Ok(values)
}

/// Resistances uniform on the open interval `(0, 1)`.
pub fn generate_resistance(n: usize, seed: u64) -> Vec<f64> {
    let mut rng: StreamRng = rng::stream(seed, rng::RESISTANCE_STREAM);
    (0..n)
        .map(|_| loop {
            let u = rng.random::<f64>();
            if u > 0.0 && u < 1.0 {
                break u;
            }
        })
        .collect()
}
