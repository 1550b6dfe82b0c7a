//! Reward distributions and K-armed environments.
//!
//! Each [`RewardDist`] knows its exact mean, so regret can be charged
//! against analytic gaps instead of noisy realised rewards.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{config_err, Error, Result};

/// Below this acceptance probability truncated-normal sampling switches
/// from rejection to inverse-cdf.
const MIN_REJECTION_ACCEPTANCE: f64 = 0.05;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal cdf.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal upper tail `1 - cdf(x)`, accurate for large `x`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal quantile function.
pub fn normal_quantile(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// A reward law for one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RewardDist {
    Gaussian {
        mean: f64,
        std: f64,
    },
    /// Normal(`loc`, `scale`^2) conditioned on `[lo, hi]`.
    TruncatedNormal {
        loc: f64,
        scale: f64,
        lo: f64,
        hi: f64,
    },
    Logistic {
        loc: f64,
        scale: f64,
    },
    Bernoulli {
        p: f64,
    },
    /// Beta(`concentration * mean`, `concentration * (1 - mean)`).
    Beta {
        mean: f64,
        concentration: f64,
    },
}

impl RewardDist {
    pub fn gaussian(mean: f64, std: f64) -> Result<Self> {
        Self::Gaussian { mean, std }.validated()
    }

    pub fn truncated_normal(loc: f64, scale: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::TruncatedNormal { loc, scale, lo, hi }.validated()
    }

    pub fn logistic(loc: f64, scale: f64) -> Result<Self> {
        Self::Logistic { loc, scale }.validated()
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::Bernoulli { p }.validated()
    }

    pub fn beta(mean: f64, concentration: f64) -> Result<Self> {
        Self::Beta { mean, concentration }.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Checks the parameter constraints of the distribution.
    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            Self::Gaussian { mean, std } => {
                if !finite(&[mean, std]) || std <= 0.0 {
                    return config_err(format!("gaussian needs finite mean and std > 0, got {self:?}"));
                }
            }
            Self::TruncatedNormal { loc, scale, lo, hi } => {
                if !finite(&[loc, scale, lo, hi]) || scale <= 0.0 || lo >= hi {
                    return config_err(format!("truncated normal needs scale > 0 and lo < hi, got {self:?}"));
                }
                if truncation_mass(loc, scale, lo, hi) <= 0.0 {
                    return config_err(format!("truncation interval carries no mass: {self:?}"));
                }
            }
            Self::Logistic { loc, scale } => {
                if !finite(&[loc, scale]) || scale <= 0.0 {
                    return config_err(format!("logistic needs scale > 0, got {self:?}"));
                }
            }
            Self::Bernoulli { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return config_err(format!("bernoulli needs p in [0, 1], got {p}"));
                }
            }
            Self::Beta { mean, concentration } => {
                if !(mean > 0.0 && mean < 1.0) || !(concentration > 0.0) || !concentration.is_finite() {
                    return config_err(format!("beta needs mean in (0, 1) and concentration > 0, got {self:?}"));
                }
            }
        }
        Ok(())
    }

    /// Exact mean of the distribution.
    pub fn true_mean(&self) -> f64 {
        match *self {
            Self::Gaussian { mean, .. } => mean,
            Self::TruncatedNormal { loc, scale, lo, hi } => truncated_normal_mean(loc, scale, lo, hi),
            Self::Logistic { loc, .. } => loc,
            Self::Bernoulli { p } => p,
            Self::Beta { mean, .. } => mean,
        }
    }

    /// Draws one reward.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Gaussian { mean, std } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + std * z
            }
            Self::TruncatedNormal { loc, scale, lo, hi } => sample_truncated_normal(loc, scale, lo, hi, rng),
            Self::Logistic { loc, scale } => {
                let u: f64 = rng.sample(Open01);
                loc + scale * (u / (1.0 - u)).ln()
            }
            Self::Bernoulli { p } => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Beta { mean, concentration } => {
                let a = Gamma::new(concentration * mean, 1.0).expect("validated shape");
                let b = Gamma::new(concentration * (1.0 - mean), 1.0).expect("validated shape");
                loop {
                    let x = a.sample(rng);
                    let y = b.sample(rng);
                    let v = x / (x + y);
                    if v > 0.0 && v < 1.0 {
                        return v;
                    }
                }
            }
        }
    }

    /// Support bounds, when finite.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::TruncatedNormal { lo, hi, .. } => (lo, hi),
            Self::Bernoulli { .. } | Self::Beta { .. } => (0.0, 1.0),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

impl Distribution<f64> for RewardDist {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        RewardDist::sample(self, rng)
    }
}

/// Probability that Normal(loc, scale^2) falls in `[lo, hi]`, computed on
/// the tail side that avoids cancellation.
fn truncation_mass(loc: f64, scale: f64, lo: f64, hi: f64) -> f64 {
    let a = (lo - loc) / scale;
    let b = (hi - loc) / scale;
    if a > 0.0 {
        normal_sf(a) - normal_sf(b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    }
}

/// `loc + scale * (pdf(a') - pdf(b')) / (cdf(b') - cdf(a'))`.
pub fn truncated_normal_mean(loc: f64, scale: f64, lo: f64, hi: f64) -> f64 {
    let a = (lo - loc) / scale;
    let b = (hi - loc) / scale;
    loc + scale * (normal_pdf(a) - normal_pdf(b)) / truncation_mass(loc, scale, lo, hi)
}

fn sample_truncated_normal<R: Rng + ?Sized>(loc: f64, scale: f64, lo: f64, hi: f64, rng: &mut R) -> f64 {
    let a = (lo - loc) / scale;
    let b = (hi - loc) / scale;
    let mass = truncation_mass(loc, scale, lo, hi);
    if mass >= MIN_REJECTION_ACCEPTANCE {
        loop {
            let z: f64 = rng.sample(StandardNormal);
            if z >= a && z <= b {
                return loc + scale * z;
            }
        }
    }
    // Inverse cdf on whichever tail keeps precision.
    let u: f64 = rng.sample(Open01);
    let z = if a > 0.0 {
        let (sa, sb) = (normal_sf(a), normal_sf(b));
        -normal_quantile(sb + u * (sa - sb))
    } else {
        let (ca, cb) = (normal_cdf(a), normal_cdf(b));
        normal_quantile(ca + u * (cb - ca))
    };
    (loc + scale * z).clamp(lo, hi)
}

/// A K-armed environment with exact means and gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<RewardDist>", into = "Vec<RewardDist>")]
pub struct EnvironmentSpec {
    arms: Vec<RewardDist>,
    true_means: Vec<f64>,
    best_mean: f64,
    gaps: Vec<f64>,
}

impl EnvironmentSpec {
    pub fn new(arms: Vec<RewardDist>) -> Result<Self> {
        if arms.is_empty() {
            return config_err("an environment needs at least one arm");
        }
        for arm in &arms {
            arm.validate()?;
        }
        let true_means: Vec<f64> = arms.iter().map(RewardDist::true_mean).collect();
        let best_mean = true_means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gaps = true_means.iter().map(|m| best_mean - m).collect();
        Ok(Self { arms, true_means, best_mean, gaps })
    }

    pub fn arms(&self) -> &[RewardDist] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn true_means(&self) -> &[f64] {
        &self.true_means
    }

    pub fn best_mean(&self) -> f64 {
        self.best_mean
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn sample<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> f64 {
        self.arms[arm].sample(rng)
    }
}

impl TryFrom<Vec<RewardDist>> for EnvironmentSpec {
    type Error = Error;

    fn try_from(arms: Vec<RewardDist>) -> Result<Self> {
        Self::new(arms)
    }
}

impl From<EnvironmentSpec> for Vec<RewardDist> {
    fn from(env: EnvironmentSpec) -> Self {
        env.arms
    }
}

/// Built-in environment recipes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum EnvPreset {
    /// Truncated Normal(mu_k, 1) on [-1, 1], mu_k ~ Uniform(-1, 1).
    TruncnormK5,
    /// Normal(mu_k, 1), mu_k ~ Uniform(-1, 1).
    GaussianK5,
    /// Logistic(mu_k, 0.5), mu_k ~ Uniform(-1, 1).
    LogisticK5,
    /// Bernoulli(mu_k), mu_k ~ Uniform(0.25, 0.75).
    BernoulliK5,
    /// Beta(8 mu_k, 8 (1 - mu_k)), mu_k ~ Uniform(0.25, 0.75).
    BetaK5,
    /// Truncated normal arms on [-1, 1] with locations (gap, 0, 0, 0, 0).
    GapInstance(f64),
}

pub const NUM_PRESET_ARMS: usize = 5;
pub const BETA_CONCENTRATION: f64 = 8.0;
pub const LOGISTIC_SCALE: f64 = 0.5;

impl EnvPreset {
    pub const RANDOM_PRESETS: [EnvPreset; 5] = [
        EnvPreset::TruncnormK5,
        EnvPreset::GaussianK5,
        EnvPreset::LogisticK5,
        EnvPreset::BernoulliK5,
        EnvPreset::BetaK5,
    ];

    pub fn name(&self) -> String {
        match self {
            Self::TruncnormK5 => "truncnorm-K5".into(),
            Self::GaussianK5 => "gaussian-K5".into(),
            Self::LogisticK5 => "logistic-K5".into(),
            Self::BernoulliK5 => "bernoulli-K5".into(),
            Self::BetaK5 => "beta-K5".into(),
            Self::GapInstance(gap) => format!("gap-instance({gap})"),
        }
    }

    /// Whether the rewards of this preset lie in [0, 1].
    pub fn unit_interval_rewards(&self) -> bool {
        matches!(self, Self::BernoulliK5 | Self::BetaK5)
    }
}

impl fmt::Display for EnvPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl TryFrom<String> for EnvPreset {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EnvPreset> for String {
    fn from(p: EnvPreset) -> Self {
        p.name()
    }
}

impl FromStr for EnvPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let preset = match s {
            "truncnorm-K5" => Self::TruncnormK5,
            "gaussian-K5" => Self::GaussianK5,
            "logistic-K5" => Self::LogisticK5,
            "bernoulli-K5" => Self::BernoulliK5,
            "beta-K5" => Self::BetaK5,
            _ => {
                let gap = s
                    .strip_prefix("gap-instance(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .and_then(|g| g.trim().parse::<f64>().ok());
                match gap {
                    Some(g) if g.is_finite() && g >= 0.0 => Self::GapInstance(g),
                    Some(g) => return config_err(format!("gap must be finite and >= 0, got {g}")),
                    None => return config_err(format!("unknown environment preset `{s}`")),
                }
            }
        };
        Ok(preset)
    }
}

/// Builds an environment from a preset; random presets draw their
/// parameters from `rng`.
pub fn make_environment<R: Rng + ?Sized>(preset: EnvPreset, rng: &mut R) -> Result<EnvironmentSpec> {
    let mut arms = Vec::with_capacity(NUM_PRESET_ARMS);
    for k in 0..NUM_PRESET_ARMS {
        let arm = match preset {
            EnvPreset::TruncnormK5 => RewardDist::truncated_normal(rng.random_range(-1.0..1.0), 1.0, -1.0, 1.0)?,
            EnvPreset::GaussianK5 => RewardDist::gaussian(rng.random_range(-1.0..1.0), 1.0)?,
            EnvPreset::LogisticK5 => RewardDist::logistic(rng.random_range(-1.0..1.0), LOGISTIC_SCALE)?,
            EnvPreset::BernoulliK5 => RewardDist::bernoulli(rng.random_range(0.25..0.75))?,
            EnvPreset::BetaK5 => RewardDist::beta(rng.random_range(0.25..0.75), BETA_CONCENTRATION)?,
            EnvPreset::GapInstance(gap) => {
                let loc = if k == 0 { gap } else { 0.0 };
                RewardDist::truncated_normal(loc, 1.0, -1.0, 1.0)?
            }
        };
        arms.push(arm);
    }
    EnvironmentSpec::new(arms)
}

/// Parses a preset name and builds the environment.
pub fn make_environment_named<R: Rng + ?Sized>(name: &str, rng: &mut R) -> Result<EnvironmentSpec> {
    make_environment(name.parse()?, rng)
}
