//! Arm-selection rules for K-armed bandits.
//!
//! Every policy lives in a [`PolicyState`], which owns the per-arm reward
//! histories, the tie-breaking permutation and its random streams. Each arm
//! has its own stream so that relabelling arms relabels the randomness with
//! them.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bootstrap::{corrected_threshold, BootstrapSpec, CorrectionMode};
use crate::error::{config_err, Error, Result};
use crate::history::ArmHistory;
use crate::rng::{mix64, substream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    /// Bootstrapped UCB with second-order correction.
    Bucb,
    /// Bootstrapped UCB without correction.
    NaiveBucb,
    /// `mean + sigma_hat sqrt(2 ln(1/alpha) / n)`.
    Ucb1,
    /// Thompson sampling from Normal(mean, sigma_hat^2 / n).
    TsJeffreys,
    /// Beta-Bernoulli Thompson sampling on binarised rewards.
    TsBernoulli,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] =
        [PolicyKind::Bucb, PolicyKind::NaiveBucb, PolicyKind::Ucb1, PolicyKind::TsJeffreys, PolicyKind::TsBernoulli];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Bucb => "bucb",
            Self::NaiveBucb => "naive-bucb",
            Self::Ucb1 => "ucb1",
            Self::TsJeffreys => "ts-jeffreys",
            Self::TsBernoulli => "ts-bernoulli",
        }
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::Config(format!("unknown policy `{s}`")))
    }
}

/// Confidence level as a function of the round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaSchedule {
    /// `1 / (t + 1)`.
    #[default]
    Anytime,
    /// `1 / T^2` for a known horizon `T`.
    Horizon(u64),
}

pub fn alpha_schedule(t: u64, mode: AlphaSchedule) -> f64 {
    match mode {
        AlphaSchedule::Anytime => 1.0 / (t as f64 + 1.0),
        AlphaSchedule::Horizon(horizon) => 1.0 / (horizon as f64).powi(2),
    }
}

/// Policy hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    /// Label used in outputs and seed derivation; defaults to the kind name.
    pub name: Option<String>,
    /// Plug-in upper bound on the reward standard deviation. For the
    /// bootstrapped policies it replaces `bootstrap.phi.sigma`.
    pub sigma_hat: f64,
    /// Bootstrap settings; `alpha` is overwritten every round by `schedule`.
    pub bootstrap: BootstrapSpec,
    pub schedule: AlphaSchedule,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            kind: PolicyKind::Bucb,
            name: None,
            sigma_hat: 1.0,
            bootstrap: BootstrapSpec::default(),
            schedule: AlphaSchedule::Anytime,
        }
    }
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind, sigma_hat: f64) -> Self {
        Self { kind, sigma_hat, ..Default::default() }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_hat >= 0.0) || !self.sigma_hat.is_finite() {
            return config_err(format!("sigma_hat must be finite and >= 0, got {}", self.sigma_hat));
        }
        if let AlphaSchedule::Horizon(h) = self.schedule {
            if h < 2 {
                return config_err("horizon schedule needs T >= 2");
            }
        }
        self.effective_bootstrap().validate()
    }

    /// Bootstrap spec actually used by the bootstrapped policies.
    pub fn effective_bootstrap(&self) -> BootstrapSpec {
        let mut spec = self.bootstrap;
        spec.phi.sigma = self.sigma_hat;
        if self.kind == PolicyKind::NaiveBucb {
            spec.correction = CorrectionMode::None;
        }
        spec
    }
}

/// Mutable state of one policy in one episode.
#[derive(Debug, Clone)]
pub struct PolicyState {
    config: PolicyConfig,
    spec: BootstrapSpec,
    histories: Vec<ArmHistory>,
    tie_rule: Vec<usize>,
    successes: Vec<u64>,
    failures: Vec<u64>,
    arm_streams: Vec<Stream>,
    update_stream: Stream,
}

impl PolicyState {
    /// Builds a state whose tie rule and streams all derive from `seed`.
    pub fn new(config: PolicyConfig, num_arms: usize, seed: u64) -> Result<Self> {
        if num_arms == 0 {
            return config_err("a policy needs at least one arm");
        }
        let mut tie_rule: Vec<usize> = (0..num_arms).collect();
        tie_rule.shuffle(&mut substream(seed, 0));
        let arm_streams = (0..num_arms).map(|k| substream(mix64(seed), k as u64)).collect();
        let update_stream = substream(seed, 1);
        Self::with_parts(config, tie_rule, arm_streams, update_stream)
    }

    /// Builds a state from explicit parts; `tie_rule` must be a permutation
    /// of `0..K` and there must be one stream per arm.
    pub fn with_parts(
        config: PolicyConfig,
        tie_rule: Vec<usize>,
        arm_streams: Vec<Stream>,
        update_stream: Stream,
    ) -> Result<Self> {
        config.validate()?;
        let k = tie_rule.len();
        let mut seen = vec![false; k];
        for &a in &tie_rule {
            if a >= k || seen[a] {
                return config_err(format!("tie rule {tie_rule:?} is not a permutation"));
            }
            seen[a] = true;
        }
        if arm_streams.len() != k {
            return config_err(format!("{} streams for {k} arms", arm_streams.len()));
        }
        Ok(Self {
            spec: config.effective_bootstrap(),
            config,
            histories: vec![ArmHistory::new(); k],
            tie_rule,
            successes: vec![0; k],
            failures: vec![0; k],
            arm_streams,
            update_stream,
        })
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn num_arms(&self) -> usize {
        self.histories.len()
    }

    pub fn histories(&self) -> &[ArmHistory] {
        &self.histories
    }

    pub fn tie_rule(&self) -> &[usize] {
        &self.tie_rule
    }

    /// Pull counts per arm.
    pub fn counts(&self) -> Vec<usize> {
        self.histories.iter().map(ArmHistory::len).collect()
    }

    /// Binarised success/failure counts used by Bernoulli Thompson sampling.
    pub fn beta_counts(&self) -> (&[u64], &[u64]) {
        (&self.successes, &self.failures)
    }

    pub fn initialized(&self) -> bool {
        self.histories.iter().all(|h| !h.is_empty())
    }

    fn require_initialized(&self) -> Result<()> {
        if self.initialized() {
            Ok(())
        } else {
            Err(Error::State("every arm must be pulled once before selection".into()))
        }
    }

    /// Chooses the arm for round `t` (1-based).
    pub fn select(&mut self, t: u64) -> Result<usize> {
        match self.config.kind {
            PolicyKind::Bucb | PolicyKind::NaiveBucb => self.bucb_select(t),
            PolicyKind::Ucb1 => self.ucb1_select(t),
            PolicyKind::TsJeffreys => self.ts_jeffreys_select(),
            PolicyKind::TsBernoulli => Ok(self.ts_bernoulli_select()),
        }
    }

    /// Bootstrapped UCB indices `mean_k + threshold_k` for round `t`.
    pub fn bucb_indices(&mut self, t: u64) -> Result<Vec<f64>> {
        self.require_initialized()?;
        let spec = self.spec.with_alpha(alpha_schedule(t, self.config.schedule));
        self.histories
            .iter()
            .zip(self.arm_streams.iter_mut())
            .map(|(h, rng)| Ok(h.mean() + corrected_threshold(h, &spec, rng)?))
            .collect()
    }

    /// Argmax of the bootstrapped UCB index. Uses the configured correction,
    /// or none at all for [`PolicyKind::NaiveBucb`].
    pub fn bucb_select(&mut self, t: u64) -> Result<usize> {
        self.require_initialized()?;
        if self.num_arms() == 1 {
            return Ok(0);
        }
        let idx = self.bucb_indices(t)?;
        Ok(argmax_by_rule(&idx, &self.tie_rule))
    }

    pub fn ucb1_indices(&self, t: u64) -> Result<Vec<f64>> {
        self.require_initialized()?;
        let alpha = alpha_schedule(t, self.config.schedule);
        let sigma = self.config.sigma_hat;
        Ok(self
            .histories
            .iter()
            .map(|h| h.mean() + sigma * (2.0 * (1.0 / alpha).ln() / h.len() as f64).sqrt())
            .collect())
    }

    pub fn ucb1_select(&self, t: u64) -> Result<usize> {
        let idx = self.ucb1_indices(t)?;
        Ok(argmax_by_rule(&idx, &self.tie_rule))
    }

    pub fn ts_jeffreys_select(&mut self) -> Result<usize> {
        self.require_initialized()?;
        let sigma = self.config.sigma_hat;
        let draws: Vec<f64> = self
            .histories
            .iter()
            .zip(self.arm_streams.iter_mut())
            .map(|(h, rng)| {
                let z: f64 = rng.sample(StandardNormal);
                h.mean() + sigma / (h.len() as f64).sqrt() * z
            })
            .collect();
        Ok(argmax_by_rule(&draws, &self.tie_rule))
    }

    pub fn ts_bernoulli_select(&mut self) -> usize {
        let draws: Vec<f64> = (0..self.num_arms())
            .map(|k| {
                let a = 1.0 + self.successes[k] as f64;
                let b = 1.0 + self.failures[k] as f64;
                Beta::new(a, b).expect("positive shapes").sample(&mut self.arm_streams[k])
            })
            .collect();
        argmax_by_rule(&draws, &self.tie_rule)
    }

    /// Records `reward` for `arm`. Bernoulli Thompson sampling also draws a
    /// pseudo-reward `Bernoulli(reward)` and for it rewards must lie in
    /// `[0, 1]`.
    pub fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        if arm >= self.num_arms() {
            return config_err(format!("arm {arm} out of range for {} arms", self.num_arms()));
        }
        if self.config.kind == PolicyKind::TsBernoulli {
            if !(0.0..=1.0).contains(&reward) {
                return Err(Error::EnvironmentMismatch(format!(
                    "Bernoulli Thompson sampling needs rewards in [0, 1], got {reward}"
                )));
            }
            if self.update_stream.random::<f64>() < reward {
                self.successes[arm] += 1;
            } else {
                self.failures[arm] += 1;
            }
        }
        self.histories[arm].push(reward);
        Ok(())
    }
}

/// Index of the maximum; among equal maxima the arm listed first in
/// `tie_rule` wins.
pub fn argmax_by_rule(values: &[f64], tie_rule: &[usize]) -> usize {
    let mut best = tie_rule[0];
    for &k in &tie_rule[1..] {
        if values[k] > values[best] {
            best = k;
        }
    }
    best
}
