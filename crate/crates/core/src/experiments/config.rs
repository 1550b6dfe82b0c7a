//! Regret-experiment configuration and the built-in presets.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::distributions::{EnvPreset, EnvironmentSpec, RewardDist};
use crate::error::{config_err, Result};
use crate::mab::EnvSource;
use crate::policies::{PolicyConfig, PolicyKind};

/// Arms of a regret experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvironmentConfig {
    /// A named recipe, redrawn for every episode.
    Preset(EnvPreset),
    /// Explicit arm distributions, identical in every episode.
    Arms(Vec<RewardDist>),
}

impl EnvironmentConfig {
    pub fn source(&self) -> Result<EnvSource> {
        Ok(match self {
            Self::Preset(p) => EnvSource::Preset(*p),
            Self::Arms(arms) => EnvSource::Fixed(EnvironmentSpec::new(arms.clone())?),
        })
    }

    pub fn num_arms(&self) -> usize {
        match self {
            Self::Preset(_) => crate::distributions::NUM_PRESET_ARMS,
            Self::Arms(a) => a.len(),
        }
    }

    fn unit_interval_rewards(&self) -> bool {
        match self {
            Self::Preset(p) => p.unit_interval_rewards(),
            Self::Arms(arms) => arms.iter().all(|a| {
                let (lo, hi) = a.support();
                lo >= 0.0 && hi <= 1.0
            }),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

/// A complete regret experiment as one JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub environment: EnvironmentConfig,
    pub policies: Vec<PolicyConfig>,
    #[serde(alias = "T")]
    pub horizon: usize,
    pub n_seeds: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.environment.source()?;
        if self.n_seeds == 0 {
            return config_err("n_seeds must be >= 1");
        }
        if self.policies.is_empty() {
            return config_err("at least one policy is required");
        }
        let k = self.environment.num_arms();
        if self.horizon < k {
            return config_err(format!("horizon {} is shorter than the {k} initialisation rounds", self.horizon));
        }
        let mut labels: Vec<String> = Vec::new();
        for p in &self.policies {
            p.validate()?;
            let label = p.label();
            if labels.contains(&label) {
                return config_err(format!("duplicate policy label `{label}`"));
            }
            if p.kind == PolicyKind::TsBernoulli && !self.environment.unit_interval_rewards() {
                return config_err("ts-bernoulli needs an environment with rewards in [0, 1]");
            }
            labels.push(label);
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Default horizon of the regret presets.
pub const DEFAULT_HORIZON: usize = 5000;
/// Seeds averaged by the regret presets.
pub const DEFAULT_SEEDS: usize = 200;

/// Policies compared on a preset and the noise bound they are given.
pub fn preset_policies(preset: EnvPreset) -> Vec<PolicyConfig> {
    let (sigma, ts) =
        if preset.unit_interval_rewards() { (0.5, PolicyKind::TsBernoulli) } else { (1.0, PolicyKind::TsJeffreys) };
    [PolicyKind::Bucb, PolicyKind::Ucb1, ts].into_iter().map(|k| PolicyConfig::new(k, sigma)).collect()
}

/// The regret experiment behind a preset name such as `truncnorm-K5` or
/// `gap-instance(0.3)`.
pub fn preset_config(name: &str) -> Result<ExperimentConfig> {
    let preset: EnvPreset = name.parse()?;
    Ok(ExperimentConfig {
        name: Some(preset.name()),
        environment: EnvironmentConfig::Preset(preset),
        policies: preset_policies(preset),
        horizon: DEFAULT_HORIZON,
        n_seeds: DEFAULT_SEEDS,
        base_seed: 0,
        output: OutputPaths::default(),
    })
}

/// A built-in preset and the command that runs it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresetInfo {
    pub name: &'static str,
    pub command: &'static str,
    pub summary: &'static str,
}

pub const PRESETS: [PresetInfo; 12] = [
    PresetInfo {
        name: "truncnorm-K5",
        command: "mab run",
        summary: "truncated Normal(mu_k, 1) on [-1, 1], mu_k ~ U(-1, 1); bucb, ucb1, ts-jeffreys",
    },
    PresetInfo {
        name: "gaussian-K5",
        command: "mab run",
        summary: "Normal(mu_k, 1), mu_k ~ U(-1, 1); bucb, ucb1, ts-jeffreys",
    },
    PresetInfo {
        name: "logistic-K5",
        command: "mab run",
        summary: "Logistic(mu_k, 0.5), mu_k ~ U(-1, 1); bucb, ucb1, ts-jeffreys",
    },
    PresetInfo {
        name: "bernoulli-K5",
        command: "mab run",
        summary: "Bernoulli(mu_k), mu_k ~ U(0.25, 0.75); bucb, ucb1, ts-bernoulli",
    },
    PresetInfo {
        name: "beta-K5",
        command: "mab run",
        summary: "Beta(8 mu_k, 8 (1 - mu_k)), mu_k ~ U(0.25, 0.75); bucb, ucb1, ts-bernoulli",
    },
    PresetInfo {
        name: "gap-instance(<delta>)",
        command: "mab run",
        summary: "truncated normal arms with locations (delta, 0, 0, 0, 0)",
    },
    PresetInfo { name: "gap-sweep", command: "mab gap-sweep", summary: "final regret at T = 2000 over a grid of gaps" },
    PresetInfo {
        name: "sigma-sweep",
        command: "mab sigma-sweep",
        summary: "final regret at T = 2000 on gaussian-K5 for plug-in sigma 1, 2, 4",
    },
    PresetInfo {
        name: "naive-regret",
        command: "naive-regret",
        summary: "naive bootstrapped UCB on Bernoulli(0.9, 0.8) against its linear lower bound",
    },
    PresetInfo { name: "linear", command: "linear run", summary: "d = 10, 100 arms; oful, tsl, bucbl" },
    PresetInfo {
        name: "bound-compare",
        command: "bound-compare",
        summary: "confidence bounds for the mean of truncated-normal data over sample sizes",
    },
    PresetInfo {
        name: "coverage-test",
        command: "coverage-test",
        summary: "miscoverage of the corrected threshold on symmetric populations",
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for name in ["truncnorm-K5", "gaussian-K5", "logistic-K5", "bernoulli-K5", "beta-K5", "gap-instance(0.25)"] {
            let cfg = preset_config(name).unwrap();
            cfg.validate().unwrap();
            let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
            assert_eq!(back, cfg);
        }
        assert!(preset_config("nope").is_err());
    }

    #[test]
    fn explicit_config_parses() {
        let json = r#"{
            "environment": {"arms": [{"kind": "bernoulli", "p": 0.9}, {"kind": "bernoulli", "p": 0.8}]},
            "policies": [{"kind": "naive-bucb"}, {"kind": "ts-bernoulli", "sigma_hat": 0.5}],
            "T": 100,
            "n_seeds": 3
        }"#;
        let cfg = ExperimentConfig::from_json(json).unwrap();
        assert_eq!(cfg.horizon, 100);
        assert_eq!(cfg.policies[0].kind, PolicyKind::NaiveBucb);
        assert_eq!(cfg.policies[0].bootstrap.reps, 200);
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = r#""policies": [{"kind": "ucb1"}], "T": 100, "n_seeds": 3"#;
        let bad = [
            r#"{"environment": {"preset": "truncnorm-K5"}, "policies": [{"kind": "nope"}], "T": 100, "n_seeds": 3}"#.to_string(),
            r#"{"environment": {"preset": "truncnorm-K5"}, "policies": [{"kind": "ts-bernoulli"}], "T": 100, "n_seeds": 3}"#.to_string(),
            r#"{"environment": {"preset": "truncnorm-K5"}, "policies": [{"kind": "ucb1"}], "T": 100, "n_seeds": 0}"#.to_string(),
            r#"{"environment": {"preset": "truncnorm-K5"}, "policies": [{"kind": "ucb1"}, {"kind": "ucb1"}], "T": 100, "n_seeds": 3}"#.to_string(),
            r#"{"environment": {"preset": "truncnorm-K5"}, "policies": [{"kind": "ucb1"}], "T": 3, "n_seeds": 3}"#.to_string(),
            format!(r#"{{"environment": {{"arms": [{{"kind": "bernoulli", "p": 1.5}}]}}, {base}}}"#),
            format!(r#"{{"environment": {{"preset": "truncnorm-K5"}}, {base}, "extra": 1}}"#),
        ];
        for json in &bad {
            assert!(ExperimentConfig::from_json(json).is_err(), "{json}");
        }
    }
}
