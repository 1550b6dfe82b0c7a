//! Episode loop, pseudo-regret accounting and multi-seed aggregation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{make_environment, EnvPreset, EnvironmentSpec};
use crate::error::{config_err, data_err, Error, Result};
use crate::policies::{PolicyConfig, PolicyState};
use crate::rng::{environment_seed, episode_seed, mix64, stream};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "BOOTUCB_THREADS";

/// One episode: cumulative pseudo-regret, chosen arms and observed rewards
/// per round.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub cumulative: Vec<f64>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    pub seed: u64,
}

impl RegretTrace {
    pub fn horizon(&self) -> usize {
        self.cumulative.len()
    }

    pub fn final_regret(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn pull_counts(&self, num_arms: usize) -> Vec<usize> {
        let mut counts = vec![0; num_arms];
        for &a in &self.actions {
            counts[a] += 1;
        }
        counts
    }
}

/// Pointwise mean and standard error over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCurve {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_seeds: usize,
}

impl AggregateCurve {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn final_mean(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }

    pub fn final_stderr(&self) -> f64 {
        self.stderr.last().copied().unwrap_or(0.0)
    }
}

/// Runs one episode of `horizon` rounds. The first `K` rounds pull every arm
/// once in the policy's tie-rule order.
pub fn run_episode(env: &EnvironmentSpec, config: &PolicyConfig, horizon: usize, seed: u64) -> Result<RegretTrace> {
    let k = env.num_arms();
    if horizon < k {
        return config_err(format!("horizon {horizon} is shorter than the {k} initialisation rounds"));
    }
    let mut state = PolicyState::new(config.clone(), k, mix64(seed ^ 0x7031))?;
    let mut reward_rng = stream(mix64(seed ^ 0x7232));
    let gaps = env.gaps();

    let mut trace = RegretTrace {
        cumulative: Vec::with_capacity(horizon),
        actions: Vec::with_capacity(horizon),
        rewards: Vec::with_capacity(horizon),
        seed,
    };
    let mut regret = 0.0;
    for t in 1..=horizon {
        let arm = if t <= k { state.tie_rule()[t - 1] } else { state.select(t as u64)? };
        let reward = env.sample(arm, &mut reward_rng);
        state.update(arm, reward)?;
        regret += gaps[arm];
        trace.cumulative.push(regret);
        trace.actions.push(arm);
        trace.rewards.push(reward);
    }
    Ok(trace)
}

fn check_lengths(mut lens: impl Iterator<Item = usize>, what: &str) -> Result<usize> {
    let first = lens.next().ok_or_else(|| Error::Data(format!("no {what} to aggregate")))?;
    if let Some(other) = lens.find(|&l| l != first) {
        return data_err(format!("{what} lengths differ: {first} vs {other}"));
    }
    Ok(first)
}

/// Pointwise mean and standard error (sample std over `sqrt(n)`). With a
/// single trace the standard error is reported as 0.
pub fn aggregate(traces: &[RegretTrace]) -> Result<AggregateCurve> {
    let curves: Vec<&[f64]> = traces.iter().map(|t| t.cumulative.as_slice()).collect();
    aggregate_curves(&curves)
}

pub fn aggregate_curves(curves: &[&[f64]]) -> Result<AggregateCurve> {
    let len = check_lengths(curves.iter().map(|c| c.len()), "curve")?;
    let n = curves.len() as f64;
    let mut mean = vec![0.0; len];
    let mut stderr = vec![0.0; len];
    for i in 0..len {
        let m = curves.iter().map(|c| c[i]).sum::<f64>() / n;
        mean[i] = m;
        if curves.len() > 1 {
            let ss: f64 = curves.iter().map(|c| (c[i] - m).powi(2)).sum();
            stderr[i] = (ss / (n - 1.0) / n).sqrt();
        }
    }
    Ok(AggregateCurve { mean, stderr, n_seeds: curves.len() })
}

/// Reads the worker cap from the environment, defaulting to the available
/// parallelism.
pub fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0).unwrap_or(available)
}

/// Evaluates `job(i)` for `i in 0..n` on a bounded pool and returns the
/// results in index order.
pub fn fan_out<T, F>(n: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let threads = worker_count();
    if threads == 1 || n <= 1 {
        return (0..n).map(job).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::State(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(&job).collect())
}

/// Where each episode's environment comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvSource {
    /// The same environment in every episode.
    Fixed(EnvironmentSpec),
    /// A fresh draw of the preset per episode, shared by all policies.
    Preset(EnvPreset),
}

impl EnvSource {
    pub fn environment(&self, base_seed: u64, episode: u64) -> Result<EnvironmentSpec> {
        match self {
            Self::Fixed(env) => Ok(env.clone()),
            Self::Preset(p) => make_environment(*p, &mut stream(environment_seed(base_seed, episode))),
        }
    }
}

/// Runs `n_seeds` episodes of one policy. Episode `i` uses seed
/// `episode_seed(base_seed, i, label)`.
pub fn run_seeds(
    source: &EnvSource,
    config: &PolicyConfig,
    horizon: usize,
    n_seeds: usize,
    base_seed: u64,
) -> Result<Vec<RegretTrace>> {
    let label = config.label();
    fan_out(n_seeds, |i| {
        let env = source.environment(base_seed, i as u64)?;
        run_episode(&env, config, horizon, episode_seed(base_seed, i as u64, &label))
    })
}

/// Like [`run_seeds`] for several policies at once; the (policy, seed)
/// grid is spread over the pool as a whole.
pub fn run_policies(
    source: &EnvSource,
    configs: &[PolicyConfig],
    horizon: usize,
    n_seeds: usize,
    base_seed: u64,
) -> Result<Vec<Vec<RegretTrace>>> {
    let labels: Vec<String> = configs.iter().map(PolicyConfig::label).collect();
    let mut flat = fan_out(configs.len() * n_seeds, |job| {
        let (p, i) = (job / n_seeds.max(1), job % n_seeds.max(1));
        let env = source.environment(base_seed, i as u64)?;
        run_episode(&env, &configs[p], horizon, episode_seed(base_seed, i as u64, &labels[p]))
    })?
    .into_iter();
    Ok((0..configs.len()).map(|_| flat.by_ref().take(n_seeds).collect()).collect())
}

/// Mean and standard error of one policy's final regret at one gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSweepRow {
    /// Location parameter of the first arm.
    pub delta: f64,
    /// Actual gap between the first arm's mean and the others'.
    pub true_gap: f64,
    pub policy: String,
    pub mean_final: f64,
    pub stderr_final: f64,
    pub n_seeds: usize,
}

/// For each `delta` builds the gap instance and runs every policy.
pub fn gap_sweep(
    deltas: &[f64],
    configs: &[PolicyConfig],
    horizon: usize,
    n_seeds: usize,
    base_seed: u64,
) -> Result<Vec<GapSweepRow>> {
    let mut rows = Vec::new();
    for &delta in deltas {
        if !(delta >= 0.0) {
            return config_err(format!("gap sweep values must be >= 0, got {delta}"));
        }
        let env = make_environment(EnvPreset::GapInstance(delta), &mut stream(0))?;
        let true_gap = env.gaps().iter().copied().fold(0.0, f64::max);
        let source = EnvSource::Fixed(env);
        let runs = run_policies(&source, configs, horizon, n_seeds, base_seed)?;
        for (config, traces) in configs.iter().zip(runs) {
            let finals: Vec<f64> = traces.iter().map(RegretTrace::final_regret).collect();
            let (mean_final, stderr_final) = mean_stderr(&finals);
            rows.push(GapSweepRow {
                delta,
                true_gap,
                policy: config.label(),
                mean_final,
                stderr_final,
                n_seeds: traces.len(),
            });
        }
    }
    Ok(rows)
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}
