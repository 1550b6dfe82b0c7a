//! The experiments behind each command.

use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_quantile, threshold_parts, BootstrapSpec, CorrectionMode, PhiSpec, WeightScheme};
use crate::concentration::{empirical_bernstein_bound, hoeffding_bound};
use crate::distributions::{EnvPreset, EnvironmentSpec, RewardDist};
use crate::error::{config_err, Result};
use crate::experiments::config::ExperimentConfig;
use crate::experiments::output::{NamedCurve, Plot, Series};
use crate::history::ArmHistory;
use crate::linear::{make_linear_instance, run_linear_episode, LinearPolicyConfig, LinearPolicyKind, DEFAULT_DIM};
use crate::mab::{aggregate, fan_out, gap_sweep, mean_stderr, run_policies, EnvSource, GapSweepRow};
use crate::policies::{PolicyConfig, PolicyKind};
use crate::rng::{environment_seed, episode_seed, stream, substream};

/// Runs a regret experiment and aggregates each policy over seeds.
pub fn mab_run(cfg: &ExperimentConfig) -> Result<Vec<NamedCurve>> {
    cfg.validate()?;
    let source = cfg.environment.source()?;
    let runs = run_policies(&source, &cfg.policies, cfg.horizon, cfg.n_seeds, cfg.base_seed)?;
    cfg.policies.iter().zip(runs).map(|(p, traces)| Ok(NamedCurve::new(p.label(), aggregate(&traces)?))).collect()
}

/// Confidence bounds for the mean of truncated-normal data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundCompareConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    /// Draws of the sample mean used to locate its true quantile.
    pub reference_trials: usize,
    pub reps: usize,
    pub alpha: f64,
    pub delta: f64,
    /// Sub-Gaussian parameter used by the correction and by Hoeffding.
    pub sigma: f64,
    pub correction: CorrectionMode,
    /// Truncated Normal(0, 1) on [-bound, bound].
    pub bound: f64,
    pub seed: u64,
}

impl Default for BoundCompareConfig {
    fn default() -> Self {
        Self {
            sizes: vec![2, 3, 5, 10, 20, 50, 100, 200, 500],
            trials: 2000,
            reference_trials: 100_000,
            reps: 200,
            alpha: 0.05,
            delta: 0.5,
            sigma: 1.0,
            correction: CorrectionMode::Theoretical,
            bound: 1.0,
            seed: 0,
        }
    }
}

pub const BOUND_METHODS: [&str; 5] = ["corrected", "naive", "hoeffding", "empirical-bernstein", "exact"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCompareRow {
    pub n: usize,
    pub method: String,
    /// Fraction of trials with `mean - mu <= bound`.
    pub coverage: f64,
    pub mean_width: f64,
    pub trials: usize,
}

impl BoundCompareConfig {
    fn validate(&self) -> Result<()> {
        if self.sizes.iter().any(|&n| n < 2) || self.sizes.is_empty() {
            return config_err("sample sizes must be >= 2");
        }
        if self.trials == 0 || self.reference_trials == 0 {
            return config_err("trial counts must be >= 1");
        }
        if !(self.bound > 0.0) {
            return config_err("truncation bound must be positive");
        }
        self.spec().validate()
    }

    /// Spec of the corrected threshold.
    pub fn spec(&self) -> BootstrapSpec {
        BootstrapSpec {
            scheme: WeightScheme::Rademacher,
            reps: self.reps,
            alpha: self.alpha,
            delta: self.delta,
            phi: PhiSpec::sub_gaussian(self.sigma),
            correction: self.correction,
            proof_constant: false,
        }
    }
}

/// Coverage and average width of each bound. The naive bound is the plain
/// level-`alpha` bootstrap quantile; `exact` is the true `1 - alpha`
/// quantile of the sample mean, found by simulation.
pub fn bound_compare(cfg: &BoundCompareConfig) -> Result<Vec<BoundCompareRow>> {
    cfg.validate()?;
    let pop = RewardDist::truncated_normal(0.0, 1.0, -cfg.bound, cfg.bound)?;
    let mu = pop.true_mean();
    let spec = cfg.spec();
    let range = 2.0 * cfg.bound;
    let per_size = fan_out(cfg.sizes.len(), |i| {
        let n = cfg.sizes[i];
        let mut reference_rng = substream(cfg.seed, 2 * i as u64);
        let mut devs: Vec<f64> = (0..cfg.reference_trials)
            .map(|_| (0..n).map(|_| pop.sample(&mut reference_rng)).sum::<f64>() / n as f64 - mu)
            .collect();
        devs.sort_by(f64::total_cmp);
        let exact = devs[((1.0 - cfg.alpha) * cfg.reference_trials as f64).ceil() as usize - 1];

        let mut rng = substream(cfg.seed, 2 * i as u64 + 1);
        let mut covered = [0usize; 5];
        let mut width = [0.0f64; 5];
        for _ in 0..cfg.trials {
            let ys: Vec<f64> = (0..n).map(|_| pop.sample(&mut rng)).collect();
            let h = ArmHistory::from_rewards(&ys);
            let dev = h.mean() - mu;
            let bounds = [
                threshold_parts(&h, &spec, &mut rng)?.total(),
                bootstrap_quantile(&h, WeightScheme::Rademacher, cfg.reps, cfg.alpha, &mut rng)?.value,
                hoeffding_bound(n, cfg.alpha, cfg.sigma),
                empirical_bernstein_bound(&ys, cfg.alpha, range)?,
                exact,
            ];
            for (m, b) in bounds.iter().enumerate() {
                covered[m] += usize::from(dev <= *b);
                width[m] += b;
            }
        }
        Ok(BOUND_METHODS
            .iter()
            .enumerate()
            .map(|(m, name)| BoundCompareRow {
                n,
                method: name.to_string(),
                coverage: covered[m] as f64 / cfg.trials as f64,
                mean_width: width[m] / cfg.trials as f64,
                trials: cfg.trials,
            })
            .collect::<Vec<_>>())
    })?;
    Ok(per_size.into_iter().flatten().collect())
}

/// Width of each bound against the sample size.
pub fn bound_compare_plot(rows: &[BoundCompareRow]) -> Plot {
    let series = BOUND_METHODS
        .iter()
        .map(|m| {
            let pts: Vec<&BoundCompareRow> = rows.iter().filter(|r| r.method == *m).collect();
            Series {
                label: m.to_string(),
                x: pts.iter().map(|r| r.n as f64).collect(),
                y: pts.iter().map(|r| r.mean_width).collect(),
                err: vec![0.0; pts.len()],
            }
        })
        .collect();
    Plot {
        title: "95% upper bounds for the mean".into(),
        x_label: "sample size".into(),
        y_label: "bound".into(),
        series,
    }
}

/// Population of a coverage test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoveragePopulation {
    /// Standard normal.
    Gaussian,
    /// Standard normal truncated to [-1, 1].
    TruncatedNormal,
}

impl CoveragePopulation {
    pub fn dist(&self) -> RewardDist {
        match self {
            Self::Gaussian => RewardDist::Gaussian { mean: 0.0, std: 1.0 },
            Self::TruncatedNormal => RewardDist::TruncatedNormal { loc: 0.0, scale: 1.0, lo: -1.0, hi: 1.0 },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::TruncatedNormal => "truncated-normal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverageConfig {
    pub populations: Vec<CoveragePopulation>,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub reps: usize,
    pub alpha: f64,
    pub delta: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        Self {
            populations: vec![CoveragePopulation::Gaussian, CoveragePopulation::TruncatedNormal],
            sizes: vec![2, 5, 10, 30],
            trials: 10_000,
            reps: 200,
            alpha: 0.05,
            delta: 0.5,
            sigma: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub population: String,
    pub n: usize,
    pub trials: usize,
    /// Fraction of trials with `mean - mu > threshold`.
    pub miscoverage: f64,
    /// `2 alpha + 1/(B+1)`.
    pub nominal: f64,
    /// `nominal` plus three binomial standard errors.
    pub limit: f64,
    pub pass: bool,
}

/// Miscoverage of the theoretically corrected threshold.
pub fn coverage_test(cfg: &CoverageConfig) -> Result<Vec<CoverageRow>> {
    if cfg.trials == 0 || cfg.sizes.contains(&0) {
        return config_err("coverage test needs trials >= 1 and sizes >= 1");
    }
    let spec = BootstrapSpec {
        scheme: WeightScheme::Rademacher,
        reps: cfg.reps,
        alpha: cfg.alpha,
        delta: cfg.delta,
        phi: PhiSpec::sub_gaussian(cfg.sigma),
        correction: CorrectionMode::Theoretical,
        proof_constant: false,
    };
    spec.validate()?;
    let cells: Vec<(usize, CoveragePopulation, usize)> =
        cfg.populations.iter().enumerate().flat_map(|(p, &pop)| cfg.sizes.iter().map(move |&n| (p, pop, n))).collect();
    let nominal = 2.0 * cfg.alpha + 1.0 / (cfg.reps as f64 + 1.0);
    let limit = nominal + 3.0 * (nominal * (1.0 - nominal) / cfg.trials as f64).sqrt();
    fan_out(cells.len(), |c| {
        let (p, pop, n) = cells[c];
        let dist = pop.dist();
        let mu = dist.true_mean();
        let mut rng = substream(cfg.seed, (p * 1000 + n) as u64);
        let mut misses = 0usize;
        for _ in 0..cfg.trials {
            let ys: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
            let h = ArmHistory::from_rewards(&ys);
            let thr = threshold_parts(&h, &spec, &mut rng)?.total();
            misses += usize::from(h.mean() - mu > thr);
        }
        let miscoverage = misses as f64 / cfg.trials as f64;
        Ok(CoverageRow {
            population: pop.name().into(),
            n,
            trials: cfg.trials,
            miscoverage,
            nominal,
            limit,
            pass: miscoverage <= limit,
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NaiveRegretConfig {
    pub mu: [f64; 2],
    pub horizon: usize,
    pub n_seeds: usize,
    pub reps: usize,
    pub base_seed: u64,
}

impl Default for NaiveRegretConfig {
    fn default() -> Self {
        Self { mu: [0.9, 0.8], horizon: 1000, n_seeds: 500, reps: 200, base_seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveRegretReport {
    pub curve: NamedCurve,
    /// `Δ₂ ((1 − μ₁) μ₂ (T − 2) + 1)`.
    pub lower_bound: f64,
    pub mean_final: f64,
    pub stderr_final: f64,
    /// Average regret per round over the first half of the horizon.
    pub early_slope: f64,
    /// Average regret per round over the second half.
    pub late_slope: f64,
}

/// Lower bound on the expected regret of naive bootstrapped UCB on a
/// two-armed Bernoulli instance with `mu1 > mu2`.
pub fn naive_lower_bound(mu1: f64, mu2: f64, horizon: usize) -> f64 {
    (mu1 - mu2) * ((1.0 - mu1) * mu2 * (horizon as f64 - 2.0) + 1.0)
}

pub fn naive_regret(cfg: &NaiveRegretConfig) -> Result<NaiveRegretReport> {
    let [mu1, mu2] = cfg.mu;
    if !(mu1 > mu2) {
        return config_err("the first arm must be the better one");
    }
    if cfg.horizon < 4 || cfg.n_seeds == 0 {
        return config_err("naive regret needs T >= 4 and at least one seed");
    }
    let env = EnvironmentSpec::new(vec![RewardDist::bernoulli(mu1)?, RewardDist::bernoulli(mu2)?])?;
    let mut policy = PolicyConfig::new(PolicyKind::NaiveBucb, 0.5);
    policy.bootstrap.reps = cfg.reps;
    let traces =
        run_policies(&EnvSource::Fixed(env), std::slice::from_ref(&policy), cfg.horizon, cfg.n_seeds, cfg.base_seed)?
            .pop()
            .expect("one policy");
    let curve = aggregate(&traces)?;
    let half = cfg.horizon / 2;
    let early_slope = curve.mean[half - 1] / half as f64;
    let late_slope = (curve.final_mean() - curve.mean[half - 1]) / (cfg.horizon - half) as f64;
    Ok(NaiveRegretReport {
        lower_bound: naive_lower_bound(mu1, mu2, cfg.horizon),
        mean_final: curve.final_mean(),
        stderr_final: curve.final_stderr(),
        early_slope,
        late_slope,
        curve: NamedCurve::new(policy.label(), curve),
    })
}

fn default_sweep_policies() -> Vec<PolicyConfig> {
    [PolicyKind::Bucb, PolicyKind::Ucb1, PolicyKind::TsJeffreys]
        .into_iter()
        .map(|k| PolicyConfig::new(k, 1.0))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GapSweepConfig {
    pub deltas: Vec<f64>,
    pub policies: Vec<PolicyConfig>,
    pub horizon: usize,
    pub n_seeds: usize,
    pub base_seed: u64,
}

impl Default for GapSweepConfig {
    fn default() -> Self {
        Self {
            deltas: vec![0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0],
            policies: default_sweep_policies(),
            horizon: 2000,
            n_seeds: 50,
            base_seed: 0,
        }
    }
}

pub fn run_gap_sweep(cfg: &GapSweepConfig) -> Result<Vec<GapSweepRow>> {
    gap_sweep(&cfg.deltas, &cfg.policies, cfg.horizon, cfg.n_seeds, cfg.base_seed)
}

pub fn gap_sweep_plot(rows: &[GapSweepRow]) -> Plot {
    let mut labels: Vec<String> = Vec::new();
    for r in rows {
        if !labels.contains(&r.policy) {
            labels.push(r.policy.clone());
        }
    }
    let series = labels
        .into_iter()
        .map(|label| {
            let pts: Vec<&GapSweepRow> = rows.iter().filter(|r| r.policy == label).collect();
            Series {
                x: pts.iter().map(|r| r.delta).collect(),
                y: pts.iter().map(|r| r.mean_final).collect(),
                err: pts.iter().map(|r| r.stderr_final).collect(),
                label,
            }
        })
        .collect();
    Plot { title: "final regret against the gap".into(), x_label: "gap".into(), y_label: "regret".into(), series }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SigmaSweepConfig {
    pub sigmas: Vec<f64>,
    pub preset: EnvPreset,
    pub policies: Vec<PolicyKind>,
    pub horizon: usize,
    pub n_seeds: usize,
    pub base_seed: u64,
}

impl Default for SigmaSweepConfig {
    fn default() -> Self {
        Self {
            sigmas: vec![1.0, 2.0, 4.0],
            preset: EnvPreset::GaussianK5,
            policies: vec![PolicyKind::Bucb, PolicyKind::Ucb1, PolicyKind::TsJeffreys],
            horizon: 2000,
            n_seeds: 50,
            base_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaSweepRow {
    pub sigma_hat: f64,
    pub policy: String,
    pub mean_final: f64,
    pub stderr_final: f64,
    pub n_seeds: usize,
}

/// Final regret for each plug-in noise bound. Policy labels carry no
/// sigma suffix, so every sigma sees the same environments and seeds.
pub fn sigma_sweep(cfg: &SigmaSweepConfig) -> Result<Vec<SigmaSweepRow>> {
    let source = EnvSource::Preset(cfg.preset);
    let mut rows = Vec::new();
    for &sigma in &cfg.sigmas {
        let configs: Vec<PolicyConfig> = cfg.policies.iter().map(|&k| PolicyConfig::new(k, sigma)).collect();
        let runs = run_policies(&source, &configs, cfg.horizon, cfg.n_seeds, cfg.base_seed)?;
        for (c, traces) in configs.iter().zip(runs) {
            let finals: Vec<f64> = traces.iter().map(|t| t.final_regret()).collect();
            let (mean_final, stderr_final) = mean_stderr(&finals);
            rows.push(SigmaSweepRow {
                sigma_hat: sigma,
                policy: c.label(),
                mean_final,
                stderr_final,
                n_seeds: traces.len(),
            });
        }
    }
    Ok(rows)
}

/// `regret(largest sigma) / regret(smallest sigma)` for `policy`.
pub fn sigma_ratio(rows: &[SigmaSweepRow], policy: &str) -> Option<f64> {
    let pts: Vec<&SigmaSweepRow> = rows.iter().filter(|r| r.policy == policy).collect();
    let lo = pts.iter().min_by(|a, b| a.sigma_hat.total_cmp(&b.sigma_hat))?;
    let hi = pts.iter().max_by(|a, b| a.sigma_hat.total_cmp(&b.sigma_hat))?;
    Some(hi.mean_final / lo.mean_final)
}

pub fn sigma_sweep_plot(rows: &[SigmaSweepRow]) -> Plot {
    let mut labels: Vec<String> = Vec::new();
    for r in rows {
        if !labels.contains(&r.policy) {
            labels.push(r.policy.clone());
        }
    }
    let series = labels
        .into_iter()
        .map(|label| {
            let pts: Vec<&SigmaSweepRow> = rows.iter().filter(|r| r.policy == label).collect();
            Series {
                x: pts.iter().map(|r| r.sigma_hat).collect(),
                y: pts.iter().map(|r| r.mean_final).collect(),
                err: pts.iter().map(|r| r.stderr_final).collect(),
                label,
            }
        })
        .collect();
    Plot {
        title: "final regret against the plug-in noise bound".into(),
        x_label: "sigma_hat".into(),
        y_label: "regret".into(),
        series,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearRunConfig {
    pub dim: usize,
    pub policies: Vec<LinearPolicyConfig>,
    pub horizon: usize,
    pub n_seeds: usize,
    pub base_seed: u64,
}

impl Default for LinearRunConfig {
    fn default() -> Self {
        Self {
            dim: DEFAULT_DIM,
            policies: [LinearPolicyKind::Oful, LinearPolicyKind::Tsl, LinearPolicyKind::Bucbl]
                .into_iter()
                .map(LinearPolicyConfig::new)
                .collect(),
            horizon: 1000,
            n_seeds: 50,
            base_seed: 0,
        }
    }
}

/// Episode `i` draws its instance from `environment_seed(base_seed, i)`, so
/// all policies face the same instances.
pub fn linear_run(cfg: &LinearRunConfig) -> Result<Vec<NamedCurve>> {
    if cfg.n_seeds == 0 || cfg.horizon == 0 || cfg.policies.is_empty() {
        return config_err("linear run needs T >= 1, at least one seed and one policy");
    }
    let labels: Vec<String> = cfg.policies.iter().map(LinearPolicyConfig::label).collect();
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return config_err(format!("duplicate policy label `{l}`"));
        }
        cfg.policies[i].validate()?;
    }
    let n = cfg.n_seeds;
    let traces = fan_out(cfg.policies.len() * n, |job| {
        let (p, i) = (job / n, (job % n) as u64);
        let inst = make_linear_instance(cfg.dim, &mut stream(environment_seed(cfg.base_seed, i)))?;
        run_linear_episode(&inst, &cfg.policies[p], cfg.horizon, episode_seed(cfg.base_seed, i, &labels[p]))
    })?;
    traces.chunks(n).zip(labels).map(|(chunk, label)| Ok(NamedCurve::new(label, aggregate(chunk)?))).collect()
}
