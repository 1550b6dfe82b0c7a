//! Multiplier-bootstrap quantiles and the second-order corrected threshold.
//!
//! For rewards `y_1..y_n` with mean `ybar`, a bootstrap draw is the centered
//! statistic `(1/n) sum_i w_i (y_i - ybar)` for random multipliers `w`. The
//! upper `alpha` quantile of its law (conditionally on the data) estimates
//! the `1 - alpha` quantile of `ybar - mu`. On its own that estimate is too
//! small for tiny samples, so [`corrected_threshold`] adds a correction
//! built from a coarse preliminary bound `phi`.

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, data_err, Error, Result};
use crate::history::{ArmHistory, BLOCK};

/// Largest sample size accepted by [`exact_rademacher_quantile`].
pub const MAX_EXACT_N: usize = 20;

/// Distribution of the bootstrap multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightScheme {
    /// i.i.d. signs, each +1 or -1 with probability 1/2.
    #[default]
    Rademacher,
    /// i.i.d. standard normal multipliers.
    Gaussian,
    /// Multinomial(n; 1/n, ..., 1/n) counts, i.e. resampling with replacement.
    #[serde(alias = "efron")]
    EfronMultinomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiKind {
    #[default]
    SubGaussian,
    SubWeibull,
}

/// Preliminary deviation bound used by the correction term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhiSpec {
    pub kind: PhiKind,
    /// Upper bound on the sub-Gaussian parameter or the psi_beta norm.
    pub sigma: f64,
    /// Tail exponent; only read by the sub-Weibull kind.
    pub beta: f64,
    /// Absolute constant of the sub-Weibull bound.
    pub c_beta: f64,
}

impl Default for PhiSpec {
    fn default() -> Self {
        Self::sub_gaussian(1.0)
    }
}

impl PhiSpec {
    pub fn sub_gaussian(sigma: f64) -> Self {
        Self { kind: PhiKind::SubGaussian, sigma, beta: 2.0, c_beta: 1.0 }
    }

    pub fn sub_weibull(sigma: f64, beta: f64, c_beta: f64) -> Self {
        Self { kind: PhiKind::SubWeibull, sigma, beta, c_beta }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return config_err(format!("phi sigma must be finite and >= 0, got {}", self.sigma));
        }
        if !(self.beta > 0.0) || !(self.c_beta > 0.0) {
            return config_err(format!(
                "phi needs beta > 0 and c_beta > 0, got beta={} c_beta={}",
                self.beta, self.c_beta
            ));
        }
        Ok(())
    }

    pub fn eval(&self, n: usize, alpha: f64) -> f64 {
        match self.kind {
            PhiKind::SubGaussian => phi_sub_gaussian(n, alpha, self.sigma),
            PhiKind::SubWeibull => phi_sub_weibull(n, alpha, self),
        }
    }
}

/// How the correction term is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrectionMode {
    /// `sqrt(ln(2/(alpha delta)) / n) * phi(n, alpha)`.
    Theoretical,
    /// `phi(n, alpha) / sqrt(n)`.
    #[default]
    Practical,
    /// No correction: the naive bootstrap.
    None,
}

/// Everything needed to turn an arm history into a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapSpec {
    pub scheme: WeightScheme,
    /// Number of bootstrap repetitions `B`.
    pub reps: usize,
    /// Confidence level `alpha`.
    pub alpha: f64,
    /// Split `delta`; the quantile is taken at level `alpha (1 - delta)`.
    pub delta: f64,
    pub phi: PhiSpec,
    pub correction: CorrectionMode,
    /// Use `sqrt(2 ln(2/(alpha delta)) / n)` in theoretical mode instead of
    /// `sqrt(ln(2/(alpha delta)) / n)`.
    pub proof_constant: bool,
}

impl Default for BootstrapSpec {
    fn default() -> Self {
        Self {
            scheme: WeightScheme::Rademacher,
            reps: 200,
            alpha: 0.05,
            delta: 0.1,
            phi: PhiSpec::default(),
            correction: CorrectionMode::Practical,
            proof_constant: false,
        }
    }
}

impl BootstrapSpec {
    pub fn validate(&self) -> Result<()> {
        check_level(self.alpha, "alpha")?;
        check_level(self.delta, "delta")?;
        if self.reps == 0 {
            return config_err("bootstrap needs at least one repetition");
        }
        self.phi.validate()
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Level at which the bootstrap quantile is taken.
    pub fn quantile_level(&self) -> f64 {
        self.alpha * (1.0 - self.delta)
    }

    /// Additive correction for a sample of size `n`.
    pub fn correction_term(&self, n: usize) -> f64 {
        let phi = || self.phi.eval(n, self.alpha);
        match self.correction {
            CorrectionMode::None => 0.0,
            CorrectionMode::Practical => phi() / (n as f64).sqrt(),
            CorrectionMode::Theoretical => {
                let factor = if self.proof_constant { 2.0 } else { 1.0 };
                let log_term = (2.0 / (self.alpha * self.delta)).ln();
                (factor * log_term / n as f64).sqrt() * phi()
            }
        }
    }
}

fn check_level(x: f64, name: &str) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        config_err(format!("{name} must lie in (0, 1), got {x}"))
    }
}

/// A bootstrap quantile together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileEstimate {
    pub value: f64,
    /// Number of bootstrap statistics (`2^n` for the exact path).
    pub reps_used: usize,
    /// True when computed by full enumeration of the weight law.
    pub exact: bool,
}

/// `(1/n) sum_i w_i (y_i - ybar)`.
pub fn centered_bootstrap_statistic(samples: &[f64], weights: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return data_err("bootstrap statistic of an empty sample");
    }
    if samples.len() != weights.len() {
        return data_err(format!("{} samples but {} weights", samples.len(), weights.len()));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let s: f64 = samples.iter().zip(weights).map(|(y, w)| w * (y - mean)).sum();
    Ok(s / n)
}

/// Monte Carlo quantile: the `(floor(B alpha) + 1)`-th largest statistic,
/// i.e. the infimum of `x` with `(1/B) #{stat_b >= x} <= alpha`.
pub fn mc_quantile(stats: &[f64], alpha: f64) -> Result<QuantileEstimate> {
    check_level(alpha, "alpha")?;
    if stats.is_empty() {
        return data_err("quantile of an empty statistic list");
    }
    if stats.iter().any(|s| s.is_nan()) {
        return data_err("NaN in bootstrap statistics");
    }
    let b = stats.len();
    let rank = order_rank(b, alpha);
    let mut sorted = stats.to_vec();
    let (_, value, _) = sorted.select_nth_unstable_by(b - rank, f64::total_cmp);
    Ok(QuantileEstimate { value: *value, reps_used: b, exact: false })
}

/// Rank (1 = largest) selected by [`mc_quantile`].
pub fn order_rank(b: usize, alpha: f64) -> usize {
    ((b as f64 * alpha).floor() as usize + 1).min(b)
}

/// Exact Rademacher quantile by enumerating all `2^n` sign vectors.
pub fn exact_rademacher_quantile(samples: &[f64], alpha: f64) -> Result<QuantileEstimate> {
    check_level(alpha, "alpha")?;
    let n = samples.len();
    if n == 0 {
        return data_err("quantile of an empty sample");
    }
    if n > MAX_EXACT_N {
        return config_err(format!("exact enumeration refuses n = {n} > {MAX_EXACT_N}"));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let resid: Vec<f64> = samples.iter().map(|y| y - mean).collect();
    let total = 1usize << n;
    let mut stats: Vec<f64> = (0..total)
        .map(|mask| {
            let s: f64 = resid.iter().enumerate().map(|(i, r)| if mask >> i & 1 == 1 { *r } else { -*r }).sum();
            s / n as f64
        })
        .collect();
    stats.sort_unstable_by(f64::total_cmp);
    // Smallest atom v with #{stat > v} <= alpha 2^n.
    let budget = alpha * total as f64;
    let mut i = 0;
    while i < total {
        let v = stats[i];
        let mut j = i;
        while j < total && stats[j] == v {
            j += 1;
        }
        if (total - j) as f64 <= budget {
            return Ok(QuantileEstimate { value: v, reps_used: total, exact: true });
        }
        i = j;
    }
    unreachable!("the largest atom always satisfies the bound")
}

/// `sigma sqrt(2 ln(1/alpha) / n)`.
pub fn phi_sub_gaussian(n: usize, alpha: f64, sigma: f64) -> f64 {
    sigma * (2.0 * (1.0 / alpha).ln() / n as f64).sqrt()
}

/// `C sigma (sqrt(ln(1/alpha) / n) + ln(2/alpha)^(1/beta) / n)`.
pub fn phi_sub_weibull(n: usize, alpha: f64, phi: &PhiSpec) -> f64 {
    let n = n as f64;
    let first = ((1.0 / alpha).ln() / n).sqrt();
    let second = (2.0 / alpha).ln().powf(1.0 / phi.beta) / n;
    phi.c_beta * phi.sigma * (first + second)
}

/// Multinomial(n; 1/n, ..., 1/n) counts from `n` uniform index draws.
pub fn efron_counts<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<u32> {
    let mut counts = vec![0u32; n];
    for _ in 0..n {
        counts[rng.random_range(0..n)] += 1;
    }
    counts
}

const POPCOUNT: [u8; 256] = {
    let mut t = [0u8; 256];
    let mut i = 0;
    while i < 256 {
        t[i] = (i as u32).count_ones() as u8;
        i += 1;
    }
    t
};

/// Draws `reps` bootstrap statistics for the history.
///
/// Rademacher signs are taken from random bytes: byte `(j, b)` of the buffer
/// holds the signs of block `j` for repetition `b` (bit set means +1), and a
/// final row of bytes holds the signs of the incomplete trailing block.
pub fn bootstrap_statistics<R: RngCore + ?Sized>(
    history: &ArmHistory,
    scheme: WeightScheme,
    reps: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if history.is_empty() {
        return data_err("bootstrap of an empty history");
    }
    let stats = match scheme {
        WeightScheme::Rademacher => rademacher_statistics(history, reps, rng),
        WeightScheme::Gaussian => {
            let ys = history.rewards();
            let mean = history.mean();
            let n = ys.len() as f64;
            (0..reps)
                .map(|_| {
                    let s: f64 = ys
                        .iter()
                        .map(|y| {
                            let w: f64 = rng.sample(StandardNormal);
                            w * (y - mean)
                        })
                        .sum();
                    s / n
                })
                .collect()
        }
        WeightScheme::EfronMultinomial => {
            let ys = history.rewards();
            let mean = history.mean();
            let n = ys.len();
            (0..reps)
                .map(|_| {
                    let counts = efron_counts(n, rng);
                    let s: f64 = ys.iter().zip(&counts).map(|(y, &c)| f64::from(c) * (y - mean)).sum();
                    s / n as f64
                })
                .collect()
        }
    };
    Ok(stats)
}

fn rademacher_statistics<R: RngCore + ?Sized>(history: &ArmHistory, reps: usize, rng: &mut R) -> Vec<f64> {
    let ys = history.rewards();
    let n = ys.len();
    let blocks = history.num_blocks();
    let tail = n - blocks * BLOCK;
    let rows = blocks + usize::from(tail > 0);
    let mut signs = vec![0u8; rows * reps];
    rng.fill_bytes(&mut signs);

    let mut sums = vec![0.0f64; reps];
    let mut plus = vec![0u32; reps];
    for j in 0..blocks {
        let table = history.block_table(j);
        let row = &signs[j * reps..(j + 1) * reps];
        for ((s, p), &byte) in sums.iter_mut().zip(plus.iter_mut()).zip(row) {
            *s += table[byte as usize];
            *p += u32::from(POPCOUNT[byte as usize]);
        }
    }
    if tail > 0 {
        let anchor = history.anchor();
        let z: Vec<f64> = ys[blocks * BLOCK..].iter().map(|y| y - anchor).collect();
        let row = &signs[blocks * reps..];
        for ((s, p), &byte) in sums.iter_mut().zip(plus.iter_mut()).zip(row) {
            for (k, zk) in z.iter().enumerate() {
                if byte >> k & 1 == 1 {
                    *s += zk;
                    *p += 1;
                } else {
                    *s -= zk;
                }
            }
        }
    }
    // sum_i w_i (y_i - ybar) = sum_i w_i z_i - zbar sum_i w_i with z = y - y_0.
    let zbar = history.shifted_mean();
    let nf = n as f64;
    sums.iter()
        .zip(&plus)
        .map(|(s, &p)| {
            let weight_sum = 2.0 * f64::from(p) - nf;
            (s - zbar * weight_sum) / nf
        })
        .collect()
}

/// Monte Carlo bootstrap quantile of the history at `level`.
pub fn bootstrap_quantile<R: RngCore + ?Sized>(
    history: &ArmHistory,
    scheme: WeightScheme,
    reps: usize,
    level: f64,
    rng: &mut R,
) -> Result<QuantileEstimate> {
    let stats = bootstrap_statistics(history, scheme, reps, rng)?;
    mc_quantile(&stats, level)
}

/// The two parts of a corrected threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub quantile: f64,
    pub correction: f64,
}

impl Threshold {
    pub fn total(&self) -> f64 {
        self.quantile + self.correction
    }
}

/// Bootstrap quantile at level `alpha (1 - delta)` plus the correction
/// selected by `spec.correction`. Fresh weights are drawn on every call.
pub fn corrected_threshold<R: RngCore + ?Sized>(
    history: &ArmHistory,
    spec: &BootstrapSpec,
    rng: &mut R,
) -> Result<f64> {
    threshold_parts(history, spec, rng).map(|t| t.total())
}

/// Like [`corrected_threshold`] but returns the quantile and correction
/// separately.
pub fn threshold_parts<R: RngCore + ?Sized>(
    history: &ArmHistory,
    spec: &BootstrapSpec,
    rng: &mut R,
) -> Result<Threshold> {
    spec.validate()?;
    if history.is_empty() {
        return Err(Error::Data("threshold of an empty history".into()));
    }
    let q = bootstrap_quantile(history, spec.scheme, spec.reps, spec.quantile_level(), rng)?;
    Ok(Threshold { quantile: q.value, correction: spec.correction_term(history.len()) })
}
