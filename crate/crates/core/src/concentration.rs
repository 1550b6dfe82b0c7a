//! Closed-form deviation bounds for a sample mean, and an empirical
//! calibration of the sub-Weibull constant.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, data_err, Result};

/// Upper limit (exclusive) on `alpha` for the sub-Weibull bound.
pub fn sub_weibull_alpha_limit() -> f64 {
    (-2.0f64).exp()
}

/// `sigma sqrt(2 ln(1/alpha) / n)`.
pub fn hoeffding_bound(n: usize, alpha: f64, sigma: f64) -> f64 {
    sigma * (2.0 * (1.0 / alpha).ln() / n as f64).sqrt()
}

/// `sqrt(2 V ln(3/alpha) / n) + 3 b ln(3/alpha) / n`, with `V` the empirical
/// (1/n) variance and `range_b` the width of the support.
pub fn empirical_bernstein_bound(samples: &[f64], alpha: f64, range_b: f64) -> Result<f64> {
    let n = samples.len();
    if n < 2 {
        return data_err(format!("empirical Bernstein needs at least 2 samples, got {n}"));
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / nf;
    let log = (3.0 / alpha).ln();
    Ok((2.0 * var * log / nf).sqrt() + 3.0 * range_b * log / nf)
}

/// `C sigma (|a|_2 ln(1/alpha)^(1/2) + |a|_inf ln(1/alpha)^(1/beta))`.
///
/// Only valid for `alpha < e^-2`.
pub fn sub_weibull_deviation(a: &[f64], alpha: f64, sigma: f64, beta: f64, c_beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < sub_weibull_alpha_limit()) {
        return config_err(format!("sub-Weibull bound needs 0 < alpha < e^-2, got {alpha}"));
    }
    if !(beta > 0.0) || !(c_beta > 0.0) || !(sigma >= 0.0) {
        return config_err(format!(
            "sub-Weibull bound needs beta > 0, c_beta > 0, sigma >= 0 (got {beta}, {c_beta}, {sigma})"
        ));
    }
    if a.iter().all(|&x| x == 0.0) {
        return data_err("sub-Weibull bound needs a nonzero coefficient vector");
    }
    let l2 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let linf = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let log = (1.0 / alpha).ln();
    Ok(c_beta * sigma * (l2 * log.sqrt() + linf * log.powf(1.0 / beta)))
}

/// A concentration bound on `|ybar - mu|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailBoundSpec {
    Hoeffding { sigma: f64 },
    EmpiricalBernstein { range: f64 },
    SubWeibull { sigma: f64, beta: f64, c_beta: f64 },
}

impl TailBoundSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Hoeffding { sigma } => sigma > 0.0,
            Self::EmpiricalBernstein { range } => range > 0.0,
            Self::SubWeibull { sigma, beta, c_beta } => sigma > 0.0 && beta > 0.0 && c_beta > 0.0,
        };
        if ok {
            Ok(())
        } else {
            config_err(format!("bound parameters must be positive: {self:?}"))
        }
    }

    /// Deviation bound for the mean of `samples`.
    pub fn deviation(&self, samples: &[f64], alpha: f64) -> Result<f64> {
        self.validate()?;
        let n = samples.len();
        if n == 0 {
            return data_err("deviation bound of an empty sample");
        }
        match *self {
            Self::Hoeffding { sigma } => Ok(hoeffding_bound(n, alpha, sigma)),
            Self::EmpiricalBernstein { range } => empirical_bernstein_bound(samples, alpha, range),
            Self::SubWeibull { sigma, beta, c_beta } => {
                let a = vec![1.0 / n as f64; n];
                sub_weibull_deviation(&a, alpha, sigma, beta, c_beta)
            }
        }
    }
}

/// Sample population used to calibrate the sub-Weibull constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Population {
    /// Symmetric `y` with `P(|y| >= t) = exp(-(t / s)^beta)`, rescaled so its
    /// psi_beta norm equals `scale`.
    Reference { beta: f64, scale: f64 },
    /// Normal(0, std^2).
    Gaussian { std: f64 },
}

impl Population {
    pub fn reference(beta: f64) -> Self {
        Self::Reference { beta, scale: 1.0 }
    }

    /// The psi_beta norm of one draw, used as `sigma` in the bound.
    pub fn psi_norm(&self) -> f64 {
        match *self {
            Self::Reference { scale, .. } => scale,
            // E exp(X^2 / C^2) = (1 - 2 s^2 / C^2)^(-1/2) = 2 at C^2 = 8 s^2 / 3.
            Self::Gaussian { std } => std * (8.0f64 / 3.0).sqrt(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Reference { beta, scale } => {
                // |y|^beta ~ Exp(1) has psi_beta norm 2^(1/beta).
                let e: f64 = rng.sample(Exp1);
                let magnitude = e.powf(1.0 / beta) / 2f64.powf(1.0 / beta);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                sign * scale * magnitude
            }
            Self::Gaussian { std } => {
                let z: f64 = rng.sample(StandardNormal);
                std * z
            }
        }
    }
}

/// Sample sizes over which the constant is calibrated.
pub const CALIBRATION_SIZES: [usize; 2] = [10, 100];
/// First point of the geometric grid of candidate constants.
pub const GRID_START: f64 = 0.0625;
/// Grid ratio, 2^(1/8).
pub const GRID_RATIO: f64 = 1.090_507_732_665_257_7;
pub const GRID_LEN: usize = 81;

pub fn grid_value(step: usize) -> f64 {
    GRID_START * GRID_RATIO.powi(step as i32)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub c_beta: f64,
    pub grid_step: usize,
    /// True when no grid point passed; `c_beta` is then the largest tested.
    pub exhausted: bool,
}

/// Absolute deviations `|mean of n draws|`, sorted ascending.
fn sorted_mean_deviations<R: Rng + ?Sized>(pop: &Population, n: usize, trials: usize, rng: &mut R) -> Vec<f64> {
    let mut devs: Vec<f64> = (0..trials)
        .map(|_| {
            let s: f64 = (0..n).map(|_| pop.sample(rng)).sum();
            (s / n as f64).abs()
        })
        .collect();
    devs.sort_unstable_by(f64::total_cmp);
    devs
}

fn exceedances(sorted: &[f64], bound: f64) -> usize {
    sorted.len() - sorted.partition_point(|&d| d <= bound)
}

/// Smallest constant on the geometric grid for which the empirical tail of
/// `|ybar|` stays below every `alpha` in `alpha_grid`, for means of 10 and
/// 100 draws from `population`.
pub fn calibrate_c_beta<R: Rng + ?Sized>(
    beta: f64,
    alpha_grid: &[f64],
    trials: usize,
    population: Population,
    rng: &mut R,
) -> Result<Calibration> {
    if !(beta > 0.0) {
        return config_err(format!("beta must be positive, got {beta}"));
    }
    if trials == 0 || alpha_grid.is_empty() {
        return config_err("calibration needs trials and at least one alpha");
    }
    if let Some(&a) = alpha_grid.iter().find(|&&a| !(a > 0.0 && a < sub_weibull_alpha_limit())) {
        return config_err(format!("calibration alpha must lie in (0, e^-2), got {a}"));
    }
    let sigma = population.psi_norm();
    let samples: Vec<(usize, Vec<f64>)> =
        CALIBRATION_SIZES.iter().map(|&n| (n, sorted_mean_deviations(&population, n, trials, rng))).collect();
    for step in 0..GRID_LEN {
        let c = grid_value(step);
        let passes = samples.iter().all(|(n, devs)| {
            let a = vec![1.0 / *n as f64; *n];
            alpha_grid.iter().all(|&alpha| {
                let bound = sub_weibull_deviation(&a, alpha, sigma, beta, c).expect("validated");
                exceedances(devs, bound) as f64 <= alpha * trials as f64
            })
        });
        if passes {
            return Ok(Calibration { c_beta: c, grid_step: step, exhausted: false });
        }
    }
    Ok(Calibration { c_beta: grid_value(GRID_LEN - 1), grid_step: GRID_LEN - 1, exhausted: true })
}

/// Empirical frequency of `|ybar| > bound` over fresh trials.
pub fn exceedance_frequency<R: Rng + ?Sized>(
    population: &Population,
    n: usize,
    bound: f64,
    trials: usize,
    rng: &mut R,
) -> f64 {
    let devs = sorted_mean_deviations(population, n, trials, rng);
    exceedances(&devs, bound) as f64 / trials as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::normal_quantile;
    use crate::rng::stream;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hoeffding_values() {
        assert_eq!(hoeffding_bound(5, 0.1, 0.0), 0.0);
        assert!(hoeffding_bound(5, 0.05, 1.0) > hoeffding_bound(5, 0.1, 1.0));
        assert_abs_diff_eq!(hoeffding_bound(2, (-1.0f64).exp(), 1.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bernstein_basics() {
        let alpha = 0.05;
        let b = 2.0;
        let constant = empirical_bernstein_bound(&[0.3; 50], alpha, b).unwrap();
        assert_abs_diff_eq!(constant, 3.0 * b * (3.0 / alpha).ln() / 50.0, epsilon = 1e-15);
        assert!(empirical_bernstein_bound(&[1.0], alpha, b).is_err());
        // Small-variance fixture on [0, 1]: alternating 0.45 / 0.55.
        let xs: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 0.45 } else { 0.55 }).collect();
        let eb = empirical_bernstein_bound(&xs, alpha, 1.0).unwrap();
        assert!(eb >= 0.0);
        assert!(eb < hoeffding_bound(1000, alpha, 0.5), "{eb}");
    }

    #[test]
    fn sub_weibull_uniform_weights() {
        let n = 25;
        let alpha = 0.01f64;
        let a = vec![1.0 / n as f64; n];
        let c = 1.7;
        let got = sub_weibull_deviation(&a, alpha, 1.0, 2.0, c).unwrap();
        let log = (1.0 / alpha).ln();
        let expected = c * ((log / n as f64).sqrt() + log.sqrt() / n as f64);
        assert_abs_diff_eq!(got, expected, epsilon = 1e-14);
        assert_eq!(sub_weibull_deviation(&a, alpha, 0.0, 2.0, c).unwrap(), 0.0);
        let doubled: Vec<f64> = a.iter().map(|x| 2.0 * x).collect();
        assert_abs_diff_eq!(sub_weibull_deviation(&doubled, alpha, 1.0, 2.0, c).unwrap(), 2.0 * got, epsilon = 1e-14);
        assert!(sub_weibull_deviation(&a, 0.2, 1.0, 2.0, c).is_err());
        assert!(sub_weibull_deviation(&[0.0, 0.0], 0.01, 1.0, 2.0, c).is_err());
    }

    #[test]
    fn bounds_monotone() {
        let alpha = 0.01;
        for beta in [0.5, 1.0, 2.0] {
            let bound = |n: usize, sigma: f64, alpha: f64| {
                sub_weibull_deviation(&vec![1.0 / n as f64; n], alpha, sigma, beta, 1.0).unwrap()
            };
            assert!(bound(20, 1.0, alpha) <= bound(10, 1.0, alpha));
            assert!(bound(10, 2.0, alpha) >= bound(10, 1.0, alpha));
            assert!(bound(10, 1.0, 0.001) >= bound(10, 1.0, alpha));
        }
    }

    #[test]
    fn reference_population_tail() {
        // Unit psi_beta norm means |y|^beta ~ Exp(1) / 2, so
        // P(|y| >= t) = exp(-2 t^beta) and E exp(|y|^beta) = 2.
        for beta in [0.5f64, 1.0, 2.0] {
            let pop = Population::reference(beta);
            let mut rng = stream(1);
            let m = 100_000;
            let draws: Vec<f64> = (0..m).map(|_| pop.sample(&mut rng).abs()).collect();
            for t in [0.1f64, 0.5, 1.0] {
                let p = (-2.0 * t.powf(beta)).exp();
                let freq = draws.iter().filter(|&&d| d >= t).count() as f64 / m as f64;
                let se = (p * (1.0 - p) / m as f64).sqrt();
                assert!((freq - p).abs() < 4.0 * se, "beta={beta} t={t}: {freq} vs {p}");
            }
        }
    }

    #[test]
    fn gaussian_calibration_dominates_exact_quantile() {
        let grid = [0.1, 0.05, 0.01];
        let pop = Population::Gaussian { std: 1.0 };
        let cal = calibrate_c_beta(2.0, &grid, 20_000, pop, &mut stream(2)).unwrap();
        assert!(!cal.exhausted);
        for n in CALIBRATION_SIZES {
            let a = vec![1.0 / n as f64; n];
            for alpha in grid {
                let bound = sub_weibull_deviation(&a, alpha, pop.psi_norm(), 2.0, cal.c_beta).unwrap();
                let exact = normal_quantile(1.0 - alpha / 2.0) / (n as f64).sqrt();
                assert!(bound >= exact, "n={n} alpha={alpha}: {bound} < {exact}");
            }
        }
    }

    #[test]
    fn calibration_scale_free() {
        let grid = [0.1, 0.05, 0.01];
        let a = calibrate_c_beta(1.0, &grid, 5_000, Population::reference(1.0), &mut stream(3)).unwrap();
        let scaled = Population::Reference { beta: 1.0, scale: 2.0 };
        let b = calibrate_c_beta(1.0, &grid, 5_000, scaled, &mut stream(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn calibration_rejects_bad_inputs() {
        let mut rng = stream(0);
        assert!(calibrate_c_beta(0.0, &[0.1], 10, Population::reference(1.0), &mut rng).is_err());
        assert!(calibrate_c_beta(1.0, &[0.5], 10, Population::reference(1.0), &mut rng).is_err());
    }

    #[test]
    fn tail_bound_spec_dispatch() {
        let xs = [0.1, 0.2, 0.3, 0.4];
        let h = TailBoundSpec::Hoeffding { sigma: 1.0 }.deviation(&xs, 0.1).unwrap();
        assert_eq!(h, hoeffding_bound(4, 0.1, 1.0));
        assert!(TailBoundSpec::EmpiricalBernstein { range: 0.0 }.deviation(&xs, 0.1).is_err());
        let sw = TailBoundSpec::SubWeibull { sigma: 1.0, beta: 1.0, c_beta: 1.0 }.deviation(&xs, 0.1).unwrap();
        assert!(sw > 0.0);
    }
}
