//! Linear bandits: ridge regression, OFUL, linear Thompson sampling and the
//! bootstrapped UCB for linear bandits (BUCBL).
//!
//! The Gram matrix `V` is kept without the ridge term; every norm and
//! solve uses `V̄ = V + λI`.

use std::cmp::Ordering;
use std::collections::HashMap;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::{StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::bootstrap::{efron_counts, mc_quantile};
use crate::error::{config_err, Error, Result};
use crate::mab::RegretTrace;
use crate::rng::{mix64, stream, substream, Stream};

/// Default ambient dimension.
pub const DEFAULT_DIM: usize = 10;
/// Number of arms of the standard instance.
pub const NUM_LINEAR_ARMS: usize = 100;
/// Prior variance of each coordinate of `θ*`.
pub const THETA_VARIANCE: f64 = 10.0;
/// Slack applied to `‖θ*‖` when setting the norm bound `S`.
pub const NORM_SLACK: f64 = 1.01;

/// A finite-armed linear bandit `y = xᵀθ* + σ ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearInstance {
    pub theta_star: DVector<f64>,
    pub arms: Vec<DVector<f64>>,
    pub noise_sigma: f64,
    pub lambda: f64,
    pub s_bound: f64,
}

impl LinearInstance {
    pub fn new(
        theta_star: DVector<f64>,
        arms: Vec<DVector<f64>>,
        noise_sigma: f64,
        lambda: f64,
        s_bound: f64,
    ) -> Result<Self> {
        let inst = Self { theta_star, arms, noise_sigma, lambda, s_bound };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 || self.arms.is_empty() {
            return config_err("a linear instance needs d >= 1 and at least one arm");
        }
        if let Some(a) = self.arms.iter().find(|a| a.len() != d) {
            return Err(Error::Config(format!("arm of dimension {} in a {d}-dimensional instance", a.len())));
        }
        if !(self.noise_sigma >= 0.0) || !(self.lambda > 0.0) {
            return config_err("noise sigma must be >= 0 and lambda > 0");
        }
        if !(self.s_bound >= self.theta_star.norm()) {
            return config_err(format!("S = {} is below ‖θ*‖ = {}", self.s_bound, self.theta_star.norm()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.theta_star.len()
    }

    pub fn expected_reward(&self, arm: usize) -> f64 {
        self.arms[arm].dot(&self.theta_star)
    }

    pub fn best_arm(&self) -> usize {
        argmax_first((0..self.arms.len()).map(|a| self.expected_reward(a)))
    }
}

/// `θ* ~ N(0, 10 I_d)`, 100 arms with components uniform on
/// `[-1/√10, 1/√10]`, unit noise, `λ = 1` and `S = 1.01 ‖θ*‖`.
pub fn make_linear_instance<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<LinearInstance> {
    if d == 0 {
        return config_err("dimension must be >= 1");
    }
    let sd = THETA_VARIANCE.sqrt();
    let theta = DVector::from_fn(d, |_, _| sd * rng.sample::<f64, _>(StandardNormal));
    let half = 1.0 / 10f64.sqrt();
    let unif = Uniform::new_inclusive(-half, half).expect("valid range");
    let arms = (0..NUM_LINEAR_ARMS).map(|_| DVector::from_fn(d, |_, _| rng.sample(unif))).collect();
    let s_bound = NORM_SLACK * theta.norm();
    LinearInstance::new(theta, arms, 1.0, 1.0, s_bound)
}

fn argmax_first(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 || i == 0 {
            best = (i, v);
        }
    }
    best.0
}

fn cmp_vec(a: &DVector<f64>, b: &DVector<f64>) -> Ordering {
    a.iter().zip(b.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

/// Ridge regression state with the data log kept for resampling.
#[derive(Debug, Clone)]
pub struct RidgeState {
    lambda: f64,
    gram: DMatrix<f64>,
    xty: DVector<f64>,
    theta_hat: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
    points: Vec<DVector<f64>>,
    outers: Vec<DMatrix<f64>>,
    point_index: HashMap<Vec<u64>, usize>,
    log: Vec<(usize, f64)>,
}

impl RidgeState {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if dim == 0 {
            return config_err("dimension must be >= 1");
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return config_err(format!("lambda must be positive, got {lambda}"));
        }
        let gram = DMatrix::zeros(dim, dim);
        let chol = Cholesky::new(DMatrix::identity(dim, dim) * lambda).expect("λI is positive definite");
        Ok(Self {
            lambda,
            gram,
            xty: DVector::zeros(dim),
            theta_hat: DVector::zeros(dim),
            chol,
            points: Vec::new(),
            outers: Vec::new(),
            point_index: HashMap::new(),
            log: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.xty.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Number of observations `t`.
    pub fn len(&self) -> usize {
        self.log.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log.is_empty()
    }

    pub fn theta_hat(&self) -> &DVector<f64> {
        &self.theta_hat
    }

    /// `Σ x xᵀ`, without the ridge term.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn xty(&self) -> &DVector<f64> {
        &self.xty
    }

    /// `V + λI`.
    pub fn regularized_gram(&self) -> DMatrix<f64> {
        &self.gram + DMatrix::identity(self.dim(), self.dim()) * self.lambda
    }

    /// Adds an observation and refits.
    pub fn push(&mut self, x: &DVector<f64>, y: f64) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Config(format!(
                "observation of dimension {} for a {}-dimensional model",
                x.len(),
                self.dim()
            )));
        }
        let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
        let idx = match self.point_index.get(&key) {
            Some(&i) => i,
            None => {
                self.points.push(x.clone());
                self.outers.push(x * x.transpose());
                self.point_index.insert(key, self.points.len() - 1);
                self.points.len() - 1
            }
        };
        self.gram += &self.outers[idx];
        self.xty.axpy(y, x, 1.0);
        self.log.push((idx, y));
        self.chol = Cholesky::new(self.regularized_gram())
            .ok_or_else(|| Error::State("regularised Gram matrix lost positive definiteness".into()))?;
        self.theta_hat = self.chol.solve(&self.xty);
        Ok(())
    }

    /// Observations in insertion order.
    pub fn log(&self) -> impl Iterator<Item = (&DVector<f64>, f64)> {
        self.log.iter().map(|&(i, y)| (&self.points[i], y))
    }

    /// The data log sorted by `(x, y)`. Resampling walks the log in this
    /// order so the result does not depend on the order of arrival.
    pub fn canonical_log(&self) -> Vec<(&DVector<f64>, f64)> {
        self.canonical_log_indices().into_iter().map(|(i, y)| (&self.points[i], y)).collect()
    }

    /// `‖(V + λI)θ̂ − Xᵀy‖`.
    pub fn residual(&self) -> f64 {
        (self.regularized_gram() * &self.theta_hat - &self.xty).norm()
    }

    /// `√(xᵀ V̄⁻¹ x)`.
    pub fn inverse_norm(&self, x: &DVector<f64>) -> f64 {
        x.dot(&self.chol.solve(x)).max(0.0).sqrt()
    }

    /// `ln det(V̄)^{1/2} − ln det(λI)^{1/2}`.
    pub fn half_log_det_ratio(&self) -> f64 {
        let l = self.chol.l_dirty();
        let log_det: f64 = (0..self.dim()).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0;
        0.5 * (log_det - self.dim() as f64 * self.lambda.ln())
    }
}

/// Fits ridge regression on `(x_s, y_s)` pairs.
pub fn ridge_fit(xs: &[DVector<f64>], ys: &[f64], dim: usize, lambda: f64) -> Result<RidgeState> {
    if xs.len() != ys.len() {
        return config_err(format!("{} design rows but {} responses", xs.len(), ys.len()));
    }
    let mut state = RidgeState::new(dim, lambda)?;
    for (x, &y) in xs.iter().zip(ys) {
        state.push(x, y)?;
    }
    Ok(state)
}

/// Which written form of the OFUL radius to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OfulForm {
    /// `σ̂ √(2 ln(det(V̄)^{1/2} det(λI)^{-1/2} / δ)) + √λ S`.
    #[default]
    Original,
    /// `σ̂ √(2 ln(det(V̄)^{1/2} det(λI)^{1/2} / δ) + √λ S)`.
    Printed,
}

pub fn oful_beta(state: &RidgeState, delta: f64, sigma_hat: f64, s_bound: f64, form: OfulForm) -> f64 {
    let root_lambda = state.lambda().sqrt();
    match form {
        OfulForm::Original => {
            let log_term = state.half_log_det_ratio() - delta.ln();
            sigma_hat * (2.0 * log_term).sqrt() + root_lambda * s_bound
        }
        OfulForm::Printed => {
            let half_log_lambda = 0.5 * state.dim() as f64 * state.lambda().ln();
            let log_term = state.half_log_det_ratio() + 2.0 * half_log_lambda - delta.ln();
            sigma_hat * (2.0 * log_term + root_lambda * s_bound).sqrt()
        }
    }
}

/// Draws `θ̃ = θ̂ + σ̂ √(d ln(1/δ)) V̄^{-1/2} η`. The square root is the
/// inverse transposed Cholesky factor, which has covariance `V̄⁻¹`.
pub fn tsl_sample<R: Rng + ?Sized>(state: &RidgeState, delta: f64, sigma_hat: f64, rng: &mut R) -> DVector<f64> {
    let d = state.dim();
    let eta = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let l = state.chol.l();
    let u = l.transpose().solve_upper_triangular(&eta).expect("Cholesky factor is nonsingular");
    let scale = sigma_hat * (d as f64 * (1.0 / delta).ln()).sqrt();
    &state.theta_hat + u * scale
}

pub fn tsl_select<R: Rng + ?Sized>(
    state: &RidgeState,
    arms: &[DVector<f64>],
    delta: f64,
    sigma_hat: f64,
    rng: &mut R,
) -> usize {
    let theta = tsl_sample(state, delta, sigma_hat, rng);
    argmax_first(arms.iter().map(|x| x.dot(&theta)))
}

pub fn oful_select(state: &RidgeState, arms: &[DVector<f64>], beta: f64) -> usize {
    argmax_first(arms.iter().map(|x| x.dot(state.theta_hat()) + beta * state.inverse_norm(x)))
}

pub fn greedy_select(state: &RidgeState, arms: &[DVector<f64>]) -> usize {
    argmax_first(arms.iter().map(|x| x.dot(state.theta_hat())))
}

/// The bootstrap norms `‖θ̂^{(b)} − θ̂‖_{V^{(b)}+λI}` for `reps` Efron
/// resamples of the canonical log. Empty when there is no data.
pub fn bucbl_norms<R: Rng + ?Sized>(state: &RidgeState, reps: usize, rng: &mut R) -> Vec<f64> {
    let t = state.len();
    if t == 0 {
        return Vec::new();
    }
    let d = state.dim();
    let canonical = state.canonical_log_indices();
    let m = state.points.len();
    let mut counts = vec![0.0f64; m];
    let mut sums = vec![0.0f64; m];
    let mut norms = Vec::with_capacity(reps);
    let mut v = DMatrix::<f64>::zeros(d, d);
    let mut r = DVector::<f64>::zeros(d);
    for _ in 0..reps {
        let c = efron_counts(t, rng);
        counts.iter_mut().for_each(|x| *x = 0.0);
        sums.iter_mut().for_each(|x| *x = 0.0);
        for (&(p, y), &w) in canonical.iter().zip(&c) {
            if w > 0 {
                counts[p] += f64::from(w);
                sums[p] += f64::from(w) * y;
            }
        }
        v.fill(0.0);
        v.fill_diagonal(state.lambda);
        r.fill(0.0);
        for p in 0..m {
            if counts[p] > 0.0 {
                v.as_mut_slice().iter_mut().zip(state.outers[p].as_slice()).for_each(|(a, b)| *a += counts[p] * b);
                r.axpy(sums[p], &state.points[p], 1.0);
            }
        }
        let chol = Cholesky::new(v.clone()).expect("resampled Gram matrix is positive definite");
        let diff = chol.solve(&r) - &state.theta_hat;
        norms.push(diff.dot(&(&v * &diff)).max(0.0).sqrt());
    }
    norms
}

impl RidgeState {
    fn canonical_log_indices(&self) -> Vec<(usize, f64)> {
        let mut order = self.log.clone();
        order.sort_by(|a, b| cmp_vec(&self.points[a.0], &self.points[b.0]).then(a.1.total_cmp(&b.1)));
        order
    }
}

/// Level-`alpha` bootstrap quantile of [`bucbl_norms`]; `+∞` without data.
pub fn bucbl_width<R: Rng + ?Sized>(state: &RidgeState, reps: usize, alpha: f64, rng: &mut R) -> Result<f64> {
    if state.is_empty() {
        return Ok(f64::INFINITY);
    }
    Ok(mc_quantile(&bucbl_norms(state, reps, rng), alpha)?.value)
}

/// BUCBL index of each arm for a given width and OFUL radius:
/// `xᵀθ̂ + (width + β/√t) ‖x‖_{V̄⁻¹}`.
pub fn bucbl_indices(state: &RidgeState, arms: &[DVector<f64>], width: f64, beta: f64) -> Vec<f64> {
    let t = state.len().max(1) as f64;
    let radius = width + beta / t.sqrt();
    arms.iter()
        .map(|x| {
            let norm = state.inverse_norm(x);
            let bonus = if norm == 0.0 { 0.0 } else { radius * norm };
            x.dot(state.theta_hat()) + bonus
        })
        .collect()
}

/// Level at which the BUCBL quantile is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BucblLevel {
    #[default]
    Alpha,
    AlphaOneMinusDelta,
}

#[allow(clippy::too_many_arguments)]
pub fn bucbl_select<R: Rng + ?Sized>(
    state: &RidgeState,
    arms: &[DVector<f64>],
    reps: usize,
    alpha: f64,
    delta: f64,
    sigma_hat: f64,
    s_bound: f64,
    form: OfulForm,
    rng: &mut R,
) -> Result<usize> {
    if arms.len() == 1 {
        return Ok(0);
    }
    let width = bucbl_width(state, reps, alpha, rng)?;
    let beta = oful_beta(state, delta, sigma_hat, s_bound, form);
    Ok(argmax_first(bucbl_indices(state, arms, width, beta).into_iter()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearPolicyKind {
    Oful,
    Tsl,
    Bucbl,
    Greedy,
}

impl LinearPolicyKind {
    pub const ALL: [LinearPolicyKind; 4] = [Self::Oful, Self::Tsl, Self::Bucbl, Self::Greedy];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Oful => "oful",
            Self::Tsl => "tsl",
            Self::Bucbl => "bucbl",
            Self::Greedy => "greedy",
        }
    }
}

impl std::str::FromStr for LinearPolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown linear policy `{s}`")))
    }
}

/// Linear policy hyperparameters. The confidence level in round `t` is
/// `δ = 1/(1+t)` for every policy, and BUCBL uses `α = δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinearPolicyConfig {
    pub kind: LinearPolicyKind,
    pub name: Option<String>,
    /// Plug-in noise level; the instance's true `σ` when absent.
    pub sigma_hat: Option<f64>,
    pub reps: usize,
    pub level: BucblLevel,
    pub oful_form: OfulForm,
}

impl Default for LinearPolicyConfig {
    fn default() -> Self {
        Self {
            kind: LinearPolicyKind::Bucbl,
            name: None,
            sigma_hat: None,
            reps: 200,
            level: BucblLevel::Alpha,
            oful_form: OfulForm::Original,
        }
    }
}

impl LinearPolicyConfig {
    pub fn new(kind: LinearPolicyKind) -> Self {
        Self { kind, ..Default::default() }
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return config_err("BUCBL needs at least one bootstrap repetition");
        }
        if let Some(s) = self.sigma_hat {
            if !(s >= 0.0) || !s.is_finite() {
                return config_err(format!("sigma_hat must be finite and >= 0, got {s}"));
            }
        }
        Ok(())
    }
}

/// Runs `horizon` rounds and records the cumulative regret
/// `Σ ⟨x* − x_t, θ*⟩`.
pub fn run_linear_episode(
    instance: &LinearInstance,
    config: &LinearPolicyConfig,
    horizon: usize,
    seed: u64,
) -> Result<RegretTrace> {
    run_linear_episode_from(instance, config, horizon, seed, RidgeState::new(instance.dim(), instance.lambda)?)
}

/// Like [`run_linear_episode`] but starting from an existing ridge state.
pub fn run_linear_episode_from(
    instance: &LinearInstance,
    config: &LinearPolicyConfig,
    horizon: usize,
    seed: u64,
    mut state: RidgeState,
) -> Result<RegretTrace> {
    instance.validate()?;
    config.validate()?;
    if horizon == 0 {
        return config_err("horizon must be >= 1");
    }
    if state.dim() != instance.dim() {
        return config_err("initial ridge state has the wrong dimension");
    }
    let sigma_hat = config.sigma_hat.unwrap_or(instance.noise_sigma);
    let mut policy_rng: Stream = substream(mix64(seed), 0);
    let mut noise_rng = stream(mix64(seed ^ 0x6e6f));
    let best = instance.expected_reward(instance.best_arm());
    let mut trace = RegretTrace {
        cumulative: Vec::with_capacity(horizon),
        actions: Vec::with_capacity(horizon),
        rewards: Vec::with_capacity(horizon),
        seed,
    };
    let mut regret = 0.0;
    for t in 1..=horizon {
        let delta = 1.0 / (1.0 + t as f64);
        let arms = &instance.arms;
        let arm = match config.kind {
            LinearPolicyKind::Greedy => greedy_select(&state, arms),
            LinearPolicyKind::Oful => {
                oful_select(&state, arms, oful_beta(&state, delta, sigma_hat, instance.s_bound, config.oful_form))
            }
            LinearPolicyKind::Tsl => tsl_select(&state, arms, delta, sigma_hat, &mut policy_rng),
            LinearPolicyKind::Bucbl => {
                let alpha = match config.level {
                    BucblLevel::Alpha => delta,
                    BucblLevel::AlphaOneMinusDelta => delta * (1.0 - delta),
                };
                bucbl_select(
                    &state,
                    arms,
                    config.reps,
                    alpha,
                    delta,
                    sigma_hat,
                    instance.s_bound,
                    config.oful_form,
                    &mut policy_rng,
                )?
            }
        };
        let mean = instance.expected_reward(arm);
        let noise: f64 = noise_rng.sample(StandardNormal);
        let y = mean + instance.noise_sigma * noise;
        state.push(&instance.arms[arm], y)?;
        regret += best - mean;
        trace.cumulative.push(regret);
        trace.actions.push(arm);
        trace.rewards.push(y);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn ridge_no_data_and_single_observation() {
        let s = RidgeState::new(3, 1.0).unwrap();
        assert_eq!(s.theta_hat(), &DVector::zeros(3));
        let s = ridge_fit(&[v(&[1.0, 0.0])], &[1.0], 2, 1.0).unwrap();
        assert_abs_diff_eq!(s.theta_hat()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.theta_hat()[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn ridge_errors() {
        assert!(RidgeState::new(2, 0.0).is_err());
        assert!(ridge_fit(&[v(&[1.0])], &[1.0], 2, 1.0).is_err());
        assert!(ridge_fit(&[v(&[1.0, 2.0])], &[], 2, 1.0).is_err());
    }

    #[test]
    fn ridge_approaches_least_squares() {
        let mut rng = stream(3);
        let xs: Vec<_> = (0..40).map(|_| DVector::from_fn(3, |_, _| rng.random::<f64>() - 0.5)).collect();
        let ys: Vec<f64> =
            xs.iter().map(|x| x[0] - 2.0 * x[1] + 0.5 * x[2] + 0.1 * (rng.random::<f64>() - 0.5)).collect();
        let x = DMatrix::from_fn(40, 3, |i, j| xs[i][j]);
        let y = DVector::from_column_slice(&ys);
        let ls = (x.transpose() * &x).cholesky().unwrap().solve(&(x.transpose() * y));
        let ridge = ridge_fit(&xs, &ys, 3, 1e-9).unwrap();
        assert!((ridge.theta_hat() - ls).amax() < 1e-6);
    }

    #[test]
    fn duplicate_points_are_shared() {
        let mut s = RidgeState::new(2, 1.0).unwrap();
        for y in [1.0, 2.0, 3.0] {
            s.push(&v(&[0.5, 0.5]), y).unwrap();
        }
        s.push(&v(&[1.0, 0.0]), 0.0).unwrap();
        assert_eq!(s.points.len(), 2);
        assert_eq!(s.len(), 4);
        assert!(s.residual() < 1e-12);
    }

    #[test]
    fn oful_without_data() {
        let s = RidgeState::new(4, 2.0).unwrap();
        let b = oful_beta(&s, 0.1, 1.5, 3.0, OfulForm::Original);
        assert_abs_diff_eq!(b, 1.5 * (2.0 * 10f64.ln()).sqrt() + 2f64.sqrt() * 3.0, epsilon = 1e-12);
    }

    #[test]
    fn oful_one_observation() {
        let s = ridge_fit(&[v(&[1.0])], &[0.3], 1, 1.0).unwrap();
        let b = oful_beta(&s, 0.1, 1.0, 1.0, OfulForm::Original);
        let expected = (2.0 * (2f64.sqrt() / 0.1).ln()).sqrt() + 1.0;
        assert_abs_diff_eq!(b, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 3.3018, epsilon = 1e-4);
        // With λ = 1 the two determinant exponents agree; only the placement of
        // √λ S differs.
        let p = oful_beta(&s, 0.1, 1.0, 1.0, OfulForm::Printed);
        assert_abs_diff_eq!(p, (2.0 * (2f64.sqrt() / 0.1).ln() + 1.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn tsl_zero_sigma_is_greedy() {
        let s = ridge_fit(&[v(&[1.0, 0.0]), v(&[0.0, 1.0])], &[1.0, 0.2], 2, 1.0).unwrap();
        let arms = [v(&[0.0, 1.0]), v(&[1.0, 0.0]), v(&[0.5, 0.5])];
        assert_eq!(tsl_select(&s, &arms, 0.1, 0.0, &mut stream(1)), greedy_select(&s, &arms));
        assert_eq!(greedy_select(&s, &arms), 1);
        assert_eq!(tsl_select(&s, &arms[..1], 0.1, 5.0, &mut stream(1)), 0);
    }

    #[test]
    fn bucbl_width_single_observation_is_zero() {
        let s = ridge_fit(&[v(&[0.3, -0.2])], &[1.7], 2, 1.0).unwrap();
        assert_eq!(bucbl_width(&s, 50, 0.1, &mut stream(0)).unwrap(), 0.0);
        let empty = RidgeState::new(2, 1.0).unwrap();
        assert_eq!(bucbl_width(&empty, 50, 0.1, &mut stream(0)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn bucbl_width_ignores_log_order() {
        let mut rng = stream(8);
        let xs: Vec<_> = (0..25).map(|i| v(&[(i % 4) as f64 * 0.1, 0.3 - (i % 3) as f64 * 0.2])).collect();
        let ys: Vec<f64> = (0..25).map(|_| rng.random::<f64>()).collect();
        let a = ridge_fit(&xs, &ys, 2, 1.0).unwrap();
        let (rx, ry): (Vec<_>, Vec<_>) = xs.iter().cloned().zip(ys.iter().copied()).rev().unzip();
        let b = ridge_fit(&rx, &ry, 2, 1.0).unwrap();
        let wa = bucbl_width(&a, 100, 0.1, &mut stream(4)).unwrap();
        let wb = bucbl_width(&b, 100, 0.1, &mut stream(4)).unwrap();
        assert_abs_diff_eq!(wa, wb, epsilon = 1e-12);
    }

    #[test]
    fn bucbl_two_arm_one_dimensional_display() {
        // d = 1 with arms 1 and -0.5: ‖x‖ = |x| / √(V + λ).
        let s = ridge_fit(&[v(&[1.0]), v(&[1.0]), v(&[-0.5])], &[0.4, 0.2, 0.1], 1, 1.0).unwrap();
        let arms = [v(&[1.0]), v(&[-0.5])];
        let vbar: f64 = 1.0 + 1.0 + 0.25 + 1.0;
        let theta = (0.4 + 0.2 - 0.05) / vbar;
        let (width, beta) = (0.2, 1.5);
        let radius = width + beta / 3f64.sqrt();
        let idx = bucbl_indices(&s, &arms, width, beta);
        assert_abs_diff_eq!(idx[0], theta + radius / vbar.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(idx[1], -0.5 * theta + radius * 0.5 / vbar.sqrt(), epsilon = 1e-12);
        assert_eq!(argmax_first(idx.into_iter()), 0);
        let greedy = bucbl_indices(&s, &arms, 0.0, 0.0);
        assert_abs_diff_eq!(greedy[0], theta, epsilon = 1e-15);
    }

    #[test]
    fn instance_shape() {
        let inst = make_linear_instance(10, &mut stream(2)).unwrap();
        assert_eq!(inst.arms.len(), NUM_LINEAR_ARMS);
        let half = 1.0 / 10f64.sqrt();
        assert!(inst.arms.iter().flat_map(|a| a.iter()).all(|c| c.abs() <= half));
        assert!(inst.s_bound >= inst.theta_star.norm());
    }

    #[test]
    fn single_arm_episode_has_no_regret() {
        let inst = LinearInstance::new(v(&[1.0, -1.0]), vec![v(&[0.2, 0.1])], 1.0, 1.0, 2.0).unwrap();
        for kind in LinearPolicyKind::ALL {
            let mut cfg = LinearPolicyConfig::new(kind);
            cfg.reps = 20;
            let tr = run_linear_episode(&inst, &cfg, 30, 1).unwrap();
            assert!(tr.cumulative.iter().all(|&r| r == 0.0));
        }
    }

    #[test]
    fn linear_episode_is_deterministic() {
        let inst = make_linear_instance(3, &mut stream(6)).unwrap();
        for kind in LinearPolicyKind::ALL {
            let mut cfg = LinearPolicyConfig::new(kind);
            cfg.reps = 20;
            let a = run_linear_episode(&inst, &cfg, 40, 9).unwrap();
            let b = run_linear_episode(&inst, &cfg, 40, 9).unwrap();
            assert_eq!(a, b);
        }
    }
}
