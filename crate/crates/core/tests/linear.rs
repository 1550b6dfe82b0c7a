use bootucb::bootstrap::{bootstrap_statistics, mc_quantile, WeightScheme};
use bootucb::linear::{
    bucbl_indices, bucbl_width, make_linear_instance, oful_beta, run_linear_episode, run_linear_episode_from,
    tsl_sample, LinearInstance, LinearPolicyConfig, LinearPolicyKind, OfulForm, RidgeState,
};
use bootucb::rng::stream;
use bootucb::ArmHistory;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

fn random_state(d: usize, t: usize, seed: u64) -> RidgeState {
    let mut rng = stream(seed);
    let inst = make_linear_instance(d, &mut rng).unwrap();
    let mut s = RidgeState::new(d, 1.0).unwrap();
    for _ in 0..t {
        let x = &inst.arms[rng.random_range(0..inst.arms.len())];
        let y = x.dot(&inst.theta_star) + rng.sample::<f64, _>(rand_distr::StandardNormal);
        s.push(x, y).unwrap();
    }
    s
}

#[test]
fn tsl_perturbation_has_the_scaled_inverse_gram_covariance() {
    let s = random_state(3, 40, 1);
    let (delta, sigma) = (0.2, 0.7);
    let n = 10_000;
    let mut rng = stream(2);
    let draws: Vec<DVector<f64>> = (0..n).map(|_| tsl_sample(&s, delta, sigma, &mut rng) - s.theta_hat()).collect();
    let mut cov = DMatrix::<f64>::zeros(3, 3);
    for e in &draws {
        cov += e * e.transpose();
    }
    cov /= n as f64;
    let target = s.regularized_gram().try_inverse().unwrap() * (sigma * sigma * 3.0 * (1.0 / delta).ln());
    for i in 0..3 {
        let rel = (cov[(i, i)] - target[(i, i)]).abs() / target[(i, i)];
        assert!(rel < 0.05, "diagonal {i}: {} vs {}", cov[(i, i)], target[(i, i)]);
    }
    let rel = (&cov - &target).norm() / target.norm();
    assert!(rel < 0.05, "relative Frobenius error {rel}");
}

#[test]
fn theta_star_second_moment() {
    let mut rng = stream(3);
    let d = 10;
    let n = 10_000;
    let mean_sq =
        (0..n).map(|_| make_linear_instance(d, &mut rng).unwrap().theta_star.norm_squared()).sum::<f64>() / n as f64;
    assert!((mean_sq - 10.0 * d as f64).abs() < 0.05 * 10.0 * d as f64, "{mean_sq}");
    let inst = make_linear_instance(d, &mut rng).unwrap();
    assert_eq!(inst.arms.len(), 100);
    let half = 1.0 / 10f64.sqrt();
    assert!(inst.arms.iter().flat_map(|a| a.iter()).all(|c| c.abs() <= half));
}

#[test]
fn ridge_invariants_along_a_run() {
    let mut rng = stream(4);
    let inst = make_linear_instance(5, &mut rng).unwrap();
    let mut s = RidgeState::new(5, 1.0).unwrap();
    let mut prev_beta = oful_beta(&s, 0.1, 1.0, inst.s_bound, OfulForm::Original);
    for _ in 0..400 {
        let x = &inst.arms[rng.random_range(0..100)];
        s.push(x, x.dot(&inst.theta_star) + rng.random_range(-1.0..1.0)).unwrap();
        assert!(s.residual() <= 1e-8 * (1.0 + s.xty().norm()));
        let min_eig = s.regularized_gram().symmetric_eigenvalues().min();
        assert!(min_eig >= 1.0 - 1e-9, "{min_eig}");
        let beta = oful_beta(&s, 0.1, 1.0, inst.s_bound, OfulForm::Original);
        assert!(beta >= prev_beta - 1e-12);
        prev_beta = beta;
    }
}

#[test]
fn bucbl_index_dominates_greedy_and_bonus_shrinks() {
    let mut early = Vec::new();
    let mut late = Vec::new();
    for seed in 0..20u64 {
        let mut rng = stream(1000 + seed);
        let inst = make_linear_instance(10, &mut rng).unwrap();
        let mut s = RidgeState::new(10, 1.0).unwrap();
        for t in 1..=500usize {
            let x = &inst.arms[rng.random_range(0..100)];
            s.push(x, x.dot(&inst.theta_star) + rng.sample::<f64, _>(rand_distr::StandardNormal)).unwrap();
            if t == 50 || t == 500 {
                let delta = 1.0 / (1.0 + t as f64);
                let width = bucbl_width(&s, 200, delta, &mut rng).unwrap();
                let beta = oful_beta(&s, delta, 1.0, inst.s_bound, OfulForm::Original);
                let idx = bucbl_indices(&s, &inst.arms, width, beta);
                let bonus: Vec<f64> = inst.arms.iter().zip(&idx).map(|(x, i)| i - x.dot(s.theta_hat())).collect();
                assert!(bonus.iter().all(|&b| b > 0.0));
                let mean_bonus = bonus.iter().sum::<f64>() / bonus.len() as f64;
                if t == 50 {
                    early.push(mean_bonus)
                } else {
                    late.push(mean_bonus)
                }
            }
        }
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        (v[9] + v[10]) / 2.0
    };
    let (e, l) = (median(&mut early), median(&mut late));
    assert!(l < e, "median bonus at t=500 {l} vs t=50 {e}");
}

#[test]
fn one_dimensional_width_matches_the_mean_bootstrap() {
    let mut rng = stream(6);
    for t in [1usize, 2, 7, 30, 111] {
        let lambda = 1.0;
        let mut s = RidgeState::new(1, lambda).unwrap();
        let one = DVector::from_element(1, 1.0);
        for _ in 0..t {
            s.push(&one, rng.random_range(-2.0..3.0)).unwrap();
        }
        let ys: Vec<f64> = s.canonical_log().iter().map(|&(_, y)| y).collect();
        for alpha in [0.05, 0.3] {
            let seed = rng.random::<u64>();
            let width = bucbl_width(&s, 300, alpha, &mut stream(seed)).unwrap();
            let stats = bootstrap_statistics(
                &ArmHistory::from_rewards(&ys),
                WeightScheme::EfronMultinomial,
                300,
                &mut stream(seed),
            )
            .unwrap();
            let scaled: Vec<f64> = stats.iter().map(|b| b.abs() * t as f64 / (t as f64 + lambda).sqrt()).collect();
            let reference = mc_quantile(&scaled, alpha).unwrap().value;
            assert!((width - reference).abs() <= 1e-12 * (1.0 + reference), "t={t}: {width} vs {reference}");
            if t == 1 {
                assert_eq!(width, 0.0);
            }
        }
    }
}

#[test]
fn width_ignores_data_log_order() {
    let mut rng = stream(8);
    let inst = make_linear_instance(3, &mut rng).unwrap();
    let data: Vec<(DVector<f64>, f64)> =
        (0..25).map(|_| (inst.arms[rng.random_range(0..100)].clone(), rng.random::<f64>())).collect();
    let mut a = RidgeState::new(3, 1.0).unwrap();
    let mut b = RidgeState::new(3, 1.0).unwrap();
    for (x, y) in &data {
        a.push(x, *y).unwrap();
    }
    for (x, y) in data.iter().rev() {
        b.push(x, *y).unwrap();
    }
    let wa = bucbl_width(&a, 100, 0.1, &mut stream(1)).unwrap();
    let wb = bucbl_width(&b, 100, 0.1, &mut stream(1)).unwrap();
    assert!((wa - wb).abs() <= 1e-12 * (1.0 + wa));
}

#[test]
fn greedy_from_the_true_parameter_has_no_regret() {
    let mut rng = stream(9);
    let mut inst = make_linear_instance(4, &mut rng).unwrap();
    inst.noise_sigma = 0.0;
    // A heavily weighted exact observation of each axis pins θ̂ to θ*.
    let mut s = RidgeState::new(4, 1e-12).unwrap();
    for i in 0..4 {
        let e = DVector::from_fn(4, |j, _| if i == j { 1.0 } else { 0.0 });
        s.push(&e, inst.theta_star[i]).unwrap();
    }
    let inst = LinearInstance { lambda: 1e-12, ..inst };
    let trace = run_linear_episode_from(&inst, &LinearPolicyConfig::new(LinearPolicyKind::Greedy), 200, 1, s).unwrap();
    assert!(trace.final_regret().abs() < 1e-9, "{}", trace.final_regret());
}

#[test]
fn linear_episodes_are_reproducible_and_single_arm_is_free() {
    let mut rng = stream(10);
    let inst = make_linear_instance(3, &mut rng).unwrap();
    for kind in LinearPolicyKind::ALL {
        let cfg = LinearPolicyConfig { reps: 30, ..LinearPolicyConfig::new(kind) };
        let a = run_linear_episode(&inst, &cfg, 60, 4).unwrap();
        let b = run_linear_episode(&inst, &cfg, 60, 4).unwrap();
        assert_eq!(a, b);
        assert!(a.cumulative.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        let single = LinearInstance { arms: vec![inst.arms[0].clone()], ..inst.clone() };
        assert_eq!(run_linear_episode(&single, &cfg, 30, 1).unwrap().final_regret(), 0.0);
    }
}
