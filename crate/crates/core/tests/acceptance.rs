//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL
//! line; the process fails if any criterion fails.
//!
//! Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test --test acceptance -- 3 7`.

use std::time::Instant;

use bootucb::bootstrap::{
    bootstrap_quantile, bootstrap_statistics, exact_rademacher_quantile, mc_quantile, WeightScheme,
};
use bootucb::concentration::{calibrate_c_beta, exceedance_frequency, sub_weibull_deviation, Population};
use bootucb::distributions::EnvPreset;
use bootucb::experiments::cli::run;
use bootucb::experiments::config::preset_policies;
use bootucb::experiments::runners::{
    bound_compare, coverage_test, linear_run, naive_regret, sigma_ratio, sigma_sweep, BoundCompareConfig,
    CoverageConfig, LinearRunConfig, NaiveRegretConfig, SigmaSweepConfig,
};
use bootucb::linear::{bucbl_width, LinearPolicyConfig, LinearPolicyKind, RidgeState};
use bootucb::mab::{aggregate, mean_stderr, run_policies, EnvSource, RegretTrace};
use bootucb::policies::{PolicyConfig, PolicyKind};
use bootucb::rng::stream;
use bootucb::ArmHistory;
use nalgebra::DVector;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn finals(traces: &[RegretTrace]) -> Vec<f64> {
    traces.iter().map(RegretTrace::final_regret).collect()
}

/// `a` is below `b` by more than two combined standard errors.
fn clearly_below(a: &[f64], b: &[f64]) -> (bool, String) {
    let (ma, sa) = mean_stderr(a);
    let (mb, sb) = mean_stderr(b);
    let margin = 2.0 * (sa * sa + sb * sb).sqrt();
    (mb - ma > margin, format!("{ma:.2} ± {sa:.2} vs {mb:.2} ± {sb:.2}, margin {margin:.2}"))
}

fn coverage() -> Outcome {
    let rows = coverage_test(&CoverageConfig::default()).unwrap();
    let worst = rows.iter().max_by(|a, b| (a.miscoverage - a.limit).total_cmp(&(b.miscoverage - b.limit))).unwrap();
    outcome(
        rows.iter().all(|r| r.pass) && rows.len() == 8,
        format!(
            "worst cell {} n={} miscoverage {:.4} limit {:.4}",
            worst.population, worst.n, worst.miscoverage, worst.limit
        ),
    )
}

fn naive_undercoverage() -> Outcome {
    let cfg = BoundCompareConfig { trials: 10_000, ..Default::default() };
    let rows = bound_compare(&cfg).unwrap();
    let get = |n: usize, m: &str| rows.iter().find(|r| r.n == n && r.method == m).unwrap();
    let small: Vec<usize> = cfg.sizes.iter().copied().filter(|&n| n <= 10).collect();
    let naive_low = small.iter().all(|&n| get(n, "naive").coverage < 0.95);
    let corrected_ok = cfg.sizes.iter().all(|&n| get(n, "corrected").coverage >= 0.95);
    let sharper = get(500, "corrected").mean_width < get(500, "hoeffding").mean_width;
    let naive: Vec<String> = small.iter().map(|&n| format!("{:.3}", get(n, "naive").coverage)).collect();
    let min_corrected = cfg.sizes.iter().map(|&n| get(n, "corrected").coverage).fold(1.0, f64::min);
    outcome(
        naive_low && corrected_ok && sharper,
        format!(
            "naive coverage n<=10 [{}], min corrected coverage {min_corrected:.3}, width at n=500 {:.4} vs hoeffding {:.4}",
            naive.join(", "),
            get(500, "corrected").mean_width,
            get(500, "hoeffding").mean_width
        ),
    )
}

fn naive_linear_regret() -> Outcome {
    let rep = naive_regret(&NaiveRegretConfig::default()).unwrap();
    let ok = rep.mean_final >= rep.lower_bound && rep.late_slope >= 0.5 * rep.early_slope;
    outcome(
        ok,
        format!(
            "mean regret {:.3} ± {:.3} (bound {:.3}), slopes {:.5} then {:.5}",
            rep.mean_final, rep.stderr_final, rep.lower_bound, rep.early_slope, rep.late_slope
        ),
    )
}

fn truncnorm_runs() -> Vec<Vec<RegretTrace>> {
    let configs: Vec<PolicyConfig> = preset_policies(EnvPreset::TruncnormK5)
        .into_iter()
        .filter(|p| matches!(p.kind, PolicyKind::Bucb | PolicyKind::Ucb1))
        .collect();
    assert_eq!(configs[0].kind, PolicyKind::Bucb);
    assert_eq!(configs[0].sigma_hat, 1.0);
    run_policies(&EnvSource::Preset(EnvPreset::TruncnormK5), &configs, 10_000, 200, 0).unwrap()
}

fn sublinear_regret(truncnorm: &[Vec<RegretTrace>]) -> Outcome {
    let curve = aggregate(&truncnorm[0][..100]).unwrap();
    let first = curve.mean[4999];
    let second = curve.mean[9999] - first;
    outcome(second < 0.25 * first, format!("increment [0,5000] {first:.2}, [5000,10000] {second:.2}"))
}

fn orderings(truncnorm: &[Vec<RegretTrace>]) -> Outcome {
    let (tn_ok, tn) = clearly_below(&finals(&truncnorm[0]), &finals(&truncnorm[1]));
    let configs: Vec<PolicyConfig> = preset_policies(EnvPreset::BetaK5)
        .into_iter()
        .filter(|p| matches!(p.kind, PolicyKind::Bucb | PolicyKind::TsBernoulli))
        .collect();
    let beta = run_policies(&EnvSource::Preset(EnvPreset::BetaK5), &configs, 10_000, 200, 0).unwrap();
    let (b_ok, b) = clearly_below(&finals(&beta[0]), &finals(&beta[1]));
    outcome(tn_ok && b_ok, format!("truncnorm bucb vs ucb1: {tn}; beta bucb vs ts-bernoulli: {b}"))
}

fn robustness() -> Outcome {
    let cfg = SigmaSweepConfig { policies: vec![PolicyKind::Bucb, PolicyKind::Ucb1], ..Default::default() };
    let rows = sigma_sweep(&cfg).unwrap();
    let b = sigma_ratio(&rows, "bucb").unwrap();
    let u = sigma_ratio(&rows, "ucb1").unwrap();
    outcome(b < u, format!("regret ratio sigma 4 / sigma 1: bucb {b:.3}, ucb1 {u:.3}"))
}

fn concentration() -> Outcome {
    let alphas = [0.1, 0.05, 0.01];
    let trials = 100_000;
    let mut ok = true;
    let mut worst = (f64::NEG_INFINITY, String::new());
    for (i, beta) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let pop = Population::reference(beta);
        let cal = calibrate_c_beta(beta, &alphas, trials, pop, &mut stream(70 + i as u64)).unwrap();
        ok &= !cal.exhausted;
        let mut rng = stream(700 + i as u64);
        for alpha in alphas {
            for n in [10usize, 100] {
                let a = vec![1.0 / n as f64; n];
                let bound = sub_weibull_deviation(&a, alpha, pop.psi_norm(), beta, cal.c_beta).unwrap();
                let freq = exceedance_frequency(&pop, n, bound, trials, &mut rng);
                let limit = alpha + 3.0 * (alpha * (1.0 - alpha) / trials as f64).sqrt();
                ok &= freq <= limit;
                if freq - limit > worst.0 {
                    worst = (
                        freq - limit,
                        format!("beta {beta} alpha {alpha} n {n}: {freq:.4} vs limit {limit:.4} (C {:.3})", cal.c_beta),
                    );
                }
            }
        }
    }
    outcome(ok, format!("closest cell {}", worst.1))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = stream(2024);
    let mut mc_ok = 0;
    for fixture in 0..50u64 {
        let n = rng.random_range(1..=12);
        let ys: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let exact = exact_rademacher_quantile(&ys, 0.05).unwrap().value;
        let mc = bootstrap_quantile(
            &ArmHistory::from_rewards(&ys),
            WeightScheme::Rademacher,
            1_000_000,
            0.05,
            &mut stream(fixture),
        )
        .unwrap()
        .value;
        let mean = ys.iter().sum::<f64>() / n as f64;
        let mut atoms: Vec<f64> = (0..1usize << n)
            .map(|m| (0..n).map(|i| if m >> i & 1 == 1 { ys[i] - mean } else { mean - ys[i] }).sum::<f64>() / n as f64)
            .collect();
        atoms.sort_by(f64::total_cmp);
        atoms.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let i = atoms.iter().position(|a| (a - exact).abs() < 1e-12).unwrap();
        let lo = atoms[i.saturating_sub(2)];
        let hi = atoms[(i + 2).min(atoms.len() - 1)];
        mc_ok += usize::from(mc >= lo - 1e-12 && mc <= hi + 1e-12);
    }

    let mut worst: f64 = 0.0;
    let one = DVector::from_element(1, 1.0);
    for (j, t) in [1usize, 3, 10, 50, 200].into_iter().enumerate() {
        let mut s = RidgeState::new(1, 1.0).unwrap();
        for _ in 0..t {
            s.push(&one, rng.random_range(-1.0..2.0)).unwrap();
        }
        let ys: Vec<f64> = s.canonical_log().iter().map(|&(_, y)| y).collect();
        let width = bucbl_width(&s, 500, 0.05, &mut stream(j as u64)).unwrap();
        let stats = bootstrap_statistics(
            &ArmHistory::from_rewards(&ys),
            WeightScheme::EfronMultinomial,
            500,
            &mut stream(j as u64),
        )
        .unwrap();
        let scaled: Vec<f64> = stats.iter().map(|b| b.abs() * t as f64 / (t as f64 + 1.0).sqrt()).collect();
        let reference = mc_quantile(&scaled, 0.05).unwrap().value;
        worst = worst.max((width - reference).abs());
    }
    outcome(
        mc_ok == 50 && worst <= 1e-12,
        format!("{mc_ok}/50 fixtures within two atoms; d=1 width max abs diff {worst:.2e}"),
    )
}

fn linear_ordering() -> Outcome {
    let cfg = LinearRunConfig {
        policies: vec![
            LinearPolicyConfig::new(LinearPolicyKind::Oful),
            LinearPolicyConfig::new(LinearPolicyKind::Bucbl),
        ],
        horizon: 2000,
        n_seeds: 50,
        ..Default::default()
    };
    let curves = linear_run(&cfg).unwrap();
    let (o, b) = (&curves[0].curve, &curves[1].curve);
    let margin = 2.0 * (o.final_stderr().powi(2) + b.final_stderr().powi(2)).sqrt();
    outcome(
        o.final_mean() - b.final_mean() > margin,
        format!(
            "bucbl {:.2} ± {:.2} vs oful {:.2} ± {:.2}, margin {margin:.2}",
            b.final_mean(),
            b.final_stderr(),
            o.final_mean(),
            o.final_stderr()
        ),
    )
}

fn determinism() -> Outcome {
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "mab",
            "run",
            "--preset",
            "truncnorm-K5",
            "--T",
            "150",
            "--seeds",
            "4",
            "--reps",
            "50",
            "--base-seed",
            "7",
        ],
        vec!["mab", "run", "--preset", "gaussian-K5", "--T", "150", "--seeds", "4", "--reps", "50", "--base-seed", "7"],
        vec!["mab", "run", "--preset", "logistic-K5", "--T", "150", "--seeds", "4", "--reps", "50", "--base-seed", "7"],
        vec![
            "mab",
            "run",
            "--preset",
            "bernoulli-K5",
            "--T",
            "150",
            "--seeds",
            "4",
            "--reps",
            "50",
            "--base-seed",
            "7",
        ],
        vec!["mab", "run", "--preset", "beta-K5", "--T", "150", "--seeds", "4", "--reps", "50", "--base-seed", "7"],
        vec![
            "mab",
            "run",
            "--preset",
            "gap-instance(0.3)",
            "--T",
            "150",
            "--seeds",
            "4",
            "--reps",
            "50",
            "--base-seed",
            "7",
        ],
        vec!["mab", "gap-sweep", "--deltas", "0,0.5", "--T", "100", "--seeds", "3", "--base-seed", "7"],
        vec!["mab", "sigma-sweep", "--T", "100", "--seeds", "3", "--base-seed", "7"],
        vec!["naive-regret", "--T", "100", "--seeds", "5", "--reps", "50", "--base-seed", "7"],
        vec!["linear", "run", "--T", "60", "--seeds", "3", "--reps", "30", "--base-seed", "7"],
        vec!["bound-compare", "--sizes", "2,10", "--trials", "50", "--reps", "50", "--seed", "7"],
        vec!["coverage-test", "--sizes", "2,10", "--trials", "50", "--reps", "50", "--seed", "7"],
    ];
    let mut failures = Vec::new();
    for args in &commands {
        let once = || {
            let mut out = Vec::new();
            run(std::iter::once("bootucb").chain(args.iter().copied()), &mut out, &mut Vec::new()).unwrap();
            out
        };
        let (a, b) = (once(), once());
        if a != b || a.is_empty() {
            failures.push(args[..2].join(" "));
        }
    }
    outcome(failures.is_empty(), format!("{} commands rerun, mismatches: {:?}", commands.len(), failures))
}

fn main() {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let wanted = |c: usize| selected.is_empty() || selected.contains(&c);
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut record = |c: usize, name: &'static str, f: &dyn Fn() -> Outcome| {
        if wanted(c) {
            let start = Instant::now();
            let o = f();
            let secs = start.elapsed().as_secs_f64();
            println!("criterion {c:>2} {:<4} {name}: {} [{secs:.1}s]", if o.pass { "PASS" } else { "FAIL" }, o.detail);
            results.push((c, name, o, secs));
        }
    };
    record(1, "coverage of the corrected threshold", &coverage);
    record(2, "naive under-coverage", &naive_undercoverage);
    record(3, "naive linear regret", &naive_linear_regret);
    // Criteria 4 and 5 share one run; its cost is charged to whichever runs first.
    let truncnorm = std::cell::OnceCell::new();
    record(4, "sub-linear regret of bucb", &|| sublinear_regret(truncnorm.get_or_init(truncnorm_runs)));
    record(5, "regret orderings", &|| orderings(truncnorm.get_or_init(truncnorm_runs)));
    record(6, "robustness to the plug-in sigma", &robustness);
    record(7, "sub-Weibull concentration", &concentration);
    record(8, "oracle equivalence", &oracle_equivalence);
    record(9, "linear bandit ordering", &linear_ordering);
    record(10, "determinism", &determinism);
    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("acceptance: {} of {} criteria passed", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
