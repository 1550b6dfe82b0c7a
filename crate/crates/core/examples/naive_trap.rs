//! Without the second-order correction the bootstrapped index can lock
//! onto the worse arm after an unlucky start.

use bootucb::distributions::{EnvironmentSpec, RewardDist};
use bootucb::experiments::runners::{naive_regret, NaiveRegretConfig};
use bootucb::mab::run_episode;
use bootucb::policies::{PolicyConfig, PolicyKind};

fn main() -> bootucb::Result<()> {
    let rep = naive_regret(&NaiveRegretConfig { n_seeds: 200, ..Default::default() })?;
    println!("mean regret {:.2} ± {:.2}, lower bound {:.3}", rep.mean_final, rep.stderr_final, rep.lower_bound);
    println!("average slope: first half {:.4}, second half {:.4}", rep.early_slope, rep.late_slope);

    let env = EnvironmentSpec::new(vec![RewardDist::bernoulli(0.9)?, RewardDist::bernoulli(0.8)?])?;
    let cfg = PolicyConfig::new(PolicyKind::NaiveBucb, 0.5);
    for seed in 0..200 {
        let trace = run_episode(&env, &cfg, 1000, seed)?;
        let last_best = trace.actions.iter().rposition(|&a| a == 0).unwrap_or(0);
        if last_best < 10 {
            println!(
                "seed {seed}: best arm last pulled in round {}, final regret {:.1}",
                last_best + 1,
                trace.final_regret()
            );
            break;
        }
    }
    Ok(())
}
