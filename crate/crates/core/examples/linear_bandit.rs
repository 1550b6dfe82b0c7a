use bootucb::experiments::runners::{linear_run, LinearRunConfig};
use bootucb::linear::{LinearPolicyConfig, LinearPolicyKind};

fn main() -> bootucb::Result<()> {
    let cfg = LinearRunConfig {
        policies: LinearPolicyKind::ALL
            .into_iter()
            .map(|k| LinearPolicyConfig { reps: 100, ..LinearPolicyConfig::new(k) })
            .collect(),
        horizon: 300,
        n_seeds: 5,
        ..Default::default()
    };
    for c in linear_run(&cfg)? {
        println!("{:<8} {:>8.2} ± {:.2}", c.policy, c.curve.final_mean(), c.curve.final_stderr());
    }
    Ok(())
}
