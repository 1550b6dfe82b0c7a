use bootucb::experiments::runners::{run_gap_sweep, GapSweepConfig};

fn main() -> bootucb::Result<()> {
    let cfg = GapSweepConfig { deltas: vec![0.0, 0.1, 0.3, 1.0], horizon: 1000, n_seeds: 10, ..Default::default() };
    for r in run_gap_sweep(&cfg)? {
        println!(
            "delta {:<4} gap {:.3} {:<12} {:>8.2} ± {:.2}",
            r.delta, r.true_gap, r.policy, r.mean_final, r.stderr_final
        );
    }
    Ok(())
}
