//! How much each policy suffers when it is told the noise is larger than
//! it really is.

use bootucb::experiments::runners::{sigma_ratio, sigma_sweep, SigmaSweepConfig};

fn main() -> bootucb::Result<()> {
    let cfg = SigmaSweepConfig { horizon: 1000, n_seeds: 10, ..Default::default() };
    let rows = sigma_sweep(&cfg)?;
    for r in &rows {
        println!("sigma {:<3} {:<12} {:>8.2} ± {:.2}", r.sigma_hat, r.policy, r.mean_final, r.stderr_final);
    }
    for p in &cfg.policies {
        println!("{:<12} ratio {:.2}", p.name(), sigma_ratio(&rows, p.name()).unwrap_or(f64::NAN));
    }
    Ok(())
}
