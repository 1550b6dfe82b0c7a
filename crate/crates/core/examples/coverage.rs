//! Corrected bootstrap threshold on a handful of samples, then its
//! miscoverage over repeated trials.

use bootucb::bootstrap::{threshold_parts, BootstrapSpec, CorrectionMode, PhiSpec};
use bootucb::experiments::runners::{coverage_test, CoverageConfig};
use bootucb::rng::stream;
use bootucb::ArmHistory;

fn main() -> bootucb::Result<()> {
    let h = ArmHistory::from_rewards(&[0.3, -0.1, 0.8, 0.05, -0.4]);
    let spec = BootstrapSpec {
        alpha: 0.05,
        delta: 0.5,
        phi: PhiSpec::sub_gaussian(1.0),
        correction: CorrectionMode::Theoretical,
        ..Default::default()
    };
    let parts = threshold_parts(&h, &spec, &mut stream(1))?;
    println!("mean {:.3}: quantile {:.4} + correction {:.4}", h.mean(), parts.quantile, parts.correction);

    for r in coverage_test(&CoverageConfig { trials: 2000, ..Default::default() })? {
        println!("{:<16} n {:<3} miscoverage {:.4} (limit {:.4})", r.population, r.n, r.miscoverage, r.limit);
    }
    Ok(())
}
