//! Calibrates the sub-Weibull constant and checks it on fresh draws.

use bootucb::concentration::{calibrate_c_beta, exceedance_frequency, sub_weibull_deviation, Population};
use bootucb::rng::stream;

fn main() -> bootucb::Result<()> {
    let alphas = [0.1, 0.05, 0.01];
    for beta in [0.5, 1.0, 2.0] {
        let pop = Population::reference(beta);
        let cal = calibrate_c_beta(beta, &alphas, 20_000, pop, &mut stream(1))?;
        println!("beta {beta}: C = {:.4}", cal.c_beta);
        for n in [10usize, 100] {
            let a = vec![1.0 / n as f64; n];
            let bound = sub_weibull_deviation(&a, 0.05, pop.psi_norm(), beta, cal.c_beta)?;
            let freq = exceedance_frequency(&pop, n, bound, 20_000, &mut stream(2));
            println!("  n {n:<3} bound {bound:.4} exceedance {freq:.4}");
        }
    }
    Ok(())
}
