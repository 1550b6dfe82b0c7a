//! Regret curves for a preset, written as CSV and SVG into the current
//! directory.

use std::path::Path;

use bootucb::experiments::runners::mab_run;
use bootucb::experiments::{preset_config, render_svg, write_csv};

fn main() -> bootucb::Result<()> {
    let preset = std::env::args().nth(1).unwrap_or_else(|| "gaussian-K5".into());
    let mut cfg = preset_config(&preset)?;
    cfg.horizon = 1000;
    cfg.n_seeds = 20;
    let curves = mab_run(&cfg)?;
    for c in &curves {
        println!("{:<12} {:>9.2} ± {:.2}", c.policy, c.curve.final_mean(), c.curve.final_stderr());
    }
    write_csv(&curves, Path::new("mab_regret.csv"))?;
    render_svg(&curves, Path::new("mab_regret.svg"))?;
    println!("wrote mab_regret.csv and mab_regret.svg");
    Ok(())
}
