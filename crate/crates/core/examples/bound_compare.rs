//! Coverage and width of several 95% upper bounds for the mean of
//! truncated-normal data.

use bootucb::experiments::runners::{bound_compare, BoundCompareConfig};

fn main() -> bootucb::Result<()> {
    let cfg = BoundCompareConfig { sizes: vec![2, 5, 10, 50, 200], trials: 1000, ..Default::default() };
    println!("{:>5} {:<20} {:>9} {:>9}", "n", "method", "coverage", "width");
    for r in bound_compare(&cfg)? {
        println!("{:>5} {:<20} {:>9.3} {:>9.4}", r.n, r.method, r.coverage, r.mean_width);
    }
    Ok(())
}
