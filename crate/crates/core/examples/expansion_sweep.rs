//! log quotient against eps^2 for the single and antipodal trial functions; prints CSV.

use srl::trial::{antipodal_sweep, l2_sweep, single_bump_sweep};

fn main() -> srl::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let eps = [0.3, 0.06f64.sqrt(), 0.2, 0.02f64.sqrt()];
    let single = single_bump_sweep(&eps, n)?;
    let anti = antipodal_sweep(&eps, n)?;
    let l2 = l2_sweep(&eps, n)?;
    print!("{}", single.to_csv("log_quotient"));
    eprintln!("N={n} single: slope {:.4} intercept {:.5}", single.slope, single.intercept);
    eprintln!("N={n} antipodal: slope {:.4} intercept {:.5}", anti.slope, anti.intercept);
    eprintln!("N={n} scaled L2: slope {:.5}", l2.slope);
    Ok(())
}
