//! Multi-start ascent for the Stein-Tomas quotient and the gap against the antipodal level.

use srl::search::{gap_report, SearchConfig};

fn main() -> srl::Result<()> {
    for n in [3, 2] {
        let cfg = SearchConfig::for_dimension(n)?;
        let (gap, traces) = gap_report(&cfg)?;
        for t in &traces {
            println!(
                "N={n} seed {:>2}: {:>3} steps, quotient {:.10e}, EL {:.1e}",
                t.seed.unwrap_or(0),
                t.iterates.len() - 1,
                t.final_quotient(),
                t.el_residual
            );
        }
        println!("N={n}: lower bound {:.10e}, antipodal level {:.10e}, ratio {:.6}\n", gap.lower_bound, gap.threshold, gap.ratio);
    }
    Ok(())
}
