//! The two-profile inequality Phi_q(f, g) <= c(q) int (|f|^2 + |g|^2)^{q/2} and its Gaussian case.

use srl::geometry::{Exponent, ProfileFunction};
use srl::strichartz::gaussian_strichartz_constant;
use srl::twoprofile::{c_constant, phi_q_functional, tilde_strichartz_quotient, two_profile_inequality_residual, TwoProfileInput};
use srl::C64;

fn main() -> srl::Result<()> {
    let w = vec![1.0; 4];
    let f = vec![C64::new(1.0, 0.0), C64::new(0.5, 0.5), C64::new(0.0, 2.0), C64::new(-1.0, 0.1)];
    let g = vec![C64::new(0.2, 0.0), C64::new(0.5, -0.5), C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    for q in [3.0, 4.0, 6.0] {
        let inp = TwoProfileInput::new(w.clone(), f.clone(), g.clone(), q)?;
        println!("q={q}: Phi = {:.6}, slack = {:.6}", phi_q_functional(&inp), two_profile_inequality_residual(&inp));
    }
    for d in [1, 2] {
        let gs = ProfileFunction::gaussian(d, 0.25, 32);
        let q = Exponent::strichartz(d).value();
        let t = tilde_strichartz_quotient(&gs, &gs, d)?;
        println!("d={d}: two-sided Gaussian {:.10e}  c(q) S_d^G = {:.10e}", t, c_constant(q) * gaussian_strichartz_constant(d));
    }
    Ok(())
}
