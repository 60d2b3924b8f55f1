//! Space-time Strichartz quotients for the Gaussian, a two-bump profile and the perturbed dispersion.

use srl::geometry::{Lattice, ProfileFunction};
use srl::strichartz::{gaussian_strichartz_constant, strichartz_quotient, Dispersion};
use srl::C64;

fn main() -> srl::Result<()> {
    for d in [1, 2] {
        let g = ProfileFunction::gaussian(d, 0.25, 32);
        let r = strichartz_quotient(&g, d, &Dispersion::Parabolic)?;
        println!("d={d} gaussian quotient {:.10e}  closed form {:.10e}", r.quotient, gaussian_strichartz_constant(d));
    }
    let two = ProfileFunction::from_fn(Lattice::centered(1, 0.25, 48), |x| {
        C64::new((-(x[0] - 2.0).powi(2) / 2.0).exp() + (-(x[0] + 2.0).powi(2) / 2.0).exp(), 0.0)
    });
    let r = strichartz_quotient(&two, 1, &Dispersion::Parabolic)?;
    println!("two bumps: {:.6e} (below the Gaussian)", r.quotient);

    // a narrow-band profile under T(E) = 1 - sqrt(1 - E)
    let psi = srl::refinednorm::random_band_limited(1, 0.5, 4, 3)?;
    for disp in [Dispersion::Parabolic, Dispersion::Perturbed { support: 0.5 }] {
        let r = strichartz_quotient(&psi, 1, &disp)?;
        println!("{:<22} {:.6e}", disp.name(), r.quotient);
    }
    Ok(())
}
