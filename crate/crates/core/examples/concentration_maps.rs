//! B_delta maps planar profiles to sphere functions near +-north; T_delta links the two pictures.

use srl::concmaps::{b_inverse, b_map, bt_identity_residual, ConcentrationFrame, TDelta};
use srl::geometry::{make_sphere_grid, Lattice, ProfileFunction};
use srl::strichartz::{propagate, Dispersion};
use srl::C64;

fn main() -> srl::Result<()> {
    let g = ProfileFunction::gaussian(2, 0.25, 32);
    let g = g.scaled(C64::new(1.0 / g.norm(), 0.0));
    let grid = make_sphere_grid(3, 96)?;
    for delta in [0.8, 0.5, 0.35] {
        let frame = ConcentrationFrame::identity(3, delta)?;
        let f = b_map(&g, &g.scaled(C64::new(0.0, 0.5)), &frame, &grid)?;
        let (p, _) = b_inverse(&f, &frame, &Lattice::centered(2, 0.5, 4))?;
        println!("delta={delta}: |B|^2 = {:.12} (want 1.25), B^-1 at 0: {:.5}", f.norm().powi(2), p.values[p.values.len() / 2].re);
    }
    // T_delta is periodic with the profile box, so delta = 1 wants a wide box
    let g1 = ProfileFunction::gaussian(1, 0.25, 96);
    for delta in [1.0, 0.5, 0.25] {
        println!("bt residual delta={delta}: {:.2e}", bt_identity_residual(&g1, &g1, delta)?);
    }
    let t0 = TDelta::new(&g1, 0.0)?;
    let u = propagate(&g1, 0.7, &Dispersion::Parabolic)?;
    println!("T_0 vs free flow at x=1, t=0.7: {:.3e}", (t0.eval(&[1.0, 0.7]) - u.values[100]).norm());
    Ok(())
}
