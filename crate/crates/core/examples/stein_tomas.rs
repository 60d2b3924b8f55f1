//! Stein-Tomas quotients of a few sphere functions on S^2.

use std::f64::consts::PI;

use srl::extension::{extend, stein_tomas_quotient};
use srl::geometry::SphereFunction;
use srl::search::SearchConfig;
use srl::C64;

fn main() -> srl::Result<()> {
    let cfg = SearchConfig::for_dimension(3)?;
    let grid = cfg.sphere()?;
    let space = cfg.space()?;
    let one = SphereFunction::constant(&grid, 1.0);
    println!("f-check of 1 at |x| = 2: {:.12}", extend(&one, &[0.0, 0.0, 2.0]).re);
    println!("closed form           : {:.12}", (2.0 * PI).powf(-1.5) * 4.0 * PI * 2f64.sin() / 2.0);

    let cases = [
        ("constant", one.clone()),
        ("1 + omega_3", SphereFunction::from_fn(&grid, |w| C64::new(1.0 + w[2], 0.0))),
        ("modulated constant", one.modulated(&[1.0, -2.0, 0.5])),
        ("cap bump", SphereFunction::from_fn(&grid, |w| C64::new((8.0 * (w[2] - 1.0)).exp(), 0.0))),
    ];
    for (name, f) in cases {
        let r = stein_tomas_quotient(&f, &space)?;
        println!("{name:<20} quotient {:.8e}  x 4pi^2 = {:.6}  tail {:.1e}", r.quotient, r.quotient * 4.0 * PI * PI, r.tail_fraction);
    }
    Ok(())
}
