//! Refined norms of concentrating and spread-out functions on S^2.

use srl::geometry::{make_sphere_grid, SphereFunction};
use srl::refinednorm::{refined_norm, refined_norm_bound, CapAtlas, RefinedNormConfig};
use srl::search::random_smooth;
use srl::trial::{g_eps, Cutoff};

fn main() -> srl::Result<()> {
    let grid = make_sphere_grid(3, 48)?;
    let atlas = CapAtlas::new(&grid, 0.3)?;
    let cfg = RefinedNormConfig::for_atlas(&atlas);
    let c = refined_norm_bound(&atlas, &cfg);
    println!("{} caps, cube levels {}..={}, C_N = {c:.5}", atlas.len(), cfg.j_min, cfg.j_max);
    let mut family = vec![("constant".to_string(), SphereFunction::constant(&grid, 1.0)), ("random".to_string(), random_smooth(&grid, 3, 4.0))];
    for eps in [0.3, 0.2, 0.1] {
        family.push((format!("g_eps({eps})"), g_eps(eps, &grid, &Cutoff::default())?));
    }
    for (name, f) in family {
        let r = refined_norm(&f, &atlas, &cfg)?;
        println!(
            "{name:<12} refined/||f|| = {:.5}  (<= {c:.5})  cube level {} in cap {}",
            r.value / f.norm(),
            r.cube.level,
            r.alpha
        );
    }
    Ok(())
}
