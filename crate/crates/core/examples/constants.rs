//! The closed-form constants: c(q) and the Gaussian Strichartz values.

use std::f64::consts::PI;

use srl::strichartz::gaussian_strichartz_constant;
use srl::twoprofile::{c_constant, phi_of_t};

fn main() {
    for q in [2.0, 3.0, 10.0 / 3.0, 4.0, 6.0] {
        println!("c({q:.4}) = {:.15}   theta quadrature {:.15}", c_constant(q), phi_of_t(1.0, q).unwrap());
    }
    println!("S_2^G = {:.15e}  (1/(8 pi^2) = {:.15e})", gaussian_strichartz_constant(2), 1.0 / (8.0 * PI * PI));
    println!("S_1^G = {:.15e}  ((2pi)^-3/sqrt3 = {:.15e})", gaussian_strichartz_constant(1), (2.0 * PI).powi(-3) / 3f64.sqrt());
    println!("antipodal level N=3: c(4) S_2^G = {:.10e}", c_constant(4.0) * gaussian_strichartz_constant(2));
    println!("antipodal level N=2: c(6) S_1^G = {:.10e}", c_constant(6.0) * gaussian_strichartz_constant(1));
}
