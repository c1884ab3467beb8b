//! Internal rays of the period-1 tongue: fixed critical angle, decreasing
//! multiplier. Rays at `nu` and `pi - nu` are mirror images.
//!
//!     cargo run --release --example internal_rays

use std::f64::consts::PI;

use dsm_lab::linearize::trace_internal_ray;
use dsm_lab::Parameter;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = Parameter::new(0.5, 0.75)?;
    let lambdas: Vec<f64> = (1..=9).rev().map(|j| j as f64 / 10.0).collect();
    for nu in [PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0] {
        let ray = trace_internal_ray(&seed, nu, &lambdas)?;
        println!("nu = {:.4}", nu);
        for (lam, p) in lambdas.iter().zip(&ray) {
            println!("  lambda {lam:.1}  a = {:+.8}  b = {:.8}", p.a(), p.b());
        }
    }

    let left = trace_internal_ray(&seed, PI / 3.0, &lambdas)?;
    let right = trace_internal_ray(&seed, 2.0 * PI / 3.0, &lambdas)?;
    let gap = left
        .iter()
        .zip(&right)
        .map(|(l, r)| {
            let da = dsm_lab::map::circle_distance(l.a(), -r.a());
            da.max((l.b() - r.b()).abs())
        })
        .fold(0.0, f64::max);
    println!("mirror defect between nu = pi/3 and 2pi/3: {gap:.2e}");
    Ok(())
}
