//! The radial power model map between two multiplier/angle pairs: its
//! sector dilatations and a finite-difference Beltrami coefficient.
//!
//!     cargo run --release --example qc_model -- 0.5 1.5707963 0.3 1.0

use dsm_lab::qc_model::{chi_eval, conjugated_multiplier, dilatation_bound, sector_dilatations, RadialPowerMap};
use num_complex::Complex64;

fn beltrami(m: &RadialPowerMap, z: Complex64) -> f64 {
    let h = 1e-6 * z.norm();
    let dx = (chi_eval(m, z + h) - chi_eval(m, z - h)) / (2.0 * h);
    let i = Complex64::i();
    let dy = (chi_eval(m, z + i * h) - chi_eval(m, z - i * h)) / (2.0 * h);
    let dz = 0.5 * (dx - i * dy);
    let dzbar = 0.5 * (dx + i * dy);
    (dzbar / dz).norm()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let (l0, nu0, l1, nu1) = match args[..] {
        [l0, nu0, l1, nu1] => (l0, nu0, l1, nu1),
        _ => (0.5, std::f64::consts::FRAC_PI_2, 0.3, 1.0),
    };
    let m = RadialPowerMap::between(l0, nu0, l1, nu1)?;
    println!("exponent 1 + alpha = {:.10}", m.exponent());
    println!(
        "lambda0^(1 + alpha) = {:.12} (target {l1})",
        conjugated_multiplier(&m, l0)?
    );
    let (inner, outer) = sector_dilatations(&m);
    println!(
        "|mu| inner sector {inner:.10}, outer sector {outer:.10}, bound {:.10}",
        dilatation_bound(&m)
    );

    for theta in [
        0.3 * nu0,
        0.7 * nu0,
        nu0 + 0.3 * (std::f64::consts::PI - nu0),
        -0.5 * nu0,
    ] {
        let z = Complex64::from_polar(0.4, theta);
        println!("  theta = {theta:+.4}: finite-difference |mu| = {:.8}", beltrami(&m, z));
    }
    let w = chi_eval(&m, Complex64::from_polar(0.4, nu0));
    println!("chi(0.4 e^(i nu0)) = {w:.8}, arg = {:.10} (nu1 = {nu1})", w.arg());
    Ok(())
}
