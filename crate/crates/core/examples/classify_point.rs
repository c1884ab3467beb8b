//! Tongue membership, orbit type, multiplier and critical angle of one
//! parameter.
//!
//!     cargo run --release --example classify_point -- 0.43 0.9

use dsm_lab::cycles::{classify, semiconjugacy_phi, TongueClassification};
use dsm_lab::linearize::{critical_angle, uniformize};
use dsm_lab::Parameter;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let (a, b) = match args[..] {
        [a, b] => (a, b),
        _ => (0.43, 0.9),
    };
    let p = Parameter::new(a, b)?;
    let (c1, c2) = p.critical_points()?;
    println!("f_(a,b) with a = {}, b = {}", p.a(), p.b());
    println!("  critical points c1 = {c1:.6}, c2 = {c2:.6}");

    match classify(&p, 12)? {
        TongueClassification::NoAttractingCycleFound => {
            println!("  no attracting cycle of period <= 12");
        }
        TongueClassification::InTongue { cycle, orbit_type } => {
            println!(
                "  attracting cycle of period {}, multiplier {:.10}",
                cycle.period, cycle.lambda
            );
            for (i, x) in cycle.points.iter().enumerate() {
                let mark = if i == cycle.distinguished_index {
                    "  <- distinguished"
                } else {
                    ""
                };
                println!("    x_{i} = {x:+.12}  phi = {:.9}{mark}", semiconjugacy_phi(&p, *x, 60));
            }
            println!(
                "  type {}/{} (mirror tongue has type {})",
                orbit_type.k,
                orbit_type.denominator(),
                orbit_type.mirrored().k
            );
            let nu = critical_angle(&p, &cycle)?;
            let u = uniformize(&p)?;
            println!("  critical angle nu = {nu:.10}");
            println!("  Xi = {:.10}  |Xi| = {:.10}", u.xi, u.xi.norm());
        }
    }
    Ok(())
}
