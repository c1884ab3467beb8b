//! Uniformizing coordinate of a tongue and its numerical inverse: random
//! targets in the punctured slit disk are pulled back to parameters and
//! pushed forward again.
//!
//!     cargo run --release --example uniformize_roundtrip -- 0.43 0.9 12

use dsm_lab::linearize::{invert_uniformization, uniformize_full};
use dsm_lab::Parameter;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let a: f64 = args.first().map_or(Ok(0.43), |s| s.parse())?;
    let b: f64 = args.get(1).map_or(Ok(0.9), |s| s.parse())?;
    let n: usize = args.get(2).map_or(Ok(12), |s| s.parse())?;

    let seed = Parameter::new(a, b)?;
    let u = uniformize_full(&seed, 12)?;
    println!(
        "seed ({}, {}) in tongue q = {}, k = {}: Xi = {:.8}",
        seed.a(),
        seed.b(),
        u.orbit_type.q,
        u.orbit_type.k,
        u.value.xi
    );

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let r = rng.gen_range(0.05..0.95);
        let t = rng.gen_range(0.05..std::f64::consts::TAU - 0.05);
        let w = Complex64::from_polar(r, t);
        let p = invert_uniformization(&seed, w)?;
        let back = uniformize_full(&p, 12)?;
        let err = (back.value.xi - w).norm();
        worst = worst.max(err);
        println!(
            "  target {w:.6} -> (a, b) = ({:+.9}, {:.9})  type {}  |Xi - target| = {err:.2e}",
            p.a(),
            p.b(),
            back.orbit_type.k
        );
    }
    println!("worst round-trip error {worst:.2e}");
    Ok(())
}
