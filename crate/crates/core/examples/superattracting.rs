//! Tongue tips on the ceiling b = 1: parameters where 1/2 is periodic of
//! exact period q, one per exact-period-q point of the doubling map.
//!
//!     cargo run --release --example superattracting -- 5

use dsm_lab::cycles::OrbitType;
use dsm_lab::linearize::superattracting_parameters;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q_max: usize = std::env::args().nth(1).map_or(Ok(5), |s| s.parse())?;
    for q in 1..=q_max {
        let tips = superattracting_parameters(q);
        let expected = (0..(1u64 << q) - 1)
            .filter(|&k| OrbitType::doubling_period(k, q) == q)
            .count();
        println!("q = {q}: {} tips (doubling count {expected})", tips.len());
        if q <= 4 {
            for t in &tips {
                println!(
                    "  a = {:+.15}  type {}/{}",
                    t.a,
                    t.orbit_type.k,
                    t.orbit_type.denominator()
                );
            }
        }
    }
    Ok(())
}
