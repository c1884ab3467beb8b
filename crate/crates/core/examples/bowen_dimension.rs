//! Hausdorff dimension of the chaotic set from the Bowen root of the
//! pressure, compared with a box-counting slope.
//!
//!     cargo run --release --example bowen_dimension -- 0.5 0.75

use dsm_lab::thermo::{bowen_root, box_counting_dimension, chaotic_set, PressureSolver};
use dsm_lab::Parameter;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let (a, b) = match args[..] {
        [a, b] => (a, b),
        _ => (0.5, 0.75),
    };
    let p = Parameter::new(a, b)?;
    let set = chaotic_set(&p, 12)?;
    println!(
        "({a}, {b}): period {} type {}/{}  lambda {:.6}  partition arcs {}",
        set.cycle.period,
        set.orbit_type.k,
        set.orbit_type.denominator(),
        set.cycle.lambda,
        set.partition.len()
    );

    let mut solver = PressureSolver::new(set.partition.clone());
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let br = solver.bracket(t, 10)?;
        println!("  P({t:.2}) in [{:+.9}, {:+.9}]  rank {}", br.lower, br.upper, br.rank);
    }

    let d = bowen_root(PressureSolver::new(set.partition.clone()), 1e-6)?;
    println!(
        "Bowen root t* = {:.8}  certified bracket [{:.8}, {:.8}] at rank {}{}",
        d.t_star,
        d.t_lower,
        d.t_upper,
        d.rank,
        if d.certified { "" } else { " (rank cap reached)" }
    );

    let boxes = box_counting_dimension(&p, &set.partition, 10..=20)?;
    for (k, n) in &boxes.counts {
        println!("  boxes of side 2^-{k}: {n}");
    }
    println!(
        "box-counting slope {:.4}  (difference {:+.4})",
        boxes.slope,
        boxes.slope - d.t_star
    );
    Ok(())
}
