//! Basin arcs, Markov partition and cylinder refinement of the chaotic
//! set; dumps the cylinders of the last rank as CSV.
//!
//!     cargo run --release --example repeller_cylinders -- 0.5 0.75 10 cylinders.csv

use dsm_lab::cycles::find_attracting_cycle;
use dsm_lab::repeller::{cover_length, immediate_basin_arcs, markov_partition, refine_cylinders, write_cylinders_csv};
use dsm_lab::Parameter;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let a: f64 = args.first().map_or(Ok(0.5), |s| s.parse())?;
    let b: f64 = args.get(1).map_or(Ok(0.75), |s| s.parse())?;
    let rank: usize = args.get(2).map_or(Ok(10), |s| s.parse())?;
    let out = args.get(3).cloned().unwrap_or_else(|| "cylinders.csv".into());

    let p = Parameter::new(a, b)?;
    let cycle = find_attracting_cycle(&p, 12, 1e-6).ok_or("no attracting cycle")?;
    let arcs = immediate_basin_arcs(&p, &cycle)?;
    for arc in &arcs.arcs {
        println!(
            "basin arc ({:+.10}, {:+.10}) around {:+.10}; endpoint expansion {:.4} / {:.4}",
            arc.left, arc.right, arc.center, arc.left_expansion, arc.right_expansion
        );
    }

    let part = markov_partition(&p, &arcs)?;
    println!("partition with {} arcs:", part.len());
    for (r, row) in part.intervals.iter().zip(&part.multiplicity) {
        println!("  [{:+.10}, {:+.10}]  branches {:?}", r.lo, r.hi, row);
    }
    println!(
        "spectral radius {:.12}, primitive {}",
        part.spectral_radius(),
        part.is_primitive()
    );

    let mut last = Vec::new();
    for n in 1..=rank {
        let cyl = refine_cylinders(&p, &part, n)?;
        let diam = cyl.iter().map(|c| c.diameter()).fold(0.0, f64::max);
        println!(
            "rank {n:2}: {:6} cylinders  max diameter {diam:.3e}  cover length {:.6}",
            cyl.len(),
            cover_length(&cyl)
        );
        last = cyl;
    }
    write_cylinders_csv(std::path::Path::new(&out), &last)?;
    println!("wrote {} rank-{rank} cylinders to {out}", last.len());
    Ok(())
}
