//! Scans the parameter square `[-1/2, 1/2] x [0, 1]` for attracting cycles and
//! writes the tongue picture as a PPM image.
//!
//!     cargo run --release --example tongue_scan -- tongues.ppm 600 400 10 9
//!
//! The last argument is the sub-pixel refinement used to follow components
//! that do not touch the top row.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use dsm_lab::scan::{
    components, decode, lowest_hyperbolic_b, mirror_mismatches, reaches_top_refined, render_ppm, scan_tongues,
    Grouping, ScanConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = PathBuf::from(args.first().map_or("tongues.ppm", String::as_str));
    let cfg = ScanConfig {
        width: args.get(1).map_or(Ok(600), |s| s.parse())?,
        height: args.get(2).map_or(Ok(400), |s| s.parse())?,
        q_max: args.get(3).map_or(Ok(10), |s| s.parse())?,
        ..ScanConfig::default()
    };
    let refine: usize = args.get(4).map_or(Ok(9), |s| s.parse())?;
    let start = Instant::now();
    let result = scan_tongues(&cfg)?;
    println!("scanned {}x{} in {:.1?}", cfg.width, cfg.height, start.elapsed());
    render_ppm(&result, &out)?;
    println!("wrote {} (sha256 {})", out.display(), result.hash);

    let mut per_period: BTreeMap<usize, usize> = BTreeMap::new();
    for c in result.codes.iter().filter_map(|&c| decode(c)) {
        *per_period.entry(c.0).or_default() += 1;
    }
    for (q, n) in &per_period {
        println!("  period {q:2}: {n} pixels");
    }
    println!(
        "lowest hyperbolic b {:?}; {} mirror mismatches",
        lowest_hyperbolic_b(&result),
        mirror_mismatches(&result).len()
    );
    let blobs = components(&result, Grouping::Nonzero);
    println!(
        "{} connected hyperbolic regions, {} not touching the top row",
        blobs.len(),
        blobs.iter().filter(|c| c.top_row != 0).count()
    );
    // Tongues narrower than a pixel show up as specks separated from the ceiling.
    let comps = components(&result, Grouping::SameCode);
    let detached: Vec<_> = comps.iter().filter(|c| c.top_row != 0).collect();
    println!(
        "{} single-label components, {} not touching the top row",
        comps.len(),
        detached.len()
    );
    for c in &detached {
        let verdict = match reaches_top_refined(&cfg, c, refine, 2_000_000) {
            Some(true) => format!("reaches the top row at {refine}x sub-pixel resolution"),
            Some(false) => format!("does not reach the top row at {refine}x resolution"),
            None => "undecided within budget".to_string(),
        };
        println!("  {:?} at {:?} (size {}): {verdict}", decode(c.code), c.seed, c.size);
    }
    Ok(())
}
