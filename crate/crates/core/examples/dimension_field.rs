//! Dimension of the chaotic set along a segment inside one tongue, written
//! as CSV, followed by the polynomial smoothness check.
//!
//!     cargo run --release --example dimension_field -- field.csv

use dsm_lab::cli::segment_grid;
use dsm_lab::thermo::{dimension_field, smoothness_diagnostic, write_dimension_csv};
use dsm_lab::Parameter;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "field.csv".into());
    let seed = Parameter::new(0.5, 0.75)?;
    // Vertical segment on the symmetry line, then a slanted one.
    let mut grid = segment_grid(0.5, 0.5, 1, 0.62, 0.9, 12)?;
    grid.extend(
        (0..12)
            .map(|i| {
                let s = i as f64 / 11.0;
                Parameter::new(0.5 - 0.06 * s, 0.8 + 0.1 * s)
            })
            .collect::<Result<Vec<_>, _>>()?,
    );

    let rows = dimension_field(&seed, &grid, 1e-3)?;
    for r in &rows {
        println!(
            "({:+.4}, {:.4})  t* = {}  status {}",
            r.a,
            r.b,
            r.t_star.map_or("-".into(), |t| format!("{t:.6}")),
            r.status
        );
    }
    write_dimension_csv(std::path::Path::new(&out), &rows)?;
    println!("wrote {} rows to {out}", rows.len());

    println!("vertical segment:\n{}", smoothness_diagnostic(&rows[..12])?);
    println!("slanted segment:\n{}", smoothness_diagnostic(&rows[12..])?);
    Ok(())
}
