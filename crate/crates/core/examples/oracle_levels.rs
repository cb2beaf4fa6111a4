//! Numerical Dirichlet levels of a supercircle, one parity sector at a time.

use helmholtz_perturb::boundary;
use helmholtz_perturb::oracle::{self, OracleConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let curve = boundary::supercircle(0.3)?;
    let cfg = OracleConfig::default().with_window(2.0, 5.6);
    let result = oracle::all_sectors(&curve, &cfg)?;
    println!("{:<8} {:>16} {:>16} {:>10}", "sector", "k", "E", "quality");
    for level in &result.levels {
        println!(
            "{:<8} {:>16.10} {:>16.10} {:>10.2e}",
            level.sector.to_string(),
            level.k,
            level.energy,
            level.quality
        );
    }
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}
