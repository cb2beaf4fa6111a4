//! Sweeps the supercircle, compares with the oracle and lists crossings.

use helmholtz_perturb::boundary;
use helmholtz_perturb::perturb::Mode;
use helmholtz_perturb::report::{self, GapFloor, ScanOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = report::linspace(-0.4, 0.4, 9);
    let modes = [Mode::cos(2, 1), Mode::sin(2, 1), Mode::cos(0, 2)];
    let scan = report::scan(
        &boundary::make_supercircle(),
        &grid,
        &modes,
        &ScanOptions::default().with_oracle(true),
    )?;
    scan.write_csv(std::io::stdout().lock())?;
    println!();
    let events = report::detect_events(&scan, GapFloor::default())?;
    report::write_events(&events, std::io::stdout().lock())?;
    Ok(())
}
