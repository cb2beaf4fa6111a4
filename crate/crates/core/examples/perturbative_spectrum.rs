//! Second-order energies of the lowest modes of a deformed disk.

use helmholtz_perturb::boundary;
use helmholtz_perturb::perturb::{Mode, Perturber};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for family in [boundary::make_ellipse(), boundary::make_supercircle()] {
        let p = Perturber::new(family)?;
        println!("{}", p.family().name());
        println!(
            "  {:<10} {:>12} {:>12} {:>14} {:>12}",
            "mode", "E0", "E1", "E2", "E(0.1)"
        );
        for mode in Mode::first5() {
            let e = p.expansion(mode)?;
            println!(
                "  {:<10} {:>12.6} {:>12.6} {:>14.6} {:>12.6}",
                mode.to_string(),
                e.e0,
                e.e1,
                e.e2,
                p.energy(mode, 0.1)?
            );
        }
    }
    Ok(())
}
