//! Prints the lowest Dirichlet levels of the unit disk, `E0 = rho^2`.

use helmholtz_perturb::specfun::{self, BesselZeroTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = BesselZeroTable::new(8, 4)?;
    let mut levels = table.within(0.0, 12.0);
    levels.sort_by(|a, b| a.2.total_cmp(&b.2));
    println!(
        "{:>3} {:>3} {:>18} {:>18} {:>10}",
        "m", "n", "rho", "E0", "J_m'(rho)"
    );
    for (m, n, rho) in levels {
        println!(
            "{m:>3} {n:>3} {rho:>18.14} {:>18.12} {:>10.6}",
            rho * rho,
            specfun::bessel_j_prime(m, rho)?
        );
    }
    Ok(())
}
