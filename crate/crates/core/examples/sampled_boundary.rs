//! Builds a family from tabulated boundary samples and checks that its
//! perturbative spectrum matches the analytic family it came from.

use helmholtz_perturb::boundary;
use helmholtz_perturb::perturb::{Mode, Perturber};
use helmholtz_perturb::report;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = boundary::make_ellipse();
    let mut csv = Vec::new();
    boundary::write_samples(&source, &report::linspace(-0.2, 0.2, 9), 256, &mut csv)?;
    let rows = boundary::read_samples(csv.as_slice())?;
    println!("{} samples", rows.len());

    let sampled = Perturber::new(boundary::shape_from_samples(&rows)?)?;
    let exact = Perturber::new(source)?;
    for mode in Mode::first5() {
        let a = exact.expansion(mode)?;
        let b = sampled.expansion(mode)?;
        println!(
            "{mode:<10} E2 analytic {:>14.8}  sampled {:>14.8}",
            a.e2, b.e2
        );
    }
    Ok(())
}
