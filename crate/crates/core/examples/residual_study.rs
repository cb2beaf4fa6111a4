//! Boundary residual of the truncated wavefunction against lambda. The
//! order-k truncation should leave a residual of order lambda^(k+1).

use helmholtz_perturb::boundary;
use helmholtz_perturb::perturb::{Mode, Perturber};
use helmholtz_perturb::report::cli::log_slope;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Perturber::new(boundary::make_ellipse())?;
    let lambdas = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];
    for mode in [Mode::cos(0, 1), Mode::cos(2, 1)] {
        let wf = p.wavefunction(mode)?;
        for order in 0..=1 {
            let r = lambdas
                .iter()
                .map(|&l| p.residual_of(&wf, l, order))
                .collect::<Result<Vec<_>, _>>()?;
            let shown: Vec<String> = r.iter().map(|v| format!("{v:.3e}")).collect();
            println!(
                "{mode} order {order}: residuals [{}], slope {:.3}",
                shown.join(", "),
                log_slope(&lambdas, &r)
            );
        }
    }
    Ok(())
}
