//! Fourier coefficients of the built-in families and their area constraints.

use helmholtz_perturb::boundary::{self, closed_form};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ellipse = boundary::fourier_expand(&boundary::make_ellipse(), 3, 16)?;
    println!("ellipse: C_2^1 = {:.12}", ellipse.c(1, 2));
    println!(
        "         C_0^2 = {:.12}, C_4^2 = {:.12}",
        ellipse.c(2, 0),
        ellipse.c(2, 4)
    );

    let sc = boundary::fourier_expand(&boundary::make_supercircle(), 2, 128)?;
    println!("\nsupercircle (delta = 2 - n):");
    for k in 1..=4u32 {
        let n = 4 * k as i64;
        println!(
            "  C_{n:<2}^1 = {:+.12}   closed form {:+.12}",
            sc.c(1, n),
            closed_form::supercircle_first_order(k)
        );
    }
    println!(
        "  C_4^2  = {:+.12}   closed form {:+.12}",
        sc.c(2, 4),
        closed_form::supercircle_c4_second()
    );
    println!(
        "  C_0^2  = {:+.12}   closed form {:+.12}",
        sc.c(2, 0),
        closed_form::supercircle_c0_second()
    );

    for (name, fb) in [("ellipse", &ellipse), ("supercircle", &sc)] {
        let report = boundary::verify_constraints(fb, 1e-10);
        println!(
            "\n{name} constraint residuals: {:?} (pass = {})",
            report.residuals,
            report.passed()
        );
    }
    println!(
        "\nsupercircle n = 4: R0 / a = {:.15}",
        boundary::supercircle_area_radius(4.0)?
    );
    Ok(())
}
