//! Perturbative and numerical Dirichlet spectra of weakly deformed disks.
//!
//! The Helmholtz problem `(nabla^2 + E) psi = 0`, `psi = 0` on the boundary, is
//! solved in units where `hbar^2 / 2m = 1` and the equal-area radius is 1, so
//! every unperturbed level is `E0 = rho^2` for a Bessel zero `rho`.
//!
//! - [`specfun`]: Bessel functions, their zeros, and the gamma function.
//! - [`boundary`]: shape families and their Fourier description.
//! - [`perturb`]: second-order energies and first-order wavefunctions.
//! - [`oracle`]: an independent numerical eigenvalue solver.
//! - [`report`]: spectrum scans, crossing/veering detection, CSV output and
//!   the command-line front end.

pub mod boundary;
pub mod fmt;
pub mod oracle;
pub mod perturb;
pub mod quad;
pub mod report;
pub mod specfun;
