//! Star-shaped boundary families `r(theta; lambda)`, their equal-area radius,
//! and the order-by-order Fourier description of the deviation from that
//! circle:
//!
//! ```text
//! r(theta) = R0 [1 + sum_sigma lambda^sigma f_sigma(theta)]
//! f_sigma(theta) = sum_n C_n^sigma cos(n theta) + S_n^sigma sin(n theta)
//! ```
//!
//! Two built-in families are provided (the supercircle and the ellipse, both
//! normalized to unit equal-area radius) along with ingestion of sampled
//! boundaries.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::fmt::sig15;
use crate::quad;
use crate::specfun::{self, SpecFunError};

/// Angular quadrature nodes used for Fourier projection.
pub const ANGULAR_NODES: usize = 4096;

/// Default angular truncation of the Fourier tables.
pub const DEFAULT_N_MAX: usize = 32;

/// Highest order in lambda that the extraction stencil resolves reliably.
pub const MAX_SIGMA: usize = 4;

/// Coefficients at the truncation index larger than this raise a warning.
pub const TRUNCATION_WARNING: f64 = 1e-8;

const STENCIL_SPAN: f64 = 0.05;
const STENCIL_FRACTIONS: [f64; 4] = [1.0, 0.75, 0.5, 0.25];
const CIRCLE_AT_ZERO_TOL: f64 = 1e-9;
const AREA_REL_TOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("{family}: lambda = {lambda} lies outside [{lo}, {hi}]")]
    LambdaOutOfRange {
        family: String,
        lambda: f64,
        lo: f64,
        hi: f64,
    },
    #[error("non-positive radius r = {r} at theta = {theta}, lambda = {lambda}")]
    NonPositiveRadius { theta: f64, lambda: f64, r: f64 },
    #[error("{family}: boundary at lambda = 0 deviates from a circle by {deviation:e}")]
    NotACircle { family: String, deviation: f64 },
    #[error("lambda stencil is degenerate: {0}")]
    DegenerateStencil(String),
    #[error("invalid expansion request: {0}")]
    InvalidRequest(String),
    #[error("sample format error: {0}")]
    Format(String),
    #[error("non-uniform theta grid at lambda = {lambda}: {detail}")]
    NonUniformGrid { lambda: f64, detail: String },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BoundaryError>;

type RadiusFn = dyn Fn(f64, f64) -> f64 + Send + Sync;
type CurveFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Symmetries a family holds for every lambda.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Symmetry {
    /// `r(-theta) = r(theta)`
    pub x_mirror: bool,
    /// `r(pi - theta) = r(theta)`
    pub y_mirror: bool,
    /// `r(theta + pi/2) = r(theta)`
    pub quarter_turn: bool,
}

impl Symmetry {
    pub const NONE: Symmetry = Symmetry {
        x_mirror: false,
        y_mirror: false,
        quarter_turn: false,
    };
    pub const BOTH_MIRRORS: Symmetry = Symmetry {
        x_mirror: true,
        y_mirror: true,
        quarter_turn: false,
    };
    pub const SQUARE: Symmetry = Symmetry {
        x_mirror: true,
        y_mirror: true,
        quarter_turn: true,
    };
}

/// One-parameter family of star-shaped boundaries.
#[derive(Clone)]
pub struct ShapeFamily {
    name: String,
    radius: Arc<RadiusFn>,
    lambda_range: (f64, f64),
    symmetry: Symmetry,
    kinks: Vec<f64>,
}

impl fmt::Debug for ShapeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShapeFamily")
            .field("name", &self.name)
            .field("lambda_range", &self.lambda_range)
            .field("symmetry", &self.symmetry)
            .field("kinks", &self.kinks)
            .finish_non_exhaustive()
    }
}

impl ShapeFamily {
    pub fn new<F>(
        name: impl Into<String>,
        lambda_range: (f64, f64),
        symmetry: Symmetry,
        radius: F,
    ) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            radius: Arc::new(radius),
            lambda_range,
            symmetry,
            kinks: Vec::new(),
        }
    }

    /// Angles where `r` may fail to be smooth; quadrature panels break there.
    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    /// Circle of radius `a` for every lambda.
    pub fn circle(a: f64) -> Self {
        Self::new("circle", (-1.0, 1.0), Symmetry::SQUARE, move |_, _| a)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lambda_range(&self) -> (f64, f64) {
        self.lambda_range
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    /// Raw evaluation; no range check.
    pub fn radius(&self, theta: f64, lambda: f64) -> f64 {
        (self.radius)(theta, lambda)
    }

    pub fn contains(&self, lambda: f64) -> bool {
        let (lo, hi) = self.lambda_range;
        lambda >= lo - 1e-12 && lambda <= hi + 1e-12
    }

    pub fn check_lambda(&self, lambda: f64) -> Result<()> {
        if !self.contains(lambda) || !lambda.is_finite() {
            let (lo, hi) = self.lambda_range;
            return Err(BoundaryError::LambdaOutOfRange {
                family: self.name.clone(),
                lambda,
                lo,
                hi,
            });
        }
        Ok(())
    }

    /// The single boundary curve at deformation `lambda`.
    pub fn at(&self, lambda: f64) -> Result<Boundary> {
        self.check_lambda(lambda)?;
        let radius = Arc::clone(&self.radius);
        let b = Boundary {
            radius: Arc::new(move |t| radius(t, lambda)),
            kinks: self.kinks.clone(),
            symmetry: self.symmetry,
        };
        b.check_positive(lambda)?;
        Ok(b)
    }
}

/// A fixed closed curve `r(theta)`.
#[derive(Clone)]
pub struct Boundary {
    radius: Arc<CurveFn>,
    kinks: Vec<f64>,
    symmetry: Symmetry,
}

impl fmt::Debug for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Boundary")
            .field("kinks", &self.kinks)
            .field("symmetry", &self.symmetry)
            .finish_non_exhaustive()
    }
}

impl Boundary {
    pub fn new<F>(symmetry: Symmetry, radius: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            radius: Arc::new(radius),
            kinks: Vec::new(),
            symmetry,
        }
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn radius(&self, theta: f64) -> f64 {
        (self.radius)(theta)
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// Uniformly scaled copy, `r -> factor * r`.
    pub fn scaled(&self, factor: f64) -> Boundary {
        let radius = Arc::clone(&self.radius);
        Boundary {
            radius: Arc::new(move |t| factor * radius(t)),
            kinks: self.kinks.clone(),
            symmetry: self.symmetry,
        }
    }

    /// Enclosed area `1/2 * integral r^2 dtheta`.
    pub fn area(&self) -> f64 {
        let f = |t: f64| {
            let r = self.radius(t);
            0.5 * r * r
        };
        quad::integrate_periodic(&f, &self.kinks, AREA_REL_TOL)
    }

    /// Radius of the circle with the same area.
    pub fn equivalent_radius(&self) -> f64 {
        (self.area() / PI).sqrt()
    }

    fn check_positive(&self, lambda: f64) -> Result<()> {
        for theta in quad::periodic_nodes(ANGULAR_NODES) {
            let r = self.radius(theta);
            if !(r > 0.0) || !r.is_finite() {
                return Err(BoundaryError::NonPositiveRadius { theta, lambda, r });
            }
        }
        Ok(())
    }
}

/// Radius of the equal-area circle of `shape` at deformation `lambda`.
pub fn equivalent_radius(shape: &ShapeFamily, lambda: f64) -> Result<f64> {
    Ok(shape.at(lambda)?.equivalent_radius())
}

/// Fourier tables `C_n^sigma`, `S_n^sigma` of the boundary deviation together
/// with the equal-area radius. Indices outside the stored range (including
/// negative ones) read as zero, and `S_0` is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBoundary {
    r0: f64,
    n_max: usize,
    cos: Vec<Vec<f64>>,
    sin: Vec<Vec<f64>>,
    warnings: Vec<String>,
}

impl FourierBoundary {
    /// All-zero coefficients: the circle of radius `r0`.
    pub fn zeros(r0: f64, max_order: usize, n_max: usize) -> Self {
        Self {
            r0,
            n_max,
            cos: vec![vec![0.0; n_max + 1]; max_order],
            sin: vec![vec![0.0; n_max + 1]; max_order],
            warnings: Vec::new(),
        }
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn max_order(&self) -> usize {
        self.cos.len()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `C_n^sigma`.
    pub fn c(&self, sigma: usize, n: i64) -> f64 {
        if sigma == 0 || n < 0 {
            return 0.0;
        }
        self.cos
            .get(sigma - 1)
            .and_then(|row| row.get(n as usize))
            .copied()
            .unwrap_or(0.0)
    }

    /// `S_n^sigma`.
    pub fn s(&self, sigma: usize, n: i64) -> f64 {
        if sigma == 0 || n <= 0 {
            return 0.0;
        }
        self.sin
            .get(sigma - 1)
            .and_then(|row| row.get(n as usize))
            .copied()
            .unwrap_or(0.0)
    }

    /// Sets `C_n^sigma`; panics if the index is outside the table.
    pub fn set_c(&mut self, sigma: usize, n: usize, value: f64) -> &mut Self {
        self.cos[sigma - 1][n] = value;
        self
    }

    /// Sets `S_n^sigma` (`n >= 1`); panics if the index is outside the table.
    pub fn set_s(&mut self, sigma: usize, n: usize, value: f64) -> &mut Self {
        assert!(n >= 1, "S_0 is identically zero");
        self.sin[sigma - 1][n] = value;
        self
    }

    /// True when every stored sine coefficient of the given order is within
    /// `tol` of zero.
    pub fn sine_free(&self, sigma: usize, tol: f64) -> bool {
        self.sin
            .get(sigma - 1)
            .is_none_or(|row| row.iter().all(|v| v.abs() <= tol))
    }

    /// `f_sigma(theta)`.
    pub fn order_deviation(&self, sigma: usize, theta: f64) -> f64 {
        (0..=self.n_max as i64)
            .map(|n| {
                let nt = n as f64 * theta;
                self.c(sigma, n) * nt.cos() + self.s(sigma, n) * nt.sin()
            })
            .sum()
    }

    /// `R0 [1 + sum_sigma lambda^sigma f_sigma(theta)]` truncated at
    /// `max_order`.
    pub fn reconstruct(&self, theta: f64, lambda: f64) -> f64 {
        let dev: f64 = (1..=self.max_order())
            .map(|s| lambda.powi(s as i32) * self.order_deviation(s, theta))
            .sum();
        self.r0 * (1.0 + dev)
    }

    /// Writes `sigma,n,kind,value` rows ordered by sigma, then n, C before S.
    pub fn write_table<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "sigma,n,kind,value")?;
        for sigma in 1..=self.max_order() {
            for n in 0..=self.n_max {
                writeln!(w, "{sigma},{n},C,{}", sig15(self.c(sigma, n as i64)))?;
                if n > 0 {
                    writeln!(w, "{sigma},{n},S,{}", sig15(self.s(sigma, n as i64)))?;
                }
            }
        }
        Ok(())
    }

    /// Reads the format produced by [`FourierBoundary::write_table`]. The
    /// table carries no radius, so `r0` must be supplied.
    pub fn read_table<R: BufRead>(r0: f64, reader: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (i == 0 && line == "sigma,n,kind,value") {
                continue;
            }
            let bad = || BoundaryError::Format(format!("line {}: `{line}`", i + 1));
            let mut it = line.split(',').map(str::trim);
            let sigma: usize = it.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            let n: usize = it.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            let kind = it.next().ok_or_else(bad)?;
            let value: f64 = it.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            if sigma == 0 || !(kind == "C" || kind == "S") || (kind == "S" && n == 0) {
                return Err(bad());
            }
            rows.push((sigma, n, kind == "C", value));
        }
        let max_order = rows.iter().map(|r| r.0).max().unwrap_or(0);
        let n_max = rows.iter().map(|r| r.1).max().unwrap_or(0);
        let mut fb = Self::zeros(r0, max_order, n_max);
        for (sigma, n, is_cos, v) in rows {
            if is_cos {
                fb.set_c(sigma, n, v);
            } else {
                fb.set_s(sigma, n, v);
            }
        }
        Ok(fb)
    }
}

/// Extracts `C_n^sigma`, `S_n^sigma` for `sigma <= sigma_max`, `n <= n_max`.
///
/// At each angular node the raw radius `r(theta, lambda) / R0(0)` is sampled
/// on a symmetric stencil of eight nonzero lambdas and interpolated by a
/// degree-8 polynomial; its low coefficients form a Taylor series in lambda.
/// The series of `R0(lambda)` follows from the mean of its square, and the
/// series quotient `r / R0 - 1` gives the `f_sigma(theta)`. Normalizing order
/// by order rather than per sampled lambda keeps the area constraints exact
/// up to rounding and angular truncation. The `f_sigma` are projected onto
/// `cos n theta`, `sin n theta` with the periodic trapezoid rule.
pub fn fourier_expand(
    shape: &ShapeFamily,
    sigma_max: usize,
    n_max: usize,
) -> Result<FourierBoundary> {
    if !(2..=MAX_SIGMA).contains(&sigma_max) {
        return Err(BoundaryError::InvalidRequest(format!(
            "sigma_max = {sigma_max} must lie in 2..={MAX_SIGMA}"
        )));
    }
    if n_max == 0 || n_max >= ANGULAR_NODES / 2 {
        return Err(BoundaryError::InvalidRequest(format!(
            "n_max = {n_max} must lie in 1..{}",
            ANGULAR_NODES / 2
        )));
    }
    let (lo, hi) = shape.lambda_range();
    if !shape.contains(0.0) {
        return Err(BoundaryError::DegenerateStencil(format!(
            "{}: lambda range [{lo}, {hi}] does not contain 0",
            shape.name()
        )));
    }
    let span = STENCIL_SPAN.min(0.5 * (hi - lo));
    if !(span > 1e-6) {
        return Err(BoundaryError::DegenerateStencil(format!(
            "{}: lambda range [{lo}, {hi}] is too narrow",
            shape.name()
        )));
    }

    let nodes = quad::periodic_nodes(ANGULAR_NODES);
    let r0 = equivalent_radius(shape, 0.0)?;
    let raw = |lambda: f64| -> Result<Vec<f64>> {
        let curve = Boundary {
            radius: {
                let shape = shape.clone();
                Arc::new(move |t| shape.radius(t, lambda))
            },
            kinks: shape.kinks().to_vec(),
            symmetry: shape.symmetry(),
        };
        curve.check_positive(lambda)?;
        Ok(nodes.iter().map(|&t| curve.radius(t) / r0).collect())
    };

    let at_zero = raw(0.0)?;
    let deviation = at_zero.iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
    if deviation > CIRCLE_AT_ZERO_TOL {
        return Err(BoundaryError::NotACircle {
            family: shape.name().to_string(),
            deviation,
        });
    }

    let stencil: Vec<f64> = STENCIL_FRACTIONS.iter().flat_map(|&u| [u, -u]).collect();
    let degree = stencil.len();
    let vander = DMatrix::from_fn(degree, degree, |i, k| stencil[i].powi(k as i32 + 1));
    let weights = vander
        .try_inverse()
        .ok_or_else(|| BoundaryError::DegenerateStencil("singular Vandermonde system".into()))?;

    let samples = stencil
        .iter()
        .map(|&u| raw(u * span))
        .collect::<Result<Vec<_>>>()?;

    // taylor[sigma][j]: coefficient of lambda^sigma of r / R0(0) at node j
    let mut taylor = vec![at_zero];
    for sigma in 1..=sigma_max {
        let scale = span.powi(sigma as i32);
        taylor.push(
            (0..ANGULAR_NODES)
                .map(|j| {
                    (0..degree)
                        .map(|i| weights[(sigma - 1, i)] * (samples[i][j] - taylor[0][j]))
                        .sum::<f64>()
                        / scale
                })
                .collect(),
        );
    }

    let inv_n = 1.0 / ANGULAR_NODES as f64;
    let mean_square: Vec<f64> = (0..=sigma_max)
        .map(|sigma| {
            (0..ANGULAR_NODES)
                .map(|j| {
                    (0..=sigma)
                        .map(|k| taylor[k][j] * taylor[sigma - k][j])
                        .sum::<f64>()
                })
                .sum::<f64>()
                * inv_n
        })
        .collect();
    let scale = series_sqrt(&mean_square);
    let normalized: Vec<Vec<f64>> = {
        let mut out = vec![vec![0.0; ANGULAR_NODES]; sigma_max + 1];
        let mut column = vec![0.0; sigma_max + 1];
        for j in 0..ANGULAR_NODES {
            for (sigma, c) in column.iter_mut().enumerate() {
                *c = taylor[sigma][j];
            }
            for (sigma, q) in series_div(&column, &scale).into_iter().enumerate() {
                out[sigma][j] = q;
            }
        }
        out
    };

    let mut fb = FourierBoundary::zeros(r0, sigma_max, n_max);
    for sigma in 1..=sigma_max {
        let f_sigma = &normalized[sigma];
        for n in 0..=n_max {
            let (mut cs, mut sn) = (0.0, 0.0);
            for (j, &t) in nodes.iter().enumerate() {
                let (s, c) = (n as f64 * t).sin_cos();
                cs += f_sigma[j] * c;
                sn += f_sigma[j] * s;
            }
            let w = if n == 0 { inv_n } else { 2.0 * inv_n };
            fb.cos[sigma - 1][n] = w * cs;
            fb.sin[sigma - 1][n] = if n == 0 { 0.0 } else { w * sn };
        }
        let tail_c = fb.c(sigma, n_max as i64).abs();
        let tail_s = fb.s(sigma, n_max as i64).abs();
        if tail_c.max(tail_s) > TRUNCATION_WARNING {
            fb.warnings.push(format!(
                "order {sigma}: |coefficient| at n_max = {n_max} is {:e}; the angular series is truncated",
                tail_c.max(tail_s)
            ));
        }
    }
    Ok(fb)
}

/// Power series square root, `a[0] > 0`.
fn series_sqrt(a: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; a.len()];
    s[0] = a[0].sqrt();
    for k in 1..a.len() {
        let cross: f64 = (1..k).map(|i| s[i] * s[k - i]).sum();
        s[k] = (a[k] - cross) / (2.0 * s[0]);
    }
    s
}

/// Power series quotient `a / b`, `b[0] != 0`.
fn series_div(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; a.len()];
    for k in 0..a.len() {
        let known: f64 = (1..=k).map(|i| b[i] * q[k - i]).sum();
        q[k] = (a[k] - known) / b[0];
    }
    q
}

/// Residuals of the area-preservation constraints, one per order:
///
/// ```text
/// 4 C_0^sigma + sum_{nu=1}^{sigma-1} [ 2 C_0^nu C_0^(sigma-nu)
///     + sum_{n>=1} (C_n^nu C_n^(sigma-nu) + S_n^nu S_n^(sigma-nu)) ] = 0
/// ```
///
/// Order 1 reads `C_0^1 = 0`; order 2 reads `4 C_0^2 = -sum (C_n^1^2 + S_n^1^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    pub residuals: Vec<f64>,
    pub tol: f64,
}

impl ConstraintReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| r.abs() <= self.tol)
    }

    pub fn residual(&self, sigma: usize) -> Option<f64> {
        self.residuals.get(sigma.checked_sub(1)?).copied()
    }

    pub fn max_abs(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

pub fn verify_constraints(fb: &FourierBoundary, tol: f64) -> ConstraintReport {
    let n_max = fb.n_max() as i64;
    let residuals = (1..=fb.max_order())
        .map(|sigma| {
            let mut total = 4.0 * fb.c(sigma, 0);
            for nu in 1..sigma {
                let mu = sigma - nu;
                total += 2.0 * fb.c(nu, 0) * fb.c(mu, 0);
                for n in 1..=n_max {
                    total += fb.c(nu, n) * fb.c(mu, n) + fb.s(nu, n) * fb.s(mu, n);
                }
            }
            total
        })
        .collect();
    ConstraintReport { residuals, tol }
}

/// Equal-area radius of `|x|^n + |y|^n = a^n`, per unit `a`.
pub fn supercircle_area_radius(exponent: f64) -> Result<f64> {
    let n = exponent;
    Ok((2.0 / (n * PI)).sqrt() * specfun::gamma(1.0 / n)? / specfun::gamma(2.0 / n)?.sqrt())
}

fn supercircle_radius(theta: f64, delta: f64) -> f64 {
    let n = 2.0 - delta;
    let a = 1.0 / supercircle_area_radius(n).unwrap_or(f64::NAN);
    let (s, c) = theta.sin_cos();
    a / (c.abs().powf(n) + s.abs().powf(n)).powf(1.0 / n)
}

/// Supercircle family `|x|^n + |y|^n = a^n` with `delta = 2 - n`,
/// `delta in [-1, 1]`, scaled to unit equal-area radius. Quadrants other than
/// the first follow by taking absolute values of `cos` and `sin`.
pub fn make_supercircle() -> ShapeFamily {
    ShapeFamily::new(
        "supercircle",
        (-1.0, 1.0),
        Symmetry::SQUARE,
        supercircle_radius,
    )
    .with_kinks(vec![0.0, 0.5 * PI, PI, 1.5 * PI])
}

/// The supercircle boundary at a single `delta`.
pub fn supercircle(delta: f64) -> Result<Boundary> {
    make_supercircle().at(delta)
}

fn ellipse_radius(theta: f64, lambda: f64) -> f64 {
    // semi-axes with a*b = 1 and (a - b)/(a + b) = lambda
    let a = ((1.0 + lambda) / (1.0 - lambda)).sqrt();
    let b = 1.0 / a;
    let c = theta.cos();
    b / (1.0 - (1.0 - b * b / (a * a)) * c * c).sqrt()
}

/// Ellipse family with `lambda = (a - b)/(a + b)`, `|lambda| <= 1/3`
/// (up to a 2:1 aspect ratio), scaled so that `a b = 1`.
pub fn make_ellipse() -> ShapeFamily {
    ShapeFamily::new(
        "ellipse",
        (-1.0 / 3.0, 1.0 / 3.0),
        Symmetry::BOTH_MIRRORS,
        ellipse_radius,
    )
}

/// Closed-form coefficient tables for the built-in families.
pub mod closed_form {
    use super::*;

    /// `C_{4k}^1` of the supercircle for the `delta = 2 - n` parameter:
    /// `1 / (4k (4k^2 - 1))`. The coefficient is positive because `delta > 0`
    /// moves the boundary toward the diamond, lengthening the radius along
    /// the axes.
    pub fn supercircle_first_order(k: u32) -> f64 {
        let k = k as f64;
        1.0 / (4.0 * k * (4.0 * k * k - 1.0))
    }

    /// `sum_k (C_{4k}^1)^2` summed to convergence.
    pub fn supercircle_first_order_square_sum() -> f64 {
        // terms fall off as k^-6; 2000 terms leave < 1e-20
        (1..=2000u32)
            .rev()
            .map(|k| supercircle_first_order(k).powi(2))
            .sum()
    }

    /// `C_4^2 = (3 pi^2 / 8 - 23 / 9) / 32`.
    pub fn supercircle_c4_second() -> f64 {
        (3.0 * PI * PI / 8.0 - 23.0 / 9.0) / 32.0
    }

    /// `C_0^2` implied by the second-order area constraint.
    pub fn supercircle_c0_second() -> f64 {
        -0.25 * supercircle_first_order_square_sum()
    }

    /// The closed-form part of the supercircle table: every `C_{4k}^1`, plus
    /// `C_0^2` and `C_4^2`. Higher second-order harmonics have no closed form
    /// here and are left at zero.
    pub fn supercircle(n_max: usize) -> FourierBoundary {
        let mut fb = FourierBoundary::zeros(1.0, 2, n_max);
        for n in (4..=n_max).step_by(4) {
            fb.set_c(1, n, supercircle_first_order((n / 4) as u32));
        }
        fb.set_c(2, 0, supercircle_c0_second());
        if n_max >= 4 {
            fb.set_c(2, 4, supercircle_c4_second());
        }
        fb
    }

    /// Ellipse: `C_2^1 = 1`, `C_0^2 = -1/4`, `C_4^2 = 3/4`.
    pub fn ellipse(n_max: usize) -> FourierBoundary {
        assert!(n_max >= 4, "ellipse table needs n_max >= 4");
        let mut fb = FourierBoundary::zeros(1.0, 2, n_max);
        fb.set_c(1, 2, 1.0).set_c(2, 0, -0.25).set_c(2, 4, 0.75);
        fb
    }
}

/// One `(lambda, theta, r)` sample of a boundary family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRow {
    pub lambda: f64,
    pub theta: f64,
    pub r: f64,
}

/// Parses the `lambda,theta,r` sample format (radians, one row per node).
pub fn read_samples<R: std::io::Read>(reader: R) -> Result<Vec<SampleRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| BoundaryError::Format(e.to_string()))?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    if names != ["lambda", "theta", "r"] {
        return Err(BoundaryError::Format(format!(
            "expected header `lambda,theta,r`, found `{}`",
            names.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| BoundaryError::Format(e.to_string()))?;
        if rec.len() != 3 {
            return Err(BoundaryError::Format(format!(
                "row {}: expected 3 fields",
                i + 1
            )));
        }
        let field = |k: usize| -> Result<f64> {
            rec[k].parse::<f64>().map_err(|_| {
                BoundaryError::Format(format!("row {}: bad number `{}`", i + 1, &rec[k]))
            })
        };
        rows.push(SampleRow {
            lambda: field(0)?,
            theta: field(1)?,
            r: field(2)?,
        });
    }
    Ok(rows)
}

/// Writes `family` sampled at `lambdas` on an `n_theta`-node uniform grid.
pub fn write_samples<W: Write>(
    family: &ShapeFamily,
    lambdas: &[f64],
    n_theta: usize,
    mut w: W,
) -> Result<()> {
    writeln!(w, "lambda,theta,r")?;
    for &lambda in lambdas {
        family.check_lambda(lambda)?;
        for theta in quad::periodic_nodes(n_theta) {
            writeln!(
                w,
                "{},{},{}",
                sig15(lambda),
                sig15(theta),
                sig15(family.radius(theta, lambda))
            )?;
        }
    }
    Ok(())
}

/// Trigonometric interpolant of one sampled curve.
#[derive(Debug, Clone)]
struct TrigCurve {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TrigCurve {
    fn fit(values: &[f64]) -> Self {
        let n = values.len();
        let half = n / 2;
        let mut a = vec![0.0; half + 1];
        let mut b = vec![0.0; half + 1];
        for k in 0..=half {
            let (mut ca, mut cb) = (0.0, 0.0);
            for (j, &v) in values.iter().enumerate() {
                let (s, c) = (2.0 * PI * (k * j) as f64 / n as f64).sin_cos();
                ca += v * c;
                cb += v * s;
            }
            let w = if k == 0 || (n.is_multiple_of(2) && k == half) {
                1.0
            } else {
                2.0
            };
            a[k] = w * ca / n as f64;
            b[k] = w * cb / n as f64;
        }
        if n.is_multiple_of(2) {
            b[half] = 0.0;
        }
        Self { a, b }
    }

    fn eval(&self, theta: f64) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(k, (a, b))| {
                let (s, c) = (k as f64 * theta).sin_cos();
                a * c + b * s
            })
            .sum()
    }
}

fn check_uniform(lambda: f64, thetas: &[f64]) -> Result<()> {
    let n = thetas.len();
    if n < 4 {
        return Err(BoundaryError::Format(format!(
            "lambda = {lambda}: need at least 4 theta nodes, found {n}"
        )));
    }
    let diffs: Vec<f64> = thetas
        .windows(2)
        .map(|w| w[1] - w[0])
        .chain(std::iter::once(2.0 * PI + thetas[0] - thetas[n - 1]))
        .collect();
    let base = diffs.iter().copied().fold(f64::INFINITY, f64::min);
    if !(base > 0.0) {
        return Err(BoundaryError::Format(format!(
            "lambda = {lambda}: repeated theta node"
        )));
    }
    let tol = 1e-9 * 2.0 * PI;
    let all_equal = diffs.iter().all(|d| (d - base).abs() <= tol);
    if all_equal && thetas[0].abs() <= tol && thetas[n - 1] < 2.0 * PI {
        return Ok(());
    }
    let multiples = diffs.iter().all(|d| {
        let q = d / base;
        (q - q.round()).abs() * base <= tol
    });
    if multiples && thetas[0].abs() <= tol {
        let missing: usize = diffs.iter().map(|d| (d / base).round() as usize - 1).sum();
        return Err(BoundaryError::Format(format!(
            "lambda = {lambda}: theta grid is missing {missing} node(s)"
        )));
    }
    Err(BoundaryError::NonUniformGrid {
        lambda,
        detail: "nodes must be 2 pi j / N, j = 0..N".into(),
    })
}

/// Builds an evaluable family from sampled boundaries: trigonometric
/// interpolation in theta at each sampled lambda, then Lagrange interpolation
/// across lambda.
pub fn shape_from_samples(rows: &[SampleRow]) -> Result<ShapeFamily> {
    let mut lambdas: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    if lambdas.len() < 2 {
        return Err(BoundaryError::Format(format!(
            "need at least 2 distinct lambda values, found {}",
            lambdas.len()
        )));
    }
    let (lo, hi) = (lambdas[0], lambdas[lambdas.len() - 1]);
    if lo > 1e-12 || hi < -1e-12 {
        return Err(BoundaryError::Format(format!(
            "lambda samples [{lo}, {hi}] must bracket 0"
        )));
    }
    let mut curves = Vec::with_capacity(lambdas.len());
    for &lambda in &lambdas {
        let mut level: Vec<&SampleRow> = rows.iter().filter(|r| r.lambda == lambda).collect();
        level.sort_by(|a, b| a.theta.total_cmp(&b.theta));
        if let Some(bad) = level.iter().find(|r| !(r.r > 0.0) || !r.r.is_finite()) {
            return Err(BoundaryError::NonPositiveRadius {
                theta: bad.theta,
                lambda,
                r: bad.r,
            });
        }
        let thetas: Vec<f64> = level.iter().map(|r| r.theta).collect();
        check_uniform(lambda, &thetas)?;
        let values: Vec<f64> = level.iter().map(|r| r.r).collect();
        curves.push(TrigCurve::fit(&values));
    }
    let nodes = lambdas.clone();
    Ok(ShapeFamily::new(
        "samples",
        (lo, hi),
        Symmetry::NONE,
        move |theta, lambda| {
            let values: Vec<f64> = curves.iter().map(|c| c.eval(theta)).collect();
            lagrange(&nodes, &values, lambda)
        },
    ))
}

fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    xs.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let basis: f64 = xs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, &xk)| (x - xk) / (xi - xk))
                .product();
            basis * ys[i]
        })
        .sum()
}
