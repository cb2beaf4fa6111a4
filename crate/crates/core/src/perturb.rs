//! Rayleigh-Schrodinger style boundary perturbation of the circle spectrum.
//!
//! A mode `(l, j, parity)` of the unit disk has `E0 = rho^2` with
//! `rho = rho_{l,j}` and eigenfunction `N J_l(rho r) cos(l theta)` (or `sin`).
//! Deforming the boundary to `r = 1 + lambda f1 + lambda^2 f2 + ...` shifts the
//! energy to `E0 + lambda E1 + lambda^2 E2`. Writing `d_n = rho J_n'(rho) / J_n(rho)`:
//!
//! ```text
//! l = 0:       E1 = 0
//!              E2 = E0 [ sum_{p>=1} (C_p^2 + S_p^2)(d_p + 1/2) - 2 C_0^(2) ]
//! l > 0, cos:  E1 = -C_2l E0
//!              E2 / E0 = C_2l^2 / 2 + 1/4 sum_{n>=1} C_n (2 C_n + C_{2l+n} + C_{2l-n})
//!                        - 2 C_0^(2) - C_2l^(2)
//!                        + sum_{n>=1, n!=l} (C_{n+l} + C_|n-l|)^2 d_n / 2 + C_l^2 d_0
//! l > 0, sin:  E1 = +C_2l E0
//!              E2 / E0 = C_2l^2 / 2 + 1/4 sum_{n>=1} C_n (2 C_n - C_{2l+n} - C_{2l-n})
//!                        - 2 C_0^(2) + C_2l^(2)
//!                        + sum_{n>=0, n!=l} (C_{n+l} - C_|n-l|)^2 d_n / 2
//! ```
//!
//! Unmarked coefficients are first order. For `l > 0` the boundary must be
//! free of sine terms at first order.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::boundary::{self, BoundaryError, FourierBoundary, ShapeFamily};
use crate::quad;
use crate::specfun::{self, SpecFunError};

/// Largest `|S_n^1|` tolerated for `l > 0` modes.
pub const SINE_TOLERANCE: f64 = 1e-12;

/// `|J_n(rho) / J_n'(rho)|` below this marks a resonant denominator.
pub const RESONANCE_TOLERANCE: f64 = 1e-10;

const RESIDUAL_NODES: usize = 512;

#[derive(Debug, Error)]
pub enum PerturbError {
    #[error("invalid mode: {0}")]
    InvalidMode(String),
    #[error(
        "mode with l = {l} needs a sine-free first-order boundary; max |S_n^1| = {max_sine:e}"
    )]
    UnsupportedBoundary { l: u32, max_sine: f64 },
    #[error("resonant denominator: J_{n}(rho) / J_{n}'(rho) = {ratio:e} at rho = {rho}")]
    Resonance { n: usize, rho: f64, ratio: f64 },
    #[error("boundary table holds {have} order(s) in lambda; {need} needed")]
    MissingOrder { need: usize, have: usize },
    #[error("residual order {order} is not available for l = {l}")]
    ResidualOrder { order: usize, l: u32 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
}

pub type Result<T> = std::result::Result<T, PerturbError>;

/// Angular dependence of a circle eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Cos,
    Sin,
}

impl Parity {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Parity::Cos => x.cos(),
            Parity::Sin => x.sin(),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Cos => "Cos",
            Parity::Sin => "Sin",
        })
    }
}

impl FromStr for Parity {
    type Err = PerturbError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cos" | "c" => Ok(Parity::Cos),
            "sin" | "s" => Ok(Parity::Sin),
            other => Err(PerturbError::InvalidMode(format!(
                "unknown parity `{other}`"
            ))),
        }
    }
}

/// Circle eigenstate `(l, j, parity)`. Ordered by `l`, then `j`, then parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    l: u32,
    j: u32,
    parity: Parity,
}

impl Mode {
    pub fn new(l: u32, j: u32, parity: Parity) -> Result<Self> {
        if j == 0 {
            return Err(PerturbError::InvalidMode(
                "radial index j starts at 1".into(),
            ));
        }
        if l == 0 && parity == Parity::Sin {
            return Err(PerturbError::InvalidMode(
                "l = 0 has no sine variety".into(),
            ));
        }
        if l > specfun::MAX_ORDER || j > specfun::MAX_ZERO_INDEX {
            return Err(PerturbError::InvalidMode(format!(
                "({l}, {j}) exceeds the zero table ({}, {})",
                specfun::MAX_ORDER,
                specfun::MAX_ZERO_INDEX
            )));
        }
        Ok(Self { l, j, parity })
    }

    pub fn cos(l: u32, j: u32) -> Self {
        Self::new(l, j, Parity::Cos).expect("valid cos mode")
    }

    pub fn sin(l: u32, j: u32) -> Self {
        Self::new(l, j, Parity::Sin).expect("valid sin mode")
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn rho(&self) -> Result<f64> {
        Ok(specfun::bessel_zero(self.l, self.j)?)
    }

    /// The other parity at the same `(l, j)`, or `None` for `l = 0`.
    pub fn partner(&self) -> Option<Mode> {
        let parity = match (self.l, self.parity) {
            (0, _) => return None,
            (_, Parity::Cos) => Parity::Sin,
            (_, Parity::Sin) => Parity::Cos,
        };
        Some(Mode { parity, ..*self })
    }

    /// The five lowest circle levels.
    pub fn first5() -> Vec<Mode> {
        vec![
            Mode::cos(0, 1),
            Mode::cos(1, 1),
            Mode::sin(1, 1),
            Mode::cos(2, 1),
            Mode::sin(2, 1),
        ]
    }

    /// Every mode with `E0 < e_max`, sorted by energy (cos before sin).
    pub fn below(e_max: f64) -> Result<Vec<Mode>> {
        let mut out = Vec::new();
        for l in 0..=specfun::MAX_ORDER {
            for j in 1..=specfun::MAX_ZERO_INDEX {
                let rho = specfun::bessel_zero(l, j)?;
                if rho * rho >= e_max {
                    break;
                }
                out.push((rho, Mode::cos(l, j)));
                if l > 0 {
                    out.push((rho, Mode::sin(l, j)));
                }
            }
            if specfun::bessel_zero(l, 1)?.powi(2) >= e_max {
                break;
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(out.into_iter().map(|(_, m)| m).collect())
    }

    /// Parses a `;`-separated list of `l,j,parity` triples, or `first5`.
    pub fn parse_list(s: &str) -> Result<Vec<Mode>> {
        if s.trim() == "first5" {
            return Ok(Mode::first5());
        }
        s.split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.l, self.j, self.parity)
    }
}

impl FromStr for Mode {
    type Err = PerturbError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || PerturbError::InvalidMode(format!("expected `l,j,Cos|Sin`, found `{s}`"));
        match parts.as_slice() {
            [l, j] | [l, j, ""] => Mode::new(
                l.parse().map_err(|_| bad())?,
                j.parse().map_err(|_| bad())?,
                Parity::Cos,
            ),
            [l, j, p] => Mode::new(
                l.parse().map_err(|_| bad())?,
                j.parse().map_err(|_| bad())?,
                p.parse()?,
            ),
            _ => Err(bad()),
        }
    }
}

/// `E0 + lambda E1 + lambda^2 E2` for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyExpansion {
    pub mode: Mode,
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
}

impl EnergyExpansion {
    pub fn eval(&self, lambda: f64) -> f64 {
        self.e0 + lambda * self.e1 + lambda * lambda * self.e2
    }
}

/// `rho J_n'(rho) / J_n(rho)` for `n = 0..count`, from the downward ratio
/// recurrence so that tiny `J_n` never underflow.
pub fn log_derivatives(rho: f64, count: usize) -> Vec<f64> {
    let start = count + 40 + rho.ceil() as usize;
    // ratio[n] = J_{n+1}(rho) / J_n(rho)
    let mut ratio = vec![0.0; count];
    let mut r = 0.0;
    for n in (1..=start).rev() {
        r = 1.0 / (2.0 * n as f64 / rho - r);
        if n - 1 < count {
            ratio[n - 1] = r;
        }
    }
    ratio
        .iter()
        .enumerate()
        .map(|(n, r)| n as f64 - rho * r)
        .collect()
}

fn check_resonance(n: usize, rho: f64, d: f64) -> Result<()> {
    let ratio = rho / d;
    if ratio.abs() < RESONANCE_TOLERANCE || ratio.is_nan() {
        return Err(PerturbError::Resonance { n, rho, ratio });
    }
    Ok(())
}

fn require_supported(mode: Mode, fb: &FourierBoundary) -> Result<()> {
    if mode.l > 0 && !fb.sine_free(1, SINE_TOLERANCE) {
        let max_sine = (1..=fb.n_max() as i64).fold(0.0f64, |m, n| m.max(fb.s(1, n).abs()));
        return Err(PerturbError::UnsupportedBoundary {
            l: mode.l,
            max_sine,
        });
    }
    Ok(())
}

pub fn e0(mode: Mode) -> Result<f64> {
    Ok(mode.rho()?.powi(2))
}

pub fn e1(mode: Mode, fb: &FourierBoundary) -> Result<f64> {
    require_supported(mode, fb)?;
    if mode.l == 0 {
        return Ok(0.0);
    }
    let e0 = e0(mode)?;
    let c = fb.c(1, 2 * mode.l as i64);
    Ok(match mode.parity {
        Parity::Cos => -c * e0,
        Parity::Sin => c * e0,
    })
}

pub fn e2(mode: Mode, fb: &FourierBoundary) -> Result<f64> {
    require_supported(mode, fb)?;
    if fb.max_order() < 2 {
        return Err(PerturbError::MissingOrder {
            need: 2,
            have: fb.max_order(),
        });
    }
    let rho = mode.rho()?;
    let e0 = rho * rho;
    let n_max = fb.n_max();
    let c1 = |n: i64| fb.c(1, n);

    if mode.l == 0 {
        let d = log_derivatives(rho, n_max + 1);
        let mut sum = 0.0;
        for p in 1..=n_max {
            let w = c1(p as i64).powi(2) + fb.s(1, p as i64).powi(2);
            if w != 0.0 {
                check_resonance(p, rho, d[p])?;
                sum += w * (d[p] + 0.5);
            }
        }
        return Ok(e0 * (sum - 2.0 * fb.c(2, 0)));
    }

    let l = mode.l as i64;
    let top = n_max + mode.l as usize;
    let d = log_derivatives(rho, top + 1);
    let sign = match mode.parity {
        Parity::Cos => 1.0,
        Parity::Sin => -1.0,
    };
    let mut total = 0.5 * c1(2 * l).powi(2) - 2.0 * fb.c(2, 0) - sign * fb.c(2, 2 * l);
    for n in 1..=n_max as i64 {
        total += 0.25 * c1(n) * (2.0 * c1(n) + sign * (c1(2 * l + n) + c1(2 * l - n)));
    }
    for n in 0..=top as i64 {
        if n == l {
            continue;
        }
        let w = if n == 0 {
            match mode.parity {
                Parity::Cos => c1(l).powi(2),
                Parity::Sin => 0.0,
            }
        } else {
            0.5 * (c1(n + l) + sign * c1((n - l).abs())).powi(2)
        };
        if w != 0.0 {
            check_resonance(n as usize, rho, d[n as usize])?;
            total += w * d[n as usize];
        }
    }
    Ok(e0 * total)
}

pub fn expand(mode: Mode, fb: &FourierBoundary) -> Result<EnergyExpansion> {
    Ok(EnergyExpansion {
        mode,
        e0: e0(mode)?,
        e1: e1(mode, fb)?,
        e2: e2(mode, fb)?,
    })
}

/// Unit-norm constant of `J_l(rho r) cos(l theta)` on the unit disk.
pub fn normalization(mode: Mode) -> Result<f64> {
    let rho = mode.rho()?;
    let jl1 = specfun::bessel_j(mode.l + 1, rho)?.abs();
    Ok(if mode.l == 0 {
        1.0 / (PI.sqrt() * jl1)
    } else {
        (2.0 / PI).sqrt() / jl1
    })
}

/// Coefficients of the wavefunction corrections
///
/// ```text
/// psi1 = sum_p (a_p cos p theta + abar_p sin p theta) J_p(rho r)
///        + particular * (rho r) J_{l+1}(rho r) ang(l theta)
/// psi2 = sum_k (b_k cos k theta + bbar_k sin k theta) J_k(rho r)
///        + particular2 * (rho r) J_1(rho r)                (l = 0 only)
/// ```
///
/// with `particular = -N E1 / (2 E0)`, `particular2 = -N E2 / (2 E0)`, and the
/// `p = l` coefficients chosen so that each correction is orthogonal to
/// `psi0` on the unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionExpansion {
    pub mode: Mode,
    pub rho: f64,
    pub norm: f64,
    pub energy: EnergyExpansion,
    pub a: Vec<f64>,
    pub a_bar: Vec<f64>,
    pub particular: f64,
    pub b: Option<Vec<f64>>,
    pub b_bar: Option<Vec<f64>>,
    pub particular2: f64,
}

/// `g` with `<J_l ang, g J_l ang + c (rho r) J_{l+1} ang> = 0`.
fn orthogonal_gauge(l: u32, rho: f64, c: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let l = l as usize;
    let cross = quad::integrate(
        &|r: f64| r * r * specfun::jn(l, rho * r) * specfun::jn(l + 1, rho * r),
        0.0,
        1.0,
        1e-15,
        1e-13,
    );
    let diag = 0.5 * specfun::jn(l + 1, rho).powi(2);
    -c * rho * cross / diag
}

/// Trigonometric polynomial `sum c_k cos k theta + s_k sin k theta`.
#[derive(Debug, Clone)]
struct Trig {
    c: Vec<f64>,
    s: Vec<f64>,
}

impl Trig {
    fn zeros(len: usize) -> Self {
        Self {
            c: vec![0.0; len],
            s: vec![0.0; len],
        }
    }

    fn order(fb: &FourierBoundary, sigma: usize, len: usize) -> Self {
        let mut t = Self::zeros(len);
        for n in 0..len {
            t.c[n] = fb.c(sigma, n as i64);
            t.s[n] = fb.s(sigma, n as i64);
        }
        t
    }

    fn add_cos(&mut self, k: i64, v: f64) {
        if let Some(slot) = self.c.get_mut(k.unsigned_abs() as usize) {
            *slot += v;
        }
    }

    fn add_sin(&mut self, k: i64, v: f64) {
        if k == 0 {
            return;
        }
        if let Some(slot) = self.s.get_mut(k.unsigned_abs() as usize) {
            *slot += k.signum() as f64 * v;
        }
    }

    fn mul(&self, other: &Trig) -> Trig {
        let mut out = Trig::zeros(self.c.len());
        for (p, (&cp, &sp)) in self.c.iter().zip(&self.s).enumerate() {
            for (q, (&cq, &sq)) in other.c.iter().zip(&other.s).enumerate() {
                let (p, q) = (p as i64, q as i64);
                out.add_cos(p + q, 0.5 * (cp * cq - sp * sq));
                out.add_cos(p - q, 0.5 * (cp * cq + sp * sq));
                out.add_sin(p + q, 0.5 * (cp * sq + sp * cq));
                out.add_sin(p - q, 0.5 * (sp * cq - cp * sq));
            }
        }
        out
    }

    fn scale(mut self, f: f64) -> Trig {
        self.c
            .iter_mut()
            .chain(self.s.iter_mut())
            .for_each(|v| *v *= f);
        self
    }

    fn plus(mut self, other: &Trig) -> Trig {
        for (a, b) in self.c.iter_mut().zip(&other.c) {
            *a += b;
        }
        for (a, b) in self.s.iter_mut().zip(&other.s) {
            *a += b;
        }
        self
    }
}

pub fn psi1_coeffs(mode: Mode, fb: &FourierBoundary) -> Result<WavefunctionExpansion> {
    let energy = expand(mode, fb)?;
    let rho = mode.rho()?;
    let norm = normalization(mode)?;
    let l = mode.l as usize;
    let len = fb.n_max() + l + 1;
    let d = log_derivatives(rho, len);
    let jl_prime = specfun::jn_prime(l, rho);
    let mut a = vec![0.0; len];
    let mut a_bar = vec![0.0; len];
    let c1 = |n: usize| fb.c(1, n as i64);

    for p in 0..len {
        if p == l {
            continue;
        }
        let (wc, ws) = if l == 0 {
            (
                -rho * norm * jl_prime * c1(p),
                -rho * norm * jl_prime * fb.s(1, p as i64),
            )
        } else {
            let half = 0.5 * rho * norm * jl_prime;
            let sum = c1(p + l) + c1(p.abs_diff(l));
            let diff = c1(p + l) - c1(p.abs_diff(l));
            match (mode.parity, p) {
                (Parity::Cos, 0) => (-half * c1(l), 0.0),
                (Parity::Cos, _) => (-half * sum, 0.0),
                (Parity::Sin, 0) => (0.0, 0.0),
                (Parity::Sin, _) => (0.0, half * diff),
            }
        };
        if wc != 0.0 || ws != 0.0 {
            check_resonance(p, rho, d[p])?;
            let jp = specfun::jn(p, rho);
            a[p] = wc / jp;
            a_bar[p] = ws / jp;
        }
    }

    let particular = -norm * energy.e1 / (2.0 * energy.e0);
    let gauge = orthogonal_gauge(mode.l, rho, particular);
    match mode.parity {
        Parity::Cos => a[l] = gauge,
        Parity::Sin => a_bar[l] = gauge,
    }

    let mut wf = WavefunctionExpansion {
        mode,
        rho,
        norm,
        energy,
        a,
        a_bar,
        particular,
        b: None,
        b_bar: None,
        particular2: 0.0,
    };
    if l == 0 {
        second_order_l0(&mut wf, fb)?;
    }
    Ok(wf)
}

/// Fills `b`, `bbar` for `l = 0` by matching the `lambda^2` boundary terms
/// `psi0'' f1^2 / 2 + psi0' f2 + psi1' f1 + psi2 = 0` at `r = 1`.
fn second_order_l0(wf: &mut WavefunctionExpansion, fb: &FourierBoundary) -> Result<()> {
    let rho = wf.rho;
    let n = wf.norm;
    let len = fb.n_max() + 1;
    let f1 = Trig::order(fb, 1, len);
    let f2 = Trig::order(fb, 2, len);
    let mut dpsi1 = Trig::zeros(len);
    for p in 0..len {
        let jp = rho * specfun::jn_prime(p, rho);
        dpsi1.c[p] = wf.a[p] * jp;
        dpsi1.s[p] = wf.a_bar[p] * jp;
    }
    let forcing = f1
        .mul(&f1)
        .scale(0.5 * n * rho * rho * specfun::jn_second(0, rho))
        .plus(&f2.clone().scale(n * rho * specfun::jn_prime(0, rho)))
        .plus(&dpsi1.mul(&f1));

    let d = log_derivatives(rho, len);
    let mut b = vec![0.0; len];
    let mut b_bar = vec![0.0; len];
    for k in 1..len {
        if forcing.c[k] != 0.0 || forcing.s[k] != 0.0 {
            check_resonance(k, rho, d[k])?;
            let jk = specfun::jn(k, rho);
            b[k] = -forcing.c[k] / jk;
            b_bar[k] = -forcing.s[k] / jk;
        }
    }
    wf.particular2 = -n * wf.energy.e2 / (2.0 * wf.energy.e0);
    b[0] = orthogonal_gauge(0, rho, wf.particular2);
    wf.b = Some(b);
    wf.b_bar = Some(b_bar);
    Ok(())
}

impl WavefunctionExpansion {
    /// `psi0 + lambda psi1 (+ lambda^2 psi2)` at polar point `(r, theta)` of
    /// the unit-radius frame. Order 2 is only available for `l = 0`.
    pub fn eval(&self, order: usize, lambda: f64, r: f64, theta: f64) -> Result<f64> {
        let l = self.mode.l;
        if order > 2 || (order == 2 && self.b.is_none()) {
            return Err(PerturbError::ResidualOrder { order, l });
        }
        let len = self.a.len().max(l as usize + 2);
        let x = self.rho * r;
        let mut j = vec![0.0; len];
        specfun::bessel_j_orders_into(x, &mut j);
        let ang = self.mode.parity.eval(l as f64 * theta);
        let mut psi = self.norm * j[l as usize] * ang;
        if order >= 1 {
            let mut psi1 = self.particular * x * j[l as usize + 1] * ang;
            for (p, (a, ab)) in self.a.iter().zip(&self.a_bar).enumerate() {
                let (s, c) = (p as f64 * theta).sin_cos();
                psi1 += (a * c + ab * s) * j[p];
            }
            psi += lambda * psi1;
        }
        if order == 2 {
            let (b, bb) = (self.b.as_ref().unwrap(), self.b_bar.as_ref().unwrap());
            let mut psi2 = self.particular2 * x * j[1];
            for (k, (b, bb)) in b.iter().zip(bb).enumerate() {
                let (s, c) = (k as f64 * theta).sin_cos();
                psi2 += (b * c + bb * s) * j[k];
            }
            psi += lambda * lambda * psi2;
        }
        Ok(psi)
    }
}

/// A family together with its cached Fourier table.
#[derive(Debug, Clone)]
pub struct Perturber {
    family: ShapeFamily,
    fb: FourierBoundary,
}

impl Perturber {
    pub fn new(family: ShapeFamily) -> Result<Self> {
        let fb = boundary::fourier_expand(&family, 2, boundary::DEFAULT_N_MAX)?;
        Ok(Self { family, fb })
    }

    pub fn with_table(family: ShapeFamily, fb: FourierBoundary) -> Self {
        Self { family, fb }
    }

    pub fn family(&self) -> &ShapeFamily {
        &self.family
    }

    pub fn table(&self) -> &FourierBoundary {
        &self.fb
    }

    pub fn expansion(&self, mode: Mode) -> Result<EnergyExpansion> {
        expand(mode, &self.fb)
    }

    /// Perturbative energy at `lambda`, rescaled by the equal-area radius at
    /// that `lambda` (a no-op for the built-in families).
    pub fn energy(&self, mode: Mode, lambda: f64) -> Result<f64> {
        let r0 = boundary::equivalent_radius(&self.family, lambda)?;
        Ok(self.expansion(mode)?.eval(lambda) / (r0 * r0))
    }

    pub fn wavefunction(&self, mode: Mode) -> Result<WavefunctionExpansion> {
        psi1_coeffs(mode, &self.fb)
    }

    /// `max_theta |psi_order(r(theta, lambda) / R0, theta)|`.
    pub fn residual(&self, mode: Mode, lambda: f64, order: usize) -> Result<f64> {
        let wf = self.wavefunction(mode)?;
        self.residual_of(&wf, lambda, order)
    }

    pub fn residual_of(
        &self,
        wf: &WavefunctionExpansion,
        lambda: f64,
        order: usize,
    ) -> Result<f64> {
        let curve = self.family.at(lambda)?;
        let r0 = curve.equivalent_radius();
        let mut worst = 0.0f64;
        for theta in quad::periodic_nodes(RESIDUAL_NODES) {
            let v = wf.eval(order, lambda, curve.radius(theta) / r0, theta)?;
            worst = worst.max(v.abs());
        }
        Ok(worst)
    }
}

/// One-shot energy; prefer [`Perturber`] when evaluating many points.
pub fn energy(mode: Mode, family: &ShapeFamily, lambda: f64) -> Result<f64> {
    Perturber::new(family.clone())?.energy(mode, lambda)
}

/// One-shot boundary residual of the truncated wavefunction.
pub fn boundary_residual(
    mode: Mode,
    family: &ShapeFamily,
    lambda: f64,
    order: usize,
) -> Result<f64> {
    Perturber::new(family.clone())?.residual(mode, lambda, order)
}
