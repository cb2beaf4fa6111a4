//! Numerical Dirichlet eigenvalues of star-shaped domains by the method of
//! particular solutions.
//!
//! For a trial wavenumber `k` the basis `J_m(k r) {cos, sin}(m theta)` is
//! sampled at boundary nodes and at interior points. After normalizing the
//! stacked columns and orthogonalizing them (QR), the smallest singular value
//! of the boundary block measures how close the span comes to a function that
//! vanishes on the boundary without vanishing inside. It dips to zero at
//! eigenvalues; the dips are bracketed on a uniform `k` sweep and refined by
//! golden-section search.
//!
//! Symmetry sectors restrict the basis to one parity class under the two
//! mirror reflections, which also lets the collocation use a quarter of the
//! boundary.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

use crate::boundary::Boundary;
use crate::perturb::{Mode, Parity};
use crate::specfun::{self, SpecFunError};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("invalid oracle configuration: {0}")]
    Config(String),
    #[error("sector {sector} needs a boundary symmetric under both mirrors")]
    SectorSymmetry { sector: Sector },
    #[error("k window too coarse: {0}")]
    WindowTooCoarse(String),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Parity class of the trial basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sector {
    /// `cos m theta`, `m` even
    CosEven,
    /// `cos m theta`, `m` odd
    CosOdd,
    /// `sin m theta`, `m` even
    SinEven,
    /// `sin m theta`, `m` odd
    SinOdd,
    /// every term
    Full,
}

impl Sector {
    pub const MIRRORED: [Sector; 4] = [
        Sector::CosEven,
        Sector::CosOdd,
        Sector::SinEven,
        Sector::SinOdd,
    ];

    /// The mirror sector holding circle mode `mode`.
    pub fn of(mode: Mode) -> Sector {
        match (mode.parity(), mode.l().is_multiple_of(2)) {
            (Parity::Cos, true) => Sector::CosEven,
            (Parity::Cos, false) => Sector::CosOdd,
            (Parity::Sin, true) => Sector::SinEven,
            (Parity::Sin, false) => Sector::SinOdd,
        }
    }

    pub fn admits(self, mode: Mode) -> bool {
        self == Sector::Full || Sector::of(mode) == self
    }

    /// `(m, parity)` pairs of the trial basis up to angular order `max_order`.
    pub fn basis(self, max_order: u32) -> Vec<(u32, Parity)> {
        let cos_from = |start: u32| {
            (start..=max_order)
                .step_by(2)
                .map(|m| (m, Parity::Cos))
                .collect()
        };
        let sin_from = |start: u32| {
            (start..=max_order)
                .step_by(2)
                .map(|m| (m, Parity::Sin))
                .collect()
        };
        match self {
            Sector::CosEven => cos_from(0),
            Sector::CosOdd => cos_from(1),
            Sector::SinEven => sin_from(2),
            Sector::SinOdd => sin_from(1),
            Sector::Full => (0..=max_order)
                .map(|m| (m, Parity::Cos))
                .chain((1..=max_order).map(|m| (m, Parity::Sin)))
                .collect(),
        }
    }

    /// Fraction of the circle on which collocation is needed.
    fn arc(self) -> f64 {
        match self {
            Sector::Full => 2.0 * PI,
            _ => 0.5 * PI,
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::CosEven => "CosEven",
            Sector::CosOdd => "CosOdd",
            Sector::SinEven => "SinEven",
            Sector::SinOdd => "SinOdd",
            Sector::Full => "Full",
        })
    }
}

impl FromStr for Sector {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "coseven" => Ok(Sector::CosEven),
            "cosodd" => Ok(Sector::CosOdd),
            "sineven" => Ok(Sector::SinEven),
            "sinodd" => Ok(Sector::SinOdd),
            "full" => Ok(Sector::Full),
            other => Err(OracleError::Config(format!("unknown sector `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Highest angular order `M` in the trial basis.
    pub basis_order: u32,
    /// Collocation nodes on the full boundary; sectors use a quarter of them.
    pub boundary_nodes: usize,
    pub k_window: (f64, f64),
    pub sweep_step: f64,
    /// Width in `k` at which golden-section refinement stops.
    pub refine_tol: f64,
    pub sector: Sector,
    /// Dips whose singular value stays above this are discarded as spurious.
    pub accept_quality: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            basis_order: 30,
            boundary_nodes: 256,
            k_window: (1.0, 6.0),
            sweep_step: 0.005,
            refine_tol: 1e-10,
            sector: Sector::Full,
            accept_quality: 1e-2,
        }
    }
}

impl OracleConfig {
    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.k_window = (lo, hi);
        self
    }

    pub fn with_sector(mut self, sector: Sector) -> Self {
        self.sector = sector;
        self
    }

    fn collocation_nodes(&self) -> usize {
        match self.sector {
            Sector::Full => self.boundary_nodes,
            _ => self.boundary_nodes / 4,
        }
    }

    /// Checks the sizes and that circle levels of the sector in the window
    /// are resolved by the sweep.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.k_window;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(OracleError::Config(format!(
                "k window [{lo}, {hi}] must be positive and ordered"
            )));
        }
        if !(self.sweep_step > 0.0 && self.refine_tol > 0.0 && self.refine_tol < self.sweep_step) {
            return Err(OracleError::Config(format!(
                "need 0 < refine_tol ({}) < sweep_step ({})",
                self.refine_tol, self.sweep_step
            )));
        }
        if self.basis_order == 0 || self.basis_order > specfun::MAX_ORDER {
            return Err(OracleError::Config(format!(
                "basis order {} must lie in 1..={}",
                self.basis_order,
                specfun::MAX_ORDER
            )));
        }
        let nbasis = self.sector.basis(self.basis_order).len();
        if self.collocation_nodes() < 2 * nbasis {
            return Err(OracleError::Config(format!(
                "{} collocation nodes for {nbasis} basis functions; at least twice as many needed",
                self.collocation_nodes()
            )));
        }
        let mut rhos: Vec<f64> = Vec::new();
        for l in 0..=self.basis_order {
            for j in 1..=specfun::MAX_ZERO_INDEX {
                let rho = specfun::bessel_zero(l, j)?;
                if rho > hi {
                    break;
                }
                let admitted = [Parity::Cos, Parity::Sin]
                    .into_iter()
                    .filter_map(|p| Mode::new(l, j, p).ok())
                    .any(|m| self.sector.admits(m));
                if rho >= lo && admitted {
                    rhos.push(rho);
                }
            }
        }
        rhos.sort_by(f64::total_cmp);
        rhos.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        if let Some(w) = rhos
            .windows(2)
            .find(|w| w[1] - w[0] <= 2.0 * self.sweep_step)
        {
            return Err(OracleError::WindowTooCoarse(format!(
                "circle levels at k = {} and {} are within two sweep steps",
                w[0], w[1]
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericLevel {
    pub k: f64,
    pub energy: f64,
    pub sector: Sector,
    pub matched_mode: Option<Mode>,
    /// Smallest singular value at the refined `k`.
    pub quality: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleResult {
    pub levels: Vec<NumericLevel>,
    pub warnings: Vec<String>,
}

/// Collocation geometry for one boundary and sector.
struct Collocation {
    basis: Vec<(u32, Parity)>,
    boundary: Vec<(f64, f64)>,
    interior: Vec<(f64, f64)>,
    max_order: usize,
}

impl Collocation {
    fn new(curve: &Boundary, config: &OracleConfig) -> Self {
        let basis = config.sector.basis(config.basis_order);
        let arc = config.sector.arc();
        let nb = config.collocation_nodes();
        let boundary = (0..nb)
            .map(|j| {
                let t = (j as f64 + 0.5) * arc / nb as f64;
                (curve.radius(t), t)
            })
            .collect();
        // golden-ratio and sqrt(2) sequences give a deterministic scatter
        let ni = 2 * basis.len() + 20;
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let interior = (1..=ni)
            .map(|i| {
                let t = arc * ((i as f64 * phi + 0.123).fract());
                let u = (i as f64 * 2f64.sqrt()).fract();
                let s = (0.05 + 0.75 * u).sqrt();
                (s * curve.radius(t), t)
            })
            .collect();
        Self {
            max_order: config.basis_order as usize,
            basis,
            boundary,
            interior,
        }
    }

    fn fill_row(&self, k: f64, (r, t): (f64, f64), jbuf: &mut [f64], row: &mut [f64]) {
        specfun::bessel_j_orders_into(k * r, jbuf);
        for (slot, &(m, parity)) in row.iter_mut().zip(&self.basis) {
            *slot = jbuf[m as usize] * parity.eval(m as f64 * t);
        }
    }

    /// Two smallest singular values of the boundary block and the spread of
    /// the raw column norms.
    fn singular_values(&self, k: f64) -> (f64, f64, f64) {
        let nb = self.boundary.len();
        let rows = nb + self.interior.len();
        let cols = self.basis.len();
        let mut a = DMatrix::<f64>::zeros(rows, cols);
        let mut jbuf = vec![0.0; self.max_order + 1];
        let mut row = vec![0.0; cols];
        for (i, &pt) in self.boundary.iter().chain(&self.interior).enumerate() {
            self.fill_row(k, pt, &mut jbuf, &mut row);
            for (c, v) in row.iter().enumerate() {
                a[(i, c)] = *v;
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for mut col in a.column_iter_mut() {
            let n = col.norm();
            lo = lo.min(n);
            hi = hi.max(n);
            if n > 0.0 {
                col /= n;
            }
        }
        let q = a.qr().q();
        let qb = q.rows(0, nb).into_owned();
        let mut sv: Vec<f64> = qb.singular_values().iter().copied().collect();
        sv.sort_by(f64::total_cmp);
        let spread = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        (sv[0], sv.get(1).copied().unwrap_or(f64::INFINITY), spread)
    }
}

/// Smallest singular value of the normalized collocation system at `k`.
pub fn sigma_min(curve: &Boundary, config: &OracleConfig, k: f64) -> f64 {
    Collocation::new(curve, config).singular_values(k).0
}

fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Dirichlet levels of `curve` with `k` in the configured window, sorted by
/// `k`. A dip whose second singular value is also small is reported twice.
pub fn dirichlet_eigs(curve: &Boundary, config: &OracleConfig) -> Result<OracleResult> {
    config.validate()?;
    let sym = curve.symmetry();
    if config.sector != Sector::Full && !(sym.x_mirror && sym.y_mirror) {
        return Err(OracleError::SectorSymmetry {
            sector: config.sector,
        });
    }
    let col = Collocation::new(curve, config);
    let (lo, hi) = config.k_window;
    let steps = ((hi - lo) / config.sweep_step).ceil() as usize;
    let ks: Vec<f64> = (0..=steps)
        .map(|i| lo + i as f64 * config.sweep_step)
        .collect();
    let sweep: Vec<(f64, f64, f64)> = ks.par_iter().map(|&k| col.singular_values(k)).collect();

    let mut warnings = Vec::new();
    let spread = sweep.iter().fold(0.0f64, |m, s| m.max(s.2));
    if spread > 1e12 {
        warnings.push(format!(
            "{}: basis column norms vary by up to {spread:.1e} across the sweep",
            config.sector
        ));
    }

    let brackets: Vec<usize> = (1..ks.len() - 1)
        .filter(|&i| sweep[i].0 < sweep[i - 1].0 && sweep[i].0 <= sweep[i + 1].0)
        .collect();
    let refined: Vec<(f64, f64, f64)> = brackets
        .par_iter()
        .map(|&i| {
            let (k, q) = golden(
                |k| col.singular_values(k).0,
                ks[i - 1],
                ks[i + 1],
                config.refine_tol,
            );
            (k, q, col.singular_values(k).1)
        })
        .collect();

    let mut levels = Vec::new();
    let mut last_k: Option<f64> = None;
    for (k, quality, second) in refined {
        if quality > config.accept_quality {
            continue;
        }
        if let Some(prev) = last_k {
            if k - prev < 2.0 * config.sweep_step {
                return Err(OracleError::WindowTooCoarse(format!(
                    "{}: levels at k = {prev} and {k} are closer than two sweep steps",
                    config.sector
                )));
            }
        }
        last_k = Some(k);
        if quality > 1e3 * config.refine_tol {
            warnings.push(format!(
                "{}: level at k = {k:.9} resolved only to singular value {quality:.1e}",
                config.sector
            ));
        }
        let level = NumericLevel {
            k,
            energy: k * k,
            sector: config.sector,
            matched_mode: None,
            quality,
        };
        if second < DOUBLE_ROOT {
            levels.push(level.clone());
        }
        levels.push(level);
    }
    Ok(OracleResult { levels, warnings })
}

/// A dip whose second singular value is below this holds two levels.
const DOUBLE_ROOT: f64 = 1e-6;

/// Runs every mirror sector (or only `Full` for asymmetric boundaries) and
/// merges the levels in order of `k`.
pub fn all_sectors(curve: &Boundary, config: &OracleConfig) -> Result<OracleResult> {
    let sym = curve.symmetry();
    let sectors: Vec<Sector> = if sym.x_mirror && sym.y_mirror {
        Sector::MIRRORED.to_vec()
    } else {
        vec![Sector::Full]
    };
    let mut out = OracleResult::default();
    for sector in sectors {
        let r = dirichlet_eigs(curve, &config.clone().with_sector(sector))?;
        out.levels.extend(r.levels);
        out.warnings.extend(r.warnings);
    }
    out.levels
        .sort_by(|a, b| a.k.total_cmp(&b.k).then(a.sector.cmp(&b.sector)));
    Ok(out)
}

/// Outcome of matching one level against reference energies.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub mode: Option<Mode>,
    pub ambiguous: bool,
}

/// Assigns the admissible reference mode nearest in energy; ties go to the
/// lower `l`. The match is ambiguous when the runner-up is within
/// `2 * refine_tol` of the best distance.
pub fn classify_mode(
    level: &NumericLevel,
    references: &[(Mode, f64)],
    refine_tol: f64,
) -> Classification {
    let mut candidates: Vec<(f64, Mode)> = references
        .iter()
        .filter(|(m, _)| level.sector.admits(*m))
        .map(|&(m, e)| ((level.energy - e).abs(), m))
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    match candidates.as_slice() {
        [] => Classification {
            mode: None,
            ambiguous: false,
        },
        [(_, m)] => Classification {
            mode: Some(*m),
            ambiguous: false,
        },
        [(d0, m), (d1, _), ..] => Classification {
            mode: Some(*m),
            ambiguous: d1 - d0 <= 2.0 * refine_tol,
        },
    }
}
