//! Deformation sweeps: perturbative and numerical energies side by side,
//! level crossing and veering detection, and the CSV outputs.

pub mod cli;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::boundary::{self, BoundaryError, ShapeFamily};
use crate::fmt::sig15;
use crate::oracle::{self, OracleConfig, OracleError, Sector};
use crate::perturb::{EnergyExpansion, Mode, PerturbError, Perturber};

/// Exact header of the scan CSV.
pub const CSV_HEADER: &str = "family,lambda,l,j,parity,E0,E1,E2,E_pert,E_num,rel_err,flags";

/// Exact header of the events file.
pub const EVENTS_HEADER: &str = "kind,mode_a,mode_b,lambda_at,min_gap,source";

/// Default veering floor, in units of `refine_tol * E0`.
pub const DEFAULT_GAP_FACTOR: f64 = 10.0;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{0}")]
    Usage(String),
    #[error("need at least 3 grid points for event detection, found {0}")]
    InsufficientGrid(usize),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Perturb(#[from] PerturbError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, ReportError>;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub lambda: f64,
    pub expansion: EnergyExpansion,
    pub e_pert: f64,
    pub e_num: Option<f64>,
    pub rel_err: Option<f64>,
    pub flags: Vec<String>,
}

impl ScanRow {
    pub fn mode(&self) -> Mode {
        self.expansion.mode
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumScan {
    pub family: String,
    pub grid: Vec<f64>,
    pub modes: Vec<Mode>,
    /// Sorted by `(lambda, mode)`, one row per pair.
    pub rows: Vec<ScanRow>,
    pub warnings: Vec<String>,
    /// Refinement tolerance of the oracle pass, used for the veering floor.
    pub refine_tol: f64,
}

impl SpectrumScan {
    pub fn row(&self, lambda_index: usize, mode: Mode) -> Option<&ScanRow> {
        let m = self.modes.binary_search(&mode).ok()?;
        self.rows.get(lambda_index * self.modes.len() + m)
    }

    fn branch(&self, mode: Mode, source: Source) -> Option<Vec<f64>> {
        (0..self.grid.len())
            .map(|i| {
                let row = self.row(i, mode)?;
                match source {
                    Source::Perturbative => Some(row.e_pert),
                    Source::Oracle => row.e_num,
                }
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        out.write_record(CSV_HEADER.split(','))?;
        for row in &self.rows {
            let m = row.mode();
            let e = &row.expansion;
            out.write_record([
                self.family.clone(),
                sig15(row.lambda),
                m.l().to_string(),
                m.j().to_string(),
                m.parity().to_string(),
                sig15(e.e0),
                sig15(e.e1),
                sig15(e.e2),
                sig15(row.e_pert),
                row.e_num.map(sig15).unwrap_or_default(),
                row.rel_err.map(sig15).unwrap_or_default(),
                row.flags.join(";"),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Parses `a:b:n` into `n` evenly spaced values from `a` to `b`.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let bad = || ReportError::Usage(format!("expected `a:b:n` for a lambda range, found `{s}`"));
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.parse().map_err(|_| bad())?;
    let b: f64 = b.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok(linspace(a, b, n))
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let d = (n - 1) as f64;
    (0..n)
        .map(|i| (a * (d - i as f64) + b * i as f64) / d)
        .collect()
}

/// Resolves `ellipse`, `supercircle`, `circle` or `file:<path>`.
pub fn family_from_spec(spec: &str) -> Result<ShapeFamily> {
    match spec {
        "ellipse" => Ok(boundary::make_ellipse()),
        "supercircle" => Ok(boundary::make_supercircle()),
        "circle" => Ok(ShapeFamily::circle(1.0)),
        _ => match spec.strip_prefix("file:") {
            Some(path) => {
                let file = std::fs::File::open(path).map_err(|e| {
                    ReportError::Usage(format!("cannot open sample file `{path}`: {e}"))
                })?;
                let rows = boundary::read_samples(file)?;
                Ok(boundary::shape_from_samples(&rows)?)
            }
            None => Err(ReportError::Usage(format!(
                "unknown family `{spec}`; use ellipse, supercircle, circle or file:<path>"
            ))),
        },
    }
}

/// Options of a spectrum scan.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanOptions {
    pub with_oracle: bool,
    pub oracle: OracleConfig,
}

impl ScanOptions {
    pub fn with_oracle(mut self, on: bool) -> Self {
        self.with_oracle = on;
        self
    }
}

/// `k` window wide enough to hold every requested branch over the scan.
fn oracle_window(modes: &[Mode]) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for m in modes {
        let rho = m.rho()?;
        lo = lo.min(rho);
        hi = hi.max(rho);
    }
    Ok(((0.6 * lo).max(0.5), 1.3 * hi + 0.5))
}

/// Perturbative energies for every `(lambda, mode)`; with the oracle on,
/// numerical levels are matched to modes by [`oracle::classify_mode`]
/// against perturbative references of all circle modes near the window.
pub fn scan(
    family: &ShapeFamily,
    grid: &[f64],
    modes: &[Mode],
    options: &ScanOptions,
) -> Result<SpectrumScan> {
    if modes.is_empty() || grid.is_empty() {
        return Err(ReportError::Usage(
            "scan needs at least one mode and one lambda".into(),
        ));
    }
    for &lambda in grid {
        family.check_lambda(lambda)?;
    }
    let mut modes = modes.to_vec();
    modes.sort();
    modes.dedup();
    let perturber = Perturber::new(family.clone())?;
    let expansions: Vec<EnergyExpansion> = modes
        .iter()
        .map(|&m| perturber.expansion(m))
        .collect::<std::result::Result<_, _>>()?;

    let mut oracle_cfg = options.oracle.clone();
    let mut references: Vec<(Mode, Option<EnergyExpansion>)> = Vec::new();
    if options.with_oracle {
        let (lo, hi) = oracle_window(&modes)?;
        oracle_cfg.k_window = (lo, hi);
        for m in Mode::below((1.5 * hi).powi(2))? {
            references.push((m, perturber.expansion(m).ok()));
        }
    }

    let per_lambda: Vec<Result<(Vec<ScanRow>, Vec<String>)>> = grid
        .par_iter()
        .map(|&lambda| {
            let r0 = boundary::equivalent_radius(family, lambda)?;
            let scale = 1.0 / (r0 * r0);
            let mut rows: Vec<ScanRow> = expansions
                .iter()
                .map(|e| ScanRow {
                    lambda,
                    expansion: *e,
                    e_pert: e.eval(lambda) * scale,
                    e_num: None,
                    rel_err: None,
                    flags: Vec::new(),
                })
                .collect();
            let mut warnings = Vec::new();
            if options.with_oracle {
                let curve = family.at(lambda)?;
                let result = oracle::all_sectors(&curve, &oracle_cfg)?;
                warnings.extend(
                    result
                        .warnings
                        .iter()
                        .map(|w| format!("lambda = {lambda}: {w}")),
                );
                let refs: Vec<(Mode, f64)> = references
                    .iter()
                    .map(|(m, e)| {
                        let energy = e
                            .map(|e| e.eval(lambda))
                            .unwrap_or(m.rho().unwrap_or(0.0).powi(2));
                        (*m, energy * scale)
                    })
                    .collect();
                let mut claimed: BTreeMap<Mode, Vec<(f64, &oracle::NumericLevel, bool)>> =
                    BTreeMap::new();
                for level in &result.levels {
                    let c = oracle::classify_mode(level, &refs, oracle_cfg.refine_tol);
                    if let Some(m) = c.mode {
                        let reference = refs.iter().find(|r| r.0 == m).map(|r| r.1).unwrap_or(0.0);
                        claimed.entry(m).or_default().push((
                            (level.energy - reference).abs(),
                            level,
                            c.ambiguous,
                        ));
                    }
                }
                for row in &mut rows {
                    match claimed.get(&row.mode()) {
                        None => row.flags.push("unmatched".into()),
                        Some(list) => {
                            let (_, level, ambiguous) = list
                                .iter()
                                .min_by(|a, b| a.0.total_cmp(&b.0))
                                .expect("non-empty claim list");
                            row.e_num = Some(level.energy);
                            row.rel_err = Some((row.e_pert - level.energy).abs() / level.energy);
                            if *ambiguous {
                                row.flags.push("ambiguous".into());
                            }
                            if list.len() > 1 {
                                row.flags.push("contested".into());
                            }
                            if level.quality > 1e3 * oracle_cfg.refine_tol {
                                row.flags.push("low_quality".into());
                            }
                        }
                    }
                }
            }
            Ok((rows, warnings))
        })
        .collect();

    let mut rows = Vec::with_capacity(grid.len() * modes.len());
    let mut warnings = Vec::new();
    for r in per_lambda {
        let (r, w) = r?;
        rows.extend(r);
        warnings.extend(w);
    }
    Ok(SpectrumScan {
        family: family.name().to_string(),
        grid: grid.to_vec(),
        modes,
        rows,
        warnings,
        refine_tol: oracle_cfg.refine_tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    Crossing,
    Veering,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Perturbative,
    Oracle,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Crossing => "Crossing",
            EventKind::Veering => "Veering",
        })
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Perturbative => "Perturbative",
            Source::Oracle => "Oracle",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchEvent {
    pub kind: EventKind,
    pub mode_a: Mode,
    pub mode_b: Mode,
    pub lambda_at: f64,
    pub min_gap: f64,
    pub source: Source,
}

impl BranchEvent {
    pub fn involves(&self, a: Mode, b: Mode) -> bool {
        (self.mode_a == a && self.mode_b == b) || (self.mode_a == b && self.mode_b == a)
    }
}

/// Threshold below which a gap counts as a contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapFloor {
    Absolute(f64),
    /// Multiple of `refine_tol * E0`, with `E0` the larger of the pair.
    RelativeToE0(f64),
}

impl Default for GapFloor {
    fn default() -> Self {
        GapFloor::RelativeToE0(DEFAULT_GAP_FACTOR)
    }
}

/// Crossings and veerings between every pair of scanned modes, for each
/// source separately.
///
/// A gap whose magnitude is at or below the floor counts as zero. A run of
/// zero gaps between opposite signs is a crossing; a run that does not
/// separate opposite signs is a contact, also reported as a crossing. Sign
/// changes between consecutive nonzero gaps are crossings located by linear
/// interpolation. A strict interior minimum of `|gap|` above the floor with
/// no sign change around it (equal neighbouring values form one plateau) is
/// a veering.
pub fn detect_events(scan: &SpectrumScan, floor: GapFloor) -> Result<Vec<BranchEvent>> {
    let n = scan.grid.len();
    if n < 3 {
        return Err(ReportError::InsufficientGrid(n));
    }
    let mut events = Vec::new();
    for source in [Source::Perturbative, Source::Oracle] {
        let branches: Vec<(Mode, Vec<f64>)> = scan
            .modes
            .iter()
            .filter_map(|&m| scan.branch(m, source).map(|b| (m, b)))
            .collect();
        for (i, (ma, ea)) in branches.iter().enumerate() {
            for (mb, eb) in &branches[i + 1..] {
                let e0 = scan
                    .row(0, *ma)
                    .map(|r| r.expansion.e0)
                    .unwrap_or(0.0)
                    .max(scan.row(0, *mb).map(|r| r.expansion.e0).unwrap_or(0.0));
                let floor = match floor {
                    GapFloor::Absolute(v) => v,
                    GapFloor::RelativeToE0(f) => f * scan.refine_tol * e0,
                };
                let gaps: Vec<f64> = ea.iter().zip(eb).map(|(a, b)| a - b).collect();
                for (kind, lambda_at, min_gap) in pair_events(&scan.grid, &gaps, floor) {
                    events.push(BranchEvent {
                        kind,
                        mode_a: *ma,
                        mode_b: *mb,
                        lambda_at,
                        min_gap,
                        source,
                    });
                }
            }
        }
    }
    Ok(events)
}

fn pair_events(grid: &[f64], gaps: &[f64], floor: f64) -> Vec<(EventKind, f64, f64)> {
    let n = gaps.len();
    let sign = |g: f64| {
        if g.abs() <= floor {
            0
        } else if g > 0.0 {
            1
        } else {
            -1
        }
    };
    let s: Vec<i32> = gaps.iter().map(|&g| sign(g)).collect();
    let mut out = Vec::new();

    let mut i = 0;
    while i < n {
        if s[i] == 0 {
            let start = i;
            while i + 1 < n && s[i + 1] == 0 {
                i += 1;
            }
            let min_gap = gaps[start..=i]
                .iter()
                .fold(f64::INFINITY, |m, g| m.min(g.abs()));
            out.push((EventKind::Crossing, 0.5 * (grid[start] + grid[i]), min_gap));
        } else if i + 1 < n && s[i + 1] != 0 && s[i] != s[i + 1] {
            let (g0, g1) = (gaps[i], gaps[i + 1]);
            let at = grid[i] - g0 * (grid[i + 1] - grid[i]) / (g1 - g0);
            out.push((EventKind::Crossing, at, g0.abs().min(g1.abs())));
        }
        i += 1;
    }

    let mag: Vec<f64> = gaps.iter().map(|g| g.abs()).collect();
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.max(b);
    let mut i = 1;
    while i + 1 < n {
        let start = i;
        while i + 1 < n - 1 && same(mag[i], mag[i + 1]) {
            i += 1;
        }
        let end = i;
        let interior = mag[start - 1] > mag[start] && !same(mag[start - 1], mag[start]);
        let exterior = mag[end + 1] > mag[end] && !same(mag[end + 1], mag[end]);
        let steady = s[start - 1..=end + 1]
            .iter()
            .all(|&v| v != 0 && v == s[start]);
        if interior && exterior && steady {
            out.push((
                EventKind::Veering,
                0.5 * (grid[start] + grid[end]),
                mag[start],
            ));
        }
        i += 1;
    }
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    out
}

pub fn write_events<W: Write>(events: &[BranchEvent], w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(EVENTS_HEADER.split(','))?;
    for e in events {
        out.write_record([
            e.kind.to_string(),
            e.mode_a.to_string(),
            e.mode_b.to_string(),
            sig15(e.lambda_at),
            sig15(e.min_gap),
            e.source.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Settings readable from a `key = value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub oracle: OracleConfig,
    pub gap_factor: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            oracle: OracleConfig::default(),
            gap_factor: DEFAULT_GAP_FACTOR,
        }
    }
}

impl RunConfig {
    /// Keys: `basis_order`, `boundary_nodes`, `k_min`, `k_max`, `sweep_step`,
    /// `refine_tol`, `sector`, `accept_quality`, `gap_factor`. Blank lines
    /// and `#` comments are skipped.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ReportError::Usage(format!("config line {}: expected key = value", i + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || {
                ReportError::Usage(format!(
                    "config line {}: bad value `{value}` for `{key}`",
                    i + 1
                ))
            };
            fn num<T: FromStr>(v: &str, bad: impl Fn() -> ReportError) -> Result<T> {
                v.parse().map_err(|_| bad())
            }
            let o = &mut cfg.oracle;
            match key {
                "basis_order" => o.basis_order = num(value, bad)?,
                "boundary_nodes" => o.boundary_nodes = num(value, bad)?,
                "k_min" => o.k_window.0 = num(value, bad)?,
                "k_max" => o.k_window.1 = num(value, bad)?,
                "sweep_step" => o.sweep_step = num(value, bad)?,
                "refine_tol" => o.refine_tol = num(value, bad)?,
                "accept_quality" => o.accept_quality = num(value, bad)?,
                "sector" => o.sector = value.parse::<Sector>().map_err(|_| bad())?,
                "gap_factor" => cfg.gap_factor = num(value, bad)?,
                _ => {
                    return Err(ReportError::Usage(format!(
                        "config line {}: unknown key `{key}`",
                        i + 1
                    )));
                }
            }
        }
        Ok(cfg)
    }
}
