//! Command-line front end. Exit status 0 on success, 1 on usage errors, 2 on
//! numerical failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::{
    detect_events, family_from_spec, parse_range, scan, write_events, GapFloor, ReportError,
    Result, RunConfig, ScanOptions,
};
use crate::boundary::{self, BoundaryError, ShapeFamily};
use crate::fmt::sig15;
use crate::oracle::{self, Sector};
use crate::perturb::{Mode, PerturbError, Perturber};

const SAMPLE_NODES: usize = 64;
const CONSTRAINT_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "helmholtz-perturb",
    version,
    about = "Dirichlet spectra of deformed disks: perturbation theory against a numerical solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Boundary samples, Fourier coefficient table and area-constraint report.
    Shape,
    /// Perturbative energies (plus oracle values with --with-oracle).
    Spectrum,
    /// Numerical Dirichlet levels at one deformation.
    Oracle,
    /// Full sweep with crossing and veering events.
    Scan,
    /// Boundary residual of the truncated wavefunctions and its slope in lambda.
    Residual,
}

#[derive(Debug, Args)]
struct Global {
    /// ellipse, supercircle, circle or file:<path> with lambda,theta,r rows.
    #[arg(long, global = true, default_value = "ellipse")]
    family: String,
    /// A single deformation value.
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Evenly spaced deformations a:b:n.
    #[arg(long = "lambda-range", global = true, allow_hyphen_values = true)]
    lambda_range: Option<String>,
    /// Modes as l,j,Cos|Sin separated by `;`, or first5.
    #[arg(long, global = true)]
    modes: Option<String>,
    /// Add numerical energies to spectrum and scan output.
    #[arg(long = "with-oracle", global = true)]
    with_oracle: bool,
    /// Output file; companion files get suffixes appended.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key = value file overriding solver settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Accepted for reproducibility bookkeeping; the pipeline is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &ReportError) -> i32 {
    match e {
        ReportError::Usage(_) | ReportError::InsufficientGrid(_) => 1,
        ReportError::Boundary(
            BoundaryError::LambdaOutOfRange { .. }
            | BoundaryError::Format(_)
            | BoundaryError::NonUniformGrid { .. },
        ) => 1,
        ReportError::Perturb(PerturbError::InvalidMode(_)) => 1,
        ReportError::Oracle(
            oracle::OracleError::Config(_) | oracle::OracleError::SectorSymmetry { .. },
        ) => 1,
        _ => 2,
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let g = &cli.global;
    let family = family_from_spec(&g.family)?;
    let config = match &g.config {
        Some(path) => {
            let file = File::open(path).map_err(|e| {
                ReportError::Usage(format!("cannot open config `{}`: {e}", path.display()))
            })?;
            RunConfig::parse(BufReader::new(file))?
        }
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Shape => shape(g, &family, stdout, stderr),
        Command::Spectrum => spectrum(g, &family, &config, stdout, stderr, false),
        Command::Scan => spectrum(g, &family, &config, stdout, stderr, true),
        Command::Oracle => numeric(g, &family, &config, stdout, stderr),
        Command::Residual => residual(g, &family, stdout),
    }
}

fn grid(g: &Global) -> Result<Vec<f64>> {
    match (&g.lambda_range, g.lambda) {
        (Some(_), Some(_)) => Err(ReportError::Usage(
            "give either --lambda or --lambda-range, not both".into(),
        )),
        (Some(r), None) => parse_range(r),
        (None, Some(l)) => Ok(vec![l]),
        (None, None) => Ok(vec![0.0]),
    }
}

fn modes(g: &Global, default: &str) -> Result<Vec<Mode>> {
    let text = g.modes.as_deref().unwrap_or(default);
    let list = Mode::parse_list(text).map_err(|e| ReportError::Usage(e.to_string()))?;
    if list.is_empty() {
        return Err(ReportError::Usage("--modes lists no modes".into()));
    }
    Ok(list)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes to `<out><suffix>` when `--out` is set, otherwise to stdout
/// preceded by a blank line for every section after the first.
fn emit<F>(g: &Global, suffix: &str, first: bool, stdout: &mut dyn Write, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match &g.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(sibling(path, suffix))?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            if !first {
                writeln!(stdout)?;
            }
            body(stdout)?;
        }
    }
    Ok(())
}

fn shape(
    g: &Global,
    family: &ShapeFamily,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let lambdas = grid(g)?;
    let fb = boundary::fourier_expand(family, 2, boundary::DEFAULT_N_MAX)?;
    for w in fb.warnings() {
        writeln!(stderr, "warning: {w}")?;
    }
    emit(g, "", true, stdout, |w| {
        boundary::write_samples(family, &lambdas, SAMPLE_NODES, w)?;
        Ok(())
    })?;
    emit(g, ".coeffs", false, stdout, |w| {
        fb.write_table(w)?;
        Ok(())
    })?;
    let report = boundary::verify_constraints(&fb, CONSTRAINT_TOL);
    emit(g, ".constraints", false, stdout, |w| {
        writeln!(w, "sigma,residual,pass")?;
        for (i, r) in report.residuals.iter().enumerate() {
            writeln!(w, "{},{},{}", i + 1, sig15(*r), r.abs() <= report.tol)?;
        }
        Ok(())
    })
}

fn spectrum(
    g: &Global,
    family: &ShapeFamily,
    config: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
    events: bool,
) -> Result<()> {
    let lambdas = grid(g)?;
    let modes = modes(g, "first5")?;
    let options = ScanOptions {
        with_oracle: g.with_oracle,
        oracle: config.oracle.clone(),
    };
    let result = scan(family, &lambdas, &modes, &options)?;
    for w in &result.warnings {
        writeln!(stderr, "warning: {w}")?;
    }
    emit(g, "", true, stdout, |w| result.write_csv(w))?;
    if events {
        let found = detect_events(&result, GapFloor::RelativeToE0(config.gap_factor))?;
        emit(g, ".events", false, stdout, |w| write_events(&found, w))?;
    }
    Ok(())
}

fn numeric(
    g: &Global,
    family: &ShapeFamily,
    config: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let lambdas = grid(g)?;
    let [lambda] = lambdas[..] else {
        return Err(ReportError::Usage("oracle takes a single --lambda".into()));
    };
    let curve = family.at(lambda)?;
    let mut cfg = config.oracle.clone();
    if let Some(list) = &g.modes {
        let list = Mode::parse_list(list).map_err(|e| ReportError::Usage(e.to_string()))?;
        let rhos: Vec<f64> = list
            .iter()
            .map(|m| m.rho())
            .collect::<std::result::Result<_, _>>()?;
        let lo = rhos.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = rhos.iter().copied().fold(0.0, f64::max);
        cfg.k_window = ((0.6 * lo).max(0.5), 1.3 * hi + 0.5);
    }
    let result =
        if cfg.sector == Sector::Full && curve.symmetry().x_mirror && curve.symmetry().y_mirror {
            oracle::all_sectors(&curve, &cfg)?
        } else {
            oracle::dirichlet_eigs(&curve, &cfg)?
        };
    for w in &result.warnings {
        writeln!(stderr, "warning: {w}")?;
    }
    let perturber = Perturber::new(family.clone())?;
    let references: Vec<(Mode, f64)> = Mode::below((1.5 * cfg.k_window.1).powi(2))?
        .into_iter()
        .map(|m| {
            let e = perturber
                .energy(m, lambda)
                .unwrap_or_else(|_| m.rho().map(|r| r * r).unwrap_or(0.0));
            (m, e)
        })
        .collect();
    emit(g, "", true, stdout, |w| {
        writeln!(w, "sector,k,energy,quality,mode")?;
        for level in &result.levels {
            let c = oracle::classify_mode(level, &references, cfg.refine_tol);
            let mode = c.mode.map(|m| format!("\"{m}\"")).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{mode}",
                level.sector,
                sig15(level.k),
                sig15(level.energy),
                sig15(level.quality)
            )?;
        }
        Ok(())
    })
}

fn residual(g: &Global, family: &ShapeFamily, stdout: &mut dyn Write) -> Result<()> {
    let lambdas = match (&g.lambda_range, g.lambda) {
        (None, None) => vec![1e-3, 3e-3, 1e-2, 3e-2, 1e-1],
        _ => grid(g)?,
    };
    if lambdas.len() < 2 || lambdas.iter().any(|&l| l <= 0.0) {
        return Err(ReportError::Usage(
            "residual needs at least two positive lambda values".into(),
        ));
    }
    let modes = modes(g, "0,1,Cos")?;
    let perturber = Perturber::new(family.clone())?;
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for mode in modes {
        let wf = perturber.wavefunction(mode)?;
        let top = if wf.b.is_some() { 2 } else { 1 };
        for order in 0..=top {
            let values: Vec<f64> = lambdas
                .iter()
                .map(|&l| perturber.residual_of(&wf, l, order))
                .collect::<std::result::Result<_, _>>()?;
            slopes.push((mode, order, log_slope(&lambdas, &values)));
            rows.extend(
                lambdas
                    .iter()
                    .zip(values)
                    .map(|(&l, v)| (mode, order, l, v)),
            );
        }
    }
    emit(g, "", true, stdout, |w| {
        writeln!(w, "mode,order,lambda,residual")?;
        for (m, o, l, v) in &rows {
            writeln!(w, "\"{m}\",{o},{},{}", sig15(*l), sig15(*v))?;
        }
        Ok(())
    })?;
    emit(g, ".slopes", false, stdout, |w| {
        writeln!(w, "mode,order,slope")?;
        for (m, o, s) in &slopes {
            writeln!(w, "\"{m}\",{o},{}", sig15(*s))?;
        }
        Ok(())
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["helmholtz-perturb"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn spectrum_at_circle() {
        let (code, out, _) = call(&[
            "spectrum", "--family", "ellipse", "--lambda", "0", "--modes", "0,1,Cos",
        ]);
        assert_eq!(code, 0);
        let row = out.lines().nth(1).unwrap();
        assert!(row.contains(",5.78318596294678e0,"), "{row}");
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(call(&["spectrum", "--family", "hexagon"]).0, 1);
        assert_eq!(call(&["spectrum", "--lambda", "0.9"]).0, 1);
        assert_eq!(call(&["spectrum", "--modes", "0,1,Sin"]).0, 1);
        assert_eq!(call(&["scan", "--lambda-range", "0:0.1:2"]).0, 1);
        assert_eq!(call(&["frobnicate"]).0, 1);
        assert_eq!(
            call(&["spectrum", "--lambda", "0", "--lambda-range", "0:1:2"]).0,
            1
        );
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn numerical_failure_exits_with_two() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "sweep_step = 0.6\nrefine_tol = 1e-6\nk_max = 9").unwrap();
        let path = f.path().to_str().unwrap().to_string();
        let (code, _, err) = call(&["oracle", "--family", "circle", "--config", &path]);
        assert_eq!(code, 2, "{err}");
    }

    #[test]
    fn shape_sections() {
        let (code, out, _) = call(&["shape", "--family", "supercircle", "--lambda", "0.5"]);
        assert_eq!(code, 0);
        let sections: Vec<&str> = out.split("\n\n").collect();
        assert_eq!(sections.len(), 3);
        assert!(sections[0].starts_with("lambda,theta,r\n"));
        assert_eq!(sections[0].lines().count(), SAMPLE_NODES + 1);
        assert!(sections[1].starts_with("sigma,n,kind,value\n"));
        let c4 = sections[1]
            .lines()
            .find(|l| l.starts_with("1,4,C,"))
            .unwrap();
        let v: f64 = c4.rsplit(',').next().unwrap().parse().unwrap();
        assert!((v - 1.0 / 12.0).abs() < 1e-7);
        assert!(sections[2].starts_with("sigma,residual,pass\n"));
    }

    #[test]
    fn scan_files_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        for p in [&a, &b] {
            let (code, _, _) = call(&[
                "scan",
                "--family",
                "supercircle",
                "--lambda-range",
                "-0.3:0.3:7",
                "--modes",
                "first5",
                "--out",
                p.to_str().unwrap(),
            ]);
            assert_eq!(code, 0);
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        let events = std::fs::read_to_string(sibling(&a, ".events")).unwrap();
        assert!(events.starts_with("kind,mode_a,mode_b,lambda_at,min_gap,source\n"));
        assert!(events.contains("Crossing,\"2,1,Cos\",\"2,1,Sin\",0.00000000000000e0"));
    }

    #[test]
    fn residual_slopes_reported() {
        let (code, out, _) = call(&["residual", "--family", "ellipse", "--modes", "1,1,Cos"]);
        assert_eq!(code, 0);
        let slopes: Vec<f64> = out
            .split("\n\n")
            .nth(1)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(slopes.len(), 2);
        assert!((slopes[0] - 1.0).abs() < 0.2 && (slopes[1] - 2.0).abs() < 0.2);
    }
}
