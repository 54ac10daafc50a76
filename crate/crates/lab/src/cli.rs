//! The `weyl-lab` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use weyl_core::count::{
    ellipticity_threshold, monotonicity_probe, ConstantsCEps, ScanPlan, ZERO_TOL, STABILITY_FACTOR,
};
use weyl_core::lb_spectrum::{solve_lowest_with, LanczosOptions};
use weyl_core::regions::{bound_c0, classify, RegionParams};
use weyl_core::surface::SurfaceName;
use weyl_core::symbols::verify_symbols;
use weyl_core::{
    assemble_fem, count_negative, exact_sphere_spectrum, BasisSource, GammaField, MassScheme, ModeCutPolicy,
    SpectralBasis, Surface,
};

use crate::cache::{CacheKey, SpectrumCache};
use crate::report::{envelope, fmt_g17, scan_csv, to_json_string, write_atomic};
use crate::spec::{parse_r_list, r_grid, GammaSpec, Spacing, SurfaceSpec};
use crate::{LabError, EXIT_GATE, EXIT_OK, EXIT_USAGE};

/// Central-difference half-step of the monotonicity probe.
const PROBE_ETA: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(
    name = "weyl-lab",
    version,
    about = "Weyl counting for surfaces with dissipative boundary damping",
    after_help = "Any command accepts --config FILE with `key = value` lines; flags on the command line win."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute (or load from the cache) a Laplace-Beltrami spectrum.
    Spectrum(SpectrumCmd),
    /// Count negative eigenvalues of Q(1/r) over an r grid.
    Scan(ScanCmd),
    /// Count at a single r.
    Count(CountCmd),
    /// Weyl coefficient and prediction.
    Weyl(WeylCmd),
    /// Randomized check of the principal-symbol identities.
    VerifySymbols(VerifyCmd),
    /// Region membership of complex points and the eigenvalue bound.
    Regions(RegionsCmd),
}

fn parse_mass(s: &str) -> Result<MassScheme, String> {
    match s {
        "lumped" => Ok(MassScheme::Lumped),
        "consistent" => Ok(MassScheme::Consistent),
        "mixed" => Ok(MassScheme::Mixed),
        _ => Err(format!("unknown mass scheme `{s}` (lumped, consistent, mixed)")),
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SurfaceArgs {
    /// unit-sphere, ellipsoid:A,B,C, icosphere:LEVEL or mesh:PATH
    #[arg(long, default_value = "unit-sphere")]
    pub surface: SurfaceSpec,
    /// OFF mesh file (same as --surface mesh:PATH)
    #[arg(long)]
    pub mesh: Option<PathBuf>,
}

impl SurfaceArgs {
    pub fn spec(&self) -> SurfaceSpec {
        match &self.mesh {
            Some(p) => SurfaceSpec::Mesh(p.clone()),
            None => self.surface.clone(),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BasisArgs {
    /// Use the exact spherical-harmonic basis (unit sphere only; implied there)
    #[arg(long)]
    pub exact: bool,
    /// Highest harmonic degree of the exact basis [default: sized to the request]
    #[arg(long)]
    pub max_degree: Option<usize>,
    /// Number of mesh eigenpairs [default: sized to the request]
    #[arg(long)]
    pub count: Option<usize>,
    /// Relative residual tolerance of the mesh eigensolver
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Mass matrix: lumped, consistent or mixed
    #[arg(long, default_value = "mixed", value_parser = parse_mass)]
    pub mass: MassScheme,
    #[arg(long, default_value = ".weyl-cache")]
    pub cache_dir: PathBuf,
    #[arg(long)]
    pub no_cache: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PolicyArgs {
    /// Retain modes up to this multiple of the ellipticity threshold
    #[arg(long, default_value_t = 2.0)]
    pub mode_cut_factor: f64,
    /// Retain a fixed number of modes instead
    #[arg(long)]
    pub mode_cut_modes: Option<usize>,
}

impl PolicyArgs {
    pub fn policy(&self) -> Result<ModeCutPolicy, LabError> {
        match self.mode_cut_modes {
            Some(0) => Err(LabError::Usage("--mode-cut-modes must be positive".into())),
            Some(modes) => Ok(ModeCutPolicy::Fixed { modes }),
            None if self.mode_cut_factor >= 1.0 && self.mode_cut_factor.is_finite() => {
                Ok(ModeCutPolicy::ThresholdMultiple { factor: self.mode_cut_factor })
            }
            None => Err(LabError::Usage(format!("--mode-cut-factor {} must be at least 1", self.mode_cut_factor))),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct SpectrumCmd {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ScanCmd {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// constant:C, affine:A,B,WX,WY,WZ or table:PATH, optionally prefixed by inv-
    #[arg(long, default_value = "constant:2")]
    pub gamma: GammaSpec,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Explicit grid, e.g. 5,10,20 (overrides --r-min/--r-max/--steps)
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long, default_value_t = 5.0)]
    pub r_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 4)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "linear")]
    pub spacing: Spacing,
    /// Skip the eigenvalue-branch slope probe
    #[arg(long)]
    pub no_probe: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct CountCmd {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long, default_value = "constant:2")]
    pub gamma: GammaSpec,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long)]
    pub r: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct WeylCmd {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long, default_value = "constant:2")]
    pub gamma: GammaSpec,
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = false)]
pub struct VerifyCmd {
    /// Analytic surfaces to test (repeatable) [default: unit-sphere and ellipsoid:2,1,1]
    #[arg(long)]
    pub surface: Vec<SurfaceSpec>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = false)]
pub struct RegionsCmd {
    /// File of `re im` lines
    #[arg(long)]
    pub check: Option<PathBuf>,
    /// Effective damping values for the eigenvalue bound (repeatable)
    #[arg(long)]
    pub bound: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub c0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_m: f64,
    #[arg(long, default_value_t = 2.0)]
    pub m: f64,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match crate::config::expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Spectrum(c) => cmd_spectrum(c, out, err),
        Command::Scan(c) => cmd_scan(c, out, err),
        Command::Count(c) => cmd_count(c, out, err),
        Command::Weyl(c) => cmd_weyl(c, out),
        Command::VerifySymbols(c) => cmd_verify(c, out, err),
        Command::Regions(c) => cmd_regions(c, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn io_err(e: std::io::Error) -> LabError {
    LabError::io("<stdout>", e)
}

/// Loads the surface and, for the unit sphere, checks `--exact` usage.
fn load_surface(args: &SurfaceArgs, basis: Option<&BasisArgs>) -> Result<(SurfaceSpec, Surface), LabError> {
    let spec = args.spec();
    if let Some(b) = basis {
        if b.exact && spec != SurfaceSpec::UnitSphere {
            return Err(LabError::Usage(format!("--exact requires the unit sphere, got `{spec}`")));
        }
    }
    let surface = spec.load()?;
    Ok((spec, surface))
}

/// Smallest degree whose shell reaches `lambda`.
fn degree_reaching(lambda: f64) -> usize {
    let mut l = ((-1.0 + (1.0 + 4.0 * lambda.max(0.0)).sqrt()) / 2.0).floor() as usize;
    while ((l * (l + 1)) as f64) < lambda {
        l += 1;
    }
    l
}

/// Mode count needed to count at `r_max` under `policy`, including the
/// truncation-stability recount, for a surface of the given area.
fn required_lambda(c1: f64, r_max: f64, policy: ModeCutPolicy) -> Option<f64> {
    match policy {
        ModeCutPolicy::ThresholdMultiple { factor } => Some(factor * ellipticity_threshold(c1, 1.0 / r_max)),
        ModeCutPolicy::Fixed { .. } => None,
    }
}

fn exact_degree(b: &BasisArgs, c1: Option<f64>, r_max: Option<f64>, policy: ModeCutPolicy) -> usize {
    if let Some(d) = b.max_degree {
        return d;
    }
    let shell = match (c1, r_max, policy) {
        (_, _, ModeCutPolicy::Fixed { modes }) => ((modes as f64).sqrt().ceil() as usize).saturating_sub(1),
        (Some(c1), Some(r), p) => degree_reaching(required_lambda(c1, r, p).unwrap_or(0.0)),
        _ => 10,
    };
    let target = STABILITY_FACTOR * ((shell + 1) * (shell + 1)) as f64;
    (target.sqrt().ceil() as usize).saturating_sub(1).max(shell)
}

fn mesh_count(b: &BasisArgs, area: f64, n: usize, c1: Option<f64>, r_max: Option<f64>, policy: ModeCutPolicy) -> usize {
    if let Some(c) = b.count {
        return c;
    }
    let base = match (c1, r_max, policy) {
        (_, _, ModeCutPolicy::Fixed { modes }) => modes as f64,
        (Some(c1), Some(r), p) => area * required_lambda(c1, r, p).unwrap_or(0.0) / (4.0 * std::f64::consts::PI),
        _ => 100.0,
    };
    ((STABILITY_FACTOR * base * 1.1).ceil() as usize + 16).min(n)
}

/// The spectral basis for `surface`: exact on the unit sphere, cached FEM on
/// meshes. `c1` and `r_max` size the basis when no explicit size is given.
pub fn obtain_basis(
    spec: &SurfaceSpec,
    surface: &Surface,
    b: &BasisArgs,
    sizing: Option<(f64, f64, ModeCutPolicy)>,
    err: &mut dyn Write,
) -> Result<SpectralBasis, LabError> {
    let (c1, r_max, policy) = match sizing {
        Some((c1, r, p)) => (Some(c1), Some(r), p),
        None => (None, None, ModeCutPolicy::default()),
    };
    match surface {
        Surface::Analytic(a) => {
            if a.name() != SurfaceName::UnitSphere {
                return Err(LabError::Usage(format!(
                    "no spectral basis for `{spec}`; use the unit sphere or a mesh"
                )));
            }
            Ok(exact_sphere_spectrum(exact_degree(b, c1, r_max, policy)))
        }
        Surface::Mesh(mesh) => {
            let n = mesh.vertices().len();
            let count = mesh_count(b, mesh.area(), n, c1, r_max, policy);
            let key = CacheKey::new(mesh, count, b.tol, b.mass, b.seed);
            let cache = SpectrumCache::new(&b.cache_dir);
            if !b.no_cache {
                if let Some(basis) = cache.load(&key, mesh)? {
                    let _ = writeln!(err, "cache hit: {}", key.0);
                    return Ok(basis);
                }
                let _ = writeln!(err, "cache miss: {}", key.0);
            }
            let pencil = assemble_fem(mesh, b.mass)?;
            let opts = LanczosOptions { seed: b.seed, ..LanczosOptions::default() };
            let basis = solve_lowest_with(&pencil, count, b.tol, &opts)?;
            if !b.no_cache {
                cache.store(&key, mesh, count, b.tol, &basis)?;
            }
            Ok(basis)
        }
    }
}

fn basis_summary(basis: &SpectralBasis) -> Value {
    json!({
        "source": basis.source(),
        "modes": basis.mode_count(),
        "trusted_horizon": basis.trusted_horizon(),
        "top_eigenvalue": basis.top_eigenvalue(),
        "max_residual": basis.residuals().map(|r| r.iter().copied().fold(0.0, f64::max)),
    })
}

fn cmd_spectrum(c: &SpectrumCmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, LabError> {
    let (spec, surface) = load_surface(&c.surface, Some(&c.basis))?;
    if spec == SurfaceSpec::UnitSphere && c.basis.max_degree.is_none() && c.basis.count.is_some() {
        return Err(LabError::Usage("the exact basis is sized by --max-degree".into()));
    }
    let basis = obtain_basis(&spec, &surface, &c.basis, None, err)?;
    let mut csv = String::from("index,lambda,residual\n");
    for (i, l) in basis.eigenvalues().iter().enumerate() {
        let r = basis.residuals().map_or(String::new(), |r| fmt_g17(r[i]));
        csv.push_str(&format!("{i},{},{r}\n", fmt_g17(*l)));
    }
    write_atomic(&c.out.join("spectrum.csv"), csv.as_bytes())?;
    let doc = envelope("spectrum", serde_json::to_value(c)?, basis_summary(&basis));
    write_atomic(&c.out.join("spectrum.json"), to_json_string(&doc).as_bytes())?;
    let source = match basis.source() {
        BasisSource::ExactSphere { max_degree } => format!("exact sphere, degree <= {max_degree}"),
        BasisSource::MeshFem { mass } => format!("mesh FEM, {} mass", serde_json::to_value(mass)?.as_str().unwrap_or("")),
    };
    writeln!(out, "source: {source}").map_err(io_err)?;
    writeln!(out, "modes: {}", basis.mode_count()).map_err(io_err)?;
    writeln!(out, "trusted horizon: {}", fmt_g17(basis.trusted_horizon())).map_err(io_err)?;
    writeln!(out, "top eigenvalue: {}", fmt_g17(basis.top_eigenvalue())).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn scan_grid(c: &ScanCmd) -> Result<Vec<f64>, LabError> {
    match &c.r {
        Some(list) => parse_r_list(list),
        None => r_grid(c.r_min, c.r_max, c.steps, c.spacing),
    }
}

fn load_field(gamma: &GammaSpec, surface: &Surface) -> Result<(GammaField, ConstantsCEps), LabError> {
    let field = gamma.load()?;
    let range = field.range_on(surface)?;
    Ok((field, ConstantsCEps::from_range(&range)?))
}

fn cmd_scan(c: &ScanCmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, LabError> {
    let grid = scan_grid(c)?;
    let policy = c.policy.policy()?;
    let (spec, surface) = load_surface(&c.surface, Some(&c.basis))?;
    let (field, k) = load_field(&c.gamma, &surface)?;
    let r_max = *grid.last().expect("grid is non-empty");
    let basis = obtain_basis(&spec, &surface, &c.basis, Some((k.c1, r_max, policy)), err)?;
    let plan = ScanPlan::new(&basis, &field, &surface, &grid, policy)?;
    let points = grid.par_iter().map(|&r| plan.point(r)).collect::<Result<Vec<_>, _>>()?;
    let report = plan.finish(points);

    let probe = if c.no_probe {
        Value::Null
    } else {
        let hs: Vec<f64> = grid.iter().map(|r| 1.0 / r).collect();
        match monotonicity_probe(plan.moments(), &hs, policy, PROBE_ETA) {
            Ok(m) => serde_json::to_value(&m)?,
            Err(e) => json!({ "error": e.to_string() }),
        }
    };
    let probe_ok = probe.is_null() || (probe["violations"].as_array().is_some_and(|v| v.is_empty()) && probe["skipped"] == 0);

    let csv = scan_csv(&report);
    write_atomic(&c.out.join("scan.csv"), csv.as_bytes())?;
    let passed = report.gates.passed() && probe_ok;
    let payload = json!({
        "basis": basis_summary(&basis),
        "constants": k,
        "report": report,
        "monotonicity": probe,
        "passed": passed,
    });
    let doc = envelope("scan", serde_json::to_value(c)?, payload);
    write_atomic(&c.out.join("scan.json"), to_json_string(&doc).as_bytes())?;

    write!(out, "{csv}").map_err(io_err)?;
    writeln!(
        out,
        "exponent {} coefficient {} weyl {} supported {}",
        fmt_g17(report.fit.exponent),
        fmt_g17(report.fit.coefficient),
        fmt_g17(report.weyl_coefficient),
        serde_json::to_value(report.multiplicity.supported)?.as_str().unwrap_or("")
    )
    .map_err(io_err)?;
    if passed {
        return Ok(EXIT_OK);
    }
    let g = &report.gates;
    let mut failed = Vec::new();
    if !g.nondecreasing {
        failed.push("nondecreasing");
    }
    if !g.truncation_stable {
        failed.push("truncation-stability");
    }
    if g.exponent_in_window == Some(false) {
        failed.push("exponent-window");
    }
    if !probe_ok {
        failed.push("branch-monotonicity");
    }
    let _ = writeln!(err, "gate failure: {}", failed.join(", "));
    Ok(EXIT_GATE)
}

fn cmd_count(c: &CountCmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, LabError> {
    if !(c.r > 0.0 && c.r.is_finite()) {
        return Err(LabError::Usage(format!("--r must be positive, got {}", c.r)));
    }
    let policy = c.policy.policy()?;
    let (spec, surface) = load_surface(&c.surface, Some(&c.basis))?;
    let (field, k) = load_field(&c.gamma, &surface)?;
    let basis = obtain_basis(&spec, &surface, &c.basis, Some((k.c1, c.r, policy)), err)?;
    let op = weyl_core::build_q(&basis, &field, &surface, 1.0 / c.r, policy)?;
    let n = count_negative(&op, ZERO_TOL)?;
    let w = weyl_core::weyl_prediction(&surface, &field, c.r)?;
    let doc = json!({
        "r": c.r,
        "N_scalar": n.negative,
        "N_system": 2 * n.negative,
        "borderline": n.borderline,
        "W": w,
        "mode_cut": op.mode_cut,
    });
    write!(out, "{}", to_json_string(&doc)).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn cmd_weyl(c: &WeylCmd, out: &mut dyn Write) -> Result<i32, LabError> {
    let (_, surface) = load_surface(&c.surface, None)?;
    let field = c.gamma.load()?;
    let coef = weyl_core::weyl_coefficient(&surface, &field)?;
    let mut doc = json!({ "coefficient": coef });
    if let Some(r) = c.r {
        if !(r > 0.0 && r.is_finite()) {
            return Err(LabError::Usage(format!("--r must be positive, got {r}")));
        }
        doc["r"] = json!(r);
        doc["W"] = json!(weyl_core::weyl_prediction(&surface, &field, r)?);
    }
    write!(out, "{}", to_json_string(&doc)).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn cmd_verify(c: &VerifyCmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, LabError> {
    if c.samples == 0 {
        return Err(LabError::Usage("--samples must be positive".into()));
    }
    let specs = if c.surface.is_empty() {
        vec![SurfaceSpec::UnitSphere, SurfaceSpec::Ellipsoid([2.0, 1.0, 1.0])]
    } else {
        c.surface.clone()
    };
    let surfaces = specs.iter().map(SurfaceSpec::analytic).collect::<Result<Vec<_>, _>>()?;
    let report = verify_symbols(&surfaces, c.samples, c.seed)?;
    let doc = envelope(
        "verify-symbols",
        serde_json::to_value(c)?,
        json!({ "report": report, "max_residual": report.max_residual(), "passed": report.passed() }),
    );
    write_atomic(&c.out.join("verify-symbols.json"), to_json_string(&doc).as_bytes())?;
    for (spec, s) in specs.iter().zip(&report.surfaces) {
        for id in &s.identities {
            writeln!(out, "{spec} {} {:.3e}", id.name, id.max_residual).map_err(io_err)?;
        }
    }
    writeln!(out, "max residual {:.3e}", report.max_residual()).map_err(io_err)?;
    if report.passed() {
        return Ok(EXIT_OK);
    }
    for (spec, s) in specs.iter().zip(&report.surfaces) {
        for id in s.identities.iter().filter(|i| !(i.max_residual < report.tolerance)) {
            let _ = writeln!(err, "identity failed: {spec} {} {:.3e}", id.name, id.max_residual);
        }
    }
    Ok(EXIT_GATE)
}

fn cmd_regions(c: &RegionsCmd, out: &mut dyn Write) -> Result<i32, LabError> {
    let params = RegionParams { c0: c.c0, c2: c.c2, c_eps: c.c_eps, eps: c.eps, c_m: c.c_m, m: c.m };
    params.validate().map_err(|e| LabError::Usage(e.to_string()))?;
    if c.check.is_none() && c.bound.is_empty() {
        return Err(LabError::Usage("regions needs --check FILE or --bound GAMMA0".into()));
    }
    let mut doc = json!({ "params": params });
    if let Some(path) = &c.check {
        let points = crate::io::read_points(Path::new(path))?;
        let rows: Vec<Value> = points
            .iter()
            .map(|z| {
                let m = classify(*z, &params);
                json!({ "re": z.re, "im": z.im, "lambda": m.lambda, "lambda_eps": m.lambda_eps, "r_m": m.r_m })
            })
            .collect();
        doc["points"] = Value::Array(rows);
    }
    if !c.bound.is_empty() {
        let rows = c
            .bound
            .iter()
            .map(|&g| {
                bound_c0(g)
                    .map(|b| json!({ "gamma0": g, "c0": b }))
                    .map_err(|e| LabError::Usage(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        doc["bound"] = Value::Array(rows);
    }
    write!(out, "{}", to_json_string(&doc)).map_err(io_err)?;
    Ok(EXIT_OK)
}
