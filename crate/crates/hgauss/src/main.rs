//! Command line front end.
//!
//! Exit codes: 0 on success, 1 when a check suite reports a failure, 2 on
//! usage or IO errors.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hgauss::grid;
use hgauss::suite::{self, SuiteReport};
use hgauss::surface_ref::SurfaceRef;
use hgauss_core::expr::eval_scalar;
use hgauss_core::gans::{geodesic, GansPoint};
use hgauss_core::surface::{catalog_entries, forms_vertical, mean_curvature, SurfaceSpec};

#[derive(Parser)]
#[command(
    name = "hgauss",
    version,
    about = "Surfaces in the Heisenberg group: fundamental forms, mean curvature, Gauss map"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate surface data at one chart point
    Eval {
        /// Surface reference: catalog:NAME?k=v or expr:TEXT?k=v&domain=x0,x1,y0,y1
        #[arg(long)]
        surface: String,
        /// Chart point, x,y for graphs or t,s for ruled surfaces
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Emit JSON instead of key = value lines
        #[arg(long)]
        json: bool,
    },
    /// Export surface data over a rectangular grid
    Grid {
        /// Surface reference (graphs only)
        #[arg(long)]
        surface: String,
        /// Grid nodes along x
        #[arg(long)]
        nx: usize,
        /// Grid nodes along y
        #[arg(long)]
        ny: usize,
        /// Rectangle x0,x1,y0,y1; default is the surface's own domain
        #[arg(long, allow_hyphen_values = true)]
        domain: Option<String>,
        /// Output file; a .json extension selects JSON, anything else CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Trace a geodesic of the Gans plane
    Geodesic {
        /// Start point u,v
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        /// Initial direction du,dv (rescaled to unit speed)
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        /// Final parameter value
        #[arg(long)]
        tmax: f64,
        /// Integration step
        #[arg(long)]
        step: f64,
        /// Output CSV file
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named check suite
    Check {
        /// Suite name: gans, heis, forms, minimal, tension, equivariance, conformal, all
        #[arg(long, default_value = "all")]
        suite: String,
        /// Replace the tolerance of every check in the run
        #[arg(long)]
        tol: Option<f64>,
        /// Seed for the randomized batches; HGAUSS_SEED is the fallback
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the built-in surfaces
    Catalog,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {}", message);
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Eval { surface, at, json } => cmd_eval(&surface, &at, json),
        Command::Grid {
            surface,
            nx,
            ny,
            domain,
            out,
        } => cmd_grid(&surface, nx, ny, domain.as_deref(), &out),
        Command::Geodesic {
            from,
            dir,
            tmax,
            step,
            out,
        } => cmd_geodesic(&from, &dir, tmax, step, &out),
        Command::Check { suite, tol, seed } => cmd_check(&suite, tol, seed),
        Command::Catalog => cmd_catalog(),
    }
}

fn resolve_surface(text: &str) -> Result<SurfaceSpec, String> {
    SurfaceRef::parse(text)
        .map_err(|e| e.to_string())?
        .resolve()
        .map_err(|e| e.to_string())
}

/// Write one line to stdout. A closed pipe (say `hgauss catalog | head -1`)
/// ends the program quietly instead of panicking mid stream.
fn emit_line(line: &str) -> Result<(), String> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", line) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(format!("cannot write to stdout: {}", e)),
    }
}

fn parse_pair(text: &str, what: &str) -> Result<(f64, f64), String> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| format!("{} expects two comma separated numbers, got '{}'", what, text))?;
    let pa = a
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("{}: '{}' is not a number", what, a.trim()))?;
    let pb = b
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("{}: '{}' is not a number", what, b.trim()))?;
    if !pa.is_finite() || !pb.is_finite() {
        return Err(format!("{} must be finite", what));
    }
    Ok((pa, pb))
}

fn parse_domain(text: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(format!(
            "--domain expects x0,x1,y0,y1, got '{}'",
            text
        ));
    }
    let mut d = [0.0f64; 4];
    for (slot, part) in d.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("--domain: '{}' is not a number", part.trim()))?;
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(d[0] < d[1]) || !(d[2] < d[3]) {
        return Err(format!(
            "--domain needs x0 < x1 and y0 < y1, got '{}'",
            text
        ));
    }
    Ok(d)
}

fn cmd_eval(surface: &str, at: &str, json: bool) -> Result<ExitCode, String> {
    let spec = resolve_surface(surface)?;
    let (a, b) = parse_pair(at, "--at")?;
    if spec.is_graph() {
        let row = grid::row_at(&spec, a, b).map_err(|e| e.to_string())?;
        if json {
            let text = serde_json::to_string_pretty(&row).map_err(|e| e.to_string())?;
            emit_line(&text)?;
        } else {
            for (name, value) in grid::COLUMNS.split(',').zip(row.fields()) {
                emit_line(&format!("{} = {:.16e}", name, value))?;
            }
        }
        return Ok(ExitCode::SUCCESS);
    }
    // ruled surface: the chart is (t, s) and the data depends on t only
    let forms = forms_vertical(&spec, a).map_err(|e| e.to_string())?;
    let h = mean_curvature(&forms).map_err(|e| e.to_string())?;
    let (profile, params) = match &spec {
        SurfaceSpec::VerticalRuled { a, params, .. } => (a, params),
        _ => unreachable!("non-graph specs are ruled"),
    };
    let value = eval_scalar(profile, a, 0.0, params).map_err(|e| e.to_string())?;
    let fields = [
        ("t", a),
        ("s", b),
        ("a", value),
        ("E", forms.e),
        ("F", forms.f),
        ("G", forms.g),
        ("L", forms.l),
        ("M", forms.m),
        ("N", forms.n),
        ("H", h),
    ];
    if json {
        let mut map = serde_json::Map::new();
        for (name, value) in fields {
            map.insert(name.to_owned(), serde_json::json!(value));
        }
        let text =
            serde_json::to_string_pretty(&serde_json::Value::Object(map)).map_err(|e| e.to_string())?;
        emit_line(&text)?;
    } else {
        for (name, value) in fields {
            emit_line(&format!("{} = {:.16e}", name, value))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_grid(
    surface: &str,
    nx: usize,
    ny: usize,
    domain: Option<&str>,
    out: &PathBuf,
) -> Result<ExitCode, String> {
    let spec = resolve_surface(surface)?;
    if !spec.is_graph() {
        return Err("grid export needs a graph surface; ruled surfaces vary in t only".into());
    }
    let domain = match domain {
        Some(text) => parse_domain(text)?,
        None => grid::natural_domain(&spec)
            .ok_or_else(|| "surface has no natural domain; pass --domain".to_string())?,
    };
    let rows = grid::compute_rows(&spec, nx, ny, domain).map_err(|e| e.to_string())?;
    let file = File::create(out).map_err(|e| format!("cannot create {}: {}", out.display(), e))?;
    let mut writer = BufWriter::new(file);
    let as_json = out.extension().and_then(|e| e.to_str()) == Some("json");
    let written = if as_json {
        grid::write_json(&rows, &mut writer)
    } else {
        grid::write_csv(&rows, &mut writer)
    };
    written
        .and_then(|_| writer.flush())
        .map_err(|e| format!("cannot write {}: {}", out.display(), e))?;
    emit_line(&format!("wrote {} rows to {}", rows.len(), out.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_geodesic(
    from: &str,
    dir: &str,
    tmax: f64,
    step: f64,
    out: &PathBuf,
) -> Result<ExitCode, String> {
    let (u, v) = parse_pair(from, "--from")?;
    let (du, dv) = parse_pair(dir, "--dir")?;
    if du == 0.0 && dv == 0.0 {
        return Err("--dir must be nonzero".into());
    }
    if !tmax.is_finite() || tmax <= 0.0 {
        return Err("--tmax must be a positive number".into());
    }
    if !step.is_finite() || step <= 0.0 {
        return Err("--step must be a positive number".into());
    }
    let samples = geodesic(GansPoint::new(u, v), [du, dv], tmax, step);
    let file = File::create(out).map_err(|e| format!("cannot create {}: {}", out.display(), e))?;
    let mut writer = BufWriter::new(file);
    grid::write_geodesic_csv(&samples, &mut writer)
        .and_then(|_| writer.flush())
        .map_err(|e| format!("cannot write {}: {}", out.display(), e))?;
    emit_line(&format!(
        "wrote {} samples to {}",
        samples.len(),
        out.display()
    ))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(name: &str, tol: Option<f64>, seed: Option<u64>) -> Result<ExitCode, String> {
    let seed = suite::resolve_seed(seed)?;
    let report = suite::run_suite(name, tol, seed).map_err(|e| e.to_string())?;
    print_report(&report)?;
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn print_report(report: &SuiteReport) -> Result<(), String> {
    emit_line(&format!("suite {}  seed {}", report.suite, report.seed))?;
    for check in &report.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        emit_line(&format!(
            "[{}] {:<30}  max {:>10.3e}  (tol {:.1e})",
            status, check.id, check.residual, check.tol
        ))?;
    }
    let passed = report.checks.iter().filter(|c| c.passed).count();
    emit_line(&format!(
        "{} checks: {} passed, {} failed ({:.2}s)",
        report.checks.len(),
        passed,
        report.checks.len() - passed,
        report.wall.as_secs_f64()
    ))
}

fn cmd_catalog() -> Result<ExitCode, String> {
    for entry in catalog_entries() {
        emit_line(entry.name)?;
        emit_line(&format!("  {}", entry.summary))?;
        if !entry.params.is_empty() {
            let list: Vec<String> = entry
                .params
                .iter()
                .map(|(name, default)| format!("{}={}", name, default))
                .collect();
            emit_line(&format!("  parameters: {}", list.join(", ")))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
