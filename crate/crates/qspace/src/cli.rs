//! The `qspace` command line.
//!
//! Exit codes: 0 when every requested check passes, 1 on a check failure or a failed
//! precondition gate, 2 on a usage error, 3 when an input file cannot be read or parsed or an
//! output file cannot be written.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use qspace_core::calculus::Calculus;
use qspace_core::exterior::Antisymmetrizer;
use qspace_core::fock::{BraidOperator, Braiding};
use qspace_core::operators::{make_classical_gammas, GammaSet};
use qspace_core::suite::{calculus_suite, dirac_suite, fock_suite, gate_report, DEFAULT_SEED};
use qspace_core::text::{format_poly, parse_poly};
use qspace_core::waves::{verify_u_algebra, verify_z0_series, DispersionModel};
use qspace_core::{validate, Error, Report, StructureData};
use serde_json::{json, Value};

use crate::format::{dump_structure, load_braid, load_gammas, load_structure, LoadError};
use crate::grid;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qspace", version, about = "Exact differential calculus on quantum Minkowski-type spaces")]
struct Cli {
    /// Print machine-readable JSON carrying the same values as the text output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized identity suites.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Print the loaded structure as canonical JSON and skip the subcommand.
    #[arg(long, global = true)]
    dump: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Matrix-level consistency checks and the well-definedness gates.
    Validate { structure: PathBuf },
    /// Ranks of the antisymmetrizers A_0..A_n.
    Dims {
        structure: PathBuf,
        /// Highest degree; defaults to N + 1.
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Prints the partial derivative ∂_i of a polynomial such as `(1/2)*x0*x1+x2`.
    Derive { structure: PathBuf, poly: String, i: usize },
    /// Calculus, exterior, Laplacian and Dirac identity suite.
    Identities {
        structure: PathBuf,
        /// JSON file `{"gammas": [...]}`; defaults to the structure's gammas, then to the
        /// classical construction when R is the flip.
        #[arg(long)]
        gammas: Option<PathBuf>,
        /// Highest polynomial degree tested; defaults to min(4, cutoff - 1).
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Samples m² and the propagator over a momentum grid into a CSV file.
    Dispersion {
        structure: PathBuf,
        /// Comma-separated axes, each `lo:hi:steps` or a fixed value, one per generator.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
        #[arg(long)]
        out: PathBuf,
        /// Also write a gnuplot script next to the CSV file.
        #[arg(long)]
        emit_gnuplot: bool,
    },
    /// Braid axioms, permutation representation and lifted operators on tensor powers.
    FockCheck {
        structure: PathBuf,
        /// JSON file `{"n": N, "b": [...]}` with B^{ij}_{kl} at b[iN+j][kN+l]; defaults to the flip.
        #[arg(long)]
        braid: Option<PathBuf>,
        /// Largest number of particles.
        #[arg(short = 'n', default_value_t = 3)]
        n: usize,
    },
    /// Plane-wave series checks: Z = 0 momentum series and the R = flip closed form.
    VerifySeries {
        structure: PathBuf,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = SeriesMode::Auto)]
        mode: SeriesMode,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SeriesMode {
    /// Every series whose precondition holds.
    Auto,
    Z0,
    U,
}

impl Command {
    fn structure(&self) -> &Path {
        match self {
            Command::Validate { structure }
            | Command::Dims { structure, .. }
            | Command::Derive { structure, .. }
            | Command::Identities { structure, .. }
            | Command::Dispersion { structure, .. }
            | Command::FockCheck { structure, .. }
            | Command::VerifySeries { structure, .. } => structure,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Gate(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Gate(_) => EXIT_CHECK,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Gate(m) | Failure::Io(m) => m,
        }
    }
}

fn io_failure(path: &Path, e: LoadError) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// A computation error: bad requests are usage errors, everything else a failed gate.
fn core_failure(e: Error) -> Failure {
    match e {
        Error::Parse(_) | Error::CutoffExceeded { .. } | Error::SizeExceeded { .. } | Error::InvalidArgument(_) => {
            Failure::Usage(e.to_string())
        }
        _ => Failure::Gate(e.to_string()),
    }
}

struct Output {
    text: String,
    json: Value,
    passed: bool,
}

fn sections(command: &str, parts: &[(&str, Report)]) -> Output {
    let mut text = String::new();
    let mut items = Vec::new();
    for (title, report) in parts {
        text.push_str(&format!("{title}\n{report}\n"));
        let checks: Vec<Value> = report
            .checks
            .iter()
            .map(|c| json!({ "name": c.name, "passed": c.passed, "witness": c.witness }))
            .collect();
        items.push(json!({
            "title": title,
            "checks": checks,
            "passed": report.passed_count(),
            "total": report.checks.len(),
        }));
    }
    let passed = parts.iter().all(|(_, r)| r.all_passed());
    Output { text, json: json!({ "command": command, "sections": items, "all_passed": passed }), passed }
}

/// Refuses structures whose validation report has a failure.
fn require_valid(sd: &StructureData) -> Result<(), Failure> {
    let report = validate(sd);
    let Some(c) = report.failures().next() else {
        return Ok(());
    };
    Err(Failure::Gate(format!(
        "structure failed validation ({}): {} [{}]",
        report.summary(),
        c.name,
        c.witness.as_deref().unwrap_or("")
    )))
}

/// Validation, the `ℒ` gate and, when the star is requested, the star-of-ideal gate.
fn require_calculus(sd: &StructureData) -> Result<Calculus, Failure> {
    require_valid(sd)?;
    let calc = Calculus::new(sd).map_err(|e| Failure::Gate(format!("well-definedness gate: {e}")))?;
    if sd.star() {
        if let Err(w) = calc.engine().star_status() {
            return Err(Failure::Gate(format!("star gate: star does not map the ideal into itself: {w}")));
        }
    }
    Ok(calc)
}

fn cmd_validate(sd: &StructureData) -> Output {
    let report = validate(sd);
    if !report.all_passed() {
        return sections("validate", &[("structure", report)]);
    }
    sections("validate", &[("structure", report), ("gates", gate_report(sd))])
}

fn cmd_dims(sd: &StructureData, max_degree: Option<usize>) -> Result<Output, Failure> {
    require_valid(sd)?;
    let max = max_degree.unwrap_or(sd.n() + 1);
    let mut rows = Vec::new();
    let mut text = format!("{:>3} {:>8} {:>6}\n", "n", "N^n", "rank");
    for k in 0..=max {
        let a = Antisymmetrizer::build(sd, k).map_err(core_failure)?;
        text.push_str(&format!("{k:>3} {:>8} {:>6}\n", a.size(), a.rank()));
        rows.push(json!({ "n": k, "size": a.size(), "rank": a.rank() }));
    }
    Ok(Output { text, json: json!({ "command": "dims", "rows": rows }), passed: true })
}

fn cmd_derive(sd: &StructureData, poly: &str, i: usize) -> Result<Output, Failure> {
    let a = parse_poly(poly, sd.n()).map_err(|e| Failure::Usage(e.to_string()))?;
    if i >= sd.n() {
        return Err(Failure::Usage(format!("index {i} out of range for N = {}", sd.n())));
    }
    let calc = require_calculus(sd)?;
    let d = calc.partial(i, &a).map_err(core_failure)?;
    let result = format_poly(&d);
    Ok(Output {
        text: format!("{result}\n"),
        json: json!({ "command": "derive", "input": format_poly(&calc.engine().normal_form(&a).map_err(core_failure)?), "i": i, "result": result }),
        passed: true,
    })
}

fn cmd_identities(sd: &StructureData, gammas: Option<&Path>, degree: Option<usize>, seed: u64) -> Result<Output, Failure> {
    let calc = require_calculus(sd)?;
    let degree = degree.unwrap_or(4.min(sd.degree_cutoff().saturating_sub(1)));
    let mut parts = vec![("calculus", calculus_suite(&calc, degree, seed).map_err(core_failure)?)];
    let gs = match (gammas, sd.gammas()) {
        (Some(path), _) => {
            Some(GammaSet::new(load_gammas(path).map_err(|e| io_failure(path, e))?).map_err(core_failure)?)
        }
        (None, Some(gs)) => Some(GammaSet::new(gs.to_vec()).map_err(core_failure)?),
        (None, None) => make_classical_gammas(sd).ok(),
    };
    if let Some(gs) = gs {
        if gs.len() != sd.n() {
            return Err(Failure::Usage(format!("{} gamma matrices, expected {}", gs.len(), sd.n())));
        }
        parts.push(("dirac", dirac_suite(&calc, &gs, degree, seed).map_err(core_failure)?));
    }
    Ok(sections("identities", &parts))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn cmd_dispersion(sd: &StructureData, grid_text: &str, mass: f64, out: &Path, gnuplot: bool) -> Result<Output, Failure> {
    let axes = grid::parse_grid(grid_text).map_err(Failure::Usage)?;
    if axes.len() != sd.n() {
        return Err(Failure::Usage(format!("grid has {} axes, expected {}", axes.len(), sd.n())));
    }
    if !mass.is_finite() {
        return Err(Failure::Usage(format!("mass {mass} is not finite")));
    }
    require_calculus(sd)?;
    let model = DispersionModel::new(sd, mass).map_err(core_failure)?;
    let points = grid::points(&axes);
    let samples = grid::sample(&model, &points).map_err(core_failure)?;
    write_file(out, &grid::to_csv(sd.n(), &samples))?;
    let poles = samples.iter().filter(|s| s.propagator.is_none()).count();
    let script = if gnuplot {
        let path = out.with_extension("gp");
        let name = out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        write_file(&path, &grid::gnuplot_script(&name, &axes))?;
        Some(path)
    } else {
        None
    };
    let mut text = format!("wrote {} rows to {}\n", samples.len(), out.display());
    if poles > 0 {
        text.push_str(&format!("{poles} points on the mass shell (propagator written as nan)\n"));
    }
    if let Some(p) = &script {
        text.push_str(&format!("wrote gnuplot script {}\n", p.display()));
    }
    let json = json!({
        "command": "dispersion",
        "rows": samples.len(),
        "out": out.display().to_string(),
        "poles": poles,
        "gnuplot": script.map(|p| p.display().to_string()),
    });
    Ok(Output { text, json, passed: true })
}

fn cmd_fock(sd: &StructureData, braid: Option<&Path>, n: usize, seed: u64) -> Result<Output, Failure> {
    let calc = require_calculus(sd)?;
    let braiding = match braid {
        None => Braiding::Flip,
        Some(path) => {
            let (bn, b) = load_braid(path).map_err(|e| io_failure(path, e))?;
            if bn != sd.n() {
                return Err(Failure::Usage(format!("braid file has n = {bn}, structure has N = {}", sd.n())));
            }
            Braiding::Generator(b)
        }
    };
    let k = BraidOperator::new(calc.engine(), braiding).map_err(core_failure)?;
    let report = fock_suite(&calc, &k, n, seed).map_err(core_failure)?;
    Ok(sections("fock-check", &[("fock", report)]))
}

fn cmd_series(sd: &StructureData, n_max: usize, mode: SeriesMode) -> Result<Output, Failure> {
    let calc = require_calculus(sd)?;
    let z0 = match mode {
        SeriesMode::Z0 => true,
        SeriesMode::U => false,
        SeriesMode::Auto => sd.z_is_zero(),
    };
    let u = match mode {
        SeriesMode::Z0 => false,
        SeriesMode::U => true,
        SeriesMode::Auto => sd.is_r_tau(),
    };
    if !z0 && !u {
        return Err(Failure::Usage("structure has neither Z = 0 nor R = flip".into()));
    }
    let mut parts = Vec::new();
    if z0 {
        parts.push(("z0 series", verify_z0_series(&calc, n_max).map_err(core_failure)?));
    }
    if u {
        parts.push(("u-algebra", verify_u_algebra(&calc, n_max).map_err(core_failure)?));
    }
    Ok(sections("verify-series", &parts))
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    let path = cli.command.structure();
    let sd = load_structure(path).map_err(|e| io_failure(path, e))?;
    if cli.dump {
        let text = dump_structure(&sd);
        let json = serde_json::from_str(&text).expect("dump is valid JSON");
        return Ok(Output { text, json, passed: true });
    }
    match &cli.command {
        Command::Validate { .. } => Ok(cmd_validate(&sd)),
        Command::Dims { max_degree, .. } => cmd_dims(&sd, *max_degree),
        Command::Derive { poly, i, .. } => cmd_derive(&sd, poly, *i),
        Command::Identities { gammas, degree, .. } => cmd_identities(&sd, gammas.as_deref(), *degree, cli.seed),
        Command::Dispersion { grid, mass, out, emit_gnuplot, .. } => {
            cmd_dispersion(&sd, grid, *mass, out, *emit_gnuplot)
        }
        Command::FockCheck { braid, n, .. } => cmd_fock(&sd, braid.as_deref(), *n, cli.seed),
        Command::VerifySeries { n_max, mode, .. } => cmd_series(&sd, *n_max, *mode),
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match execute(&cli) {
        Ok(output) => {
            let written = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&output.json).expect("output serializes"))
            } else {
                out.write_all(output.text.as_bytes())
            };
            if written.is_err() {
                return EXIT_IO;
            }
            if output.passed {
                EXIT_OK
            } else {
                EXIT_CHECK
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}
