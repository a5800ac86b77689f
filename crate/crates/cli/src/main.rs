//! `ultrarep` — JSON front end for filters, product algebras, and their
//! representations.
//!
//! Every command reads JSON files and writes one JSON document to `--out`
//! (stdout by default). Exit status: `0` on success, `1` on a domain error
//! (not a filter, not a representation, …), `2` on an I/O or schema error.
//! Errors are reported on stderr as `{"error": code, "message": text}`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;
use ultrarep::algebra::{check_idempotent_spectrum, spectrum, SpectrumJson};
use ultrarep::json::MatrixJson;
use ultrarep::linalg::{self, CMatrix};
use ultrarep::reps::{
    build_from_filter, commutant_dimension, decompose, enumerate_irreducibles, equivalent,
    extract_filter, factor_projection, involution_matrix, involution_representation, BasisChoice,
    CertificateJson,
};
use ultrarep::{AlgebraError, Complex64, Filter, IndexSet, RepError, Representation, DEFAULT_TOL};

#[derive(Debug, Parser)]
#[command(name = "ultrarep", version, about = "Ultrafilters and representations of finite product algebras")]
struct Cli {
    /// Relative tolerance for all numerical comparisons.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    tol: f64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the matrix-unit relations of a representation.
    Validate { rep: PathBuf },
    /// Split a representation into factor projections with an intertwiner.
    Decompose { rep: PathBuf },
    /// Recover the ultrafilter of an irreducible representation.
    ExtractFilter { rep: PathBuf },
    /// Build the irreducible representation of an ultrafilter.
    BuildRep {
        filter: PathBuf,
        /// Index set JSON giving the factor dimensions.
        #[arg(long)]
        index_set: PathBuf,
        /// Optional `{label: matrix}` basis choices.
        #[arg(long)]
        basis: Option<PathBuf>,
    },
    /// Decide whether two representations are equivalent.
    CheckEquiv { first: PathBuf, second: PathBuf },
    /// Eigenvalues of a square matrix.
    Spectrum { matrix: PathBuf },
    /// The factor projections of an index set.
    Enumerate { index_set: PathBuf },
    /// Built-in regression and round-trip checks.
    Selfcheck,
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let tol: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err("tolerance must be a positive finite number".into())
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{message}")]
    Domain { code: &'static str, message: String },
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io_error",
            CliError::Schema { .. } => "schema_error",
            CliError::Domain { code, .. } => code,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain { .. } => 1,
            CliError::Io { .. } | CliError::Schema { .. } => 2,
        }
    }
}

impl From<RepError> for CliError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::InvalidInput(message) => CliError::Schema {
                path: "input".into(),
                message,
            },
            e => CliError::Domain {
                code: e.code(),
                message: e.to_string(),
            },
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::from(RepError::from(e))
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    let target = out.map_or_else(|| "stdout".to_string(), |p| p.display().to_string());
    let io_err = |source| CliError::Io {
        path: target.clone(),
        source,
    };
    match out {
        Some(path) => fs::write(path, text).map_err(io_err),
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(io_err),
    }
}

/// Parse a representation and reject it unless every relation holds.
fn read_representation(path: &Path, tol: f64) -> Result<Representation, CliError> {
    let rep: Representation = read_json(path)?;
    let report = rep.validate(tol)?;
    if !report.valid {
        return Err(CliError::Domain {
            code: "not_a_representation",
            message: format!(
                "{}: {} violated by {:e}",
                path.display(),
                report.worst_relation,
                report.worst_violation
            ),
        });
    }
    Ok(rep)
}

fn read_matrix(path: &Path) -> Result<CMatrix, CliError> {
    let json: MatrixJson = read_json(path)?;
    CMatrix::try_from(json).map_err(|e| CliError::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn read_basis(path: &Path) -> Result<BasisChoice, CliError> {
    let raw: BTreeMap<String, MatrixJson> = read_json(path)?;
    raw.into_iter()
        .map(|(label, json)| {
            CMatrix::try_from(json)
                .map(|m| (label.clone(), m))
                .map_err(|e| CliError::Schema {
                    path: path.display().to_string(),
                    message: format!("basis {label:?}: {e}"),
                })
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

#[derive(Debug, Serialize)]
struct SelfcheckReport {
    passed: bool,
    checks: Vec<Check>,
}

fn check(name: impl Into<String>, outcome: Result<String, String>) -> Check {
    let (passed, detail) = match outcome {
        Ok(detail) => (true, detail),
        Err(detail) => (false, detail),
    };
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

/// The involution representation for one value of `h`: a valid
/// representation whose commutant is two-dimensional.
fn involution_check(h: Complex64, tol: f64) -> Result<String, String> {
    let rep = involution_representation(h).map_err(|e| e.to_string())?;
    let report = rep.validate(tol).map_err(|e| e.to_string())?;
    if !report.valid {
        return Err(format!("{} violated by {:e}", report.worst_relation, report.worst_violation));
    }
    let commutant = commutant_dimension(&rep, tol);
    if commutant != 2 {
        return Err(format!("commutant dimension {commutant}, expected 2"));
    }
    let a = involution_matrix(h).map_err(|e| e.to_string())?;
    let e = (linalg::identity(2) - &a) * Complex64::new(0.5, 0.0);
    let idem = check_idempotent_spectrum(&e, tol).map_err(|e| e.to_string())?;
    if idem.idempotent_defect > 1e-12 {
        return Err(format!("idempotent defect {:e}", idem.idempotent_defect));
    }
    let eig = spectrum(&a).map_err(|e| e.to_string())?;
    let expected = [-1.0, 1.0];
    let deviation = eig
        .iter()
        .zip(expected)
        .map(|(z, t)| (z - t).norm())
        .fold(0.0f64, f64::max);
    if eig.len() != 2 || deviation > 1e-10 {
        return Err(format!("spectrum {eig:?}, expected {{-1, 1}}"));
    }
    let d = decompose(&rep, tol).map_err(|e| e.to_string())?;
    if d.support_labels() != ["x1", "x2"] || d.multiplicities() != [1, 1] {
        return Err(format!("decomposition {:?} × {:?}", d.support_labels(), d.multiplicities()));
    }
    Ok(format!("commutant 2, spectrum deviation {deviation:.1e}"))
}

/// Filter → representation → filter on a small mixed index set, plus
/// equivalence of each rebuilt representation with its factor projection.
fn round_trip_check(tol: f64) -> Result<String, String> {
    let set = IndexSet::from_pairs([("a", 1), ("b", 2), ("c", 3)]).map_err(|e| e.to_string())?;
    for y in 0..set.len() {
        let filter = Filter::at_point(set.universe().clone(), y).map_err(|e| e.to_string())?;
        let rep = build_from_filter(&filter, &set, None).map_err(|e| e.to_string())?;
        let back = extract_filter(&rep, tol).map_err(|e| e.to_string())?;
        if back != filter {
            return Err(format!("point {}: round trip gave kernel {:?}", set.label(y), back.kernel()));
        }
        let p = factor_projection(&set, y).map_err(|e| e.to_string())?;
        let cert = equivalent(&rep, &p, tol).map_err(|e| e.to_string())?;
        if !cert.equivalent {
            return Err(format!("point {}: rebuilt representation not equivalent", set.label(y)));
        }
    }
    Ok(format!("{} ultrafilters", set.len()))
}

fn selfcheck(tol: f64) -> SelfcheckReport {
    let params = [
        ("2", Complex64::new(2.0, 0.0)),
        ("-1", Complex64::new(-1.0, 0.0)),
        ("0.5+0.5i", Complex64::new(0.5, 0.5)),
    ];
    let mut checks: Vec<Check> = params
        .iter()
        .map(|(name, h)| check(format!("involution h={name}"), involution_check(*h, tol)))
        .collect();
    checks.push(check("round trip", round_trip_check(tol)));
    SelfcheckReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let tol = cli.tol;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Validate { rep } => {
            let rep: Representation = read_json(rep)?;
            let report = rep.validate(tol)?;
            write_json(&report, out)?;
            if !report.valid {
                return Err(CliError::Domain {
                    code: "not_a_representation",
                    message: format!("{} violated by {:e}", report.worst_relation, report.worst_violation),
                });
            }
            Ok(())
        }
        Command::Decompose { rep } => {
            let rep = read_representation(rep, tol)?;
            write_json(&decompose(&rep, tol)?.to_json(), out)
        }
        Command::ExtractFilter { rep } => {
            let rep = read_representation(rep, tol)?;
            write_json(&extract_filter(&rep, tol)?, out)
        }
        Command::BuildRep {
            filter,
            index_set,
            basis,
        } => {
            let filter: Filter = read_json(filter)?;
            let set: IndexSet = read_json(index_set)?;
            let bases = basis.as_deref().map(read_basis).transpose()?;
            write_json(&build_from_filter(&filter, &set, bases.as_ref())?, out)
        }
        Command::CheckEquiv { first, second } => {
            let first = read_representation(first, tol)?;
            let second = read_representation(second, tol)?;
            let cert = equivalent(&first, &second, tol)?;
            write_json(&CertificateJson::from(&cert), out)
        }
        Command::Spectrum { matrix } => {
            let m = read_matrix(matrix)?;
            if !m.is_square() {
                return Err(CliError::Schema {
                    path: matrix.display().to_string(),
                    message: "spectrum needs a square matrix".into(),
                });
            }
            write_json(&SpectrumJson { eigenvalues: spectrum(&m)? }, out)
        }
        Command::Enumerate { index_set } => {
            let set: IndexSet = read_json(index_set)?;
            write_json(&enumerate_irreducibles(&set), out)
        }
        Command::Selfcheck => {
            let report = selfcheck(tol);
            write_json(&report, out)?;
            if report.passed {
                Ok(())
            } else {
                Err(CliError::Domain {
                    code: "selfcheck_failed",
                    message: "one or more self checks failed".into(),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = serde_json::json!({ "error": e.code(), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::from(e.exit_code())
        }
    }
}
