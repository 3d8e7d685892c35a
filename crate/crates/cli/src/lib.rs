//! Command-line front end. [`run`] does all the work and returns the exit
//! code and output streams so it can be driven from tests.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;
use stellar_core::document::{self, ComplexDocument, DocumentError};
use stellar_core::{fixtures, normalize, pi1, quotient, recognition, Complex, DEFAULT_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "stellar", version, about = "Stellar moves, star normal forms and fundamental groups of simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Read the complex document from this file instead of stdin.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the document and report whether it is a stellar manifold.
    Validate {
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compute the star normal form.
    Normalize {
        /// Also print a short human-readable summary on stderr.
        #[arg(long)]
        summary: bool,
    },
    /// Print the link of a simplex.
    Link {
        /// Comma-separated vertex labels, e.g. "1,2".
        #[arg(long)]
        simplex: String,
    },
    /// Print the boundary.
    Boundary,
    /// Decide whether the complex is a ball or a sphere.
    Recognize {
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Per-vertex manifold report.
    Manifold {
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fundamental group presentation and its abelianization.
    Pi1,
    /// Euler characteristic.
    Euler,
    /// Emit a built-in example complex.
    Fixtures {
        /// One of simplex-k, sphere-k, octahedron, torus7, rp2-6.
        #[arg(long)]
        name: String,
    },
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_DOMAIN, message: e.to_string() }
}

fn malformed(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_MALFORMED, message: e.to_string() }
}

fn document_failure(e: DocumentError) -> Failure {
    match e {
        DocumentError::NotUniform => domain(e),
        _ => malformed(e),
    }
}

/// Runs the command line `args` (including the program name) with `stdin`
/// as the fallback input.
pub fn run<I, T>(args: I, stdin: &[u8]) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                RunOutput { code, stdout: text.into_bytes(), stderr: String::new() }
            } else {
                RunOutput { code, stdout: Vec::new(), stderr: text }
            };
        }
    };
    let mut stderr = String::new();
    let result = execute(&cli, stdin, &mut stderr).and_then(|bytes| match &cli.output {
        Some(path) => fs::write(path, &bytes).map(|_| Vec::new()).map_err(|e| domain(format!("{}: {e}", path.display()))),
        None => Ok(bytes),
    });
    match result {
        Ok(stdout) => RunOutput { code: EXIT_OK, stdout, stderr },
        Err(f) => {
            stderr.push_str("error: ");
            stderr.push_str(&f.message);
            stderr.push('\n');
            RunOutput { code: f.code, stdout: Vec::new(), stderr }
        }
    }
}

fn read_document(cli: &Cli, stdin: &[u8]) -> Result<ComplexDocument, Failure> {
    let bytes = match &cli.input {
        Some(path) => fs::read(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?,
        None => stdin.to_vec(),
    };
    document::parse(&bytes).map_err(document_failure)
}

fn complex_bytes(k: &Complex) -> Result<Vec<u8>, Failure> {
    let doc = ComplexDocument::from_complex(k).map_err(document_failure)?;
    Ok(document::serialize(&doc))
}

fn json_bytes(v: &impl serde::Serialize) -> Vec<u8> {
    document::serialize_value(&serde_json::to_value(v).expect("reports serialize"))
}

fn execute(cli: &Cli, stdin: &[u8], stderr: &mut String) -> Result<Vec<u8>, Failure> {
    if let Command::Fixtures { name } = &cli.command {
        let k = fixtures::by_name(name).ok_or_else(|| {
            malformed(format!("unknown fixture {name:?}; expected one of {}", fixtures::NAMES.join(", ")))
        })?;
        let doc = ComplexDocument::from_complex(&k).map_err(document_failure)?.with_metadata(json!({ "name": name }));
        return Ok(document::serialize(&doc));
    }

    let doc = read_document(cli, stdin)?;
    let k = doc.complex();
    match &cli.command {
        Command::Validate { budget, seed } => {
            let mut report = json!({
                "dimension": doc.dimension,
                "f_vector": k.f_vector(),
                "closed": k.is_closed(),
                "components": k.connected_components().len(),
                "euler_characteristic": k.euler_characteristic(),
            });
            if !k.is_empty() {
                let m = recognition::is_stellar_manifold(&k, *budget, *seed).map_err(domain)?;
                report["manifold"] = serde_json::to_value(&m).expect("reports serialize");
            }
            if let Some(eq) = doc.equivalence() {
                let v = quotient::validate_regular(&k, &eq).map_err(domain)?;
                report["equivalence"] = serde_json::to_value(&v).expect("reports serialize");
            }
            Ok(document::serialize_value(&report))
        }
        Command::Normalize { summary } => {
            let nf = normalize::normalize(&k).map_err(domain)?;
            if *summary {
                stderr.push_str(&summary_text(&nf));
            }
            Ok(document::serialize_normal_form(&nf))
        }
        Command::Link { simplex } => {
            let a = document::parse_simplex(simplex).map_err(document_failure)?;
            complex_bytes(&k.link(&a))
        }
        Command::Boundary => complex_bytes(&k.boundary()),
        Command::Recognize { budget, seed } => {
            let r = recognition::recognize_ball_or_sphere(&k, *budget, *seed).map_err(domain)?;
            Ok(json_bytes(&r))
        }
        Command::Manifold { budget, seed } => {
            let r = recognition::is_stellar_manifold(&k, *budget, *seed).map_err(domain)?;
            Ok(json_bytes(&r))
        }
        Command::Pi1 => {
            let nf = normalize::normalize(&k).map_err(domain)?;
            let p = pi1::presentation(&nf).map_err(domain)?;
            let ab = pi1::abelianization(&p);
            Ok(format!("{p}\nabelianization: {ab}\n").into_bytes())
        }
        Command::Euler => Ok(format!("{}\n", k.euler_characteristic()).into_bytes()),
        Command::Fixtures { .. } => unreachable!("handled above"),
    }
}

fn summary_text(nf: &stellar_core::StarNormalForm) -> String {
    let q = quotient::quotient_cells(&nf.sphere, &nf.eq).ok();
    let mut out = format!(
        "apex {}, sphere of dimension {} with {} generators, {} steps\n{} pairs, {} unpaired\n",
        nf.apex,
        nf.sphere.dimension(),
        nf.sphere.len(),
        nf.steps,
        nf.pairing.pairs.len(),
        nf.pairing.unpaired.len(),
    );
    if let Some(q) = q {
        out.push_str(&format!("euler characteristic of the cone: {}\n", q.cone_euler_characteristic()));
    }
    if nf.manifold_unverified {
        out.push_str("warning: manifold check was inconclusive\n");
    }
    out
}
