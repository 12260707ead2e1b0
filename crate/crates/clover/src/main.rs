//! JSON command-line interface over the engine: one document per
//! invocation, deterministic bytes, exit 0 on success, 1 on validation
//! errors, 2 on degree-limit errors, 3 on internal-consistency failures.

use std::path::PathBuf;
use std::process::ExitCode;
use std::{env, fs};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use clover::contract::{bracket_limited, ell, ell_sigma, Coefficient, Coloration};
use clover::diagram::{parse_diagram, DiagramFile, JacobiDiagram};
use clover::enumerate::{enumerate_degree_limited, DEFAULT_MAX_DEGREE};
use clover::error::Error;
use clover::lp::parse_lp;
use clover::space::{as_normalize, space_structure_limited};
use clover::words;
use clover::ylink::{lp_from_jacobi, verify_fondjac_limited};
use clover::Result;

#[derive(Parser)]
#[command(
    name = "clover",
    version,
    about = "Exact-arithmetic engine for the clover calculus of homology 3-spheres"
)]
struct Cli {
    /// Hard bound on enumerated diagram degree (default 5, env
    /// CLOVER_MAX_DEGREE).
    #[arg(long, global = true)]
    limit_degree: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List all diagram classes of one degree.
    Enumerate {
        #[arg(long)]
        degree: usize,
        /// Keep only connected classes.
        #[arg(long)]
        connected: bool,
        /// Write the document here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print rank, invariant factors, and basis of the degree-k quotient.
    Space {
        #[arg(long)]
        degree: usize,
    },
    /// Coordinates of a formal sum (a JSON term list) in the degree-k basis.
    Reduce {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        element: PathBuf,
    },
    /// Pair surgery data with a diagram, optionally at one coloration.
    Contract {
        #[arg(long)]
        surgery: PathBuf,
        #[arg(long)]
        diagram: PathBuf,
        /// Coloration "v0:1,v1:2,..." mapping each vertex to a 1-based
        /// component.
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Full bracket of a surgery datum over the diagram catalog.
    Bracket {
        #[arg(long)]
        surgery: PathBuf,
    },
    /// Check the pairing identity matrix on classes up to a degree.
    Fondjac {
        #[arg(long)]
        max_degree: usize,
        /// Extra spectator components added to every built datum.
        #[arg(long, default_value_t = 0)]
        extra: usize,
    },
    /// Build the surgery datum attached to a diagram.
    BuildLp {
        #[arg(long)]
        jacobi: PathBuf,
        /// Component count (at least the diagram's vertex count).
        #[arg(short)]
        n: usize,
        /// Write the document here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the free-group commutator identity behind the IHX relation.
    CheckIdentity,
}

struct Outcome {
    doc: String,
    out: Option<PathBuf>,
    code: u8,
}

impl Outcome {
    fn stdout(doc: String) -> Self {
        Outcome {
            doc,
            out: None,
            code: 0,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    diagram: DiagramFile,
    coefficient: i64,
}

#[derive(Serialize)]
struct SpaceDoc {
    degree: usize,
    rank: usize,
    torsion: Vec<String>,
    basis: Vec<Vec<OwnedTermDoc>>,
}

#[derive(Serialize)]
struct OwnedTermDoc {
    diagram: JacobiDiagram,
    coefficient: i64,
}

#[derive(Serialize)]
struct TorsionCoordDoc {
    value: String,
    modulus: String,
}

#[derive(Serialize)]
struct CoordinatesDoc {
    degree: usize,
    torsion: Vec<TorsionCoordDoc>,
    free: Vec<String>,
}

#[derive(Serialize)]
struct EllSigmaDoc {
    ell_sigma: i64,
}

#[derive(Serialize)]
struct IdentityDoc {
    identity: &'static str,
    reduced_length: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            let text = format!("{}\n", outcome.doc);
            match outcome.out {
                Some(path) => {
                    if let Err(e) = fs::write(&path, text) {
                        return fail(&Error::Parse(format!(
                            "cannot write {}: {e}",
                            path.display()
                        )));
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    let doc = serde_json::json!({ "error": e.code(), "message": e.to_string() });
    println!("{doc}");
    ExitCode::from(e.exit_code() as u8)
}

fn run(cli: Cli) -> Result<Outcome> {
    let bound = degree_bound(cli.limit_degree)?;
    match cli.command {
        Command::Enumerate {
            degree,
            connected,
            out,
        } => {
            let catalog = enumerate_degree_limited(degree, bound, connected)?;
            Ok(Outcome {
                doc: to_json(&catalog.classes)?,
                out,
                code: 0,
            })
        }
        Command::Space { degree } => {
            let s = space_structure_limited(degree, bound)?;
            let doc = SpaceDoc {
                degree,
                rank: s.rank(),
                torsion: s.torsion().iter().map(|d| d.to_string()).collect(),
                basis: s
                    .basis()
                    .iter()
                    .map(|sum| {
                        sum.terms()
                            .iter()
                            .map(|(d, &c)| OwnedTermDoc {
                                diagram: d.clone(),
                                coefficient: c,
                            })
                            .collect()
                    })
                    .collect(),
            };
            Ok(Outcome::stdout(to_json(&doc)?))
        }
        Command::Reduce { degree, element } => {
            let terms: Vec<TermDoc> = serde_json::from_str(&read(&element)?)
                .map_err(|e| Error::Parse(e.to_string()))?;
            let mut items = Vec::with_capacity(terms.len());
            for t in terms {
                items.push((JacobiDiagram::try_from(t.diagram)?, t.coefficient));
            }
            let s = space_structure_limited(degree, bound)?;
            let coords = s.reduce(&as_normalize(&items))?;
            let doc = CoordinatesDoc {
                degree,
                torsion: coords
                    .torsion
                    .iter()
                    .map(|(v, m)| TorsionCoordDoc {
                        value: v.to_string(),
                        modulus: m.to_string(),
                    })
                    .collect(),
                free: coords.free.iter().map(|v| v.to_string()).collect(),
            };
            Ok(Outcome::stdout(to_json(&doc)?))
        }
        Command::Contract {
            surgery,
            diagram,
            sigma,
        } => {
            let d = parse_lp(&read(&surgery)?)?;
            let g = parse_diagram(&read(&diagram)?)?;
            let doc = match sigma {
                Some(text) => {
                    let coloration = parse_sigma(&text, g.vertex_count())?;
                    to_json(&EllSigmaDoc {
                        ell_sigma: ell_sigma(&d, &g, &coloration)?,
                    })?
                }
                None => to_json::<Coefficient>(&ell(&d, &g)?)?,
            };
            Ok(Outcome::stdout(doc))
        }
        Command::Bracket { surgery } => {
            let d = parse_lp(&read(&surgery)?)?;
            Ok(Outcome::stdout(to_json(&bracket_limited(&d, bound)?)?))
        }
        Command::Fondjac { max_degree, extra } => {
            let report = verify_fondjac_limited(max_degree, extra, bound)?;
            let code = if report.pass { 0 } else { 3 };
            Ok(Outcome {
                doc: to_json(&report)?,
                out: None,
                code,
            })
        }
        Command::BuildLp { jacobi, n, out } => {
            let g = parse_diagram(&read(&jacobi)?)?;
            let d = lp_from_jacobi(&g, n)?;
            Ok(Outcome {
                doc: to_json(&d)?,
                out,
                code: 0,
            })
        }
        Command::CheckIdentity => {
            let ok = words::free_group_identity_check();
            let doc = to_json(&IdentityDoc {
                identity: "appendix-ihx",
                reduced_length: words::identity_reduced_length(),
            })?;
            Ok(Outcome {
                doc,
                out: None,
                code: if ok { 0 } else { 3 },
            })
        }
    }
}

fn degree_bound(flag: Option<usize>) -> Result<usize> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match env::var("CLOVER_MAX_DEGREE") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("CLOVER_MAX_DEGREE is not a degree: {s:?}"))),
        Err(env::VarError::NotPresent) => Ok(DEFAULT_MAX_DEGREE),
        Err(e) => Err(Error::Parse(e.to_string())),
    }
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses "v0:1,v1:2,..." into a coloration (components are 1-based in
/// the text, 0-based internally).
fn parse_sigma(text: &str, vertices: usize) -> Result<Coloration> {
    if vertices == 0 && text.trim().is_empty() {
        return Coloration::new(Vec::new());
    }
    let mut assignment = vec![usize::MAX; vertices];
    for token in text.split(',') {
        let t = token.trim();
        let (v, c) = t
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("coloration token {t:?} is not v<i>:<c>")))?;
        let v: usize = v
            .trim()
            .strip_prefix('v')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("coloration token {t:?} is not v<i>:<c>")))?;
        let c: usize = c
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("coloration token {t:?} is not v<i>:<c>")))?;
        if v >= vertices {
            return Err(Error::IndexRange(format!(
                "coloration names vertex {v} of {vertices}"
            )));
        }
        if c < 1 {
            return Err(Error::Parse("coloration components are 1-based".into()));
        }
        if assignment[v] != usize::MAX {
            return Err(Error::Parse(format!("vertex {v} colored twice")));
        }
        assignment[v] = c - 1;
    }
    if assignment.contains(&usize::MAX) {
        return Err(Error::Parse("coloration leaves a vertex uncolored".into()));
    }
    Coloration::new(assignment)
}
