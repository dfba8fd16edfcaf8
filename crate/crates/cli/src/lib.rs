//! Command-line front end for the `effres` pipeline.
//!
//! Every subcommand reads an edge list (from `--input` or stdin), writes
//! JSON (or an edge list for `gen`) to `--output` or stdout, and maps
//! failures to exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | bad arguments, unreadable or malformed input |
//! | 2 | numerical failure (disconnected graph, singular block, residual gate) |
//! | 3 | `verify` ran but at least one check failed |

mod dot;
mod output;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use effres::graph::{cycle_graph, laplacian, parse_edge_list, path_graph, roach_graph, write_edge_list, DirectedGraph};
use effres::kron::{directed_kron, validate_reduction_with_tol};
use effres::partition::bisect;
use effres::symmetrize::{decompose_with, symmetrize, verify_symmetrization, SymmetrizationResult, Tolerances};
use effres::Error;

pub use dot::partition_dot;
pub use output::to_json;

use output::{BisectOutput, DecomposeOutput, KronOutput, LabeledMatrix, VerifyOutput};

#[derive(Debug, Parser)]
#[command(name = "effres", version, about = "Effective-resistance symmetrization of directed graphs")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Edge-list file (`src dst weight` per line); stdin when omitted or `-`.
    #[arg(short, long, global = true)]
    pub input: Option<PathBuf>,

    /// Output file; stdout when omitted or `-`.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    /// Bound on the scaled Lyapunov residual of the symmetrization.
    #[arg(long, global = true, default_value_t = Tolerances::default().residual, value_parser = positive)]
    pub tol_residual: f64,

    /// Bound used by `verify` and by the `kron` validation report.
    #[arg(long, global = true, default_value_t = Tolerances::default().check, value_parser = positive)]
    pub tol_check: f64,

    /// Worker threads for the parallel kernels (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the symmetrized Laplacian.
    Symmetrize,
    /// Emit the effective-resistance matrix.
    Resistance,
    /// Emit H, K, S and the decomposition residuals.
    Decompose,
    /// Spectral bisection with ratio-cut report and bounds.
    Bisect {
        /// Also write the graph with partition coloring as Graphviz DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Directed Kron reduction onto the listed node ids.
    Kron {
        /// Comma-separated node ids to keep.
        #[arg(long, required = true, value_delimiter = ',')]
        keep: Vec<u64>,
    },
    /// Full invariant report; exits 3 if any check fails.
    Verify,
    /// Emit a fixture graph as an edge list.
    Gen {
        #[command(subcommand)]
        fixture: Fixture,
    },
}

#[derive(Debug, Subcommand)]
pub enum Fixture {
    /// Two paths joined by rungs at one end.
    Roach {
        #[arg(long, default_value_t = 8)]
        path_len: usize,
        #[arg(long, default_value_t = 3)]
        rungs: usize,
        #[arg(long)]
        undirected: bool,
    },
    Cycle {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        undirected: bool,
    },
    Path {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        undirected: bool,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("tolerance must be a positive number, got {s}"))
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Numerical(String),
    Verification,
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Verification => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Input(m) => eprintln!("error: {m}"),
                Failure::Numerical(m) => eprintln!("numerical failure: {m}"),
                Failure::Verification => eprintln!("verification failed"),
            }
            f.code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads)
        .build()
        .map_err(|e| Failure::Input(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let c = &cli.common;
    if let Command::Gen { fixture } = &cli.command {
        let g = match *fixture {
            Fixture::Roach { path_len, rungs, undirected } => roach_graph(path_len, rungs, !undirected),
            Fixture::Cycle { nodes, undirected } => cycle_graph(nodes, !undirected),
            Fixture::Path { nodes, undirected } => path_graph(nodes, !undirected),
        }?;
        return emit(c.output.as_deref(), &write_edge_list(&g));
    }

    let g = read_graph(c.input.as_deref())?;
    let l = laplacian(&g);
    let labels = g.labels().to_vec();

    let text = match &cli.command {
        Command::Symmetrize => {
            let sym = gated_symmetrize(&g, c.tol_residual)?;
            to_json(&LabeledMatrix::new(&labels, sym.sym_laplacian.matrix()))
        }
        Command::Resistance => {
            let sym = gated_symmetrize(&g, c.tol_residual)?;
            to_json(&LabeledMatrix::new(&labels, sym.resistance_matrix().matrix()))
        }
        Command::Decompose => {
            let sym = gated_symmetrize(&g, c.tol_residual)?;
            let d = decompose_with(&l, &sym)?;
            to_json(&DecomposeOutput::new(&labels, &d, d.residuals(&l)))
        }
        Command::Bisect { dot } => {
            gated_symmetrize(&g, c.tol_residual)?;
            let b = bisect(&l)?;
            if let Some(path) = dot {
                fs::write(path, partition_dot(&g, &b.partition))
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            }
            to_json(&BisectOutput::new(&labels, &b))
        }
        Command::Kron { keep } => {
            gated_symmetrize(&g, c.tol_residual)?;
            let kept = keep
                .iter()
                .map(|id| {
                    labels
                        .iter()
                        .position(|l| l == id)
                        .ok_or_else(|| Failure::Input(format!("--keep: unknown node id {id}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut r = directed_kron(&l, &kept)?;
            r.validation = validate_reduction_with_tol(&r, &l, c.tol_check);
            to_json(&KronOutput::new(&labels, &r))
        }
        Command::Verify => {
            let sym = symmetrize(&l)?;
            let report = verify_symmetrization(&l, &sym, c.tol_check);
            let text = to_json(&VerifyOutput {
                n: labels.len(),
                labels: &labels,
                tolerance: c.tol_check,
                passed: report.all_passed(),
                report: &report,
            });
            emit(c.output.as_deref(), &text)?;
            return if report.all_passed() { Ok(()) } else { Err(Failure::Verification) };
        }
        Command::Gen { .. } => unreachable!("handled above"),
    };
    emit(c.output.as_deref(), &text)
}

/// Symmetrizes and rejects results whose backward Lyapunov residual
/// `‖L̄Σ + ΣL̄ᵀ - I‖ / (2‖L̄‖‖Σ‖ + ‖I‖)` reaches `tol`.
fn gated_symmetrize(g: &DirectedGraph, tol: f64) -> Result<SymmetrizationResult, Failure> {
    let sym = symmetrize(&laplacian(g))?;
    let k = sym.reduced.nrows() as f64;
    let scale = 2.0 * sym.reduced.norm() * sym.sigma.norm() + k.sqrt();
    let residual = sym.lyapunov_residual() / scale;
    if residual < tol {
        Ok(sym)
    } else {
        Err(Failure::Numerical(format!(
            "Lyapunov residual {residual:e} is not below --tol-residual {tol:e}"
        )))
    }
}

fn read_graph(path: Option<&Path>) -> Result<DirectedGraph, Failure> {
    let text = match path {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
            s
        }
    };
    Ok(parse_edge_list(&text)?)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
        }
        _ => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}
