//! Command-line surface: parse circuit documents, run gate computations,
//! emit JSON results and DOT diagrams.
//!
//! Exit codes: 0 on success, 1 for validation or parse errors, 2 when a
//! cost guard (basis cap, permanent limit) rejects the request.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Parser, Subcommand};

use condgate::diagram::histories_dot;
use condgate::io;
use condgate::{
    apply_gate, completeness_residual, conditional_operator, outcome_distribution,
    parse_and_compile, AncillaPattern, CircuitDoc, Error, FockBasis, Method, Occupation, Result,
};

#[derive(Parser)]
#[command(
    name = "condgate",
    version,
    about = "Conditional measurement operators for photon-counted linear optical networks"
)]
struct Cli {
    /// On failure, also write a JSON error object to stdout.
    #[arg(long, global = true)]
    json_errors: bool,

    /// Write the result document to this path instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a circuit document into a single checked unitary element.
    Compile {
        /// Circuit document (JSON).
        circuit: PathBuf,
    },

    /// Build the conditional operator for one ancilla pattern.
    Gate {
        /// Circuit document (JSON).
        circuit: PathBuf,

        /// Photon-number truncation of the signal basis.
        #[arg(long, default_value_t = 4)]
        nmax: usize,

        /// Computation method: qsymbol or oracle.
        #[arg(long, default_value = "qsymbol")]
        method: Method,

        /// Ancilla preparation, one photon count per ancilla mode.
        #[arg(long, value_delimiter = ',', value_name = "N,N,...")]
        prepare: Option<Vec<u8>>,

        /// Detected ancilla counts, one per ancilla mode.
        #[arg(long, value_delimiter = ',', value_name = "N,N,...")]
        count: Option<Vec<u8>>,
    },

    /// Condition a state on one ancilla outcome.
    #[command(group(ArgGroup::new("source").required(true).args(["circuit", "operator"])))]
    Apply {
        /// Circuit document (JSON) to build the operator from.
        circuit: Option<PathBuf>,

        /// Precomputed operator document to apply instead of a circuit.
        #[arg(long, value_name = "PATH")]
        operator: Option<PathBuf>,

        /// State document (JSON) for the signal modes.
        #[arg(long, value_name = "PATH")]
        state: PathBuf,

        /// Photon-number truncation of the signal basis.
        #[arg(long, default_value_t = 4, conflicts_with = "operator")]
        nmax: usize,

        /// Computation method: qsymbol or oracle.
        #[arg(long, default_value = "qsymbol", conflicts_with = "operator")]
        method: Method,

        /// Ancilla preparation, one photon count per ancilla mode.
        #[arg(long, value_delimiter = ',', value_name = "N,N,...", conflicts_with = "operator")]
        prepare: Option<Vec<u8>>,

        /// Detected ancilla counts, one per ancilla mode.
        #[arg(long, value_delimiter = ',', value_name = "N,N,...", conflicts_with = "operator")]
        count: Option<Vec<u8>>,
    },

    /// Probability of every count outcome for a fixed preparation.
    Distribution {
        /// Circuit document (JSON).
        circuit: PathBuf,

        /// State document (JSON) for the signal modes.
        #[arg(long, value_name = "PATH")]
        state: PathBuf,

        /// Photon-number truncation of the signal basis.
        #[arg(long, default_value_t = 4)]
        nmax: usize,

        /// Computation method: qsymbol or oracle.
        #[arg(long, default_value = "qsymbol")]
        method: Method,

        /// Ancilla preparation, one photon count per ancilla mode.
        #[arg(long, value_delimiter = ',', value_name = "N,N,...")]
        prepare: Option<Vec<u8>>,
    },

    /// Completeness and unitarity residuals of a circuit.
    Check {
        /// Circuit document (JSON).
        circuit: PathBuf,

        /// Photon-number truncation of the signal basis.
        #[arg(long, default_value_t = 4)]
        nmax: usize,

        /// Computation method: qsymbol or oracle.
        #[arg(long, default_value = "qsymbol")]
        method: Method,

        /// Ancilla preparation, one photon count per ancilla mode.
        #[arg(long, value_delimiter = ',', value_name = "N,N,...")]
        prepare: Option<Vec<u8>>,
    },

    /// Render the single-photon history decomposition as Graphviz DOT.
    Diagram {
        /// Circuit document (JSON); one ancilla mode, prepare (1), count (1).
        circuit: PathBuf,
    },
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|err| Error::Io {
        path: path.display().to_string(),
        message: err.to_string(),
    })
}

/// Comma-list pattern for `k` ancilla modes; absent means vacuum.
fn pattern_from(counts: Option<Vec<u8>>, k: usize) -> Result<Occupation> {
    match counts {
        None => Ok(Occupation::vacuum(k)),
        Some(c) if c.len() == k => Ok(Occupation::new(c)),
        Some(c) => Err(Error::PatternLength { expected: k, got: c.len() }),
    }
}

fn run(command: Command) -> Result<String> {
    match command {
        Command::Compile { circuit } => {
            let (partition, s) = parse_and_compile(&read_file(&circuit)?)?;
            Ok(CircuitDoc::from_unitary(partition, &s).to_json())
        }
        Command::Gate { circuit, nmax, method, prepare, count } => {
            let (partition, s) = parse_and_compile(&read_file(&circuit)?)?;
            let k = partition.n_ancilla();
            let pattern =
                AncillaPattern::new(pattern_from(prepare, k)?, pattern_from(count, k)?);
            let op = conditional_operator(&s, partition, &pattern, nmax, method)?;
            Ok(io::to_pretty_json(&io::operator_doc(&op)))
        }
        Command::Apply { circuit, operator, state, nmax, method, prepare, count } => {
            let op = match (circuit, operator) {
                (Some(path), None) => {
                    let (partition, s) = parse_and_compile(&read_file(&path)?)?;
                    let k = partition.n_ancilla();
                    let pattern =
                        AncillaPattern::new(pattern_from(prepare, k)?, pattern_from(count, k)?);
                    conditional_operator(&s, partition, &pattern, nmax, method)?
                }
                (None, Some(path)) => io::read_operator(&read_file(&path)?)?,
                _ => unreachable!("clap enforces exactly one operator source"),
            };
            let psi = io::read_state(&read_file(&state)?, op.basis().clone())?;
            let outcome = apply_gate(&op, &psi)?;
            Ok(io::to_pretty_json(&io::apply_doc(&outcome)))
        }
        Command::Distribution { circuit, state, nmax, method, prepare } => {
            let (partition, s) = parse_and_compile(&read_file(&circuit)?)?;
            let prepare = pattern_from(prepare, partition.n_ancilla())?;
            let basis = FockBasis::new(partition.n_signal(), nmax)?;
            let psi = io::read_state(&read_file(&state)?, basis)?;
            let distribution = outcome_distribution(&s, partition, &prepare, &psi, nmax, method)?;
            Ok(io::to_pretty_json(&io::distribution_doc(&distribution)))
        }
        Command::Check { circuit, nmax, method, prepare } => {
            let (partition, s) = parse_and_compile(&read_file(&circuit)?)?;
            let prepare = pattern_from(prepare, partition.n_ancilla())?;
            let completeness = completeness_residual(&s, partition, &prepare, nmax, method)?;
            Ok(io::to_pretty_json(&io::CheckDoc {
                completeness_residual: completeness,
                unitarity_residual: s.unitarity_residual(),
            }))
        }
        Command::Diagram { circuit } => {
            let (partition, s) = parse_and_compile(&read_file(&circuit)?)?;
            histories_dot(&s, partition)
        }
    }
}

fn deliver(document: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, document).map_err(|err| Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }),
        None => {
            print!("{document}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
            let _ = err.print();
            return code;
        }
    };
    match run(cli.command).and_then(|document| deliver(&document, cli.out.as_deref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if cli.json_errors {
                print!("{}", io::to_pretty_json(&io::error_doc(&err)));
            }
            ExitCode::from(if err.is_cost_guard() { 2 } else { 1 })
        }
    }
}
