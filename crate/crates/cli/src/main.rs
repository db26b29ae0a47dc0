use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ctsynth::circuit::{export_qasm_with_notes, parse_qasm, simulate_with_cap, Circuit, DEFAULT_WIDTH_CAP};
use ctsynth::linalg::{FloatMatrix, RingMatrix};
use ctsynth::numtheory::four_square;
use ctsynth::ring::QuadForm;
use ctsynth::synth::{approx_synthesize_with, exact_synthesize_with, SynthOptions, SynthesisReport, FLAG_CONVENTION};
use ctsynth::Error;
use num_bigint::BigUint;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "ctsynth", version, about = "Clifford+T synthesis of small unitaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a ring-format unitary exactly.
    Exact {
        matrix: PathBuf,
        /// Write QASM here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_verify: bool,
        #[arg(long, default_value_t = DEFAULT_WIDTH_CAP)]
        width_cap: usize,
    },
    /// Synthesize a float-format unitary to Frobenius precision eps.
    Approx {
        matrix: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_verify: bool,
        #[arg(long, default_value_t = DEFAULT_WIDTH_CAP)]
        width_cap: usize,
    },
    /// Print the exact unitary of a QASM file as a ring-format matrix.
    Simulate {
        qasm: PathBuf,
        #[arg(long, default_value_t = DEFAULT_WIDTH_CAP)]
        width_cap: usize,
    },
    /// Print gate statistics of a QASM file.
    Stats { qasm: PathBuf },
    /// Write N as a sum of four squares.
    Foursquare {
        n: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Input(String),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::NotUnitary(_)) => 2,
            CliError::Core(Error::Parse { .. }) | CliError::Input(_) => 3,
            CliError::Core(Error::EpsilonOutOfRange(_)) => 4,
            CliError::Core(Error::WidthCapExceeded { .. }) => 5,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    qubits: usize,
    format: String,
    entries: Vec<Value>,
}

#[derive(Serialize, Deserialize)]
struct FloatEntry {
    re: f64,
    im: f64,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_matrix_file(path: &Path, format: &str) -> CliResult<MatrixFile> {
    let file: MatrixFile = serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(e.to_string()))?;
    if file.format != format {
        return Err(CliError::Input(format!("expected format \"{format}\", found \"{}\"", file.format)));
    }
    let expected = 1usize
        .checked_shl(2 * file.qubits as u32)
        .filter(|_| file.qubits < 16)
        .ok_or_else(|| CliError::Input(format!("{} qubits is too many", file.qubits)))?;
    if file.entries.len() != expected {
        return Err(CliError::Input(format!(
            "{} qubits need {expected} entries, found {}",
            file.qubits,
            file.entries.len()
        )));
    }
    Ok(file)
}

fn entry<T: for<'de> Deserialize<'de>>(i: usize, v: Value) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError::Input(format!("entry {i}: {e}")))
}

fn load_ring(path: &Path) -> CliResult<RingMatrix> {
    let file = load_matrix_file(path, "ring")?;
    let dim = 1 << file.qubits;
    let scalars = file
        .entries
        .into_iter()
        .enumerate()
        .map(|(i, v)| entry::<QuadForm>(i, v).map(|q| q.to_scalar()))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(RingMatrix::from_rows(scalars.chunks(dim).map(<[_]>::to_vec).collect())?)
}

fn load_float(path: &Path) -> CliResult<FloatMatrix> {
    let file = load_matrix_file(path, "float")?;
    let dim = 1 << file.qubits;
    let data = file
        .entries
        .into_iter()
        .enumerate()
        .map(|(i, v)| entry::<FloatEntry>(i, v).map(|e| Complex64::new(e.re, e.im)))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(FloatMatrix::from_row_major(dim, data)?)
}

fn load_qasm(path: &Path) -> CliResult<Circuit> {
    Ok(parse_qasm(&read(path)?)?)
}

/// Emits QASM to `out`, or to standard output with the report moved to
/// standard error. The written text is parsed back and must reproduce the
/// circuit.
fn emit(c: &Circuit, report: &SynthesisReport, out: Option<&Path>) -> CliResult<Option<String>> {
    let qasm = export_qasm_with_notes(c, &[FLAG_CONVENTION.to_string()]);
    let back = parse_qasm(&qasm)?;
    if back.gates() != c.gates() || back.roles() != c.roles() {
        return Err(Error::Verification("emitted QASM does not parse back to the circuit".into()).into());
    }
    match out {
        Some(p) => {
            fs::write(p, &qasm).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(Some(report.to_json()))
        }
        None => {
            print!("{qasm}");
            eprintln!("{}", report.to_json());
            Ok(None)
        }
    }
}

fn options(no_verify: bool, width_cap: usize) -> SynthOptions {
    SynthOptions { verify: !no_verify, width_cap }
}

fn run(cli: Cli) -> CliResult<Option<String>> {
    match cli.command {
        Command::Exact { matrix, out, no_verify, width_cap } => {
            let u = load_ring(&matrix)?;
            let (c, report) = exact_synthesize_with(&u, &options(no_verify, width_cap))?;
            emit(&c, &report, out.as_deref())
        }
        Command::Approx { matrix, eps, seed, out, no_verify, width_cap } => {
            let u = load_float(&matrix)?;
            let (c, report) = approx_synthesize_with(&u, eps, seed, &options(no_verify, width_cap))?;
            emit(&c, &report, out.as_deref())
        }
        Command::Simulate { qasm, width_cap } => {
            let c = load_qasm(&qasm)?;
            let u = simulate_with_cap(&c, width_cap)?;
            let entries = u
                .to_quad_rows()
                .into_iter()
                .flatten()
                .map(|q| serde_json::to_value(q).expect("quad form serializes"))
                .collect();
            let file = MatrixFile { qubits: c.width(), format: "ring".into(), entries };
            Ok(Some(serde_json::to_string_pretty(&file).expect("matrix serializes")))
        }
        Command::Stats { qasm } => {
            let c = load_qasm(&qasm)?;
            Ok(Some(serde_json::to_string_pretty(&c.stats()).expect("stats serialize")))
        }
        Command::Foursquare { n, seed } => {
            let big: BigUint = n
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("not a non-negative integer: {n}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fs = four_square(&big, &mut rng);
            if fs.sum_of_squares() != big {
                return Err(Error::Verification(format!("four-square result does not sum to {big}")).into());
            }
            let num = |x: &BigUint| Value::Number(x.to_string().parse().expect("integer is a JSON number"));
            let json = serde_json::json!({
                "n": num(&big),
                "squares": [num(&fs.a), num(&fs.b), num(&fs.c), num(&fs.d)],
            });
            Ok(Some(json.to_string()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            if let Some(text) = out {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
