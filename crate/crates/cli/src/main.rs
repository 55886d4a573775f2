use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use cic_core::apps::{AppError, AppInput, AppSpec, InputError};
use cic_core::bench::{bench, BenchError};
use cic_core::circuit::{to_r1cs, CircuitError};
use cic_core::field::{FieldError, PrimeField};
use cic_core::gas::GasModel;
use cic_core::harness::{run_scenario_in, HarnessError, ScenarioScript};
use cic_core::proof::{
    key_modulus, prove, setup, verify_bytes, MockGroup, ProofError, VerificationKey,
};
use cic_core::qap::{r1cs_to_qap, QapError};

/// Off-chain computation with succinct proofs: prove, verify, simulate the
/// broker exchange, benchmark and estimate on-chain gas.
#[derive(Parser, Debug)]
#[command(name = "cic", version)]
struct Cli {
    /// Seed for inputs and trapdoors.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Prime field modulus; defaults to 2^61 - 1.
    #[arg(long, global = true)]
    modulus: Option<u64>,
    /// Output file (bench CSV, scenario trace) or directory (prove).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Time setup, proving and verification. Specs look like
    /// `matmul:n=8` or `image_match:image=16,kernel=3`; none means the
    /// desk-scale suite.
    Bench {
        specs: Vec<String>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
    /// Run a scenario script.
    Scenario {
        #[command(subcommand)]
        command: ScenarioCommand,
    },
    /// Set up keys for an app input file, prove it, and write `vk.bin`,
    /// `io.toml` and `proof.bin`.
    Prove { input: PathBuf },
    /// Check a proof. Prints OK or REJECTED.
    Verify {
        vk: PathBuf,
        io: PathBuf,
        proof: PathBuf,
    },
    /// Estimate the gas of running an app inside a contract.
    Gas(GasArgs),
}

#[derive(Subcommand, Debug)]
enum ScenarioCommand {
    Run { file: PathBuf },
}

#[derive(Args, Debug)]
struct GasArgs {
    /// matmul, image_match, multipoly or floyd_warshall.
    app: String,
    #[arg(long)]
    n: Option<u64>,
    /// Square image side.
    #[arg(long)]
    image: Option<u64>,
    /// Square kernel side.
    #[arg(long)]
    kernel: Option<u64>,
    #[arg(long)]
    width: Option<u64>,
    #[arg(long)]
    height: Option<u64>,
    #[arg(long)]
    kernel_width: Option<u64>,
    #[arg(long)]
    kernel_height: Option<u64>,
    #[arg(long)]
    degree: Option<u64>,
    #[arg(long)]
    vars: Option<u64>,
    #[arg(long)]
    bitwidth: Option<u64>,
    /// Block gas limit to compare against.
    #[arg(long)]
    block_limit: Option<u64>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    App(#[from] AppError),
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Qap(#[from] QapError),
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("scenario {0}")]
    Harness(#[from] HarnessError),
    #[error("{path}: {reason}")]
    BadFile { path: PathBuf, reason: String },
}

/// Public inputs followed by public outputs.
#[derive(Serialize, Deserialize)]
struct IoFile {
    io: Vec<u64>,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    String::from_utf8(read(path)?).map_err(|_| CliError::BadFile {
        path: path.into(),
        reason: "not UTF-8".into(),
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

/// Writes to `--out` if given, else prints.
fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn field(modulus: Option<u64>) -> Result<PrimeField, CliError> {
    Ok(match modulus {
        Some(p) => PrimeField::new(p)?,
        None => PrimeField::default(),
    })
}

fn parse_spec(text: &str) -> Result<AppSpec, CliError> {
    let (app, params) = text.split_once(':').unwrap_or((text, ""));
    let mut pairs = Vec::new();
    for kv in params.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected key=value in `{text}`")))?;
        let v: u64 = v
            .parse()
            .map_err(|_| CliError::Usage(format!("`{k}` must be a number in `{text}`")))?;
        pairs.push((k.to_string(), v));
    }
    let spec = AppSpec::from_params(app, |key| pairs.iter().find(|p| p.0 == key).map(|p| p.1))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    match pairs.iter().find(|(k, _)| !known_param(k)) {
        Some((k, _)) => Err(CliError::Usage(format!(
            "unknown parameter `{k}` in `{text}`"
        ))),
        None => Ok(spec),
    }
}

fn known_param(key: &str) -> bool {
    matches!(
        key,
        "n" | "image"
            | "kernel"
            | "width"
            | "height"
            | "kernel_width"
            | "kernel_height"
            | "degree"
            | "vars"
            | "bitwidth"
    )
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Bench { specs, reps } => {
            let field = field(cli.modulus)?;
            let specs = if specs.is_empty() {
                AppSpec::desk_suite().to_vec()
            } else {
                specs
                    .iter()
                    .map(|s| parse_spec(s))
                    .collect::<Result<_, _>>()?
            };
            let report = bench(&specs, reps, cli.seed, field)?;
            print!("{}", report.to_table());
            if let Some(p) = out {
                write(p, report.to_csv().as_bytes())?;
            }
        }
        Command::Scenario {
            command: ScenarioCommand::Run { file },
        } => {
            let script = ScenarioScript::parse(&read_text(&file)?)?;
            let trace = run_scenario_in(field(cli.modulus)?, &script, cli.seed)?;
            emit(out, &trace.to_text())?;
        }
        Command::Prove { input } => {
            let mut app = AppInput::parse(&read_text(&input)?)?;
            if cli.modulus.is_some() {
                app.modulus = cli.modulus;
            }
            app.validate()?;
            let field = app.field()?;
            let circuit = app.spec().build(field)?;
            let qap = r1cs_to_qap(&to_r1cs(&circuit)?)?;
            let (ek, vk) = setup(&MockGroup::new(field), &qap, cli.seed)?;
            let witness = circuit.evaluate_u64(&app.inputs(), &[])?;
            let proof = prove(&ek, &qap, &witness)?;
            let io: Vec<u64> = witness
                .public_io(qap.public_io_range())
                .iter()
                .map(|v| v.value())
                .collect();
            let dir = out.unwrap_or(Path::new("."));
            std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.into(),
                source,
            })?;
            let io_text = toml::to_string(&IoFile { io }).expect("integer lists serialize");
            for (name, bytes) in [
                ("vk.bin", vk.to_bytes()),
                ("io.toml", io_text.into_bytes()),
                ("proof.bin", proof.to_bytes()),
            ] {
                let path = dir.join(name);
                write(&path, &bytes)?;
                println!("wrote {}", path.display());
            }
        }
        Command::Verify { vk, io, proof } => {
            let vk_bytes = read(&vk)?;
            let modulus = key_modulus(&vk_bytes).map_err(ProofError::MalformedKey)?;
            if let Some(p) = cli.modulus {
                if p != modulus {
                    return Err(CliError::BadFile {
                        path: vk.clone(),
                        reason: format!("key is over modulus {modulus}, not {p}"),
                    });
                }
            }
            let field = PrimeField::new(modulus)?;
            let key = VerificationKey::from_bytes(&MockGroup::new(field), &vk_bytes)?;
            let io_file: IoFile =
                toml::from_str(&read_text(&io)?).map_err(|e| CliError::BadFile {
                    path: io.clone(),
                    reason: e.message().to_string(),
                })?;
            let values = io_file
                .io
                .iter()
                .map(|&v| {
                    if v < modulus {
                        Ok(field.element(v))
                    } else {
                        Err(CliError::BadFile {
                            path: io.clone(),
                            reason: format!("{v} is not below the modulus"),
                        })
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            let accepted = match verify_bytes(&key, &values, &read(&proof)?) {
                Ok(ok) => ok,
                Err(ProofError::IoLengthMismatch { .. }) => false,
                Err(e) => return Err(e.into()),
            };
            if accepted {
                println!("OK");
            } else {
                println!("REJECTED");
                return Ok(ExitCode::from(1));
            }
        }
        Command::Gas(args) => {
            let params = [
                ("n", args.n),
                ("image", args.image),
                ("kernel", args.kernel),
                ("width", args.width),
                ("height", args.height),
                ("kernel_width", args.kernel_width),
                ("kernel_height", args.kernel_height),
                ("degree", args.degree),
                ("vars", args.vars),
                ("bitwidth", args.bitwidth),
            ];
            let spec = AppSpec::from_params(&args.app, |key| {
                params.iter().find(|p| p.0 == key).and_then(|p| p.1)
            })
            .map_err(|e| CliError::Usage(e.to_string()))?;
            let mut model = GasModel::default();
            if let Some(limit) = args.block_limit {
                if limit == 0 {
                    return Err(CliError::Usage("block limit must be positive".into()));
                }
                model.block_gas_limit = limit;
            }
            let gas = model.estimate(&spec);
            println!("app: {} {}", spec.name(), spec.size_label());
            println!("estimate: {gas} gas");
            println!("block limit: {}", model.block_gas_limit);
            println!("ratio: {:.2}x", model.block_ratio(&spec));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
