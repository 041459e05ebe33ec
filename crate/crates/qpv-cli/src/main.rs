//! Command-line front end for the verification library.
//!
//! Exit codes: 0 on success (including an accepting verification run), 1 when
//! a verification run rejects, 2 on any input or usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qpv::pauli::StabilizerGroup;
use qpv::simulate::{RunConfig, RunResult, SamplingMode};
use qpv::strategy::AapvStrategy;
use qpv::wire;

#[derive(Parser)]
#[command(
    name = "qpv",
    version,
    about = "Build, analyze, convert, and simulate quantum-process verification strategies"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a verification strategy and print it as JSON
    Build {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Print the spectral gap and related figures of a strategy
    Gap {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compute the round budget for a target infidelity and confidence
    Plan {
        #[command(flatten)]
        source: Source,
        /// Infidelity threshold to certify against
        #[arg(long)]
        epsilon: f64,
        /// Acceptable worst-case failure probability
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Rewrite a strategy in prepare-and-measure form
    Convert {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run Monte Carlo verification rounds against a process
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Process description JSON to verify
        #[arg(long)]
        process: PathBuf,
        /// Number of accepted-into-the-record rounds
        #[arg(long)]
        rounds: u64,
        /// RNG seed; equal seeds reproduce runs byte for byte
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Round sampling route
        #[arg(long, value_enum, default_value_t = Mode::Projector)]
        mode: Mode,
        /// Verification family to execute
        #[arg(long, value_enum, default_value_t = Via::Aapv)]
        via: Via,
        /// Infidelity threshold for the confidence column
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Report analytic and searched worst-case pass probabilities
    Oracle {
        #[command(flatten)]
        source: Source,
        /// Infidelity of the hypothetical adversary
        #[arg(long)]
        epsilon: f64,
        /// Random-search restarts per route
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Verify a measurement description against a projective target
    VerifyMeas {
        /// Measurement description JSON (list of effects)
        povm: PathBuf,
        /// Projective target JSON; computational basis when omitted
        #[arg(long)]
        target: Option<PathBuf>,
        /// Infidelity threshold to certify against
        #[arg(long)]
        epsilon: f64,
        /// Acceptable worst-case failure probability
        #[arg(long)]
        delta: f64,
        /// Override the planned round count
        #[arg(long)]
        rounds: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Summarize a bundle of finished runs as a table or CSV
    Report {
        /// Bundle JSON with a `runs` list
        bundle: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct Source {
    /// Named protocol, e.g. "cnot", "full_group:clifford3", "hypergraph_cz:3"
    #[arg(long)]
    protocol: Option<String>,
    /// Clifford circuit JSON whose channel becomes the verification target
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Strategy description JSON
    #[arg(value_name = "STRATEGY")]
    strategy: Option<PathBuf>,
}

#[derive(Args)]
struct OutArgs {
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Projector,
    Local,
}

#[derive(Clone, Copy, ValueEnum)]
enum Via {
    Aapv,
    Pmpv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn read_json(path: &Path) -> Result<Value, String> {
    wire::parse_json(&read_file(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_strategy(source: &Source) -> Result<AapvStrategy, String> {
    let picks =
        source.protocol.is_some() as u8 + source.circuit.is_some() as u8 + source.strategy.is_some() as u8;
    if picks != 1 {
        return Err("choose exactly one strategy source: --protocol, --circuit, or a strategy file".into());
    }
    if let Some(name) = &source.protocol {
        return qpv::protocols::default_registry().build(name).map_err(|e| e.to_string());
    }
    if let Some(path) = &source.circuit {
        let circuit = wire::circuit_from_json(&read_json(path)?).map_err(|e| e.to_string())?;
        let gens = qpv::pauli::choi_stabilizers(&circuit).map_err(|e| e.to_string())?;
        let group = StabilizerGroup::new(2 * circuit.n(), gens).map_err(|e| e.to_string())?;
        return qpv::protocols::generator_protocol(&group, circuit.n()).map_err(|e| e.to_string());
    }
    let path = source.strategy.as_ref().unwrap();
    wire::strategy_from_json(&read_json(path)?).map_err(|e| e.to_string())
}

fn emit(text: &str, out: &OutArgs) -> Result<(), String> {
    match &out.out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => {
            fs::write(path, format!("{text}\n")).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
    }
}

fn canonical(v: &Value) -> String {
    wire::canonical_json(v)
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

const CSV_HEADER: &str = "protocol,noise,N,passes,rate,delta_bound";

fn csv_row(protocol: &str, noise: &str, r: &RunResult, delta_bound: Option<f64>) -> String {
    format!(
        "{protocol},{noise},{},{},{},{}",
        r.rounds_executed,
        r.passes,
        float(r.empirical_pass_rate),
        delta_bound.map(float).unwrap_or_default()
    )
}

fn run(cmd: Cmd) -> Result<ExitCode, String> {
    match cmd {
        Cmd::Build { source, out } => {
            let s = load_strategy(&source)?;
            emit(&canonical(&wire::strategy_to_json(&s)), &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Gap { source, out } => {
            let s = load_strategy(&source)?;
            let gap = s.spectral_gap().map_err(|e| e.to_string())?;
            let v = json!({
                "gap": gap,
                "lambda2": 1.0 - gap,
                "n_ancilla": s.n_ancilla(),
                "n_system": s.n_system(),
                "n_tests": s.tests().len(),
            });
            emit(&canonical(&v), &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Plan { source, epsilon, delta, out } => {
            let s = load_strategy(&source)?;
            let nu = s.spectral_gap().map_err(|e| e.to_string())?;
            let plan = qpv::strategy::plan_samples(epsilon, delta, nu).map_err(|e| e.to_string())?;
            let v = json!({
                "delta": plan.delta,
                "epsilon": plan.epsilon,
                "n": plan.n,
                "n_approx": plan.n_approx,
                "nu": plan.nu,
            });
            emit(&canonical(&v), &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Convert { source, out } => {
            let s = load_strategy(&source)?;
            let x = qpv::pmpv::convert(&s).map_err(|e| e.to_string())?;
            emit(&canonical(&wire::pmpv_to_json(&x)), &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Simulate { source, process, rounds, seed, mode, via, epsilon, format, out } => {
            let s = load_strategy(&source)?;
            let e = wire::process_from_json(&read_json(&process)?).map_err(|e| e.to_string())?;
            let sampling = match mode {
                Mode::Projector => SamplingMode::Projector,
                Mode::Local => SamplingMode::LocalSequential,
            };
            let cfg = RunConfig::new(rounds, seed, sampling).map_err(|e| e.to_string())?;
            let (protocol, result) = match via {
                Via::Aapv => ("aapv", qpv::simulate::simulate_aapv(&s, &e, &cfg).map_err(|e| e.to_string())?),
                Via::Pmpv => {
                    let x = qpv::pmpv::convert(&s).map_err(|e| e.to_string())?;
                    ("pmpv", qpv::simulate::simulate_pmpv(&x, &e, &cfg).map_err(|e| e.to_string())?)
                }
            };
            let nu = s.spectral_gap().map_err(|e| e.to_string())?;
            let delta_bound = match epsilon {
                Some(eps) => Some(result.delta_bound_at(eps, nu).map_err(|e| e.to_string())?),
                None => None,
            };
            let noise = process.file_stem().and_then(|s| s.to_str()).unwrap_or("process").to_string();
            let text = match format {
                Format::Json => {
                    let mut v = wire::run_result_to_json(&result);
                    let obj = v.as_object_mut().unwrap();
                    obj.insert("delta_bound".into(), json!(delta_bound));
                    obj.insert("gap".into(), json!(nu));
                    obj.insert("noise".into(), json!(noise));
                    obj.insert("protocol".into(), json!(protocol));
                    obj.insert("seed".into(), json!(seed));
                    canonical(&v)
                }
                Format::Csv => format!("{CSV_HEADER}\n{}", csv_row(protocol, &noise, &result, delta_bound)),
            };
            emit(&text, &out)?;
            Ok(if result.verdict { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Oracle { source, epsilon, trials, seed, out } => {
            let s = load_strategy(&source)?;
            let report = qpv::oracle::full_report(&s, epsilon, trials, seed).map_err(|e| e.to_string())?;
            emit(&canonical(&wire::report_to_json(&report)), &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::VerifyMeas { povm, target, epsilon, delta, rounds, seed, out } => {
            let m = wire::povm_from_json(&read_json(&povm)?).map_err(|e| e.to_string())?;
            let t = match &target {
                Some(path) => wire::projective_target_from_json(&read_json(path)?).map_err(|e| e.to_string())?,
                None => qpv::meas::ProjectiveTarget::computational(m.effects()[0].dims().to_vec())
                    .map_err(|e| e.to_string())?,
            };
            let planned = qpv::meas::plan_measurement_samples(epsilon, delta).map_err(|e| e.to_string())?;
            let n = rounds.unwrap_or(planned);
            let result = qpv::meas::verify_measurement(&m, &t, n, seed).map_err(|e| e.to_string())?;
            let fidelity = qpv::meas::measurement_fidelity(&m, &t).map_err(|e| e.to_string())?;
            let delta_bound = result.delta_bound_at(epsilon, 1.0).map_err(|e| e.to_string())?;
            let mut v = wire::run_result_to_json(&result);
            let obj = v.as_object_mut().unwrap();
            obj.insert("delta_bound".into(), json!(delta_bound));
            obj.insert("fidelity".into(), json!(fidelity));
            obj.insert("planned_rounds".into(), json!(planned));
            emit(&canonical(&v), &out)?;
            Ok(if result.verdict { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Report { bundle, format, out } => {
            let v = read_json(&bundle)?;
            let runs = v
                .get("runs")
                .and_then(|r| r.as_array())
                .ok_or("field `runs` is missing or not an array")?;
            let mut rows = Vec::new();
            for (i, entry) in runs.iter().enumerate() {
                let label = |key: &str| -> Result<String, String> {
                    Ok(entry
                        .get(key)
                        .and_then(|x| x.as_str())
                        .ok_or(format!("run {i}: field `{key}` is missing"))?
                        .to_string())
                };
                let protocol = label("protocol")?;
                let noise = label("noise")?;
                let result = wire::run_result_from_json(
                    entry.get("result").ok_or(format!("run {i}: field `result` is missing"))?,
                )
                .map_err(|e| format!("run {i}: {e}"))?;
                let delta_bound = match (entry.get("epsilon").and_then(|x| x.as_f64()), entry.get("nu").and_then(|x| x.as_f64())) {
                    (Some(eps), Some(nu)) => {
                        Some(result.delta_bound_at(eps, nu).map_err(|e| format!("run {i}: {e}"))?)
                    }
                    _ => None,
                };
                rows.push((protocol, noise, result, delta_bound));
            }
            let text = match format {
                Format::Csv => {
                    let mut lines = vec![CSV_HEADER.to_string()];
                    lines.extend(rows.iter().map(|(p, n, r, d)| csv_row(p, n, r, *d)));
                    lines.join("\n")
                }
                Format::Json => {
                    let items: Vec<Value> = rows
                        .iter()
                        .map(|(p, n, r, d)| {
                            let mut v = wire::run_result_to_json(r);
                            let obj = v.as_object_mut().unwrap();
                            obj.insert("delta_bound".into(), json!(d));
                            obj.insert("noise".into(), json!(n));
                            obj.insert("protocol".into(), json!(p));
                            v
                        })
                        .collect();
                    canonical(&json!({ "runs": items }))
                }
            };
            emit(&text, &out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
