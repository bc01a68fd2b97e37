//! Thin command line over the library: receiver simulation, a one-shot
//! beamforming solve, threshold sweeps, and feasibility checks. All
//! substance lives in the library; this file only parses arguments, loads
//! JSON configs, and serializes results.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use swipt::experiment::trial_seed;
use swipt::units::watts_to_dbm;
use swipt::{
    feasibility_test, generate_channels, optimize, run_receiver_chain, run_sweep, sweep_csv,
    sweep_json, BasebandMessage, ExperimentConfig, LinkConfig, OptimizeError, OptimizeOptions,
    RecoveredSolution, RecoveryMethod,
};

#[derive(Parser)]
#[command(name = "swipt", version, about = "SWIPT receiver simulation and downlink beamforming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Push a random four-phase message through the diplexer receiver chain
    /// and report the path powers, splitting factor, harvest, and SNR.
    SimulateReceiver {
        /// Link configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Message symbols to simulate.
        #[arg(long, default_value_t = 400)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Also dump the received waveform as time,value CSV.
        #[arg(long)]
        dump_trace: Option<PathBuf>,
    },
    /// Solve one beamforming instance: the first channel realization at the
    /// first sweep point of the experiment config.
    Optimize {
        /// Experiment configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Sweep one constraint axis, averaging over channel realizations.
    Sweep {
        /// Experiment configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Rank test of the SINR thresholds against every channel realization.
    Feasibility {
        /// Experiment configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

/// Invalid input exits with 2, runtime failures with 1.
enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Config(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Runtime(msg) => {
                eprintln!("error: {msg}");
                ExitCode::FAILURE
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => err.report(),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::SimulateReceiver {
            config,
            samples,
            seed,
            out,
            format,
            dump_trace,
        } => simulate_receiver_cmd(&config, samples, seed, out.as_deref(), format, dump_trace.as_deref()),
        Command::Optimize {
            config,
            seed,
            out,
            format,
        } => optimize_cmd(&config, seed, out.as_deref(), format),
        Command::Sweep {
            config,
            seed,
            out,
            format,
        } => sweep_cmd(&config, seed, out.as_deref(), format),
        Command::Feasibility {
            config,
            seed,
            out,
            format,
        } => feasibility_cmd(&config, seed, out.as_deref(), format),
    }
}

fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
                Ok(()) => Ok(()),
                // A downstream reader hanging up mid-stream is a normal
                // way for output to end, not a failure.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(CliError::Runtime(format!("cannot write to stdout: {e}"))),
            }
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    text
}

fn simulate_receiver_cmd(
    config: &Path,
    samples: usize,
    seed: u64,
    out: Option<&Path>,
    format: Format,
    dump_trace: Option<&Path>,
) -> Result<(), CliError> {
    let cfg: LinkConfig = load_config(config)?;
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let msg = BasebandMessage::qpsk(samples, cfg.bandwidth_b, seed)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let chain = run_receiver_chain(&cfg, &msg, seed).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(path) = dump_trace {
        let mut text = String::from("time,value\n");
        let rate = chain.received.sample_rate();
        for (i, &v) in chain.received.samples().iter().enumerate() {
            text.push_str(&format!("{},{}\n", i as f64 / rate, v));
        }
        emit(Some(path), &text)?;
    }
    let report = &chain.report;
    let text = match format {
        Format::Json => pretty(&report.to_json()),
        Format::Csv => format!(
            "power_l,power_h,rho,q_harvested,snr\n{},{},{},{},{}\n",
            report.power_l, report.power_h, report.rho, report.q_harvested, report.snr
        ),
    };
    emit(out, &text)
}

fn solution_json(solution: &RecoveredSolution) -> serde_json::Value {
    let beams: Vec<Vec<[f64; 2]>> = solution
        .beamformers
        .vectors()
        .iter()
        .map(|v| v.iter().map(|c| [c.re, c.im]).collect())
        .collect();
    serde_json::json!({
        "total_power_w": solution.total_power,
        "total_power_dbm": watts_to_dbm(solution.total_power),
        "sdp_bound_w": solution.sdp_bound,
        "sdp_objective_w": solution.sdp_objective,
        "gap": solution.gap,
        "iterations": solution.iterations,
        "rank_one": solution.all_rank_one(),
        "eigen_ratios": solution.eigen_ratio,
        "sinr_margins": solution.sinr_margins,
        "eh_margins": solution.eh_margins,
        "method": method_name(solution.method),
        "beamformers": beams,
    })
}

fn method_name(method: RecoveryMethod) -> &'static str {
    match method {
        RecoveryMethod::Evd => "evd",
        RecoveryMethod::Randomization => "randomization",
    }
}

fn optimize_cmd(
    config: &Path,
    seed: Option<u64>,
    out: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let mut cfg: ExperimentConfig = load_config(config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let channels = generate_channels(&cfg, cfg.seed);
    let thresholds = cfg
        .thresholds_at(cfg.sweep.values[0])
        .map_err(|e| CliError::Config(e.to_string()))?;
    let options = OptimizeOptions {
        seed: trial_seed(cfg.seed, 0, 0),
        ..OptimizeOptions::default()
    };
    let solution = optimize(&channels[0], &thresholds, &options).map_err(|e| match e {
        OptimizeError::Model(inner) => CliError::Config(inner.to_string()),
        other => CliError::Runtime(other.to_string()),
    })?;
    let text = match format {
        Format::Json => pretty(&solution_json(&solution)),
        Format::Csv => format!(
            "total_power_w,total_power_dbm,sdp_bound_w,gap,rank_one,iterations,method\n{},{},{},{},{},{},{}\n",
            solution.total_power,
            watts_to_dbm(solution.total_power),
            solution.sdp_bound,
            solution.gap,
            solution.all_rank_one(),
            solution.iterations,
            method_name(solution.method),
        ),
    };
    emit(out, &text)
}

fn sweep_cmd(
    config: &Path,
    seed: Option<u64>,
    out: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let mut cfg: ExperimentConfig = load_config(config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let rows = run_sweep(&cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
    let text = match format {
        Format::Csv => sweep_csv(&rows),
        Format::Json => pretty(&sweep_json(&rows)),
    };
    emit(out, &text)
}

fn feasibility_cmd(
    config: &Path,
    seed: Option<u64>,
    out: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let mut cfg: ExperimentConfig = load_config(config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let channels = generate_channels(&cfg, cfg.seed);
    let thresholds = cfg
        .thresholds_at(cfg.sweep.values[0])
        .map_err(|e| CliError::Config(e.to_string()))?;
    let reports: Vec<_> = channels
        .iter()
        .map(|ch| feasibility_test(ch, &thresholds))
        .collect();
    let text = match format {
        Format::Csv => {
            let mut text = String::from("trial,threshold_sum,rank,feasible\n");
            for (trial, report) in reports.iter().enumerate() {
                text.push_str(&format!(
                    "{trial},{},{},{}\n",
                    report.threshold_sum, report.rank, report.feasible
                ));
            }
            text
        }
        Format::Json => {
            let rows: Vec<_> = reports
                .iter()
                .enumerate()
                .map(|(trial, report)| {
                    serde_json::json!({
                        "trial": trial,
                        "threshold_sum": report.threshold_sum,
                        "rank": report.rank,
                        "feasible": report.feasible,
                    })
                })
                .collect();
            pretty(&serde_json::json!(rows))
        }
    };
    emit(out, &text)
}
