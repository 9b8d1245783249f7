use bfed_cli::commands::{cmd_bounds, cmd_run, cmd_sweep, cmd_verify};
use bfed_cli::{exit_codes, ExperimentConfig};
use bfed_core::verify::Fault;
use bfed_core::Error;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

/// Pseudo-spectral Brinkman-Forchheimer-extended Darcy solver with
/// nudging-based data assimilation and a-priori bound diagnostics.
#[derive(Parser)]
#[command(name = "bfed", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory (overrides run.output).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// RNG seed (overrides run.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one coupled truth/observer experiment.
    Run { config: PathBuf },
    /// Run every point of the configured parameter sweep.
    Sweep { config: PathBuf },
    /// Run the property suite (operator identities, damping and interpolant
    /// inequalities, scheme order) at n = 16.
    Verify {
        /// Test hook: inject a defect to exercise the failure path.
        #[arg(long, value_parser = parse_fault)]
        fault: Option<Fault>,
    },
    /// Evaluate the bounds report from the config without simulating
    /// (requires bounds.m).
    Bounds { config: PathBuf },
}

fn parse_fault(s: &str) -> Result<Fault, String> {
    match s {
        "perturb-leray" => Ok(Fault::PerturbLeray),
        other => Err(format!("unknown fault '{other}' (perturb-leray)")),
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::BlowUp { .. } => exit_codes::BLOW_UP,
        Error::InvalidParam(_)
        | Error::GridMismatch(_)
        | Error::IncompatibleResolution(_)
        | Error::Snapshot(_) => exit_codes::CONFIG_ERROR,
        Error::NonFinite(_) | Error::MissingColumn(_) => exit_codes::PROPERTY_FAILURE,
        Error::Io(_) => exit_codes::CONFIG_ERROR,
    }
}

fn load_config(path: &PathBuf, cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::parse_file(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.output {
        cfg.output = out.display().to_string();
    }
    Ok(cfg)
}

fn main() {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Run { config } => match load_config(config, &cli) {
            Err(e) => {
                eprintln!("config error: {e}");
                exit_codes::CONFIG_ERROR
            }
            Ok(cfg) => {
                let out = PathBuf::from(&cfg.output);
                match cmd_run(&cfg, &out) {
                    Ok(art) => {
                        println!(
                            "run complete: {} rows -> {}",
                            art.rows,
                            art.record_path.display()
                        );
                        exit_codes::OK
                    }
                    Err(e) => {
                        eprintln!("run failed: {e}");
                        exit_code_for(&e)
                    }
                }
            }
        },
        Command::Sweep { config } => match load_config(config, &cli) {
            Err(e) => {
                eprintln!("config error: {e}");
                exit_codes::CONFIG_ERROR
            }
            Ok(cfg) => {
                let out = PathBuf::from(&cfg.output);
                let threads = cli.threads.unwrap_or_else(|| {
                    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
                });
                match cmd_sweep(&cfg, &out, threads) {
                    Ok(art) => {
                        println!(
                            "sweep complete: {} points -> {}",
                            art.rows.len(),
                            art.summary_path.display()
                        );
                        exit_codes::OK
                    }
                    Err(e) => {
                        eprintln!("sweep failed: {e}");
                        exit_code_for(&e)
                    }
                }
            }
        },
        Command::Verify { fault } => {
            let out = cli.output.clone().unwrap_or_else(|| PathBuf::from("out"));
            let seed = cli.seed.unwrap_or(42);
            match cmd_verify(seed, fault.unwrap_or(Fault::None), &out) {
                Ok(art) => {
                    if art.report.all_pass() {
                        println!("verify: all properties pass ({:.1?})", art.elapsed);
                        exit_codes::OK
                    } else {
                        let failing = art.report.first_failure().unwrap();
                        eprintln!("verify failed: {} - {}", failing.name, failing.detail);
                        exit_codes::PROPERTY_FAILURE
                    }
                }
                Err(e) => {
                    eprintln!("verify could not run: {e}");
                    exit_code_for(&e)
                }
            }
        }
        Command::Bounds { config } => match load_config(config, &cli) {
            Err(e) => {
                eprintln!("config error: {e}");
                exit_codes::CONFIG_ERROR
            }
            Ok(cfg) => {
                let out = PathBuf::from(&cfg.output);
                match cmd_bounds(&cfg, &out) {
                    Ok(_) => exit_codes::OK,
                    Err(e) => {
                        eprintln!("bounds evaluation failed: {e}");
                        exit_code_for(&e)
                    }
                }
            }
        },
    };
    std::process::exit(code);
}
