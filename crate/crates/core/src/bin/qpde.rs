use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qpde::error::{Error, Result};
use qpde::exec::init_thread_pool;
use qpde::experiment::{cmd_noise, cmd_solve, cmd_sweep, run_validation, ExperimentConfig, Fault, Summary};
use qpde::problems::Problem;

/// Variational ground-state solver for one-dimensional Schrödinger problems on a simulated
/// quantum register.
#[derive(Parser)]
#[command(name = "qpde", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize a single configuration and write the optimal parameters.
    Solve(RunArgs),
    /// Run the Cartesian product of qubits x optimizers x ansatzes x shots.
    Sweep(RunArgs),
    /// Sweep T1 at fixed parameters and extrapolate to zero noise.
    Noise(RunArgs),
    /// Run the built-in self checks.
    Validate {
        /// Deliberately break one convention to confirm the checks catch it.
        #[arg(long, value_name = "FAULT")]
        inject: Option<Fault>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// harmonic_oscillator, transmon or flux_qubit.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long, value_delimiter = ',')]
    qubits: Option<Vec<usize>>,
    /// zgr, ry1, ry2, ...
    #[arg(long, value_delimiter = ',')]
    ansatz: Option<Vec<String>>,
    /// adam, spsa or nelder-mead.
    #[arg(long, value_delimiter = ',')]
    optimizer: Option<Vec<String>>,
    /// Shots per energy estimate; 0 means exact expectation values.
    #[arg(long, value_delimiter = ',')]
    shots: Option<Vec<u64>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => {
                let name = self
                    .problem
                    .as_deref()
                    .ok_or_else(|| Error::config("problem", "required without --config"))?;
                let problem = parse_problem(name)?;
                let qubits = self
                    .qubits
                    .clone()
                    .ok_or_else(|| Error::config("qubits", "required without --config"))?;
                ExperimentConfig::new(problem, qubits)
            }
        };
        if let Some(name) = &self.problem {
            cfg.problem = parse_problem(name)?;
        }
        if let Some(q) = self.qubits {
            cfg.qubits = q;
        }
        if let Some(a) = self.ansatz {
            cfg.ansatz = a;
        }
        if let Some(o) = self.optimizer {
            cfg.optimizer = o;
        }
        if let Some(s) = self.shots {
            cfg.shots = s;
        }
        if let Some(r) = self.reps {
            cfg.repetitions = r;
        }
        if let Some(s) = self.seed {
            cfg.base_seed = s;
        }
        if let Some(o) = self.out {
            cfg.output = o;
        }
        Ok(cfg)
    }
}

fn parse_problem(name: &str) -> Result<Problem> {
    Problem::from_name(name).ok_or_else(|| Error::config("problem", format!("unknown problem '{name}'")))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.3e}"))
}

fn print_summary(summary: &Summary) {
    println!(
        "{:<28} {:>5} {:>5} {:>11} {:>11} {:>11} {:>11}",
        "cell", "runs", "fail", "1-F^n", "1-F^inf", "eps", "eps_exact"
    );
    for c in &summary.cells {
        println!(
            "{:<28} {:>5} {:>5} {:>11} {:>11} {:>11} {:>11}",
            c.label,
            c.runs,
            c.failures,
            fmt_opt(c.infidelity_n.map(|a| a.median)),
            fmt_opt(c.infidelity_inf.map(|a| a.median)),
            fmt_opt(c.epsilon.map(|a| a.median)),
            fmt_opt(c.epsilon_exact.map(|a| a.median)),
        );
    }
    println!("config hash {}", summary.config_hash);
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Solve(args) => {
            let cfg = args.into_config()?;
            print_summary(&cmd_solve(&cfg)?);
            println!("wrote {}", cfg.output.display());
        }
        Command::Sweep(args) => {
            let cfg = args.into_config()?;
            print_summary(&cmd_sweep(&cfg)?);
            println!("wrote {}", cfg.output.display());
        }
        Command::Noise(args) => {
            let cfg = args.into_config()?;
            let report = cmd_noise(&cfg)?;
            println!(
                "{:>10} {:>14} {:>12} {:>11}",
                "T1 [us]", "mean energy", "std", "eps"
            );
            for p in &report.points {
                println!(
                    "{:>10.1} {:>14.6} {:>12.3e} {:>11.3e}",
                    p.t1_us, p.mean_energy, p.std_energy, p.epsilon
                );
            }
            println!(
                "extrapolated E0 {:.6} (eps {:.3e}); best raw point eps {:.3e}; noiseless eps {:.3e}",
                report.fit.e0,
                report.epsilon_extrapolated,
                report.epsilon_best_point,
                report.epsilon_noiseless
            );
            println!("wrote {}", cfg.output.display());
        }
        Command::Validate { inject } => {
            let report = run_validation(inject);
            print!("{report}");
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(threads) = std::env::var("QPDE_THREADS").ok().and_then(|v| v.parse().ok()) {
        init_thread_pool(threads);
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
