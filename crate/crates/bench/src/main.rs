use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vqnhite_bench::{
    emit_plot, persist, run_benchmark, run_suite, BenchError, FieldMode, FieldSpec, MethodChoice, ModeChoice,
    RunConfig, Suite,
};
use vqnhite_core::hybrid::InitTarget;
use vqnhite_core::Layout;

#[derive(Parser)]
#[command(
    name = "vqnhite",
    version,
    about = "Imaginary-time evolution benchmarks: VITE vs the hybrid NN ansatz"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs one sample and prints its trajectory as CSV.
    Evolve(RunArgs),
    /// Runs many samples and writes data.csv, summary.csv and config.toml.
    Benchmark(RunArgs),
    /// Renders a persisted trace as SVG.
    Plot {
        /// Trace directory or its data.csv.
        trace: PathBuf,
        #[arg(long, short, default_value = "fidelity.svg")]
        out: PathBuf,
    },
    /// Runs a verification suite: gradients, oracles, hadamard or convergence.
    Verify { suite: String },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 6)]
    n_qubits: usize,
    /// Exchange coupling J.
    #[arg(long = "j", default_value_t = -1.0, allow_hyphen_values = true)]
    coupling: f64,
    /// Field seed (`42`, `seed=42`) or explicit comma-separated values.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    fields: FieldSpec,
    #[arg(long, value_enum, default_value_t = FieldMode::Fixed)]
    field_mode: FieldMode,
    /// `nn` or `all`.
    #[arg(long, default_value = "nn")]
    ansatz: Layout,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, default_value_t = 0.1)]
    dbeta: f64,
    #[arg(long, default_value_t = 6.0)]
    beta_max: f64,
    #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
    method: MethodChoice,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    init_iters: usize,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 1e-4)]
    ridge: f64,
    #[arg(long, value_enum, default_value_t = ModeChoice::Exact)]
    mode: ModeChoice,
    /// Shots per circuit in hadamard mode; 0 uses exact probabilities.
    #[arg(long, default_value_t = 0)]
    shots: u64,
    /// Initialization target: `exact` or `taylor-target`.
    #[arg(long, default_value = "exact")]
    init_target: String,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

impl RunArgs {
    fn config(self) -> Result<RunConfig, BenchError> {
        let init_target = match self.init_target.as_str() {
            "exact" => InitTarget::Exact,
            "taylor-target" => InitTarget::TaylorTarget,
            other => return Err(BenchError::Config(format!("unknown init target {other:?}"))),
        };
        let c = RunConfig {
            n_qubits: self.n_qubits,
            coupling: self.coupling,
            fields: self.fields,
            field_mode: self.field_mode,
            layout: self.ansatz,
            depth: self.depth,
            dbeta: self.dbeta,
            beta_max: self.beta_max,
            samples: self.samples,
            seed: self.seed,
            method: self.method,
            init_iters: self.init_iters,
            learning_rate: self.lr,
            ridge: self.ridge,
            mode: self.mode,
            shots: self.shots,
            init_target,
            out: self.out,
            workers: self.workers,
        };
        c.validate()?;
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<ExitCode, BenchError> {
    match cli.command {
        Command::Evolve(args) => {
            let config = RunConfig {
                samples: 1,
                ..args.config()?
            };
            let trace = run_benchmark(&config)?;
            if let Some(f) = trace.metadata.failures.first() {
                return Err(BenchError::Config(format!("{} failed: {}", f.method, f.error)));
            }
            println!("method,beta,fidelity,energy");
            for r in &trace.records {
                println!("{},{},{},{}", r.method, r.beta, r.fidelity, r.energy);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Benchmark(args) => {
            let config = args.config()?;
            let trace = run_benchmark(&config)?;
            for f in &trace.metadata.failures {
                eprintln!("sample {} ({}) failed: {}", f.sample, f.method, f.error);
            }
            for p in persist(&trace, &config.out)? {
                println!("wrote {}", p.display());
            }
            if trace.failed_fraction() > 0.1 {
                let failed = (trace.failed_fraction() * config.samples as f64).round() as usize;
                return Err(BenchError::TooManyFailures {
                    failed,
                    total: config.samples,
                });
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot { trace, out } => {
            emit_plot(&trace, &out)?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            let suite: Suite = suite.parse()?;
            let checks = run_suite(suite)?;
            for c in &checks {
                println!("{c}");
            }
            let ok = checks.iter().all(|c| c.passed);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e @ BenchError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
