use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jasa_harness::sweep::thread_cap;
use jasa_harness::validate::validate;
use jasa_harness::{
    run_sweep, solve, write_csv, ExperimentConfig, Mode, Result, SweepSpec, SweepVar,
};

#[derive(Parser)]
#[command(
    name = "jasa",
    version,
    about = "Joint annotator and sub-channel allocation solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the plan.
    Solve(Common),
    /// Average throughput and runtime over a parameter grid, written as CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_var)]
        sweep_var: SweepVar,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write zero runtimes so the CSV is byte-reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Cross-check the solvers against brute-force oracles.
    Validate {
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Solver mode; a comma-separated list selects the sweep algorithms.
    #[arg(long, value_delimiter = ',', value_parser = parse_mode)]
    mode: Vec<Mode>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    override_cluster_sizes: Option<Vec<usize>>,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse()
}

fn parse_var(s: &str) -> std::result::Result<SweepVar, String> {
    s.parse()
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some((first, _)) = self.mode.split_first() {
            cfg.mode = *first;
            cfg.algorithms = self.mode.clone();
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(sizes) = &self.override_cluster_sizes {
            cfg.cluster_size_override = Some(sizes.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(common) => {
            let cfg = common.config()?;
            let out = solve(&cfg, cfg.mode, cfg.seed)?;
            print!("{}", out.report());
        }
        Command::Sweep {
            common,
            sweep_var,
            from,
            to,
            step,
            out,
            no_timing,
        } => {
            let mut cfg = common.config()?;
            if no_timing {
                cfg.timing = false;
            }
            let spec = SweepSpec::new(sweep_var, from, to, step);
            let rows = run_sweep(&cfg, &spec, thread_cap())?;
            match out {
                Some(path) => write_csv(&rows, BufWriter::new(File::create(path)?))?,
                None => write_csv(&rows, io::stdout().lock())?,
            }
        }
        Command::Validate { trials, seed } => {
            let rep = validate(trials, seed)?;
            print!("{rep}");
        }
    }
    io::stdout().flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jasa: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
