use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dynlis::bench::{run_bench, write_csv};
use dynlis::replay::{verify_trace, VerifyMode};
use dynlis::workload::{adversarial, emit_trace, gen_workload, parse_trace, Adversarial, Mix, WorkloadOp};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "dynlis", version, about = "Dynamic longest increasing subsequence: verify, benchmark and generate traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a trace and check the structure against the oracles after every mutation.
    Verify {
        #[arg(long)]
        trace: PathBuf,
        /// `full` or `length_only`.
        #[arg(long, default_value = "full", value_parser = parse_mode)]
        mode: VerifyMode,
    },
    /// Replay a trace or generated workload and write per-mutation costs as CSV.
    Bench {
        #[arg(long, conflicts_with_all = ["seed", "mix", "adversarial"])]
        trace: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
        /// Output CSV path; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a workload trace.
    Gen {
        #[command(flatten)]
        source: Source,
        /// Output trace path; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// `default`, `append-only`, or e.g. `append=0.4,insert=0.3,delete=0.2,query=0.1`.
    #[arg(long, conflicts_with = "adversarial")]
    mix: Option<String>,
    /// `increasing`, `decreasing` or `sawtooth`.
    #[arg(long)]
    adversarial: Option<String>,
}

fn parse_mode(s: &str) -> Result<VerifyMode, String> {
    s.parse()
}

enum Failure {
    Usage(String),
    Io(String),
    Mismatch,
}

impl Source {
    fn ops(&self) -> Result<Vec<WorkloadOp>, Failure> {
        if let Some(name) = &self.adversarial {
            let kind: Adversarial = name.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
            return Ok(adversarial(kind, self.n));
        }
        let mix: Mix = match &self.mix {
            Some(m) => m.parse().map_err(|e| Failure::Usage(format!("{e}")))?,
            None => Mix::default(),
        };
        gen_workload(self.seed, self.n, &mix).map_err(|e| Failure::Usage(format!("{e}")))
    }
}

fn read_trace(path: &Path) -> Result<Vec<WorkloadOp>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    parse_trace(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Io(e.to_string());
    match cli.command {
        Command::Verify { trace, mode } => {
            let ops = read_trace(&trace)?;
            let report = verify_trace(&ops, mode);
            print!("{}", report.render());
            if !report.is_ok() {
                return Err(Failure::Mismatch);
            }
        }
        Command::Bench { trace, source, out } => {
            let ops = match &trace {
                Some(p) => read_trace(p)?,
                None => source.ops()?,
            };
            let run = run_bench(&ops).map_err(|e| Failure::Usage(format!("replay failed: {e}")))?;
            let mut w = output(&out)?;
            write_csv(&run, &mut w).map_err(io_err)?;
            w.flush().map_err(io_err)?;
        }
        Command::Gen { source, out } => {
            let ops = source.ops()?;
            let mut w = output(&out)?;
            w.write_all(emit_trace(&ops).as_bytes()).map_err(io_err)?;
            w.flush().map_err(io_err)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(EXIT_MISMATCH),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
