use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use gradcollect::harness::config::{read_pairs, resolve, RunSettings};
use gradcollect::harness::{run_sweep, summarize, write_samples, write_summary, Execution};

#[derive(Parser)]
#[command(name = "gradcollect", version, about = "Compare potential-field collection algorithms under network volatility")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a variability sweep and write per-second samples as CSV.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    devices: Option<String>,
    /// Corridor size as LENGTHxWIDTH in meters.
    #[arg(long, value_name = "LxW")]
    corridor: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    /// Mean seconds between device rounds.
    #[arg(long)]
    period: Option<String>,
    #[arg(long)]
    duration: Option<String>,
    #[arg(long, conflicts_with = "sweep")]
    variability: Option<String>,
    /// Evenly spaced variabilities, START:END:COUNT.
    #[arg(long, value_name = "a:b:n")]
    sweep: Option<String>,
    /// Number of seeds (1..=n).
    #[arg(long, conflicts_with = "seed_list")]
    seeds: Option<String>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    seed_list: Option<Vec<String>>,
    /// Comma-separated subset of sp,mp,wmp.
    #[arg(long)]
    algorithms: Option<String>,
    /// oracle | bellman-ford
    #[arg(long)]
    potential: Option<String>,
    /// Time of the right-to-left source switch, or `none`.
    #[arg(long)]
    source_switch: Option<String>,
    /// Neighbor export expiry in seconds (default 2.5 periods).
    #[arg(long)]
    staleness: Option<String>,
    /// Averaging window START:END in seconds (default the whole run).
    #[arg(long, value_name = "a:b")]
    window: Option<String>,
    /// desk | paper
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    summary: Option<String>,
    #[arg(long)]
    workers: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut v = Vec::new();
        let mut push = |k: &str, x: &Option<String>| {
            if let Some(x) = x {
                v.push((k.to_string(), x.clone()));
            }
        };
        push("profile", &self.profile);
        push("devices", &self.devices);
        push("corridor", &self.corridor);
        push("radius", &self.radius);
        push("period", &self.period);
        push("duration", &self.duration);
        push("variability", &self.variability);
        push("sweep", &self.sweep);
        push("seeds", &self.seeds);
        push("seed-list", &self.seed_list.as_ref().map(|s| s.join(",")));
        push("algorithms", &self.algorithms);
        push("potential", &self.potential);
        push("source-switch", &self.source_switch);
        push("staleness", &self.staleness);
        push("window", &self.window);
        push("out", &self.out);
        push("summary", &self.summary);
        push("workers", &self.workers);
        v
    }
}

fn settings(args: &RunArgs) -> Result<RunSettings, gradcollect::harness::config::ConfigError> {
    let file = match &args.config {
        Some(path) => read_pairs(path)?,
        None => Vec::new(),
    };
    resolve(&file, &args.overrides())
}

fn run(s: &RunSettings) -> Result<(), Box<dyn std::error::Error>> {
    let execution = match s.workers {
        Some(n) => Execution::ParallelWith(n),
        None => Execution::Parallel,
    };
    let started = Instant::now();
    let rows = run_sweep(&s.scenario, &s.variabilities, &s.seeds, execution)?;
    eprintln!(
        "{} runs, {} rows in {:.1?}",
        s.variabilities.len() * s.seeds.len(),
        rows.len(),
        started.elapsed()
    );

    match &s.out {
        Some(path) => write_samples(BufWriter::new(File::create(path)?), &rows)?,
        None => write_samples(io::stdout().lock(), &rows)?,
    }

    let summary = summarize(&rows, s.window)?;
    if let Some(path) = &s.summary {
        write_summary(BufWriter::new(File::create(path)?), &summary)?;
    }
    let mut err = io::stderr().lock();
    writeln!(err, "algorithm  variability  mean_value  std_error  mean_abs_rel_error")?;
    for r in &summary {
        writeln!(
            err,
            "{:<9}  {:>11.3}  {:>10.2}  {:>9.2}  {:>18.4}",
            r.algorithm.short_name(),
            r.variability,
            r.mean_value,
            r.std_error,
            r.mean_abs_rel_error
        )?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run(args) => {
            let s = match settings(&args) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(1);
                }
            };
            match run(&s) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
