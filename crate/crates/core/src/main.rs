use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ergolab::scenario::{builtin, builtin_source, list_builtin_scenarios, load, RunSummary};

#[derive(Parser)]
#[command(name = "ergolab", version, about = "Run ergodic-theory scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a builtin scenario by name.
    Run {
        scenario: String,
        /// Output directory for the JSON summary and CSV files.
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List builtin scenarios.
    List,
    /// Print a builtin scenario's JSON.
    Describe { name: String },
}

fn print_table(summary: &RunSummary) {
    println!("scenario {} (seed {})", summary.scenario, summary.seed);
    for s in &summary.steps {
        let label = s.label.as_deref().unwrap_or("");
        println!("  [{:>2}] {:<30} {:<4} {label}", s.index, s.op, if s.passed { "ok" } else { "FAIL" });
        for f in &s.failures {
            println!("         {f}");
        }
    }
    for o in &summary.outputs {
        println!("  wrote {o}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for name in list_builtin_scenarios() {
                let description = builtin(name).map(|s| s.description).unwrap_or_default();
                println!("{name:<28} {description}");
            }
            ExitCode::SUCCESS
        }
        Command::Describe { name } => match builtin_source(&name) {
            Some(src) => {
                print!("{src}");
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("unknown builtin scenario `{name}`");
                ExitCode::from(2)
            }
        },
        Command::Run { scenario, out, seed } => {
            let result = load(&scenario).and_then(|s| s.run(seed, Some(&out)));
            match result {
                Ok(summary) => {
                    print_table(&summary);
                    ExitCode::from(summary.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
