use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use formlab_cli::{catalog, run_file, RunOptions, DEFAULT_TOL};

#[derive(Parser)]
#[command(version, about = "Run formlab experiments and write CSV results")]
struct Cli {
    /// Relative floor for positive-semidefiniteness checks
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered experiments
    List,
    /// Run the experiment described by a JSON config
    Run {
        config: PathBuf,
        /// Output directory, overriding the config
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG plot next to the CSV
        #[arg(long)]
        plots: bool,
    },
}

fn init_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("FORMLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("FORMLAB_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match cli.command {
        Command::List => {
            print!("{}", catalog());
            ExitCode::SUCCESS
        }
        Command::Run { config, out, plots } => {
            let opts = RunOptions {
                out,
                plots,
                tol: cli.tol,
            };
            match run_file(&config, &opts) {
                Ok(summary) => {
                    println!(
                        "{}: {} rows -> {}",
                        summary.experiment,
                        summary.rows,
                        summary.csv.display()
                    );
                    if let Some(svg) = &summary.svg {
                        println!("plot -> {}", svg.display());
                    }
                    for flag in &summary.flags {
                        eprintln!("warning: {}: {}", flag.metric(), flag.detail());
                    }
                    ExitCode::from(summary.exit_code())
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
