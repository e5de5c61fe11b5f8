use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use markedpop::cli::{exit_code, run, RunOptions};

#[derive(Parser)]
#[command(name = "markedpop", version, about = "Seeded experiments for heterogeneous catastrophe populations")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output_dir` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for replicas.
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    match args.command {
        Command::Run {
            config,
            out,
            threads,
        } => {
            let options = RunOptions {
                out,
                threads,
                ..RunOptions::default()
            };
            match run(&config, &options) {
                Ok(report) => {
                    print!("{}", markedpop::cli::emit_summary(&report.summary));
                    eprintln!(
                        "wrote {} files to {}",
                        report.files.len(),
                        report.output_dir.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e) as u8)
                }
            }
        }
    }
}
