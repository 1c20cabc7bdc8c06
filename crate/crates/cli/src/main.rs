use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "qkelly", version, about = "Kelly doubling rates for classical and quantum gambles")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Directory for report.txt and results.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override a config value, e.g. --set odds.a=uniform:3.
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
    },
    /// List builtin states and scenarios.
    ListBuiltins,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        None | Some(Command::ListBuiltins) => {
            print!("{}", qkelly_cli::list_builtins());
            ExitCode::SUCCESS
        }
        Some(Command::Run { config, out, set }) => match qkelly_cli::run(&config, &out, &set) {
            Ok(report) => {
                print!("{}", report.to_text());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
