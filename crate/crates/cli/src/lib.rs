//! Config-driven experiment runner for `qkelly`.
//!
//! An experiment is an INI file naming its `kind` and inputs; running it
//! writes `report.txt`, `results.csv` and any extra CSV attachments.

pub mod config;
pub mod error;
pub mod experiment;
pub mod fields;
pub mod report;

use std::fs;
use std::path::Path;

pub use config::Ini;
pub use error::{CliError, CliResult, ErrorKind};
pub use experiment::{ExperimentConfig, ExperimentKind};
pub use report::Report;

/// Parses a config text and applies `section.key=value` overrides.
pub fn load_config(text: &str, overrides: &[String]) -> CliResult<ExperimentConfig> {
    let mut ini = Ini::parse(text).map_err(|e| CliError::validation("config", e.to_string()))?;
    for o in overrides {
        ini.apply_override(o).map_err(|m| CliError::validation("--set", m))?;
    }
    ExperimentConfig::from_ini(&ini)
}

/// Loads, runs and writes the outputs of one experiment.
pub fn run(config_path: &Path, out_dir: &Path, overrides: &[String]) -> CliResult<Report> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| CliError::validation("config", format!("cannot read {}: {e}", config_path.display())))?;
    let config = load_config(&text, overrides)?;
    let report = config.run()?;
    write_outputs(&report, out_dir)?;
    Ok(report)
}

pub fn write_outputs(report: &Report, out_dir: &Path) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::validation("--out", format!("{}: {e}", out_dir.display()));
    fs::create_dir_all(out_dir).map_err(io)?;
    fs::write(out_dir.join("report.txt"), report.to_text()).map_err(io)?;
    fs::write(out_dir.join("results.csv"), report.to_csv()).map_err(io)?;
    for (name, contents) in &report.attachments {
        fs::write(out_dir.join(name), contents).map_err(io)?;
    }
    Ok(())
}

/// Names, dimensions and descriptions of the builtin states and scenarios.
pub fn list_builtins() -> String {
    let mut out = String::new();
    for b in qkelly::states::BUILTINS {
        let dims: Vec<String> = b.dims.iter().map(usize::to_string).collect();
        let kind = match b.kind {
            qkelly::states::BuiltinKind::State => "state",
            qkelly::states::BuiltinKind::Joint => "joint distribution",
        };
        out.push_str(&format!("{:<18} {:<8} {:<19} {}\n", b.name, dims.join("x"), kind, b.description));
    }
    out
}
