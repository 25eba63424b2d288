//! Experiment runner for the Bernoulli sieve laboratory: configuration,
//! seeding, replicate fan-out and CSV output.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{Experiment, ExperimentConfig, MomentScale};
pub use error::CliError;
pub use report::{write_csv, ReportRow, HEADER};
pub use run::{run, RunOutput};
pub use sieve_core::seed_derive;

use std::fs::File;
use std::io::{BufWriter, Write};

/// Run, write the CSV to `config.out_path()` and return the output.
pub fn run_to_file(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let output = run(cfg)?;
    let path = output.config.out_path();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut file = BufWriter::new(File::create(&path)?);
    write_csv(&output.rows, &mut file)?;
    file.flush()?;
    Ok(output)
}

/// Human summary: the resolved seed, then one block per check.
pub fn summary(output: &RunOutput) -> String {
    let cfg = &output.config;
    let mut s = format!(
        "experiment {} law={} seed={} replicates={} csv={}\n",
        cfg.experiment,
        cfg.law,
        cfg.seed,
        cfg.replicates,
        cfg.out_path().display()
    );
    for r in &output.reports {
        s.push_str(&r.to_string());
        if !s.ends_with('\n') {
            s.push('\n');
        }
    }
    s.push_str(if output.passed() { "overall: PASS\n" } else { "overall: FAIL\n" });
    s
}
