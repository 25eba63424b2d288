use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sieve_lab::config::parse_allocation;
use sieve_lab::{run_to_file, summary, CliError, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "sieve-lab", version, about = "Monte Carlo checks for the Bernoulli sieve and perturbed random walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// KS distance of standardized K* to the normal law
    Clt(Common),
    /// LIL band statistics of K* along sieve paths
    Lil(Common),
    /// Grid coverage of the LIL-normalized K* sequence
    Coverage(Common),
    /// Distance between K* and rho* along sieve paths
    Approx(Common),
    /// Fourth-moment ratios of walk increments
    Moments(Common),
    /// LIL band statistics of a renewal counting process
    RenewalLil(Common),
    /// Running-supremum LIL statistic of a renewal process
    SupLil(Common),
    /// Strassen envelope of the rescaled renewal path
    Strassen(Common),
    /// K*, rho*, Theta and Delta along sieve paths
    TraceDump(Common),
}

#[derive(Args)]
struct Common {
    /// Config file with `key = value` lines; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Step law, e.g. uniform, beta:2,3, det:0.5, pwalk:exp:1/zero
    #[arg(long)]
    law: Option<String>,
    /// Master seed; 0 draws one from OS entropy
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, visible_alias = "paths")]
    replicates: Option<u64>,
    #[arg(long, visible_alias = "n-exp")]
    j_max: Option<u32>,
    #[arg(long)]
    j_min: Option<u32>,
    /// Worker threads, 0 for all cores
    #[arg(long, env = "SIEVE_LAB_WORKERS")]
    workers: Option<usize>,
    /// CSV output path
    #[arg(long)]
    out: Option<PathBuf>,
    /// jump or sequential
    #[arg(long)]
    allocation: Option<String>,
    /// Any config key, as key=value; repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print the resolved config and exit
    #[arg(long)]
    print_config: bool,
}

fn build(experiment: Experiment, c: Common) -> Result<(ExperimentConfig, bool), CliError> {
    let mut cfg = ExperimentConfig::for_experiment(experiment);
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path)?;
        cfg.apply_text(&text)?;
        cfg.experiment = experiment;
    }
    let invalid = CliError::Invalid;
    if let Some(v) = c.law {
        cfg.law = v;
    }
    if let Some(v) = c.seed {
        cfg.seed = v;
    }
    if let Some(v) = c.replicates {
        cfg.replicates = v;
    }
    if let Some(v) = c.j_max {
        cfg.j_max = v;
    }
    if let Some(v) = c.j_min {
        cfg.j_min = v;
    }
    if let Some(v) = c.workers {
        cfg.workers = v;
    }
    if let Some(v) = c.out {
        cfg.out = Some(v);
    }
    if let Some(v) = c.allocation {
        cfg.allocation = parse_allocation(&v).map_err(invalid)?;
    }
    for kv in &c.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| invalid(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim()).map_err(invalid)?;
    }
    Ok((cfg, c.print_config))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common) = match cli.command {
        Command::Clt(c) => (Experiment::Clt, c),
        Command::Lil(c) => (Experiment::Lil, c),
        Command::Coverage(c) => (Experiment::Coverage, c),
        Command::Approx(c) => (Experiment::Approx, c),
        Command::Moments(c) => (Experiment::Moments, c),
        Command::RenewalLil(c) => (Experiment::RenewalLil, c),
        Command::SupLil(c) => (Experiment::SupLil, c),
        Command::Strassen(c) => (Experiment::Strassen, c),
        Command::TraceDump(c) => (Experiment::TraceDump, c),
    };
    let result = build(experiment, common).and_then(|(cfg, print_only)| {
        if print_only {
            print!("{}", cfg.emit());
            return Ok(true);
        }
        let output = run_to_file(&cfg)?;
        print!("{}", summary(&output));
        Ok(output.passed())
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
