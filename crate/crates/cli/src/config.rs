//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sieve_core::Allocation;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    Clt,
    Lil,
    Coverage,
    Approx,
    Moments,
    RenewalLil,
    SupLil,
    Strassen,
    TraceDump,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Clt,
        Experiment::Lil,
        Experiment::Coverage,
        Experiment::Approx,
        Experiment::Moments,
        Experiment::RenewalLil,
        Experiment::SupLil,
        Experiment::Strassen,
        Experiment::TraceDump,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Clt => "clt",
            Experiment::Lil => "lil",
            Experiment::Coverage => "coverage",
            Experiment::Approx => "approx",
            Experiment::Moments => "moments",
            Experiment::RenewalLil => "renewal-lil",
            Experiment::SupLil => "sup-lil",
            Experiment::Strassen => "strassen",
            Experiment::TraceDump => "trace-dump",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

/// How moment pairs are built from `moment_base` and `moment_gaps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentScale {
    /// `y = base`, `x = base + gap`; counts N of the walk.
    Linear,
    /// `y = e^base`, `x = e^(base + gap)`; counts ρ* of the sieve.
    Log,
}

impl fmt::Display for MomentScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MomentScale::Linear => "linear",
            MomentScale::Log => "log",
        })
    }
}

impl FromStr for MomentScale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "linear" => Ok(MomentScale::Linear),
            "log" => Ok(MomentScale::Log),
            _ => Err(format!("moment scale must be `linear` or `log`, got `{s}`")),
        }
    }
}

pub fn parse_allocation(s: &str) -> Result<Allocation, String> {
    match s {
        "jump" => Ok(Allocation::Jump),
        "sequential" => Ok(Allocation::Sequential),
        _ => Err(format!("allocation must be `jump` or `sequential`, got `{s}`")),
    }
}

pub fn allocation_name(a: Allocation) -> &'static str {
    match a {
        Allocation::Jump => "jump",
        Allocation::Sequential => "sequential",
    }
}

/// Everything needed to reproduce one run.
///
/// `seed = 0` asks for a seed from OS entropy; [`ExperimentConfig::resolve_seed`]
/// replaces it by the drawn value so that it ends up in the output.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub law: String,
    pub seed: u64,
    /// Replicates for `clt` and `moments`, paths elsewhere.
    pub replicates: u64,
    /// First checkpoint `j` entering the band, coverage and approximation statistics.
    pub j_min: u32,
    /// Last checkpoint: `n = [e^j_max]` balls, or horizon `e^j_max` for walks.
    pub j_max: u32,
    pub eps: f64,
    pub ks_max: f64,
    pub band_lo: f64,
    pub band_hi: f64,
    pub band_frac: f64,
    pub pooled_min: f64,
    pub clean_frac: f64,
    pub grid_step: f64,
    pub delta: f64,
    pub coverage_min: f64,
    pub moment_scale: MomentScale,
    pub moment_base: f64,
    pub moment_gaps: Vec<f64>,
    pub ratio_max: f64,
    pub sup_lo: f64,
    pub sup_hi: f64,
    pub t_step: f64,
    pub strassen_eps: f64,
    pub violation_max: f64,
    /// 0 uses every core.
    pub workers: usize,
    pub allocation: Allocation,
    pub ball_budget: u64,
    /// CSV destination; `<experiment>.csv` when unset.
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: Experiment::Clt,
            law: "uniform".into(),
            seed: 42,
            replicates: 2000,
            j_min: 5,
            j_max: 12,
            eps: 0.5,
            ks_max: 0.05,
            band_lo: 0.4,
            band_hi: 1.3,
            band_frac: 0.9,
            pooled_min: 0.8,
            clean_frac: 0.95,
            grid_step: 0.25,
            delta: 0.125,
            coverage_min: 1.0,
            moment_scale: MomentScale::Linear,
            moment_base: 10.0,
            moment_gaps: vec![2.0, 4.0, 8.0, 16.0, 32.0],
            ratio_max: 3.0,
            sup_lo: 0.5,
            sup_hi: 1.2,
            t_step: 0.01,
            strassen_eps: 0.25,
            violation_max: 0.02,
            workers: 0,
            allocation: Allocation::Jump,
            ball_budget: sieve_core::occupancy::DEFAULT_BALL_BUDGET,
            out: None,
        }
    }
}

const EXP1: &str = "pwalk:exp:1/zero";

impl ExperimentConfig {
    /// Defaults tuned to the experiment's standard run.
    pub fn for_experiment(experiment: Experiment) -> Self {
        let base = ExperimentConfig { experiment, ..Default::default() };
        match experiment {
            Experiment::Clt => base,
            Experiment::Lil | Experiment::Coverage | Experiment::Approx => {
                ExperimentConfig { seed: 7, replicates: 100, j_max: 18, ..base }
            }
            Experiment::Moments => ExperimentConfig { replicates: 10_000, ..base },
            Experiment::RenewalLil => ExperimentConfig { law: EXP1.into(), replicates: 50, j_max: 16, ..base },
            Experiment::SupLil => ExperimentConfig { law: EXP1.into(), replicates: 50, j_min: 3, j_max: 16, ..base },
            Experiment::Strassen => ExperimentConfig { law: EXP1.into(), replicates: 50, j_max: 14, ..base },
            Experiment::TraceDump => ExperimentConfig { replicates: 1, ..base },
        }
    }

    /// The CSV path actually written.
    pub fn out_path(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.experiment)))
    }

    /// Replace `seed = 0` by a value drawn from OS entropy (never 0 again).
    pub fn resolve_seed(&mut self) {
        while self.seed == 0 {
            self.seed = rand::random();
        }
    }

    /// Every field, one `key = value` per line, in a fixed order.
    pub fn emit(&self) -> String {
        let gaps: Vec<String> = self.moment_gaps.iter().map(|g| g.to_string()).collect();
        let out = self.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let pairs: Vec<(&str, String)> = vec![
            ("experiment", self.experiment.to_string()),
            ("law", self.law.clone()),
            ("seed", self.seed.to_string()),
            ("replicates", self.replicates.to_string()),
            ("j_min", self.j_min.to_string()),
            ("j_max", self.j_max.to_string()),
            ("eps", self.eps.to_string()),
            ("ks_max", self.ks_max.to_string()),
            ("band_lo", self.band_lo.to_string()),
            ("band_hi", self.band_hi.to_string()),
            ("band_frac", self.band_frac.to_string()),
            ("pooled_min", self.pooled_min.to_string()),
            ("clean_frac", self.clean_frac.to_string()),
            ("grid_step", self.grid_step.to_string()),
            ("delta", self.delta.to_string()),
            ("coverage_min", self.coverage_min.to_string()),
            ("moment_scale", self.moment_scale.to_string()),
            ("moment_base", self.moment_base.to_string()),
            ("moment_gaps", gaps.join(",")),
            ("ratio_max", self.ratio_max.to_string()),
            ("sup_lo", self.sup_lo.to_string()),
            ("sup_hi", self.sup_hi.to_string()),
            ("t_step", self.t_step.to_string()),
            ("strassen_eps", self.strassen_eps.to_string()),
            ("violation_max", self.violation_max.to_string()),
            ("workers", self.workers.to_string()),
            ("allocation", allocation_name(self.allocation).to_string()),
            ("ball_budget", self.ball_budget.to_string()),
            ("out", out),
        ];
        pairs.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Set one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<V: FromStr>(key: &str, v: &str) -> Result<V, String>
        where
            V::Err: fmt::Display,
        {
            v.parse().map_err(|e| format!("{key}: cannot parse `{v}`: {e}"))
        }
        match key {
            "experiment" => self.experiment = value.parse()?,
            "law" => self.law = value.to_string(),
            "seed" => self.seed = num(key, value)?,
            "replicates" | "paths" => self.replicates = num(key, value)?,
            "j_min" => self.j_min = num(key, value)?,
            "j_max" | "n_exp" => self.j_max = num(key, value)?,
            "eps" => self.eps = num(key, value)?,
            "ks_max" => self.ks_max = num(key, value)?,
            "band_lo" => self.band_lo = num(key, value)?,
            "band_hi" => self.band_hi = num(key, value)?,
            "band_frac" => self.band_frac = num(key, value)?,
            "pooled_min" => self.pooled_min = num(key, value)?,
            "clean_frac" => self.clean_frac = num(key, value)?,
            "grid_step" => self.grid_step = num(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "coverage_min" => self.coverage_min = num(key, value)?,
            "moment_scale" => self.moment_scale = value.parse()?,
            "moment_base" => self.moment_base = num(key, value)?,
            "moment_gaps" => {
                self.moment_gaps = value
                    .split(',')
                    .map(|g| num::<f64>(key, g.trim()))
                    .collect::<Result<_, _>>()?;
            }
            "ratio_max" => self.ratio_max = num(key, value)?,
            "sup_lo" => self.sup_lo = num(key, value)?,
            "sup_hi" => self.sup_hi = num(key, value)?,
            "t_step" => self.t_step = num(key, value)?,
            "strassen_eps" => self.strassen_eps = num(key, value)?,
            "violation_max" => self.violation_max = num(key, value)?,
            "workers" => self.workers = num(key, value)?,
            "allocation" => self.allocation = parse_allocation(value)?,
            "ball_budget" => self.ball_budget = num(key, value)?,
            "out" => self.out = (!value.is_empty()).then(|| PathBuf::from(value)),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Apply a config text on top of `self`. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| CliError::Config { line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            self.set(key.trim(), value.trim()).map_err(err)?;
        }
        Ok(())
    }

    /// Parse a config text; unspecified fields take the defaults of its experiment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut probe = ExperimentConfig::default();
        // the experiment line picks the defaults, so read it first
        for (i, raw) in text.lines().enumerate() {
            if let Some((k, v)) = raw.trim().split_once('=') {
                if k.trim() == "experiment" {
                    probe.set("experiment", v.trim()).map_err(|message| CliError::Config { line: i + 1, message })?;
                }
            }
        }
        let mut cfg = ExperimentConfig::for_experiment(probe.experiment);
        cfg.apply_text(text)?;
        Ok(cfg)
    }
}
