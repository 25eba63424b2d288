//! Statistical checks of the limit theorems and moment bounds on simulated paths.
//!
//! Almost sure limit statements cannot be falsified at finite size, so each
//! check compares desk-scale statistics with explicit, configurable bands
//! and records which bands it used.

mod checks;
mod ks;
mod series;

pub use checks::*;
pub use ks::{ks_normal, ks_statistic, Cdf, EmpiricalCdf, StandardNormal};
pub use series::{SeriesEntry, SeriesMode, StandardizedSeries, Standardizer};

use std::fmt;

/// Acceptance region for one statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    /// `value < b`
    Below(f64),
    /// `value <= b`
    AtMost(f64),
    /// `value >= b`
    AtLeast(f64),
    /// `lo <= value <= hi`
    Within(f64, f64),
}

impl Bound {
    pub fn admits(&self, v: f64) -> bool {
        match *self {
            Bound::Below(b) => v < b,
            Bound::AtMost(b) => v <= b,
            Bound::AtLeast(b) => v >= b,
            Bound::Within(lo, hi) => v >= lo && v <= hi,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Below(b) => write!(f, "< {b}"),
            Bound::AtMost(b) => write!(f, "<= {b}"),
            Bound::AtLeast(b) => write!(f, ">= {b}"),
            Bound::Within(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
}

impl Criterion {
    pub fn new(name: impl Into<String>, value: f64, bound: Bound) -> Self {
        Criterion { name: name.into(), value, bound }
    }

    pub fn passed(&self) -> bool {
        self.bound.admits(self.value)
    }
}

/// Outcome of one check. Pass/fail is derived from the criteria, never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub criteria: Vec<Criterion>,
    /// Informational statistics that do not gate the check.
    pub stats: Vec<(String, f64)>,
    pub replicates: u64,
    pub seed: u64,
    pub runtime_secs: f64,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, replicates: u64, seed: u64) -> Self {
        CheckReport { name: name.into(), criteria: Vec::new(), stats: Vec::new(), replicates, seed, runtime_secs: 0.0 }
    }

    pub fn criterion(mut self, name: impl Into<String>, value: f64, bound: Bound) -> Self {
        self.criteria.push(Criterion::new(name, value, bound));
        self
    }

    pub fn stat(mut self, name: impl Into<String>, value: f64) -> Self {
        self.stats.push((name.into(), value));
        self
    }

    pub fn passed(&self) -> bool {
        self.criteria.iter().all(Criterion::passed)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "[{}] {} (replicates={}, seed={}, {:.2}s)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.replicates,
            self.seed,
            self.runtime_secs
        )?;
        for c in &self.criteria {
            writeln!(f, "  {} {}: {:.6} {}", if c.passed() { "ok  " } else { "FAIL" }, c.name, c.value, c.bound)?;
        }
        for (k, v) in &self.stats {
            writeln!(f, "       {k} = {v:.6}")?;
        }
        Ok(())
    }
}
