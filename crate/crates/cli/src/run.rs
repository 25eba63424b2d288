//! Experiment dispatch: config in, CSV rows and check reports out.

use std::time::Instant;

use sieve_core::occupancy::{checkpoint_sizes, TraceOptions};
use sieve_core::verify::{
    approx_check, clt_check, coverage_check, exp_checkpoints, lil_band_check, lil_trace, limit_point_coverage,
    moment_check, moment_ratio, renewal_lil, sieve_series, simulate_sieve_paths, strassen_envelope, sup_lil,
    unit_grid, CheckReport, CltConfig, LilBand, PairScale, SeriesMode, StandardizedSeries,
};
use sieve_core::{AnyLaw, Law, Trace};

use crate::config::{Experiment, ExperimentConfig, MomentScale};
use crate::error::CliError;
use crate::report::ReportRow;

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// The configuration actually run, with the seed resolved.
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub reports: Vec<CheckReport>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(CheckReport::passed)
    }
}

fn parse_law(spec: &str) -> Result<AnyLaw<f64>, CliError> {
    Ok(spec.parse::<AnyLaw<f64>>()?)
}

fn sieve_law(spec: &str) -> Result<Law, CliError> {
    match parse_law(spec)? {
        AnyLaw::Sieve(w) => Ok(w),
        AnyLaw::Generic(_) => Err(CliError::Invalid(format!("`{spec}` is not a stick-breaking law"))),
    }
}

fn check_budget(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let n = checkpoint_sizes(cfg.j_max).last().copied().unwrap_or(0);
    if n > cfg.ball_budget {
        return Err(CliError::Budget(format!(
            "j_max = {} needs [e^{}] = {n} balls, above ball_budget = {}",
            cfg.j_max, cfg.j_max, cfg.ball_budget
        )));
    }
    Ok(())
}

fn trace_options(cfg: &ExperimentConfig) -> TraceOptions {
    TraceOptions { ball_budget: cfg.ball_budget, allocation: cfg.allocation }
}

fn band(cfg: &ExperimentConfig) -> LilBand {
    LilBand {
        j_lo: cfg.j_min,
        j_hi: cfg.j_max,
        eps: cfg.eps,
        max_band: (cfg.band_lo, cfg.band_hi),
        min_frac_in_band: cfg.band_frac,
        pooled_max_at_least: cfg.pooled_min,
        min_frac_no_violation: cfg.clean_frac,
    }
}

struct Rows<'a> {
    cfg: &'a ExperimentConfig,
    name: String,
    law: String,
    rows: Vec<ReportRow>,
}

impl<'a> Rows<'a> {
    fn new(cfg: &'a ExperimentConfig, law: String) -> Self {
        Rows { cfg, name: cfg.experiment.to_string(), law, rows: Vec::new() }
    }

    fn push(&mut self, replicate: u64, checkpoint: u64) -> &mut ReportRow {
        self.rows.push(ReportRow::new(&self.name, &self.law, self.cfg.seed, replicate, checkpoint));
        self.rows.last_mut().expect("just pushed")
    }

    /// Standardized sieve rows: `arg = j`, `aux_a = ρ*(e^j)`, `aux_b = Θ`, `aux_c = Δ`.
    fn sieve(&mut self, traces: &[Trace], series: &[StandardizedSeries<f64>], pass_eps: Option<f64>) {
        let (lo, hi) = (self.cfg.j_min, self.cfg.j_max);
        for (r, (trace, s)) in traces.iter().zip(series).enumerate() {
            for (c, e) in trace.checkpoints.iter().zip(&s.entries) {
                let row = self.push(r as u64, c.j as u64);
                row.arg = Some(e.arg);
                row.raw = Some(e.raw);
                row.centering = Some(e.centering);
                row.z = Some(e.z);
                row.ell = Some(e.ell);
                row.aux_a = Some(c.rho_star as f64);
                row.aux_b = Some(c.theta);
                row.aux_c = Some(c.delta);
                if let Some(eps) = pass_eps {
                    if c.j >= lo.max(3) && c.j <= hi {
                        row.pass = Some(e.ell.abs() <= 1.0 + eps);
                    }
                }
            }
        }
    }
}

fn sieve_traces(cfg: &ExperimentConfig, law: &Law) -> Result<(Vec<Trace>, Vec<StandardizedSeries<f64>>), CliError> {
    check_budget(cfg)?;
    let traces = simulate_sieve_paths(law, cfg.seed, cfg.replicates, cfg.j_max, trace_options(cfg), cfg.workers)?;
    let series = traces
        .iter()
        .map(|t| sieve_series(law, t, SeriesMode::SieveK))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((traces, series))
}

/// Execute the experiment named by `cfg`. A zero seed is resolved first.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let mut cfg = cfg.clone();
    cfg.resolve_seed();
    let cfg = cfg;
    let started = Instant::now();
    let mut reports = Vec::new();
    let law_name = parse_law(&cfg.law)?.to_string();
    let mut out = Rows::new(&cfg, law_name);

    match cfg.experiment {
        Experiment::Clt => {
            let law = sieve_law(&cfg.law)?;
            check_budget(&cfg)?;
            let clt = CltConfig {
                n_exp: cfg.j_max,
                replicates: cfg.replicates,
                seed: cfg.seed,
                ks_max: cfg.ks_max,
                workers: cfg.workers,
                trace: trace_options(&cfg),
            };
            let outcome = clt_check(&law, &clt)?;
            for s in &outcome.samples {
                let row = out.push(s.replicate, cfg.j_max as u64);
                row.arg = Some(cfg.j_max as f64);
                row.raw = Some(s.k_star as f64);
                row.centering = Some(s.centering);
                row.z = Some(s.z);
                row.aux_a = Some(s.n as f64);
            }
            reports.push(outcome.report);
        }
        Experiment::Lil => {
            let law = sieve_law(&cfg.law)?;
            let (traces, series) = sieve_traces(&cfg, &law)?;
            let summaries = series
                .iter()
                .map(|s| lil_trace(s, cfg.eps, cfg.j_min, cfg.j_max))
                .collect::<Result<Vec<_>, _>>()?;
            let name = format!("LIL band law={law} j={}..{}", cfg.j_min, cfg.j_max);
            reports.push(lil_band_check(&name, &summaries, &band(&cfg), cfg.seed));
            out.sieve(&traces, &series, Some(cfg.eps));
        }
        Experiment::Coverage => {
            let law = sieve_law(&cfg.law)?;
            let (traces, series) = sieve_traces(&cfg, &law)?;
            let summary = limit_point_coverage(&series, cfg.grid_step, cfg.delta, cfg.j_min, cfg.j_max);
            reports.push(coverage_check(&summary, cfg.coverage_min, cfg.seed));
            out.sieve(&traces, &series, None);
            // per-path coverage replaces Θ and Δ
            for row in &mut out.rows {
                let r = row.replicate as usize;
                row.aux_b = Some(summary.path_coverage[r]);
                row.aux_c = Some(summary.path_interior_coverage[r]);
            }
        }
        Experiment::Approx => {
            let law = sieve_law(&cfg.law)?;
            check_budget(&cfg)?;
            let traces = simulate_sieve_paths(&law, cfg.seed, cfg.replicates, cfg.j_max, trace_options(&cfg), cfg.workers)?;
            let (summary, report) = approx_check(&traces, cfg.j_min, cfg.j_max, cfg.seed)?;
            reports.push(report);
            for (r, (trace, path)) in traces.iter().zip(&summary.paths).enumerate() {
                for c in &trace.checkpoints {
                    let row = out.push(r as u64, c.j as u64);
                    row.arg = Some(c.j as f64);
                    row.raw = Some(c.k_star as f64);
                    row.centering = Some(c.rho_star as f64);
                    row.aux_a = path.d.iter().find(|d| d.0 == c.j).map(|d| d.1);
                    row.aux_b = Some(c.theta);
                    row.aux_c = Some(c.delta);
                }
            }
        }
        Experiment::Moments => {
            let law = parse_law(&cfg.law)?;
            let (pairs, scale): (Vec<(f64, f64)>, PairScale) = match cfg.moment_scale {
                MomentScale::Linear => (cfg.moment_gaps.iter().map(|g| (cfg.moment_base + g, cfg.moment_base)).collect(), PairScale::Linear),
                MomentScale::Log => (
                    cfg.moment_gaps.iter().map(|g| ((cfg.moment_base + g).exp(), cfg.moment_base.exp())).collect(),
                    PairScale::Log,
                ),
            };
            let summary = moment_ratio(&law, &pairs, scale, cfg.replicates, cfg.seed, cfg.workers)?;
            let name = format!("fourth moments law={law} scale={}", cfg.moment_scale);
            reports.push(moment_check(&name, &summary, cfg.ratio_max, cfg.replicates, cfg.seed));
            for (i, (&(x, y), &ratio)) in pairs.iter().zip(&summary.ratios).enumerate() {
                let row = out.push(0, i as u64);
                row.arg = Some(x);
                row.raw = Some(ratio);
                row.aux_a = Some(y);
                row.aux_b = Some(cfg.moment_gaps[i]);
            }
        }
        Experiment::RenewalLil => {
            let law = parse_law(&cfg.law)?;
            let cps = exp_checkpoints::<f64>(1, cfg.j_max);
            let outcome = renewal_lil(&law, &cps, cfg.replicates, cfg.seed, &band(&cfg), cfg.workers)?;
            for (r, s) in outcome.series.iter().enumerate() {
                for e in &s.entries {
                    let row = out.push(r as u64, e.j as u64);
                    row.arg = Some(e.arg);
                    row.raw = Some(e.raw);
                    row.centering = Some(e.centering);
                    row.z = Some(e.z);
                    row.ell = Some(e.ell);
                    if e.j >= cfg.j_min.max(3) && e.j <= cfg.j_max {
                        row.pass = Some(e.ell.abs() <= 1.0 + cfg.eps);
                    }
                }
            }
            reports.push(outcome.report);
        }
        Experiment::SupLil => {
            let law = parse_law(&cfg.law)?;
            if cfg.j_min < 2 || cfg.j_min > cfg.j_max {
                return Err(CliError::Invalid("sup-lil needs 2 <= j_min <= j_max".into()));
            }
            let js: Vec<u32> = (cfg.j_min..=cfg.j_max).collect();
            let ns: Vec<f64> = js.iter().map(|&j| (j as f64).exp()).collect();
            let outcome = sup_lil(&law, &ns, cfg.replicates, cfg.seed, (cfg.sup_lo, cfg.sup_hi), cfg.workers)?;
            for (r, points) in outcome.paths.iter().enumerate() {
                for (&j, p) in js.iter().zip(points) {
                    let row = out.push(r as u64, j as u64);
                    row.arg = Some(p.n);
                    row.raw = Some(p.sup_stat);
                    row.aux_a = Some(p.endpoint_stat);
                    row.pass = Some(p.sup_stat >= p.endpoint_stat);
                }
            }
            reports.push(outcome.report);
        }
        Experiment::Strassen => {
            let law = parse_law(&cfg.law)?;
            let n = (cfg.j_max as f64).exp();
            let grid = unit_grid::<f64>(cfg.t_step);
            let outcome = strassen_envelope(&law, n, &grid, cfg.strassen_eps, cfg.replicates, cfg.seed, cfg.violation_max, cfg.workers)?;
            for (r, path) in outcome.paths.iter().enumerate() {
                for (i, &(t, x)) in path.iter().enumerate() {
                    let envelope = t.sqrt() + cfg.strassen_eps;
                    let row = out.push(r as u64, i as u64);
                    row.arg = Some(t);
                    row.raw = Some(x);
                    row.aux_a = Some(envelope);
                    row.pass = Some(x.abs() <= envelope);
                }
            }
            reports.push(outcome.report);
        }
        Experiment::TraceDump => {
            let law = sieve_law(&cfg.law)?;
            check_budget(&cfg)?;
            let traces = simulate_sieve_paths(&law, cfg.seed, cfg.replicates, cfg.j_max, trace_options(&cfg), cfg.workers)?;
            let mut max_box = 0u64;
            for (r, trace) in traces.iter().enumerate() {
                max_box = max_box.max(trace.max_box_index);
                for c in &trace.checkpoints {
                    let row = out.push(r as u64, c.j as u64);
                    row.arg = Some(c.n as f64);
                    row.raw = Some(c.k_star as f64);
                    row.aux_a = Some(c.rho_star as f64);
                    row.aux_b = Some(c.theta);
                    row.aux_c = Some(c.delta);
                }
            }
            reports.push(CheckReport::new(format!("trace dump law={law}"), cfg.replicates, cfg.seed).stat("max box index", max_box as f64));
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    for r in &mut reports {
        if r.runtime_secs == 0.0 {
            r.runtime_secs = elapsed;
        }
    }
    let rows = out.rows;
    Ok(RunOutput { config: cfg, rows, reports })
}
