use std::time::Instant;

use crate::error::{invalid, Result, SieveError};
use crate::laws::{StepLaw, WLaw};
use crate::occupancy::{allocate, simulate_trace, OccupancyTrace, TraceOptions};
use crate::parallel::fan_out;
use crate::rng::seed_derive;
use crate::scalar::Scalar;
use crate::walks::{stream_counts, Counter, WalkPath, WalkStream, DEFAULT_STEP_CAP};

use super::ks::ks_normal;
use super::series::{SeriesMode, StandardizedSeries, Standardizer};
use super::{Bound, CheckReport};

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite statistic"));
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// Least-squares slope of `y` on `x`; `None` with fewer than two points.
pub fn ls_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn fraction(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

// ---------------------------------------------------------------- CLT

#[derive(Debug, Clone, PartialEq)]
pub struct CltConfig {
    /// Ball count is `[e^n_exp]`.
    pub n_exp: u32,
    pub replicates: u64,
    pub seed: u64,
    pub ks_max: f64,
    pub workers: usize,
    pub trace: TraceOptions,
}

impl Default for CltConfig {
    fn default() -> Self {
        CltConfig { n_exp: 12, replicates: 2000, seed: 42, ks_max: 0.05, workers: 0, trace: TraceOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltSample<T> {
    pub replicate: u64,
    pub n: u64,
    pub k_star: u64,
    pub centering: T,
    pub z: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CltOutcome<T> {
    pub samples: Vec<CltSample<T>>,
    pub ks: T,
    pub report: CheckReport,
}

/// `K*_{[e^t]}` over independent paths, CLT-standardized, against the standard normal law.
pub fn clt_check<T: Scalar>(law: &WLaw<T>, cfg: &CltConfig) -> Result<CltOutcome<T>> {
    let started = Instant::now();
    if !law.lil_eligible() {
        return Err(SieveError::Ineligible { law: law.to_string() });
    }
    if cfg.replicates < 500 {
        return Err(invalid(format!("clt_check needs at least 500 replicates, got {}", cfg.replicates)));
    }
    if cfg.n_exp < 3 {
        return Err(invalid("clt_check needs n_exp >= 3"));
    }
    let st = Standardizer::new(*law, SeriesMode::SieveK)?;
    let t = T::lit(cfg.n_exp as f64);
    let n = (cfg.n_exp as f64).exp().floor() as u64;
    if n > cfg.trace.ball_budget {
        return Err(invalid(format!("[e^{}] = {n} balls exceeds the budget {}", cfg.n_exp, cfg.trace.ball_budget)));
    }
    let samples = fan_out(cfg.replicates, cfg.workers, |r| {
        let seed = seed_derive(cfg.seed, r);
        let mut path = WalkPath::new(*law, seed);
        let k_star = allocate(&mut path, seed, &[n], cfg.trace.allocation)?.occupied[0];
        let e = st.entry(cfg.n_exp, t, T::lit(k_star as f64))?;
        Ok(CltSample { replicate: r, n, k_star, centering: e.centering, z: e.z })
    })?;
    let zs: Vec<T> = samples.iter().map(|s| s.z).collect();
    let ks = ks_normal(&zs);
    let m = zs.len() as f64;
    let mean = zs.iter().map(|z| z.as_f64()).sum::<f64>() / m;
    let sd = (zs.iter().map(|z| (z.as_f64() - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    let mut report = CheckReport::new(format!("clt law={law} n=[e^{}]", cfg.n_exp), cfg.replicates, cfg.seed)
        .criterion("KS distance to N(0,1)", ks.as_f64(), Bound::Below(cfg.ks_max))
        .stat("mean z", mean)
        .stat("sd z", sd)
        .stat("n", n as f64);
    report.runtime_secs = started.elapsed().as_secs_f64();
    Ok(CltOutcome { samples, ks, report })
}

// ---------------------------------------------------------------- sieve paths

/// Independent sieve traces, replicate `r` seeded with `seed_derive(seed, r)`.
pub fn simulate_sieve_paths<T: Scalar>(
    law: &WLaw<T>,
    seed: u64,
    paths: u64,
    j_max: u32,
    opts: TraceOptions,
    workers: usize,
) -> Result<Vec<OccupancyTrace<T>>> {
    fan_out(paths, workers, |r| simulate_trace(*law, seed_derive(seed, r), j_max, opts))
}

/// Standardized `K*` (or ρ*) series of a trace.
pub fn sieve_series<T: Scalar>(law: &WLaw<T>, trace: &OccupancyTrace<T>, mode: SeriesMode) -> Result<StandardizedSeries<T>> {
    let st = Standardizer::new(*law, mode)?;
    let raw = |c: &crate::occupancy::Checkpoint<T>| match mode {
        SeriesMode::SieveRho => c.rho_star,
        _ => c.k_star,
    };
    st.series(trace.checkpoints.iter().map(|c| (c.j, T::lit(c.j as f64), T::lit(raw(c) as f64))))
}

// ---------------------------------------------------------------- LIL band

#[derive(Debug, Clone, PartialEq)]
pub struct LilSummary {
    pub max_ell: f64,
    pub min_ell: f64,
    /// Entries with `|ℓ| > 1 + eps`.
    pub violations: usize,
    /// `j` at which the running maximum of ℓ was renewed.
    pub records: Vec<u32>,
    pub entries: usize,
}

/// Extremes, band violations and running records of ℓ over `j_lo..=j_hi`.
pub fn lil_trace<T: Scalar>(series: &StandardizedSeries<T>, eps: f64, j_lo: u32, j_hi: u32) -> Result<LilSummary> {
    let mut out = LilSummary { max_ell: f64::NEG_INFINITY, min_ell: f64::INFINITY, violations: 0, records: Vec::new(), entries: 0 };
    for e in series.in_range(j_lo.max(3), j_hi) {
        let ell = e.ell.as_f64();
        if ell > out.max_ell {
            out.records.push(e.j);
        }
        out.max_ell = out.max_ell.max(ell);
        out.min_ell = out.min_ell.min(ell);
        if ell.abs() > 1.0 + eps {
            out.violations += 1;
        }
        out.entries += 1;
    }
    if out.entries == 0 {
        return Err(SieveError::EmptyRange);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LilBand {
    pub j_lo: u32,
    pub j_hi: u32,
    pub eps: f64,
    /// Band for each path's maximum of ℓ.
    pub max_band: (f64, f64),
    pub min_frac_in_band: f64,
    pub pooled_max_at_least: f64,
    pub min_frac_no_violation: f64,
}

impl Default for LilBand {
    fn default() -> Self {
        LilBand {
            j_lo: 5,
            j_hi: 18,
            eps: 0.5,
            max_band: (0.4, 1.3),
            min_frac_in_band: 0.9,
            pooled_max_at_least: 0.8,
            min_frac_no_violation: 0.95,
        }
    }
}

pub fn lil_band_check(name: &str, summaries: &[LilSummary], band: &LilBand, seed: u64) -> CheckReport {
    let (lo, hi) = band.max_band;
    let in_band = summaries.iter().filter(|s| s.max_ell >= lo && s.max_ell <= hi).count();
    let clean = summaries.iter().filter(|s| s.violations == 0).count();
    let pooled = summaries.iter().map(|s| s.max_ell).fold(f64::NEG_INFINITY, f64::max);
    let pooled_min = summaries.iter().map(|s| s.min_ell).fold(f64::INFINITY, f64::min);
    let mut maxima: Vec<f64> = summaries.iter().map(|s| s.max_ell).collect();
    CheckReport::new(name, summaries.len() as u64, seed)
        .criterion(format!("fraction of paths with max ell in [{lo}, {hi}]"), fraction(in_band, summaries.len()), Bound::AtLeast(band.min_frac_in_band))
        .criterion("pooled max ell", pooled, Bound::AtLeast(band.pooled_max_at_least))
        .criterion(
            format!("fraction of paths with |ell| <= {} throughout", 1.0 + band.eps),
            fraction(clean, summaries.len()),
            Bound::AtLeast(band.min_frac_no_violation),
        )
        .stat("median path max ell", median(&mut maxima))
        .stat("pooled min ell", pooled_min)
}

// ---------------------------------------------------------------- coverage

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageSummary {
    pub grid: Vec<f64>,
    /// Per grid point, fraction of paths visiting `[g − delta, g + delta]`.
    pub visit_fraction: Vec<f64>,
    /// Per path, fraction of grid points visited.
    pub path_coverage: Vec<f64>,
    /// Per path, fraction of interior grid points (excluding ±1) visited.
    pub path_interior_coverage: Vec<f64>,
}

/// Grid `−1, −1 + step, ..., 1`.
pub fn coverage_grid(step: f64) -> Vec<f64> {
    let count = (2.0 / step).round() as usize;
    (0..=count).map(|i| -1.0 + i as f64 * step).collect()
}

pub fn limit_point_coverage<T: Scalar>(series: &[StandardizedSeries<T>], grid_step: f64, delta: f64, j_lo: u32, j_hi: u32) -> CoverageSummary {
    let grid = coverage_grid(grid_step);
    let interior: Vec<bool> = grid.iter().map(|g| (g.abs() - 1.0).abs() > 1e-9).collect();
    let visits: Vec<Vec<bool>> = series
        .iter()
        .map(|s| {
            let ells: Vec<f64> = s.in_range(j_lo, j_hi).map(|e| e.ell.as_f64()).collect();
            grid.iter().map(|g| ells.iter().any(|l| (l - g).abs() <= delta)).collect()
        })
        .collect();
    let visit_fraction = (0..grid.len()).map(|i| fraction(visits.iter().filter(|v| v[i]).count(), visits.len())).collect();
    let path_coverage = visits.iter().map(|v| fraction(v.iter().filter(|&&b| b).count(), grid.len())).collect();
    let n_interior = interior.iter().filter(|&&b| b).count();
    let path_interior_coverage = visits
        .iter()
        .map(|v| fraction(v.iter().zip(&interior).filter(|(&hit, &inner)| hit && inner).count(), n_interior))
        .collect();
    CoverageSummary { grid, visit_fraction, path_coverage, path_interior_coverage }
}

/// Pooled coverage: every interior grid point should be visited by some path.
pub fn coverage_check(summary: &CoverageSummary, min_pooled: f64, seed: u64) -> CheckReport {
    let interior: Vec<usize> = (0..summary.grid.len()).filter(|&i| (summary.grid[i].abs() - 1.0).abs() > 1e-9).collect();
    let pooled = interior.iter().filter(|&&i| summary.visit_fraction[i] > 0.0).count();
    let mut cov = summary.path_coverage.clone();
    let mut inner = summary.path_interior_coverage.clone();
    CheckReport::new("limit-point coverage", summary.path_coverage.len() as u64, seed)
        .criterion("fraction of interior grid points visited by some path", fraction(pooled, interior.len()), Bound::AtLeast(min_pooled))
        .stat("median path coverage", median(&mut cov))
        .stat("median path interior coverage", median(&mut inner))
}

// ---------------------------------------------------------------- a.s. approximation

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxPath {
    /// `(j, |K* − ρ*(e^j)| / √j)`
    pub d: Vec<(u32, f64)>,
    /// Slope of `log d_j` on `log j` over `j` with `d_j > 0`.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxSummary {
    pub paths: Vec<ApproxPath>,
    pub median_first: f64,
    pub median_last: f64,
    pub median_slope: f64,
}

pub fn approx_check<T: Scalar>(traces: &[OccupancyTrace<T>], j_lo: u32, j_hi: u32, seed: u64) -> Result<(ApproxSummary, CheckReport)> {
    let mut paths = Vec::with_capacity(traces.len());
    for trace in traces {
        let d: Vec<(u32, f64)> = trace
            .checkpoints
            .iter()
            .filter(|c| c.j >= j_lo && c.j <= j_hi)
            .map(|c| (c.j, c.k_star.abs_diff(c.rho_star) as f64 / (c.j as f64).sqrt()))
            .collect();
        if d.is_empty() {
            return Err(SieveError::EmptyRange);
        }
        let logs: Vec<(f64, f64)> = d.iter().filter(|p| p.1 > 0.0).map(|&(j, v)| ((j as f64).ln(), v.ln())).collect();
        paths.push(ApproxPath { slope: ls_slope(&logs), d });
    }
    let mut first: Vec<f64> = paths.iter().map(|p| p.d[0].1).collect();
    let mut last: Vec<f64> = paths.iter().map(|p| p.d[p.d.len() - 1].1).collect();
    let mut slopes: Vec<f64> = paths.iter().filter_map(|p| p.slope).collect();
    let with_slope = slopes.len();
    let summary = ApproxSummary { median_first: median(&mut first), median_last: median(&mut last), median_slope: median(&mut slopes), paths };
    let report = CheckReport::new(format!("a.s. approximation j={j_lo}..{j_hi}"), traces.len() as u64, seed)
        .criterion(
            format!("median d at j={j_hi} minus median d at j={j_lo}"),
            summary.median_last - summary.median_first,
            Bound::Below(0.0),
        )
        .criterion("median log-log slope", summary.median_slope, Bound::Below(0.0))
        .stat(format!("median d at j={j_lo}"), summary.median_first)
        .stat(format!("median d at j={j_hi}"), summary.median_last)
        .stat("paths with a slope", with_slope as f64);
    Ok((summary, report))
}

// ---------------------------------------------------------------- fourth moments

/// How the pair `(x, y)` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairScale {
    /// `E(N(x) − N(y))⁴ / (x − y)⁴`, requires `x − y > 1`.
    Linear,
    /// `E(ρ*(x) − ρ*(y))⁴ / (log(x/y))⁴` for a sieve law, requires `x/y > e`.
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary {
    pub pairs: Vec<(f64, f64)>,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub argmax: usize,
    /// Whether the maximum sits strictly inside the pair list.
    pub max_interior: bool,
}

/// Monte Carlo fourth-moment ratios over a grid of pairs.
pub fn moment_ratio<T: Scalar, L: StepLaw<T>>(
    law: &L,
    pairs: &[(T, T)],
    scale: PairScale,
    replicates: u64,
    seed: u64,
    workers: usize,
) -> Result<MomentSummary> {
    if pairs.is_empty() || replicates == 0 {
        return Err(invalid("moment_ratio needs pairs and replicates"));
    }
    // arguments of N and the gap in the denominator
    let mut args = Vec::with_capacity(pairs.len());
    for &(x, y) in pairs {
        match scale {
            PairScale::Linear => {
                if !(y >= T::zero() && x - y > T::one()) {
                    return Err(invalid(format!("pair ({x}, {y}) violates 0 <= y, x - y > 1")));
                }
                args.push((x, y, x - y));
            }
            PairScale::Log => {
                if !law.is_sieve() {
                    return Err(SieveError::NotSieve);
                }
                if !(y >= T::one() && x / y > T::E()) {
                    return Err(invalid(format!("pair ({x}, {y}) violates y >= 1, x / y > e")));
                }
                args.push((x.ln(), y.ln(), (x / y).ln()));
            }
        }
    }
    let mut sorted: Vec<T> = args.iter().flat_map(|&(a, b, _)| [a, b]).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite pair"));
    sorted.dedup();
    let per_rep = fan_out(replicates, workers, |r| {
        let counts = stream_counts(law.clone(), seed_derive(seed, r), &sorted, Counter::Perturbed)?;
        let at = |v: T| counts[sorted.partition_point(|&s| s < v)];
        Ok(args.iter().map(|&(a, b, _)| (at(a) as f64 - at(b) as f64).powi(4)).collect::<Vec<f64>>())
    })?;
    let ratios: Vec<f64> = args
        .iter()
        .enumerate()
        .map(|(i, &(_, _, gap))| per_rep.iter().map(|v| v[i]).sum::<f64>() / replicates as f64 / gap.as_f64().powi(4))
        .collect();
    let (mut argmax, mut max_ratio, mut min_ratio) = (0, f64::NEG_INFINITY, f64::INFINITY);
    for (i, &r) in ratios.iter().enumerate() {
        if r > max_ratio {
            max_ratio = r;
            argmax = i;
        }
        min_ratio = min_ratio.min(r);
    }
    Ok(MomentSummary {
        pairs: pairs.iter().map(|&(x, y)| (x.as_f64(), y.as_f64())).collect(),
        max_interior: argmax > 0 && argmax + 1 < ratios.len(),
        ratios,
        max_ratio,
        min_ratio,
        argmax,
    })
}

pub fn moment_check(name: &str, summary: &MomentSummary, max_spread: f64, replicates: u64, seed: u64) -> CheckReport {
    let mut report = CheckReport::new(name, replicates, seed)
        .criterion("max/min ratio across pairs", summary.max_ratio / summary.min_ratio, Bound::Below(max_spread))
        .stat("max ratio", summary.max_ratio)
        .stat("min ratio", summary.min_ratio)
        .stat("argmax pair index", summary.argmax as f64)
        .stat("max attained interior", if summary.max_interior { 1.0 } else { 0.0 });
    for ((x, y), r) in summary.pairs.iter().zip(&summary.ratios) {
        report = report.stat(format!("ratio ({x}, {y})"), *r);
    }
    report
}

// ---------------------------------------------------------------- renewal LIL

/// Standardized ν (or N, for a generic law) at `(j, t_j)` checkpoints of one streamed path.
pub fn streamed_series<T: Scalar, L: StepLaw<T>>(law: &L, seed: u64, checkpoints: &[(u32, T)], mode: SeriesMode) -> Result<StandardizedSeries<T>> {
    let counter = match mode {
        SeriesMode::RenewalNu => Counter::Renewal,
        SeriesMode::GenericN | SeriesMode::SieveRho => Counter::Perturbed,
        SeriesMode::SieveK => return Err(invalid("K* series come from occupancy traces")),
    };
    let st = Standardizer::new(law.clone(), mode)?;
    let xs: Vec<T> = checkpoints.iter().map(|c| c.1).collect();
    let counts = stream_counts(law.clone(), seed, &xs, counter)?;
    st.series(checkpoints.iter().zip(counts).map(|(&(j, t), c)| (j, t, T::lit(c as f64))))
}

/// `(j, e^j)` for `j = lo..=hi`.
pub fn exp_checkpoints<T: Scalar>(lo: u32, hi: u32) -> Vec<(u32, T)> {
    (lo..=hi).map(|j| (j, T::lit(j as f64).exp())).collect()
}

pub struct RenewalLilOutcome<T> {
    pub series: Vec<StandardizedSeries<T>>,
    pub summaries: Vec<LilSummary>,
    pub report: CheckReport,
}

pub fn renewal_lil<T: Scalar, L: StepLaw<T>>(
    law: &L,
    checkpoints: &[(u32, T)],
    paths: u64,
    seed: u64,
    band: &LilBand,
    workers: usize,
) -> Result<RenewalLilOutcome<T>> {
    let started = Instant::now();
    let series = fan_out(paths, workers, |r| streamed_series(law, seed_derive(seed, r), checkpoints, SeriesMode::RenewalNu))?;
    let summaries = series.iter().map(|s| lil_trace(s, band.eps, band.j_lo, band.j_hi)).collect::<Result<Vec<_>>>()?;
    let mut report = lil_band_check(&format!("renewal LIL xi-law={law}"), &summaries, band, seed);
    report.runtime_secs = started.elapsed().as_secs_f64();
    Ok(RenewalLilOutcome { series, summaries, report })
}

// ---------------------------------------------------------------- sup LIL

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupPoint {
    pub n: f64,
    /// `sup_{y ≤ n} |ν(y) − y/m| / √(2n log log n)`
    pub sup_stat: f64,
    /// `|ν(n) − n/m| / √(2n log log n)`
    pub endpoint_stat: f64,
}

/// Running supremum of `|ν(y) − y/m|` along one streamed path.
///
/// ν is a step function and `y/m` is monotone, so the supremum over each
/// flat piece is attained at its ends: just before and just after each jump.
pub fn sup_lil_path<T: Scalar, L: StepLaw<T>>(law: &L, seed: u64, ns: &[T]) -> Result<Vec<SupPoint>> {
    if ns.windows(2).any(|w| w[0] > w[1]) || ns.first().is_some_and(|&n| n < T::lit(3.0)) {
        return Err(invalid("sup_lil checkpoints must be nondecreasing and at least 3"));
    }
    let m = law.moment_profile(T::one())?.mu.as_f64();
    let mut walk = WalkStream::new(law.clone(), seed);
    let mut next = walk.next().expect("infinite stream");
    // y = 0: ν(0) = 1
    let mut sup = 1.0f64;
    let mut out = Vec::with_capacity(ns.len());
    for &n in ns {
        let nf = n.as_f64();
        while next.position.as_f64() <= nf {
            let k = next.index as f64;
            let s = next.position.as_f64() / m;
            sup = sup.max((k - s).abs()).max((k + 1.0 - s).abs());
            if next.index >= DEFAULT_STEP_CAP {
                return Err(SieveError::StepCap { cap: DEFAULT_STEP_CAP });
            }
            next = walk.next().expect("infinite stream");
        }
        let nu_n = next.index as f64;
        let end = (nu_n - nf / m).abs();
        sup = sup.max(end);
        let den = (2.0 * nf * nf.ln().ln()).sqrt();
        out.push(SupPoint { n: nf, sup_stat: sup / den, endpoint_stat: end / den });
    }
    Ok(out)
}

pub struct SupLilOutcome {
    pub paths: Vec<Vec<SupPoint>>,
    pub report: CheckReport,
}

pub fn sup_lil<T: Scalar, L: StepLaw<T>>(
    law: &L,
    ns: &[T],
    paths: u64,
    seed: u64,
    mean_band: (f64, f64),
    workers: usize,
) -> Result<SupLilOutcome> {
    let started = Instant::now();
    let profile = law.moment_profile(T::one())?;
    if !profile.lil_eligible() {
        return Err(SieveError::Ineligible { law: law.to_string() });
    }
    let data = fan_out(paths, workers, |r| sup_lil_path(law, seed_derive(seed, r), ns))?;
    let terminal: Vec<f64> = data.iter().map(|p| p.last().map_or(f64::NAN, |q| q.sup_stat)).collect();
    let mean = terminal.iter().sum::<f64>() / terminal.len().max(1) as f64;
    let dominated = data.iter().filter(|p| p.iter().all(|q| q.sup_stat >= q.endpoint_stat)).count();
    let max_terminal = terminal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut report = CheckReport::new(format!("sup LIL xi-law={law}"), paths, seed)
        .criterion("mean terminal sup statistic", mean, Bound::Within(mean_band.0, mean_band.1))
        .criterion("paths with sup < |endpoint|", (data.len() - dominated) as f64, Bound::AtMost(0.0))
        .stat("target s*m^(-3/2)", profile.lil_constant().as_f64())
        .stat("max terminal sup statistic", max_terminal);
    report.runtime_secs = started.elapsed().as_secs_f64();
    Ok(SupLilOutcome { paths: data, report })
}

// ---------------------------------------------------------------- Strassen envelope

/// `X_n(t) = (ν(nt) − nt/m) / √(2s²m⁻³ n log log n)` on `t_grid`.
pub fn strassen_path<T: Scalar, L: StepLaw<T>>(law: &L, seed: u64, n: T, t_grid: &[T]) -> Result<Vec<(T, T)>> {
    if n < T::lit(3.0) {
        return Err(invalid("strassen_envelope needs n >= 3"));
    }
    let st = Standardizer::new(law.clone(), SeriesMode::RenewalNu)?;
    let p = st.profile();
    let den = (T::lit(2.0) * p.sigma2 / p.mu.powi(3) * n * n.ln().ln()).sqrt();
    let xs: Vec<T> = t_grid.iter().map(|&t| n * t).collect();
    let counts = stream_counts(law.clone(), seed, &xs, Counter::Renewal)?;
    Ok(t_grid.iter().zip(counts).map(|(&t, c)| (t, (T::lit(c as f64) - n * t / p.mu) / den)).collect())
}

/// `0, step, 2 step, ..., 1`.
pub fn unit_grid<T: Scalar>(step: f64) -> Vec<T> {
    let count = (1.0 / step).round() as usize;
    (0..=count).map(|i| T::lit(i as f64 / count as f64)).collect()
}

pub struct StrassenOutcome<T> {
    pub paths: Vec<Vec<(T, T)>>,
    /// Per path, whether `|X_n(t)| > √t + eps` somewhere on the grid.
    pub violated: Vec<bool>,
    pub report: CheckReport,
}

#[allow(clippy::too_many_arguments)]
pub fn strassen_envelope<T: Scalar, L: StepLaw<T>>(
    law: &L,
    n: T,
    t_grid: &[T],
    eps: f64,
    paths: u64,
    seed: u64,
    max_violation_fraction: f64,
    workers: usize,
) -> Result<StrassenOutcome<T>> {
    let started = Instant::now();
    let data = fan_out(paths, workers, |r| strassen_path(law, seed_derive(seed, r), n, t_grid))?;
    let violated: Vec<bool> = data
        .iter()
        .map(|p| p.iter().any(|&(t, x)| x.as_f64().abs() > t.as_f64().sqrt() + eps))
        .collect();
    let bad = violated.iter().filter(|&&v| v).count();
    let worst = data
        .iter()
        .flat_map(|p| p.iter().map(|&(t, x)| x.as_f64().abs() - t.as_f64().sqrt()))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut report = CheckReport::new(format!("Strassen envelope xi-law={law} n={n}"), paths, seed)
        .criterion(format!("fraction of paths leaving sqrt(t)+{eps}"), fraction(bad, violated.len()), Bound::Below(max_violation_fraction))
        .stat("max of |X_n(t)| - sqrt(t)", worst);
    report.runtime_secs = started.elapsed().as_secs_f64();
    Ok(StrassenOutcome { paths: data, violated, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{GenericLaw, Marginal, MomentProfile};
    use crate::occupancy::{Allocation, Checkpoint};
    use crate::verify::SeriesEntry;

    fn series_of(ells: &[f64]) -> StandardizedSeries<f64> {
        let profile = MomentProfile { mu: 1.0, sigma2: 1.0, m_eta: 1.0, eta_moment_a: 1.0, a: 1.0 };
        StandardizedSeries {
            mode: SeriesMode::SieveK,
            law: "uniform".into(),
            profile,
            entries: ells
                .iter()
                .enumerate()
                .map(|(i, &ell)| SeriesEntry { j: 3 + i as u32, arg: 3.0 + i as f64, raw: 0.0, centering: 0.0, z: 0.0, ell })
                .collect(),
        }
    }

    #[test]
    fn lil_trace_zero_series() {
        let s = lil_trace(&series_of(&[0.0; 6]), 0.2, 3, 20).unwrap();
        assert_eq!((s.max_ell, s.min_ell, s.violations), (0.0, 0.0, 0));
    }

    #[test]
    fn lil_trace_single_violation() {
        let s = lil_trace(&series_of(&[1.3]), 0.2, 3, 20).unwrap();
        assert_eq!(s.violations, 1);
        let s = lil_trace(&series_of(&[0.1, 0.5, 0.2, 0.9]), 0.2, 3, 20).unwrap();
        assert_eq!(s.records, vec![3, 4, 6]);
    }

    #[test]
    fn lil_trace_empty_range() {
        assert_eq!(lil_trace(&series_of(&[0.1]), 0.2, 10, 20), Err(SieveError::EmptyRange));
    }

    #[test]
    fn coverage_examples() {
        let c = limit_point_coverage(&[series_of(&[0.5; 5])], 1.0, 0.1, 3, 20);
        assert_eq!(c.grid, vec![-1.0, 0.0, 1.0]);
        assert_eq!(c.path_coverage, vec![0.0]);
        let c = limit_point_coverage(&[series_of(&[0.0; 5])], 1.0, 0.1, 3, 20);
        assert!((c.path_coverage[0] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.visit_fraction, vec![0.0, 1.0, 0.0]);
        assert_eq!(c.path_interior_coverage, vec![1.0]);
    }

    fn trace_with(ks: &[(u64, u64)]) -> OccupancyTrace<f64> {
        OccupancyTrace {
            law: "uniform".into(),
            seed: 0,
            checkpoints: ks
                .iter()
                .enumerate()
                .map(|(i, &(k, r))| Checkpoint { j: i as u32 + 1, n: 0, k_star: k, rho_star: r, theta: 0.0, delta: 0.0, delta_tail: 0.0 })
                .collect(),
            max_box_index: 0,
            truncated: false,
        }
    }

    #[test]
    fn approx_identical_columns() {
        let t = trace_with(&[(1, 1), (3, 3), (5, 5), (7, 7), (9, 9)]);
        let (s, _) = approx_check(&[t], 1, 5, 0).unwrap();
        assert!(s.paths[0].d.iter().all(|&(_, d)| d == 0.0));
        assert_eq!(s.paths[0].slope, None);
    }

    #[test]
    fn approx_dyadic_by_hand() {
        // W ≡ 1/2: ρ*(e^j) = ⌊j / log 2⌋
        let law = WLaw::deterministic(0.5f64).unwrap();
        let trace = simulate_trace(law, 3, 8, TraceOptions::default()).unwrap();
        let (s, _) = approx_check(std::slice::from_ref(&trace), 1, 8, 3).unwrap();
        for (c, &(j, d)) in trace.checkpoints.iter().zip(&s.paths[0].d) {
            let rho = (j as f64 / 2f64.ln()).floor() as u64;
            assert_eq!(c.rho_star, rho);
            assert_eq!(d, c.k_star.abs_diff(rho) as f64 / (j as f64).sqrt());
        }
    }

    #[test]
    fn slope_helper() {
        assert_eq!(ls_slope(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]), Some(2.0));
        assert_eq!(ls_slope(&[(1.0, 1.0)]), None);
    }

    #[test]
    fn deterministic_moment_ratio() {
        // ξ ≡ 1, η ≡ 0: N(x) − N(y) = ⌊x⌋ − ⌊y⌋
        let law = GenericLaw::new(Marginal::Constant(1.0f64), Marginal::Constant(0.0)).unwrap();
        let pairs = [(3.5, 1.2), (10.0, 0.0), (7.9, 2.1)];
        let s = moment_ratio(&law, &pairs, PairScale::Linear, 5, 1, 1).unwrap();
        for (&(x, y), r) in pairs.iter().zip(&s.ratios) {
            let want = ((x.floor() - y.floor()) / (x - y)).powi(4);
            assert!((r - want).abs() < 1e-12);
            assert!(*r <= 16.0);
        }
    }

    #[test]
    fn moment_ratio_zero_region() {
        let law = GenericLaw::new(Marginal::Constant(1.0f64), Marginal::Constant(5.0)).unwrap();
        let s = moment_ratio(&law, &[(3.0, 0.0)], PairScale::Linear, 3, 1, 1).unwrap();
        assert_eq!(s.ratios, vec![0.0]);
    }

    #[test]
    fn moment_ratio_rejects_close_pairs() {
        let law = WLaw::<f64>::Uniform;
        assert!(moment_ratio(&law, &[(2.0, 1.5)], PairScale::Linear, 3, 1, 1).is_err());
        assert!(moment_ratio(&law, &[(2.0, 1.0)], PairScale::Log, 3, 1, 1).is_err());
        let g = GenericLaw::renewal(Marginal::Exponential { rate: 1.0f64 }).unwrap();
        assert_eq!(moment_ratio(&g, &[(100.0, 1.0)], PairScale::Log, 3, 1, 1).unwrap_err(), SieveError::NotSieve);
    }

    #[test]
    fn moment_ratio_reproducible() {
        let law = WLaw::<f64>::Uniform;
        let pairs = [(12.0, 10.0), (18.0, 10.0)];
        let a = moment_ratio(&law, &pairs, PairScale::Linear, 200, 5, 1).unwrap();
        let b = moment_ratio(&law, &pairs, PairScale::Linear, 200, 5, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn renewal_requires_variance() {
        let law = GenericLaw::renewal(Marginal::Constant(1.0f64)).unwrap();
        let cps = exp_checkpoints::<f64>(3, 6);
        assert!(matches!(renewal_lil(&law, &cps, 2, 0, &LilBand::default(), 1), Err(SieveError::Ineligible { .. })));
    }

    #[test]
    fn unit_renewal_sup_is_small() {
        // ξ ≡ 1: |ν(y) − y| ≤ 1 everywhere
        let law = GenericLaw::renewal(Marginal::Constant(1.0f64)).unwrap();
        let pts = sup_lil_path(&law, 0, &[10.5, 1000.0, 1e6]).unwrap();
        for p in &pts {
            assert!(p.sup_stat * (2.0 * p.n * p.n.ln().ln()).sqrt() <= 1.0 + 1e-9);
        }
        assert!(pts[2].sup_stat < 1e-3);
    }

    #[test]
    fn sup_dominates_endpoint() {
        let law = GenericLaw::renewal(Marginal::Exponential { rate: 1.0f64 }).unwrap();
        for seed in 0..20 {
            for p in sup_lil_path(&law, seed, &[5.0, 50.0, 500.0, 5000.0]).unwrap() {
                assert!(p.sup_stat >= p.endpoint_stat);
            }
        }
    }

    #[test]
    fn sup_matches_dense_scan() {
        let law = GenericLaw::renewal(Marginal::Exponential { rate: 2.0f64 }).unwrap();
        let n = 300.0;
        let got = sup_lil_path(&law, 11, &[n]).unwrap()[0];
        let path = WalkPath::new(law, 11).extended(n).unwrap();
        // brute force: one-sided limits at every jump plus the end points
        let mut sup = 1.0f64;
        for (k, &s) in path.positions().iter().enumerate().skip(1) {
            if s > n {
                break;
            }
            sup = sup.max((k as f64 - 2.0 * s).abs()).max((k as f64 + 1.0 - 2.0 * s).abs());
        }
        sup = sup.max((path.nu(n).unwrap() as f64 - 2.0 * n).abs());
        let den = (2.0 * n * n.ln().ln()).sqrt();
        assert!((got.sup_stat - sup / den).abs() < 1e-12);
    }

    #[test]
    fn strassen_small_cases() {
        let law = GenericLaw::renewal(Marginal::Exponential { rate: 1.0f64 }).unwrap();
        let grid = unit_grid::<f64>(0.25);
        let n = 1e6;
        let p = strassen_path(&law, 0, n, &grid).unwrap();
        let den = (2.0 * n * n.ln().ln()).sqrt();
        assert_eq!(p[0], (0.0, 1.0 / den));
        let unit = GenericLaw::new(Marginal::Constant(1.0f64), Marginal::Constant(0.0)).unwrap();
        assert!(strassen_path(&unit, 0, n, &grid).is_err());
    }

    #[test]
    fn generic_zero_eta_matches_renewal() {
        let xi = Marginal::Exponential { rate: 1.5f64 };
        let generic = GenericLaw::new(xi, Marginal::Constant(0.0)).unwrap();
        let cps = exp_checkpoints::<f64>(3, 9);
        for seed in 0..5 {
            let a = streamed_series(&generic, seed, &cps, SeriesMode::GenericN).unwrap();
            let b = streamed_series(&generic, seed, &cps, SeriesMode::RenewalNu).unwrap();
            assert_eq!(a.entries, b.entries);
            // and the stored path agrees
            let path = WalkPath::new(generic, seed).extended(cps.last().unwrap().1).unwrap();
            for e in &a.entries {
                assert_eq!(e.raw, path.n_count(e.arg).unwrap() as f64);
            }
        }
    }

    #[test]
    fn clt_guards() {
        let cfg = CltConfig { replicates: 10, ..Default::default() };
        assert!(clt_check(&WLaw::<f64>::Uniform, &cfg).is_err());
        let det = WLaw::deterministic(0.5f64).unwrap();
        assert!(matches!(clt_check(&det, &CltConfig::default()), Err(SieveError::Ineligible { .. })));
    }

    #[test]
    fn clt_small_run_is_deterministic() {
        let cfg = CltConfig { n_exp: 6, replicates: 500, seed: 3, workers: 2, trace: TraceOptions { allocation: Allocation::Jump, ..Default::default() }, ..Default::default() };
        let a = clt_check(&WLaw::<f64>::Uniform, &cfg).unwrap();
        let b = clt_check(&WLaw::<f64>::Uniform, &CltConfig { workers: 1, ..cfg.clone() }).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.ks, b.ks);
    }
}
