//! Ball allocation for the Bernoulli sieve.
//!
//! A ball `U` uniform on (0,1] lands in box `b` with `R_b < U ≤ R_{b−1}`.
//! With `E = −log U` and `R_k = e^{−S_k}` this is `b = #{k ≥ 0 : S_k ≤ E}`,
//! i.e. `b = ν(E)`, so allocation reuses the walk counting kernel and never
//! touches the underflowing products `R_k`.

use std::collections::BTreeMap;

use num_traits::{FromPrimitive, Num};

use crate::error::{invalid, Result};
use crate::laws::WLaw;
use crate::rng::{lane, stream, RandomStream};
use crate::scalar::Scalar;
use crate::walks::WalkPath;

/// Default cap on the number of balls in one trace.
pub const DEFAULT_BALL_BUDGET: u64 = 100_000_000;

/// Materialize boxes until the unmaterialized tail mass is below `TAIL_MASS / n`.
const TAIL_MASS: f64 = 1e-12;

pub type SievePath<T> = WalkPath<T, WLaw<T>>;

/// How balls are thrown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Allocation {
    /// One ball at a time: exponential draw, box lookup, first-hit marking.
    Sequential,
    /// Skip directly to the next ball that hits an empty box.
    ///
    /// Given the occupied set, each further ball is new with probability `q`
    /// (the unoccupied mass), so the wait is geometric and the new box is
    /// drawn proportionally to the empty-box frequencies. Same law for the
    /// occupied-box process as `Sequential`, in `O(K²)` instead of `O(n)`.
    #[default]
    Jump,
}

/// `[e^j]` for `j = 1..=j_max`.
pub fn checkpoint_sizes(j_max: u32) -> Vec<u64> {
    (1..=j_max).map(|j| (j as f64).exp().floor() as u64).collect()
}

/// Box receiving the ball at `u ∈ (0, 1]`. Extends the path on demand.
pub fn box_index<T: Scalar>(path: &mut SievePath<T>, u: T) -> Result<u64> {
    if !(u > T::zero() && u <= T::one()) {
        return Err(invalid(format!("ball position must lie in (0,1], got {u}")));
    }
    box_of_exponential(path, -u.ln())
}

#[inline]
fn box_of_exponential<T: Scalar>(path: &mut SievePath<T>, e: T) -> Result<u64> {
    if e > path.horizon() {
        path.extend(e)?;
    }
    path.nu(e)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaDelta<T> {
    /// `Σ e^{−n p_k} 1{n p_k ≥ 1}`
    pub theta: T,
    /// `n Σ p_k 1{n p_k < 1}`, including the tail beyond the materialized boxes.
    pub delta: T,
    /// The tail part of `delta`, `n R_K`, for the last materialized box `K`.
    pub delta_tail: T,
    pub boxes: usize,
}

/// Θ_n and Δ_n of the sieve frequencies along `path`.
///
/// Every frequency in the tail beyond box `K` is below `R_K < 10⁻¹²/n`, so
/// the tail contributes nothing to Θ and exactly `n R_K` to Δ.
pub fn theta_delta<T: Scalar>(path: &mut SievePath<T>, n: u64) -> Result<ThetaDelta<T>> {
    if n == 0 {
        return Err(invalid("theta_delta needs n >= 1"));
    }
    let ln_n = T::lit(n as f64).ln();
    let margin = -T::lit(TAIL_MASS).ln();
    path.extend(ln_n + margin)?;
    let boxes = path.steps();
    let (mut theta, mut delta) = (T::zero(), T::zero());
    for &pert in &path.perturbed()[..boxes] {
        // n p_k = exp(log n − (S_{k−1} + η_k))
        let np = (ln_n - pert).exp();
        if ln_n >= pert {
            theta = theta + (-np).exp();
        } else {
            delta = delta + np;
        }
    }
    let delta_tail = (ln_n - path.positions()[boxes]).exp();
    Ok(ThetaDelta { theta, delta: delta + delta_tail, delta_tail, boxes })
}

/// Occupied-box counts along one path at increasing ball counts.
pub fn allocate<T: Scalar>(
    path: &mut SievePath<T>,
    ball_seed: u64,
    checkpoints: &[u64],
    allocation: Allocation,
) -> Result<AllocationRun> {
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("checkpoints must be nondecreasing"));
    }
    let mut rng = stream(ball_seed, lane::BALLS);
    match allocation {
        Allocation::Sequential => allocate_sequential(path, &mut rng, checkpoints),
        Allocation::Jump => allocate_jump(path, &mut rng, checkpoints),
    }
}

/// Result of [`allocate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationRun {
    /// `K_n` at each requested checkpoint.
    pub occupied: Vec<u64>,
    pub max_box_index: u64,
}

#[derive(Default)]
struct Occupied {
    hit: Vec<bool>,
    count: u64,
    max_box: u64,
}

impl Occupied {
    #[inline]
    fn mark(&mut self, b: u64) {
        let i = b as usize;
        if i >= self.hit.len() {
            self.hit.resize(i + 1, false);
        }
        if !self.hit[i] {
            self.hit[i] = true;
            self.count += 1;
            self.max_box = self.max_box.max(b);
        }
    }

    fn is_hit(&self, b: u64) -> bool {
        self.hit.get(b as usize).copied().unwrap_or(false)
    }
}

fn allocate_sequential<T: Scalar>(path: &mut SievePath<T>, rng: &mut RandomStream, checkpoints: &[u64]) -> Result<AllocationRun> {
    let mut occ = Occupied::default();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut thrown = 0u64;
    for &target in checkpoints {
        while thrown < target {
            let e = -T::open01(rng).ln();
            let b = box_of_exponential(path, e)?;
            occ.mark(b);
            thrown += 1;
        }
        out.push(occ.count);
    }
    Ok(AllocationRun { occupied: out, max_box_index: occ.max_box })
}

fn allocate_jump<T: Scalar>(path: &mut SievePath<T>, rng: &mut RandomStream, checkpoints: &[u64]) -> Result<AllocationRun> {
    let mut occ = Occupied::default();
    let mut out = Vec::with_capacity(checkpoints.len());
    let last = checkpoints.last().copied().unwrap_or(0);
    let mut thrown = 0u64;
    let mut next_cp = 0usize;
    while next_cp < checkpoints.len() {
        // Unoccupied mass: empty boxes up to the largest occupied one, plus the tail R_M.
        let m = occ.max_box as usize;
        let empty: T = (1..=m)
            .filter(|&k| !occ.is_hit(k as u64))
            .map(|k| path.log_frequency(k).expect("materialized box").exp())
            .sum();
        let tail = (-path.positions()[m]).exp();
        let q = empty + tail;
        let wait = geometric(rng, q);
        let arrival = thrown.saturating_add(wait);
        while next_cp < checkpoints.len() && checkpoints[next_cp] < arrival {
            out.push(occ.count);
            next_cp += 1;
        }
        if arrival > last {
            break;
        }
        thrown = arrival;
        let mut v = T::open01(rng) * q;
        let mut chosen = None;
        for k in 1..=m {
            if occ.is_hit(k as u64) {
                continue;
            }
            let p = path.log_frequency(k).expect("materialized box").exp();
            if v < p {
                chosen = Some(k as u64);
                break;
            }
            v = v - p;
        }
        let b = match chosen {
            Some(b) => b,
            // Memoryless tail: E given E > S_M is S_M + Exp(1).
            None => {
                let e = path.positions()[m] - T::open01(rng).ln();
                let b = box_of_exponential(path, e)?;
                if occ.is_hit(b) {
                    // Rounding pushed the draw below S_M; fall back to the first empty box after M.
                    m as u64 + 1
                } else {
                    b
                }
            }
        };
        occ.mark(b);
    }
    Ok(AllocationRun { occupied: out, max_box_index: occ.max_box })
}

/// Trials up to and including the first success, success probability `q`.
fn geometric<T: Scalar>(rng: &mut RandomStream, q: T) -> u64 {
    if q >= T::one() {
        return 1;
    }
    if q <= T::zero() {
        return u64::MAX;
    }
    let g = (T::open01(rng).ln() / (-q).ln_1p()).floor().as_f64();
    if g >= u64::MAX as f64 - 1.0 {
        u64::MAX
    } else {
        g as u64 + 1
    }
}

/// One geometric checkpoint of an [`OccupancyTrace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint<T> {
    pub j: u32,
    /// `[e^j]`
    pub n: u64,
    pub k_star: u64,
    /// ρ*(e^j) = N*(j)
    pub rho_star: u64,
    pub theta: T,
    pub delta: T,
    pub delta_tail: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyTrace<T> {
    pub law: String,
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint<T>>,
    pub max_box_index: u64,
    /// Set when the ball budget cut the requested checkpoints short.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceOptions {
    pub ball_budget: u64,
    pub allocation: Allocation,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { ball_budget: DEFAULT_BALL_BUDGET, allocation: Allocation::default() }
    }
}

/// Trace of `K*`, ρ*, Θ and Δ at `n_j = [e^j]`, `j = 1..=j_max`, along one sieve path.
pub fn simulate_trace<T: Scalar>(law: WLaw<T>, seed: u64, j_max: u32, opts: TraceOptions) -> Result<OccupancyTrace<T>> {
    let mut path = WalkPath::new(law, seed);
    trace_on_path(&mut path, seed, j_max, opts)
}

/// As [`simulate_trace`], on an existing path with an explicit ball seed.
pub fn trace_on_path<T: Scalar>(path: &mut SievePath<T>, ball_seed: u64, j_max: u32, opts: TraceOptions) -> Result<OccupancyTrace<T>> {
    if j_max == 0 {
        return Err(invalid("j_max must be at least 1"));
    }
    let all = checkpoint_sizes(j_max);
    let sizes: Vec<u64> = all.iter().copied().take_while(|&n| n <= opts.ball_budget).collect();
    let truncated = sizes.len() < all.len();
    let run = allocate(path, ball_seed, &sizes, opts.allocation)?;
    let mut checkpoints = Vec::with_capacity(sizes.len());
    for (i, (&n, &k_star)) in sizes.iter().zip(&run.occupied).enumerate() {
        let j = i as u32 + 1;
        let td = theta_delta(path, n)?;
        let x = T::lit(j as f64);
        path.extend(x)?;
        let rho_star = path.n_count(x)?;
        checkpoints.push(Checkpoint { j, n, k_star, rho_star, theta: td.theta, delta: td.delta, delta_tail: td.delta_tail });
    }
    Ok(OccupancyTrace {
        law: path.law().to_string(),
        seed: path.seed(),
        checkpoints,
        max_box_index: run.max_box_index,
        truncated,
    })
}

/// Ball counts `Z_{n,k}` per box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxHistogram {
    pub counts: BTreeMap<u64, u64>,
    pub n: u64,
}

impl BoxHistogram {
    /// `K_n = #{k : Z_{n,k} ≥ 1}`
    pub fn occupied(&self) -> u64 {
        self.counts.values().filter(|&&z| z >= 1).count() as u64
    }

    /// Boxes with `n p_k ≥ 1` that received no ball, and boxes with `n p_k < 1` that did.
    pub fn sandwich_terms<T: Scalar>(&self, path: &mut SievePath<T>) -> Result<(u64, u64)> {
        let ln_n = T::lit(self.n as f64).ln();
        path.extend(ln_n)?;
        // Large boxes need not be a prefix of the box indices; test each one.
        let misses = path
            .perturbed()
            .iter()
            .enumerate()
            .filter(|&(i, &pert)| ln_n >= pert && self.counts.get(&(i as u64 + 1)).copied().unwrap_or(0) == 0)
            .count() as u64;
        let mut small_hits = 0;
        for (&b, &z) in &self.counts {
            if z == 0 {
                continue;
            }
            let small = match path.log_frequency(b as usize) {
                Some(lp) => lp + ln_n < T::zero(),
                None => true,
            };
            if small {
                small_hits += 1;
            }
        }
        Ok((misses, small_hits))
    }
}

/// Throw `n` balls sequentially and keep the full histogram.
pub fn histogram<T: Scalar>(path: &mut SievePath<T>, ball_seed: u64, n: u64) -> Result<BoxHistogram> {
    let mut rng = stream(ball_seed, lane::BALLS);
    let mut counts = BTreeMap::new();
    for _ in 0..n {
        let e = -T::open01(&mut rng).ln();
        let b = box_of_exponential(path, e)?;
        *counts.entry(b).or_insert(0) += 1;
    }
    Ok(BoxHistogram { counts, n })
}

/// `E K_n = Σ_k (1 − (1 − p_k)^n)` for the frequencies of a frozen path.
pub fn expected_occupied<T: Scalar>(path: &mut SievePath<T>, n: u64) -> Result<T> {
    let nf = T::lit(n as f64);
    path.extend(nf.ln() - T::lit(TAIL_MASS).ln())?;
    let boxes = path.steps();
    let body: T = (1..=boxes)
        .map(|k| {
            let p = path.log_frequency(k).expect("materialized box").exp();
            -(nf * (-p).ln_1p()).exp_m1()
        })
        .sum();
    Ok(body)
}

/// Exact law of the number of occupied boxes for `n` balls over a finite
/// frequency vector, by enumerating all `len(p)^n` allocations.
///
/// Generic over the number type so exact rationals can be used.
pub fn brute_force_k_distribution<N>(p: &[N], n: usize) -> Result<BTreeMap<usize, N>>
where
    N: Num + Clone + PartialOrd + FromPrimitive,
{
    if p.is_empty() || p.len() > 8 {
        return Err(invalid(format!("brute force needs 1..=8 boxes, got {}", p.len())));
    }
    if n > 8 {
        return Err(invalid(format!("brute force needs at most 8 balls, got {n}")));
    }
    let total = p.iter().cloned().fold(N::zero(), |s, x| s + x);
    let slack = N::from_f64(1e-12).unwrap_or_else(N::zero);
    if p.iter().any(|x| *x < N::zero()) || total.clone() > N::one() + slack.clone() || total < N::one() - slack {
        return Err(invalid("frequencies must be nonnegative and sum to 1"));
    }
    let boxes = p.len();
    let mut dist: BTreeMap<usize, N> = BTreeMap::new();
    let mut assignment = vec![0usize; n];
    loop {
        let mut weight = N::one();
        let mut seen = [false; 8];
        let mut k = 0;
        for &b in &assignment {
            weight = weight * p[b].clone();
            if !seen[b] {
                seen[b] = true;
                k += 1;
            }
        }
        let slot = dist.entry(k).or_insert_with(N::zero);
        *slot = slot.clone() + weight;
        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                return Ok(dist);
            }
            assignment[i] += 1;
            if assignment[i] < boxes {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

/// Elementary symmetric sums `e_1..e_4` of a 0/1 sequence: the number of
/// indices, pairs, triples and quadruples of set indicators.
pub fn indicator_power_sums(indicators: &[bool]) -> [u128; 4] {
    let mut e = [0u128; 5];
    e[0] = 1;
    for &on in indicators {
        if on {
            for r in (1..=4).rev() {
                e[r] += e[r - 1];
            }
        }
    }
    [e[1], e[2], e[3], e[4]]
}

/// `(Σ 1_{A_k})⁴` and `Σ1 + 14Σ_{j<i} + 36Σ_{j<i<l} + 24Σ_{j<i<l<m}`.
pub fn multinomial_fourth_power(indicators: &[bool]) -> (u128, u128) {
    let [s1, s2, s3, s4] = indicator_power_sums(indicators);
    (s1.pow(4), s1 + 14 * s2 + 36 * s3 + 24 * s4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn dyadic() -> SievePath<f64> {
        WalkPath::new(WLaw::deterministic(0.5).unwrap(), 0)
    }

    #[test]
    fn dyadic_box_index() {
        let mut path = dyadic();
        assert_eq!(box_index(&mut path, (-1f64).exp()).unwrap(), 2);
        assert_eq!(box_index(&mut path, 1.0).unwrap(), 1);
        assert_eq!(box_index(&mut path, 0.3).unwrap(), 2);
        assert_eq!(box_index(&mut path, 0.2).unwrap(), 3);
        assert!(box_index(&mut path, 0.0).is_err());
    }

    #[test]
    fn dyadic_box_frequencies() {
        let mut path = dyadic();
        let n = 100_000u64;
        let h = histogram(&mut path, 5, n).unwrap();
        assert_eq!(h.counts.values().sum::<u64>(), n);
        for k in 1..=6u64 {
            let p = 0.5f64.powi(k as i32);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            let f = h.counts.get(&k).copied().unwrap_or(0) as f64 / n as f64;
            assert!((f - p).abs() < 3.0 * se, "box {k}: {f} vs {p}");
        }
    }

    #[test]
    fn dyadic_theta_delta() {
        let mut path = dyadic();
        let td = theta_delta(&mut path, 4).unwrap();
        assert!((td.delta - 1.0).abs() < 1e-12, "{}", td.delta);
        let want = (-2f64).exp() + (-1f64).exp();
        assert!((td.theta - want).abs() < 1e-12);
        assert!((td.theta - 0.5032).abs() < 1e-4);
        assert!(td.delta_tail < 1e-11);
    }

    #[test]
    fn theta_one_is_zero() {
        for seed in 0..20 {
            let mut path = WalkPath::new(WLaw::<f64>::Uniform, seed);
            assert_eq!(theta_delta(&mut path, 1).unwrap().theta, 0.0);
        }
    }

    #[test]
    fn checkpoint_grid() {
        assert_eq!(checkpoint_sizes(3), vec![2, 7, 20]);
        assert_eq!(checkpoint_sizes(18).last(), Some(&65_659_969));
    }

    #[test]
    fn one_ball_occupies_one_box() {
        for alloc in [Allocation::Sequential, Allocation::Jump] {
            let mut path = WalkPath::new(WLaw::<f64>::Uniform, 4);
            let run = allocate(&mut path, 4, &[1], alloc).unwrap();
            assert_eq!(run.occupied, vec![1]);
        }
    }

    #[test]
    fn dyadic_two_balls_mean() {
        // E K_2 = Σ_k (1 − (1 − 2^{−k})^2) = 2 − Σ 4^{−k} = 5/3
        for alloc in [Allocation::Sequential, Allocation::Jump] {
            let reps = 100_000u64;
            let mut path = dyadic();
            let (mut s, mut s2) = (0.0, 0.0);
            for r in 0..reps {
                let k = allocate(&mut path, r, &[2], alloc).unwrap().occupied[0] as f64;
                s += k;
                s2 += k * k;
            }
            let mean = s / reps as f64;
            let var = s2 / reps as f64 - mean * mean;
            let se = (var / reps as f64).sqrt();
            assert!((mean - 5.0 / 3.0).abs() < 3.0 * se, "{alloc:?}: {mean}");
        }
    }

    #[test]
    fn trace_dump_dyadic() {
        let trace = simulate_trace(WLaw::deterministic(0.5f64).unwrap(), 1, 3, TraceOptions::default()).unwrap();
        let ns: Vec<u64> = trace.checkpoints.iter().map(|c| c.n).collect();
        assert_eq!(ns, vec![2, 7, 20]);
        let rho: Vec<u64> = trace.checkpoints.iter().map(|c| c.rho_star).collect();
        // ρ*(e^j) = ⌊j / log 2⌋
        assert_eq!(rho, vec![1, 2, 4]);
        for c in &trace.checkpoints {
            assert!(c.k_star >= 1 && c.k_star <= c.n);
        }
    }

    #[test]
    fn trace_budget_truncates() {
        let opts = TraceOptions { ball_budget: 100, ..Default::default() };
        let trace = simulate_trace(WLaw::<f64>::Uniform, 3, 6, opts).unwrap();
        assert!(trace.truncated);
        assert_eq!(trace.checkpoints.len(), 4);
    }

    #[test]
    fn trace_is_deterministic() {
        for alloc in [Allocation::Sequential, Allocation::Jump] {
            let opts = TraceOptions { allocation: alloc, ..Default::default() };
            let a = simulate_trace(WLaw::<f64>::Uniform, 77, 10, opts).unwrap();
            let b = simulate_trace(WLaw::<f64>::Uniform, 77, 10, opts).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn trace_invariants() {
        for seed in 0..30 {
            let trace = simulate_trace(WLaw::<f64>::Uniform, seed, 12, TraceOptions::default()).unwrap();
            let path = WalkPath::new(WLaw::<f64>::Uniform, seed).extended(12.0).unwrap();
            let mut prev = 0;
            for c in &trace.checkpoints {
                assert!(c.k_star >= prev);
                assert!(c.k_star <= c.n && c.k_star <= trace.max_box_index);
                assert_eq!(c.rho_star, path.rho_star((c.j as f64).exp()).unwrap());
                prev = c.k_star;
            }
        }
    }

    #[test]
    fn histogram_representation_and_sandwich() {
        for seed in 0..20 {
            let mut path = WalkPath::new(WLaw::<f64>::Uniform, seed);
            for n in [10, 100, 1000] {
                let h = histogram(&mut path, seed + 1000, n).unwrap();
                let k = h.occupied();
                assert_eq!(k, h.counts.len() as u64);
                let run = allocate(&mut path, seed + 1000, &[n], Allocation::Sequential).unwrap();
                assert_eq!(run.occupied[0], k);
                let (misses, small_hits) = h.sandwich_terms(&mut path).unwrap();
                let large = path.rho_star(n as f64).unwrap();
                assert!(k.abs_diff(large) <= misses + small_hits);
                assert_eq!(k as i64 - large as i64, small_hits as i64 - misses as i64);
            }
        }
    }

    #[test]
    fn conditional_mean_matches_frozen_frequencies() {
        let mut path = WalkPath::new(WLaw::<f64>::Uniform, 2718);
        for n in [10u64, 100, 1000] {
            let want = expected_occupied(&mut path, n).unwrap();
            for alloc in [Allocation::Sequential, Allocation::Jump] {
                let reps = 4000u64;
                let ks: Vec<f64> = (0..reps).map(|r| allocate(&mut path, r, &[n], alloc).unwrap().occupied[0] as f64).collect();
                let mean = ks.iter().sum::<f64>() / reps as f64;
                let var = ks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
                let se = (var / reps as f64).sqrt();
                assert!((mean - want).abs() < 3.0 * se, "{alloc:?} n={n}: {mean} vs {want}");
            }
        }
    }

    #[test]
    fn brute_force_trivial_cases() {
        let d = brute_force_k_distribution(&[1.0f64], 5).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[&1], 1.0);
        let half = Ratio::new(1i64, 2);
        let d = brute_force_k_distribution(&[half, half], 2).unwrap();
        assert_eq!(d[&1], half);
        assert_eq!(d[&2], half);
    }

    #[test]
    fn brute_force_three_boxes_exact() {
        let p = [Ratio::new(1i64, 2), Ratio::new(1, 4), Ratio::new(1, 4)];
        let d = brute_force_k_distribution(&p, 3).unwrap();
        let total: Ratio<i64> = d.values().copied().sum();
        assert_eq!(total, Ratio::from_integer(1));
        let mean: Ratio<i64> = d.iter().map(|(&k, &w)| w * Ratio::from_integer(k as i64)).sum();
        let want: Ratio<i64> = p.iter().map(|&q| Ratio::from_integer(1) - (Ratio::from_integer(1) - q).pow(3)).sum();
        assert_eq!(mean, want);
        // P{K = 1} = Σ p_k^3 = 1/8 + 2/64
        assert_eq!(d[&1], Ratio::new(5, 32));
    }

    #[test]
    fn brute_force_guards() {
        assert!(brute_force_k_distribution(&[0.5f64, 0.5], 9).is_err());
        assert!(brute_force_k_distribution(&[0.1f64; 9], 2).is_err());
        assert!(brute_force_k_distribution(&[0.5f64, 0.4], 2).is_err());
        assert!(brute_force_k_distribution::<f64>(&[], 2).is_err());
    }

    #[test]
    fn fourth_power_identity_small() {
        assert_eq!(multinomial_fourth_power(&[]), (0, 0));
        assert_eq!(multinomial_fourth_power(&[true, false, true, true]), (81, 81));
        let all = vec![true; 20];
        let (l, r) = multinomial_fourth_power(&all);
        assert_eq!(l, r);
    }
}
