//! Perturbed random walk kernels: the additive walk `S_k`, the perturbed
//! points `S_k + η_{k+1}`, and the counting functions ν, N and ρ*.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Result, SieveError};
use crate::laws::StepLaw;
use crate::rng::{lane, stream, RandomStream};
use crate::scalar::Scalar;

/// Default guard against laws whose ξ is so small the walk never leaves the horizon.
pub const DEFAULT_STEP_CAP: u64 = 1_000_000_000;

/// Which counting function a query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Counter {
    /// ν(x) = #{k ≥ 0 : S_k ≤ x}
    Renewal,
    /// N(x) = #{k ≥ 0 : S_k + η_{k+1} ≤ x}
    Perturbed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountSnapshot<T> {
    pub x: T,
    pub nu: u64,
    pub n_of_x: u64,
}

/// One realization of a perturbed random walk, materialized lazily.
///
/// `positions[k] = S_k` with `S_0 = 0`; `perturbed[k] = S_k + η_{k+1}` for
/// every `k` whose successor position has been drawn. Positions are drawn
/// until the first one strictly beyond `horizon`, so ν and N are exact for
/// every `x ≤ horizon`. Entries never change once drawn.
#[derive(Debug, Clone)]
pub struct WalkPath<T, L> {
    law: L,
    seed: u64,
    rng: RandomStream,
    positions: Vec<T>,
    perturbed: Vec<T>,
    perturbed_sorted: Vec<T>,
    factors: Vec<T>,
    horizon: T,
    step_cap: u64,
}

impl<T: Scalar, L: StepLaw<T>> WalkPath<T, L> {
    pub fn new(law: L, seed: u64) -> Self {
        Self::with_step_cap(law, seed, DEFAULT_STEP_CAP)
    }

    pub fn with_step_cap(law: L, seed: u64, step_cap: u64) -> Self {
        let mut path = WalkPath {
            law,
            seed,
            rng: stream(seed, lane::WALK),
            positions: vec![T::zero()],
            perturbed: Vec::new(),
            perturbed_sorted: Vec::new(),
            factors: Vec::new(),
            horizon: T::zero(),
            step_cap,
        };
        // ξ > 0, so covering x = 0 takes exactly one step.
        path.extend(T::zero()).expect("a single step is within any cap");
        path
    }

    pub fn law(&self) -> &L {
        &self.law
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn is_sieve(&self) -> bool {
        self.law.is_sieve()
    }

    /// `S_0, S_1, ...` up to and including the first position beyond the horizon.
    pub fn positions(&self) -> &[T] {
        &self.positions
    }

    /// `S_k + η_{k+1}` in walk order (not sorted).
    pub fn perturbed(&self) -> &[T] {
        &self.perturbed
    }

    /// Stick-breaking factors `W_1, W_2, ...` (sieve mode only; empty otherwise).
    pub fn factors(&self) -> &[T] {
        &self.factors
    }

    /// Number of increments drawn so far.
    pub fn steps(&self) -> usize {
        self.positions.len() - 1
    }

    /// Materialize the walk so that counts are valid up to `horizon`.
    pub fn extend(&mut self, horizon: T) -> Result<()> {
        if horizon <= self.horizon && self.steps() > 0 {
            return Ok(());
        }
        let start = self.perturbed.len();
        let mut last = *self.positions.last().expect("S_0 present");
        while last <= horizon {
            if self.steps() as u64 >= self.step_cap {
                return Err(SieveError::StepCap { cap: self.step_cap });
            }
            let step = self.law.sample_step(&mut self.rng);
            self.perturbed.push(last + step.eta);
            if let Some(w) = step.w {
                self.factors.push(w);
            }
            last = last + step.xi;
            self.positions.push(last);
        }
        if self.perturbed.len() > start {
            self.perturbed_sorted.extend_from_slice(&self.perturbed[start..]);
            // Two sorted-ish runs; the stable sort merges them in linear time.
            self.perturbed_sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite walk points"));
        }
        self.horizon = self.horizon.max(horizon);
        Ok(())
    }

    /// Consuming form of [`extend`](Self::extend).
    pub fn extended(mut self, horizon: T) -> Result<Self> {
        self.extend(horizon)?;
        Ok(self)
    }

    fn check(&self, x: T) -> Result<()> {
        if x > self.horizon {
            Err(SieveError::HorizonExceeded { x: x.as_f64(), horizon: self.horizon.as_f64() })
        } else {
            Ok(())
        }
    }

    /// ν(x), the number of walk positions in `[0, x]`.
    pub fn nu(&self, x: T) -> Result<u64> {
        self.check(x)?;
        Ok(self.positions.partition_point(|&s| s <= x) as u64)
    }

    /// N(x), the number of perturbed points in `[0, x]`. Ties count as `≤ x`.
    pub fn n_count(&self, x: T) -> Result<u64> {
        self.check(x)?;
        Ok(self.perturbed_sorted.partition_point(|&p| p <= x) as u64)
    }

    pub fn count(&self, counter: Counter, x: T) -> Result<u64> {
        match counter {
            Counter::Renewal => self.nu(x),
            Counter::Perturbed => self.n_count(x),
        }
    }

    /// Count after extending the path as needed.
    pub fn count_extending(&mut self, counter: Counter, x: T) -> Result<u64> {
        self.extend(x)?;
        self.count(counter, x)
    }

    pub fn snapshot(&self, x: T) -> Result<CountSnapshot<T>> {
        Ok(CountSnapshot { x, nu: self.nu(x)?, n_of_x: self.n_count(x)? })
    }

    /// ρ*(x), the number of boxes with frequency at least `1/x`, as `N*(log x)`.
    pub fn rho_star(&self, x: T) -> Result<u64> {
        if !self.is_sieve() {
            return Err(SieveError::NotSieve);
        }
        if !(x >= T::one()) {
            return Err(SieveError::InvalidArgument(format!("rho_star needs x >= 1, got {x}")));
        }
        self.n_count(x.ln())
    }

    /// `count(x) − count(x − delta)`.
    pub fn increment_window(&self, counter: Counter, x: T, delta: T) -> Result<u64> {
        if !(delta > T::zero() && delta <= x) {
            return Err(SieveError::InvalidArgument(format!("window needs 0 < delta <= x, got delta={delta}, x={x}")));
        }
        Ok(self.count(counter, x)? - self.count(counter, x - delta)?)
    }

    /// `log p*_k = −(S_{k−1} + η_k)` for box `k ≥ 1`; requires `k ≤ steps()`.
    pub fn log_frequency(&self, k: usize) -> Option<T> {
        if !self.is_sieve() || k == 0 {
            return None;
        }
        self.perturbed.get(k - 1).map(|&p| -p)
    }
}

/// One increment of a streamed walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamStep<T> {
    /// `k ≥ 1`
    pub index: u64,
    /// `S_{k−1}`
    pub previous: T,
    /// `S_k`
    pub position: T,
    /// `S_{k−1} + η_k`
    pub perturbed: T,
}

/// Walk increments streamed without storage, for statistics at large horizons.
///
/// Draws from the same stream as [`WalkPath::new`], so for equal law and
/// seed both see the same walk.
#[derive(Debug, Clone)]
pub struct WalkStream<T, L> {
    law: L,
    rng: RandomStream,
    position: T,
    index: u64,
}

impl<T: Scalar, L: StepLaw<T>> WalkStream<T, L> {
    pub fn new(law: L, seed: u64) -> Self {
        WalkStream { law, rng: stream(seed, lane::WALK), position: T::zero(), index: 0 }
    }
}

impl<T: Scalar, L: StepLaw<T>> Iterator for WalkStream<T, L> {
    type Item = StreamStep<T>;

    #[inline]
    fn next(&mut self) -> Option<StreamStep<T>> {
        let step = self.law.sample_step(&mut self.rng);
        let previous = self.position;
        self.position = previous + step.xi;
        self.index += 1;
        Some(StreamStep { index: self.index, previous, position: self.position, perturbed: previous + step.eta })
    }
}

#[derive(PartialEq)]
struct MinPoint<T>(T);

impl<T: PartialEq> Eq for MinPoint<T> {}

impl<T: PartialOrd> PartialOrd for MinPoint<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: PartialOrd> Ord for MinPoint<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        other.0.partial_cmp(&self.0).expect("finite walk points")
    }
}

/// ν or N at nondecreasing arguments `xs`, streaming the walk of `(law, seed)`.
///
/// Memory stays bounded by the number of perturbed points not yet passed,
/// which is what makes horizons like `e^18` practical.
pub fn stream_counts<T: Scalar, L: StepLaw<T>>(law: L, seed: u64, xs: &[T], counter: Counter) -> Result<Vec<u64>> {
    if xs.windows(2).any(|w| w[0] > w[1]) {
        return Err(SieveError::InvalidArgument("stream_counts needs nondecreasing arguments".into()));
    }
    let mut walk = WalkStream::new(law, seed);
    let mut pending: BinaryHeap<MinPoint<T>> = BinaryHeap::new();
    let mut current = walk.next().expect("infinite stream");
    // positions S_{k−1} consumed so far, i.e. ν at the last argument
    let mut renewal = 0u64;
    let mut perturbed = 0u64;
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        if x < T::zero() {
            out.push(0);
            continue;
        }
        while current.previous <= x {
            renewal += 1;
            if counter == Counter::Perturbed {
                pending.push(MinPoint(current.perturbed));
            }
            if current.index >= DEFAULT_STEP_CAP {
                return Err(SieveError::StepCap { cap: DEFAULT_STEP_CAP });
            }
            current = walk.next().expect("infinite stream");
        }
        while pending.peek().is_some_and(|p| p.0 <= x) {
            pending.pop();
            perturbed += 1;
        }
        out.push(match counter {
            Counter::Renewal => renewal,
            Counter::Perturbed => perturbed,
        });
    }
    Ok(out)
}
