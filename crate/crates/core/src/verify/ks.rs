//! Kolmogorov–Smirnov distance of a sample to a reference distribution.

use crate::scalar::Scalar;
use crate::special::normal_cdf;

/// A distribution function with access to left limits.
pub trait Cdf<T> {
    fn cdf(&self, x: T) -> T;

    /// `F(x−)`; equal to `F(x)` for continuous laws.
    fn cdf_left(&self, x: T) -> T {
        self.cdf(x)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StandardNormal;

impl<T: Scalar> Cdf<T> for StandardNormal {
    fn cdf(&self, x: T) -> T {
        normal_cdf(x)
    }
}

/// Empirical distribution function of a sample.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf<T> {
    sorted: Vec<T>,
}

impl<T: Scalar> EmpiricalCdf<T> {
    pub fn new(sample: &[T]) -> Self {
        let mut sorted = sample.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
        EmpiricalCdf { sorted }
    }

    fn frac(&self, count: usize) -> T {
        T::lit(count as f64) / T::lit(self.sorted.len() as f64)
    }
}

impl<T: Scalar> Cdf<T> for EmpiricalCdf<T> {
    fn cdf(&self, x: T) -> T {
        self.frac(self.sorted.partition_point(|&v| v <= x))
    }

    fn cdf_left(&self, x: T) -> T {
        self.frac(self.sorted.partition_point(|&v| v < x))
    }
}

/// `sup_x |F_m(x) − F(x)|` for the empirical distribution `F_m` of `sample`.
///
/// Evaluated on both sides of every sample value. Exact when the
/// discontinuities of `F` are among the sample values.
pub fn ks_statistic<T: Scalar, C: Cdf<T>>(sample: &[T], reference: &C) -> T {
    if sample.is_empty() {
        return T::zero();
    }
    let ecdf = EmpiricalCdf::new(sample);
    let m = ecdf.sorted.len();
    let mut d = T::zero();
    let mut i = 0;
    while i < m {
        let x = ecdf.sorted[i];
        let mut j = i;
        while j < m && ecdf.sorted[j] == x {
            j += 1;
        }
        let below = ecdf.frac(i);
        let at = ecdf.frac(j);
        d = d.max((at - reference.cdf(x)).abs()).max((below - reference.cdf_left(x)).abs());
        i = j;
    }
    d
}

/// KS distance to the standard normal distribution.
pub fn ks_normal<T: Scalar>(sample: &[T]) -> T {
    ks_statistic(sample, &StandardNormal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Φ⁻¹ by bisection on the erfc-based Φ.
    fn normal_quantile(p: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0, 40.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if normal_cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn quantile_sample() {
        let m = 1000;
        let sample: Vec<f64> = (1..=m).map(|i| normal_quantile((i as f64 - 0.5) / m as f64)).collect();
        let d = ks_normal(&sample);
        assert!(d <= 1.0 / (2.0 * m as f64) + 1e-6, "{d}");
    }

    #[test]
    fn all_zero_sample() {
        assert_eq!(ks_normal(&[0.0f64; 50]), 0.5);
    }

    #[test]
    fn against_own_ecdf() {
        let sample = [3.0, 1.0, 2.0, 2.0, 5.0f64];
        assert_eq!(ks_statistic(&sample, &EmpiricalCdf::new(&sample)), 0.0);
    }

    proptest! {
        #[test]
        fn permutation_invariant(mut xs in prop::collection::vec(-5.0f64..5.0, 1..200), seed in any::<u64>()) {
            let d0 = ks_normal(&xs);
            // deterministic shuffle
            let n = xs.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = crate::rng::splitmix64(s);
                xs.swap(i, (s % (i as u64 + 1)) as usize);
            }
            prop_assert_eq!(d0, ks_normal(&xs));
            prop_assert_eq!(ks_statistic(&xs, &EmpiricalCdf::new(&xs)), 0.0);
        }
    }
}
