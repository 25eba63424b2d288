//! Quadrature and special functions used by the law registry and the checks.

use crate::error::{Result, SieveError};
use crate::scalar::Scalar;

const SIMPSON_MAX_DEPTH: u32 = 48;
const INITIAL_PANELS: usize = 16;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The interval is first cut into a fixed number of panels so that
/// integrands which are flat over most of the range (monotone tails) are
/// not accepted on the first coarse estimate. `name` identifies the
/// integral in the non-convergence diagnostic.
pub fn adaptive_simpson<T, F>(f: F, a: T, b: T, tol: T, name: &str) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if b <= a {
        return Ok(T::zero());
    }
    let panels = T::lit(INITIAL_PANELS as f64);
    let width = (b - a) / panels;
    let panel_tol = tol / panels;
    let mut total = T::zero();
    for i in 0..INITIAL_PANELS {
        let lo = a + width * T::lit(i as f64);
        let hi = if i + 1 == INITIAL_PANELS { b } else { lo + width };
        let (flo, fhi) = (f(lo), f(hi));
        let mid = (lo + hi) / T::lit(2.0);
        let fmid = f(mid);
        let whole = simpson(lo, hi, flo, fmid, fhi);
        total = total + recurse(&f, lo, hi, flo, fmid, fhi, whole, panel_tol, SIMPSON_MAX_DEPTH)
            .ok_or_else(|| SieveError::Quadrature { integral: name.to_string() })?;
    }
    Ok(total)
}

#[inline]
fn simpson<T: Scalar>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<T, F>(f: &F, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32) -> Option<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return None;
    }
    // Stop once the panel is at rounding resolution; further halving cannot help.
    let floor = T::epsilon() * T::lit(64.0) * (a.abs() + b.abs() + T::one());
    let noise = T::epsilon() * T::lit(64.0) * (left.abs() + right.abs());
    if delta.abs() <= T::lit(15.0) * tol || delta.abs() <= noise || (b - a) <= floor {
        return Some(left + right + delta / T::lit(15.0));
    }
    if depth == 0 {
        return None;
    }
    let l = recurse(f, a, m, fa, flm, fm, left, tol / two, depth - 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, tol / two, depth - 1)?;
    Some(l + r)
}

/// Smallest `y` on the doubling grid `1, 2, 4, ...` with `tail(y) < cutoff`.
///
/// `tail` must be nonincreasing.
pub fn tail_cutoff<T, F>(tail: F, cutoff: T, name: &str) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let mut y = T::one();
    for _ in 0..64 {
        if tail(y) < cutoff {
            return Ok(y);
        }
        y = y * T::lit(2.0);
    }
    Err(SieveError::Quadrature { integral: format!("{name} (tail never drops below cutoff)") })
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn beta_reg<T: Scalar>(a: T, b: T, x: T) -> T {
    let (zero, one, two) = (T::zero(), T::one(), T::lit(2.0));
    if x <= zero {
        return zero;
    }
    if x >= one {
        return one;
    }
    let ln_front = (a + b).ln_gamma() - a.ln_gamma() - b.ln_gamma() + a * x.ln() + b * (-x).ln_1p();
    let front = ln_front.exp();
    if x < (a + one) / (a + b + two) {
        front * beta_cf(a, b, x) / a
    } else {
        one - front * beta_cf(b, a, one - x) / b
    }
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_cf<T: Scalar>(a: T, b: T, x: T) -> T {
    let one = T::one();
    let tiny = T::min_positive_value() / T::epsilon();
    let eps = T::epsilon();
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;
    for m in 1..=400 {
        let m = T::lit(m as f64);
        let m2 = m + m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let del = d * c;
        h = h * del;
        if (del - one).abs() < eps {
            break;
        }
    }
    h
}

/// Digamma function for positive arguments.
pub fn digamma<T: Scalar>(mut x: T) -> T {
    let mut acc = T::zero();
    let shift = T::lit(10.0);
    while x < shift {
        acc = acc - x.recip();
        x = x + T::one();
    }
    let inv = x.recip();
    let inv2 = inv * inv;
    let series = inv2
        * (T::lit(1.0 / 12.0)
            - inv2 * (T::lit(1.0 / 120.0) - inv2 * (T::lit(1.0 / 252.0) - inv2 * (T::lit(1.0 / 240.0) - inv2 * T::lit(1.0 / 132.0)))));
    acc + x.ln() - inv / T::lit(2.0) - series
}

/// Trigamma function for positive arguments.
pub fn trigamma<T: Scalar>(mut x: T) -> T {
    let mut acc = T::zero();
    let shift = T::lit(10.0);
    while x < shift {
        acc = acc + (x * x).recip();
        x = x + T::one();
    }
    let inv = x.recip();
    let inv2 = inv * inv;
    let series = inv
        + inv2 / T::lit(2.0)
        + inv2 * inv * (T::lit(1.0 / 6.0) - inv2 * (T::lit(1.0 / 30.0) - inv2 * (T::lit(1.0 / 42.0) - inv2 * T::lit(1.0 / 30.0))));
    acc + series
}

/// Standard normal distribution function.
pub fn normal_cdf<T: Scalar>(x: T) -> T {
    (-x / T::SQRT_2()).erfc() / T::lit(2.0)
}
