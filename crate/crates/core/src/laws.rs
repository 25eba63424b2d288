//! Registry of step laws: the stick-breaking factor `W` of the sieve and
//! generic (ξ, η) perturbed-walk laws, together with the moment constants,
//! the η distribution function and the centering function.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{invalid, Result, SieveError};
use crate::scalar::Scalar;
use crate::special::{adaptive_simpson, beta_reg, digamma, tail_cutoff, trigamma};

/// Tail mass below which tail integrals are truncated.
const TAIL_CUTOFF: f64 = 1e-12;
/// Relative tolerance of moment quadratures.
const MOMENT_REL_TOL: f64 = 1e-9;

/// One increment of a perturbed walk: `S_{k+1} = S_k + xi`, perturbed point `S_k + eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step<T> {
    pub xi: T,
    pub eta: T,
    /// The stick-breaking factor, in sieve mode.
    pub w: Option<T>,
}

/// Moment constants of a step law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentProfile<T> {
    /// Mean of ξ (`E|log W|` in sieve mode).
    pub mu: T,
    /// Variance of ξ.
    pub sigma2: T,
    /// Mean of η (`E|log(1-W)|` in sieve mode).
    pub m_eta: T,
    /// `E η^a` for the configured order `a`.
    pub eta_moment_a: T,
    pub a: T,
}

impl<T: Scalar> MomentProfile<T> {
    pub fn lil_eligible(&self) -> bool {
        self.sigma2 > T::zero()
    }

    /// `σ μ^{-3/2}`, the almost sure limsup of the LIL-normalized counts.
    pub fn lil_constant(&self) -> T {
        self.sigma2.sqrt() / self.mu.powf(T::lit(1.5))
    }
}

/// How [`StepLaw::moment_profile_with`] evaluates the moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentRoute {
    /// Closed forms wherever the law has one.
    #[default]
    ClosedForm,
    /// Tail-function quadrature, even where a closed form exists.
    Quadrature,
}

/// A law generating the (ξ, η) increments of a perturbed random walk.
pub trait StepLaw<T: Scalar>: Clone + fmt::Debug + fmt::Display + Send + Sync {
    fn sample_step<R: Rng + ?Sized>(&self, rng: &mut R) -> Step<T>;

    fn moment_profile_with(&self, a: T, route: MomentRoute) -> Result<MomentProfile<T>>;

    fn moment_profile(&self, a: T) -> Result<MomentProfile<T>> {
        self.moment_profile_with(a, MomentRoute::ClosedForm)
    }

    /// `P{η ≤ y}`.
    fn eta_cdf(&self, y: T) -> T;

    /// `∫_0^n P{η ≤ y} dy`.
    fn eta_cdf_integral(&self, n: T) -> Result<T>;

    /// True when η = |log(1-W)| and ξ = |log W| for a stick-breaking factor W.
    fn is_sieve(&self) -> bool;
}

/// Centering `μ^{-1} ∫_0^n P{η ≤ y} dy`, with μ the mean of ξ.
pub fn centering<T: Scalar, L: StepLaw<T>>(law: &L, n: T) -> Result<T> {
    let profile = law.moment_profile(T::one())?;
    centering_with(law, &profile, n)
}

pub(crate) fn centering_with<T: Scalar, L: StepLaw<T>>(law: &L, profile: &MomentProfile<T>, n: T) -> Result<T> {
    if n <= T::zero() {
        return Ok(T::zero());
    }
    Ok(law.eta_cdf_integral(n)? / profile.mu)
}

/// CLT and LIL normalizations `√(σ²μ⁻³n)` and `√(2σ²μ⁻³ n log log n)`.
pub fn scales<T: Scalar>(profile: &MomentProfile<T>, n: T) -> Result<(T, T)> {
    if !profile.lil_eligible() {
        return Err(SieveError::Ineligible { law: format!("{profile:?}") });
    }
    if n < T::lit(3.0) {
        return Err(invalid(format!("scale argument must be at least 3, got {n}")));
    }
    let v = profile.sigma2 / profile.mu.powi(3);
    Ok(((v * n).sqrt(), (T::lit(2.0) * v * n * n.ln().ln()).sqrt()))
}

fn rel_tol<T: Scalar>(rough: T) -> T {
    let floor = T::epsilon() * T::lit(64.0);
    rough.abs().max(T::one()) * T::lit(MOMENT_REL_TOL).max(floor)
}

/// Integral of a nonincreasing tail function over `[0, ∞)`, truncated where it drops below 1e-12.
fn tail_integral<T: Scalar, F: Fn(T) -> T>(tail: F, name: &str) -> Result<T> {
    let cut = tail_cutoff(&tail, T::lit(TAIL_CUTOFF), name)?;
    let rough = adaptive_simpson(&tail, T::zero(), cut, T::lit(1e-5), name)?;
    adaptive_simpson(&tail, T::zero(), cut, rel_tol(rough), name)
}

/// Distribution of the stick-breaking factor W on (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WLaw<T> {
    Uniform,
    Beta { alpha: T, beta: T },
    /// `w1` with probability `q`, else `w2`.
    TwoPoint { w1: T, w2: T, q: T },
    Deterministic { w: T },
}

impl<T: Scalar> WLaw<T> {
    pub fn uniform() -> Self {
        WLaw::Uniform
    }

    pub fn beta(alpha: T, beta: T) -> Result<Self> {
        if !(alpha > T::zero() && beta > T::zero() && alpha.is_finite() && beta.is_finite()) {
            return Err(invalid(format!("beta parameters must be positive, got ({alpha}, {beta})")));
        }
        Ok(WLaw::Beta { alpha, beta })
    }

    pub fn two_point(w1: T, w2: T, q: T) -> Result<Self> {
        check_open_unit(w1)?;
        check_open_unit(w2)?;
        if !(q >= T::zero() && q <= T::one()) {
            return Err(invalid(format!("two-point weight must lie in [0,1], got {q}")));
        }
        Ok(WLaw::TwoPoint { w1, w2, q })
    }

    pub fn deterministic(w: T) -> Result<Self> {
        check_open_unit(w)?;
        Ok(WLaw::Deterministic { w })
    }

    /// Whether the law satisfies σ² > 0.
    pub fn lil_eligible(&self) -> bool {
        match *self {
            WLaw::Uniform | WLaw::Beta { .. } => true,
            WLaw::TwoPoint { w1, w2, q } => w1 != w2 && q > T::zero() && q < T::one(),
            WLaw::Deterministic { .. } => false,
        }
    }

    pub fn sample_w<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match *self {
            WLaw::Uniform => T::open01(rng),
            WLaw::Beta { alpha, beta } => T::sample_beta(rng, alpha, beta),
            WLaw::TwoPoint { w1, w2, q } => {
                if T::open01(rng) < q {
                    w1
                } else {
                    w2
                }
            }
            WLaw::Deterministic { w } => w,
        }
    }

    /// Atoms `(w, probability)` of a discrete law.
    fn atoms(&self) -> Option<[(T, T); 2]> {
        match *self {
            WLaw::TwoPoint { w1, w2, q } => Some([(w1, q), (w2, T::one() - q)]),
            WLaw::Deterministic { w } => Some([(w, T::one()), (w, T::zero())]),
            _ => None,
        }
    }

    /// Beta parameters of a continuous law (Uniform is Beta(1,1)).
    fn beta_params(&self) -> Option<(T, T)> {
        match *self {
            WLaw::Uniform => Some((T::one(), T::one())),
            WLaw::Beta { alpha, beta } => Some((alpha, beta)),
            _ => None,
        }
    }

    fn quadrature_profile(&self, alpha: T, beta: T, a: T) -> Result<MomentProfile<T>> {
        // P{ξ > t} = P{W < e^{-t}},  P{η > y} = P{W > 1 - e^{-y}} = I_{e^{-y}}(β, α)
        let xi_tail = |t: T| beta_reg(alpha, beta, (-t).exp());
        let eta_tail = |y: T| beta_reg(beta, alpha, (-y).exp());
        let mu = tail_integral(xi_tail, "E|log W|")?;
        let second = tail_integral(|t: T| T::lit(2.0) * t * xi_tail(t), "E(log W)^2")?;
        let m_eta = tail_integral(eta_tail, "E|log(1-W)|")?;
        let eta_moment_a = eta_power_moment(&eta_tail, a)?;
        Ok(MomentProfile { mu, sigma2: (second - mu * mu).max(T::zero()), m_eta, eta_moment_a, a })
    }
}

fn check_open_unit<T: Scalar>(w: T) -> Result<()> {
    if w > T::zero() && w < T::one() {
        Ok(())
    } else {
        Err(invalid(format!("W must lie in the open interval (0,1), got {w}")))
    }
}

/// `E η^a`, as `∫ a y^{a−1} P{η > y} dy` for `a ≥ 1` and `∫ P{η > s^{1/a}} ds` below,
/// so that neither integrand has an infinite slope at the origin beyond that of the tail.
fn eta_power_moment<T: Scalar, F: Fn(T) -> T>(eta_tail: &F, a: T) -> Result<T> {
    if a == T::one() {
        tail_integral(eta_tail, "E|log(1-W)|^a")
    } else if a > T::one() {
        tail_integral(|y: T| a * y.powf(a - T::one()) * eta_tail(y), "E|log(1-W)|^a")
    } else {
        tail_integral(|s: T| eta_tail(s.powf(a.recip())), "E|log(1-W)|^a")
    }
}

impl<T: Scalar> StepLaw<T> for WLaw<T> {
    #[inline]
    fn sample_step<R: Rng + ?Sized>(&self, rng: &mut R) -> Step<T> {
        let w = self.sample_w(rng);
        Step { xi: -w.ln(), eta: -(-w).ln_1p(), w: Some(w) }
    }

    fn moment_profile_with(&self, a: T, route: MomentRoute) -> Result<MomentProfile<T>> {
        if !(a > T::zero()) {
            return Err(invalid(format!("moment order must be positive, got {a}")));
        }
        if let Some(atoms) = self.atoms() {
            let mut p = MomentProfile { mu: T::zero(), sigma2: T::zero(), m_eta: T::zero(), eta_moment_a: T::zero(), a };
            let mut second = T::zero();
            for (w, prob) in atoms {
                let xi = -w.ln();
                let eta = -(-w).ln_1p();
                p.mu = p.mu + prob * xi;
                second = second + prob * xi * xi;
                p.m_eta = p.m_eta + prob * eta;
                p.eta_moment_a = p.eta_moment_a + prob * eta.powf(a);
            }
            p.sigma2 = (second - p.mu * p.mu).max(T::zero());
            if let WLaw::TwoPoint { w1, w2, q } = *self {
                if w1 == w2 || q == T::zero() || q == T::one() {
                    p.sigma2 = T::zero();
                }
            }
            return Ok(p);
        }
        let (alpha, beta) = self.beta_params().expect("continuous law");
        match route {
            MomentRoute::Quadrature => self.quadrature_profile(alpha, beta, a),
            MomentRoute::ClosedForm => {
                let (mu, sigma2, m_eta) = match self {
                    // −log U and −log(1−U) are standard exponential.
                    WLaw::Uniform => (T::one(), T::one(), T::one()),
                    _ => {
                        let s = alpha + beta;
                        (digamma(s) - digamma(alpha), trigamma(alpha) - trigamma(s), digamma(s) - digamma(beta))
                    }
                };
                let eta_moment_a = if a == T::one() {
                    m_eta
                } else if let WLaw::Uniform = self {
                    (a + T::one()).ln_gamma().exp()
                } else {
                    eta_power_moment(&|y: T| beta_reg(beta, alpha, (-y).exp()), a)?
                };
                Ok(MomentProfile { mu, sigma2, m_eta, eta_moment_a, a })
            }
        }
    }

    fn eta_cdf(&self, y: T) -> T {
        if y <= T::zero() {
            return T::zero();
        }
        match *self {
            WLaw::Uniform => -(-y).exp_m1(),
            WLaw::Beta { alpha, beta } => T::one() - beta_reg(beta, alpha, (-y).exp()),
            _ => {
                let atoms = self.atoms().expect("discrete law");
                atoms
                    .iter()
                    .filter(|(w, _)| -(-*w).ln_1p() <= y)
                    .map(|&(_, p)| p)
                    .fold(T::zero(), |s, p| s + p)
            }
        }
    }

    fn eta_cdf_integral(&self, n: T) -> Result<T> {
        if n <= T::zero() {
            return Ok(T::zero());
        }
        match *self {
            WLaw::Uniform => Ok(n + (-n).exp_m1()),
            WLaw::Beta { alpha, beta } => {
                // ∫_0^n F = n − ∫_0^n (1 − F); the tail integrand is truncated past 1e-12.
                let tail = |y: T| beta_reg(beta, alpha, (-y).exp());
                let cut = tail_cutoff(tail, T::lit(TAIL_CUTOFF), "∫ P{η > y} dy")?;
                let upper = n.min(cut);
                let tol = (T::lit(1e-8) * n.max(T::one())).min(T::lit(1e-9)).max(T::epsilon() * T::lit(64.0));
                let tail_part = adaptive_simpson(tail, T::zero(), upper, tol, "∫ P{η > y} dy")?;
                Ok(n - tail_part)
            }
            _ => {
                let atoms = self.atoms().expect("discrete law");
                Ok(atoms
                    .iter()
                    .map(|&(w, p)| p * (n + (-w).ln_1p()).max(T::zero()))
                    .fold(T::zero(), |s, v| s + v))
            }
        }
    }

    fn is_sieve(&self) -> bool {
        true
    }
}

impl<T: Scalar> fmt::Display for WLaw<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WLaw::Uniform => write!(f, "uniform"),
            WLaw::Beta { alpha, beta } => write!(f, "beta:{alpha},{beta}"),
            WLaw::TwoPoint { w1, w2, q } => write!(f, "twopoint:{w1},{w2},{q}"),
            WLaw::Deterministic { w } => write!(f, "det:{w}"),
        }
    }
}

fn parse_params<T: Scalar>(spec: &str, body: &str, want: usize) -> Result<Vec<T>> {
    let bad = |reason: String| SieveError::LawSpec { spec: spec.to_string(), reason };
    let vals = body
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("parameter {s:?}: {e}")))
                .map(T::lit)
        })
        .collect::<Result<Vec<T>>>()?;
    if vals.len() != want {
        return Err(bad(format!("expected {want} parameter(s), got {}", vals.len())));
    }
    Ok(vals)
}

impl<T: Scalar> FromStr for WLaw<T> {
    type Err = SieveError;

    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, body) = spec.split_once(':').unwrap_or((spec, ""));
        let wrap = |r: Result<Self>| {
            r.map_err(|e| match e {
                SieveError::InvalidArgument(reason) => SieveError::LawSpec { spec: spec.to_string(), reason },
                other => other,
            })
        };
        match name {
            "uniform" if body.is_empty() => Ok(WLaw::Uniform),
            "beta" => {
                let p = parse_params(spec, body, 2)?;
                wrap(WLaw::beta(p[0], p[1]))
            }
            "twopoint" => {
                let p = parse_params(spec, body, 3)?;
                wrap(WLaw::two_point(p[0], p[1], p[2]))
            }
            "det" => {
                let p = parse_params(spec, body, 1)?;
                wrap(WLaw::deterministic(p[0]))
            }
            _ => Err(SieveError::LawSpec { spec: spec.to_string(), reason: "unknown law".into() }),
        }
    }
}

/// Marginal law of one coordinate of a generic perturbed walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal<T> {
    Constant(T),
    Exponential { rate: T },
}

impl<T: Scalar> Marginal<T> {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match *self {
            Marginal::Constant(c) => c,
            Marginal::Exponential { rate } => -T::open01(rng).ln() / rate,
        }
    }

    fn mean(&self) -> T {
        match *self {
            Marginal::Constant(c) => c,
            Marginal::Exponential { rate } => rate.recip(),
        }
    }

    fn variance(&self) -> T {
        match *self {
            Marginal::Constant(_) => T::zero(),
            Marginal::Exponential { rate } => (rate * rate).recip(),
        }
    }

    fn power_moment(&self, a: T) -> T {
        match *self {
            Marginal::Constant(c) => c.powf(a),
            Marginal::Exponential { rate } => (a + T::one()).ln_gamma().exp() / rate.powf(a),
        }
    }

    fn cdf(&self, y: T) -> T {
        match *self {
            Marginal::Constant(c) => {
                if y >= c {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Marginal::Exponential { rate } => {
                if y <= T::zero() {
                    T::zero()
                } else {
                    -(-rate * y).exp_m1()
                }
            }
        }
    }

    fn cdf_integral(&self, n: T) -> T {
        match *self {
            Marginal::Constant(c) => (n - c).max(T::zero()),
            Marginal::Exponential { rate } => n + (-rate * n).exp_m1() / rate,
        }
    }
}

impl<T: Scalar> fmt::Display for Marginal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marginal::Constant(c) if *c == T::zero() => write!(f, "zero"),
            Marginal::Constant(c) => write!(f, "const:{c}"),
            Marginal::Exponential { rate } => write!(f, "exp:{rate}"),
        }
    }
}

impl<T: Scalar> FromStr for Marginal<T> {
    type Err = SieveError;

    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, body) = spec.split_once(':').unwrap_or((spec, ""));
        let bad = |reason: &str| SieveError::LawSpec { spec: spec.to_string(), reason: reason.to_string() };
        match name {
            "zero" if body.is_empty() => Ok(Marginal::Constant(T::zero())),
            "const" => {
                let c = parse_params::<T>(spec, body, 1)?[0];
                if c >= T::zero() && c.is_finite() {
                    Ok(Marginal::Constant(c))
                } else {
                    Err(bad("constant must be nonnegative"))
                }
            }
            "exp" => {
                let rate = parse_params::<T>(spec, body, 1)?[0];
                if rate > T::zero() && rate.is_finite() {
                    Ok(Marginal::Exponential { rate })
                } else {
                    Err(bad("rate must be positive"))
                }
            }
            _ => Err(bad("unknown marginal")),
        }
    }
}

/// Perturbed walk with independent ξ and η marginals.
///
/// η may be identically zero; the counting function then coincides with the
/// renewal function ν, which is used as a cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericLaw<T> {
    pub xi: Marginal<T>,
    pub eta: Marginal<T>,
}

impl<T: Scalar> GenericLaw<T> {
    pub fn new(xi: Marginal<T>, eta: Marginal<T>) -> Result<Self> {
        if let Marginal::Constant(c) = xi {
            if c <= T::zero() {
                return Err(invalid("xi must be positive"));
            }
        }
        Ok(GenericLaw { xi, eta })
    }

    /// Renewal-only law: ξ with η ≡ 0.
    pub fn renewal(xi: Marginal<T>) -> Result<Self> {
        Self::new(xi, Marginal::Constant(T::zero()))
    }
}

impl<T: Scalar> StepLaw<T> for GenericLaw<T> {
    #[inline]
    fn sample_step<R: Rng + ?Sized>(&self, rng: &mut R) -> Step<T> {
        let xi = self.xi.sample(rng);
        let eta = self.eta.sample(rng);
        Step { xi, eta, w: None }
    }

    fn moment_profile_with(&self, a: T, _route: MomentRoute) -> Result<MomentProfile<T>> {
        if !(a > T::zero()) {
            return Err(invalid(format!("moment order must be positive, got {a}")));
        }
        Ok(MomentProfile {
            mu: self.xi.mean(),
            sigma2: self.xi.variance(),
            m_eta: self.eta.mean(),
            eta_moment_a: self.eta.power_moment(a),
            a,
        })
    }

    fn eta_cdf(&self, y: T) -> T {
        self.eta.cdf(y)
    }

    fn eta_cdf_integral(&self, n: T) -> Result<T> {
        if n <= T::zero() {
            return Ok(T::zero());
        }
        Ok(self.eta.cdf_integral(n))
    }

    fn is_sieve(&self) -> bool {
        false
    }
}

impl<T: Scalar> fmt::Display for GenericLaw<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pwalk:{}/{}", self.xi, self.eta)
    }
}

impl<T: Scalar> FromStr for GenericLaw<T> {
    type Err = SieveError;

    /// `pwalk:<xi>/<eta>`, e.g. `pwalk:exp:1/zero`.
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let body = spec
            .strip_prefix("pwalk:")
            .ok_or_else(|| SieveError::LawSpec { spec: spec.to_string(), reason: "expected pwalk:<xi>/<eta>".into() })?;
        let (xi, eta) = body
            .split_once('/')
            .ok_or_else(|| SieveError::LawSpec { spec: spec.to_string(), reason: "missing '/' between xi and eta".into() })?;
        GenericLaw::new(xi.parse()?, eta.parse()?)
            .map_err(|e| SieveError::LawSpec { spec: spec.to_string(), reason: e.to_string() })
    }
}

/// Either kind of step law, as named in configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnyLaw<T> {
    Sieve(WLaw<T>),
    Generic(GenericLaw<T>),
}

impl<T: Scalar> AnyLaw<T> {
    pub fn lil_eligible(&self) -> bool {
        match self {
            AnyLaw::Sieve(w) => w.lil_eligible(),
            AnyLaw::Generic(g) => g.xi.variance() > T::zero(),
        }
    }
}

impl<T: Scalar> StepLaw<T> for AnyLaw<T> {
    #[inline]
    fn sample_step<R: Rng + ?Sized>(&self, rng: &mut R) -> Step<T> {
        match self {
            AnyLaw::Sieve(l) => l.sample_step(rng),
            AnyLaw::Generic(l) => l.sample_step(rng),
        }
    }

    fn moment_profile_with(&self, a: T, route: MomentRoute) -> Result<MomentProfile<T>> {
        match self {
            AnyLaw::Sieve(l) => l.moment_profile_with(a, route),
            AnyLaw::Generic(l) => l.moment_profile_with(a, route),
        }
    }

    fn eta_cdf(&self, y: T) -> T {
        match self {
            AnyLaw::Sieve(l) => l.eta_cdf(y),
            AnyLaw::Generic(l) => l.eta_cdf(y),
        }
    }

    fn eta_cdf_integral(&self, n: T) -> Result<T> {
        match self {
            AnyLaw::Sieve(l) => l.eta_cdf_integral(n),
            AnyLaw::Generic(l) => l.eta_cdf_integral(n),
        }
    }

    fn is_sieve(&self) -> bool {
        matches!(self, AnyLaw::Sieve(_))
    }
}

impl<T: Scalar> fmt::Display for AnyLaw<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyLaw::Sieve(l) => l.fmt(f),
            AnyLaw::Generic(l) => l.fmt(f),
        }
    }
}

impl<T: Scalar> FromStr for AnyLaw<T> {
    type Err = SieveError;

    fn from_str(spec: &str) -> Result<Self> {
        if spec.trim().starts_with("pwalk:") {
            spec.parse().map(AnyLaw::Generic)
        } else {
            spec.parse().map(AnyLaw::Sieve)
        }
    }
}
