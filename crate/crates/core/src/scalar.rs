//! Scalar abstraction shared by every numeric kernel in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumCast};
use rand::Rng;
use rand_distr::{Beta, Distribution, Open01};

/// Floating point type the simulation and the analytic routines run on.
///
/// Implemented for `f32` and `f64`. The sampling and special-function hooks
/// are per-type because `rand_distr` and `libm` are not generic over
/// `num_traits::Float`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Uniform draw from the open interval (0, 1).
    fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Beta(alpha, beta) draw. Parameters must be positive and finite.
    fn sample_beta<R: Rng + ?Sized>(rng: &mut R, alpha: Self, beta: Self) -> Self;

    fn erfc(self) -> Self;

    fn ln_gamma(self) -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

macro_rules! impl_scalar {
    ($t:ty, $erfc:path, $lgamma:path) => {
        impl Scalar for $t {
            #[inline]
            fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Open01.sample(rng)
            }

            fn sample_beta<R: Rng + ?Sized>(rng: &mut R, alpha: Self, beta: Self) -> Self {
                let dist = Beta::new(alpha, beta).expect("beta parameters validated at law construction");
                let mut w: Self = dist.sample(rng);
                // Beta samplers can round to the closed endpoints for extreme parameters.
                while w <= 0.0 || w >= 1.0 {
                    w = dist.sample(rng);
                }
                w
            }

            #[inline]
            fn erfc(self) -> Self {
                $erfc(self)
            }

            #[inline]
            fn ln_gamma(self) -> Self {
                $lgamma(self)
            }
        }
    };
}

impl_scalar!(f64, libm::erfc, libm::lgamma);
impl_scalar!(f32, libm::erfcf, libm::lgammaf);

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_pcg::Pcg64;

    #[test]
    fn open01_is_strictly_inside() {
        let mut rng = Pcg64::seed_from_u64(3);
        for _ in 0..10_000 {
            let u = f32::open01(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn special_functions_dispatch() {
        assert!((Scalar::erfc(0.5f64) - 0.479_500_122_186_953_5).abs() < 1e-15);
        assert!((Scalar::ln_gamma(5.0f64) - 24f64.ln()).abs() < 1e-13);
        assert!((Scalar::ln_gamma(5.0f32) - 24f32.ln()).abs() < 1e-5);
    }
}
