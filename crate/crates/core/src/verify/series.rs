//! Standardized trajectories `(value − centering) / scale`.

use std::fmt;

use crate::error::Result;
use crate::laws::{centering_with, scales, MomentProfile, StepLaw};
use crate::scalar::Scalar;

/// What a series records and hence which centering applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesMode {
    /// `K*_{[e^j]}` against `μ⁻¹∫_0^j F_η`.
    SieveK,
    /// `ρ*(e^j) = N*(j)` against the same centering.
    SieveRho,
    /// `N(x)` of a generic perturbed walk against `m⁻¹∫_0^x F_η`, `m = Eξ`.
    GenericN,
    /// `ν(t)` against `m⁻¹ t`.
    RenewalNu,
}

impl fmt::Display for SeriesMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesMode::SieveK => "sieve-K",
            SeriesMode::SieveRho => "sieve-rho",
            SeriesMode::GenericN => "generic-N",
            SeriesMode::RenewalNu => "renewal-nu",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEntry<T> {
    pub j: u32,
    /// Argument fed to the centering and the scales (`j` for sieve modes, `x` or `t` otherwise).
    pub arg: T,
    pub raw: T,
    pub centering: T,
    /// CLT-standardized value.
    pub z: T,
    /// LIL-standardized value; NaN when `arg < 3`.
    pub ell: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedSeries<T> {
    pub mode: SeriesMode,
    pub law: String,
    pub profile: MomentProfile<T>,
    pub entries: Vec<SeriesEntry<T>>,
}

impl<T: Scalar> StandardizedSeries<T> {
    /// Entries whose ℓ is defined, with `j` in `lo..=hi`.
    pub fn in_range(&self, lo: u32, hi: u32) -> impl Iterator<Item = &SeriesEntry<T>> {
        self.entries.iter().filter(move |e| e.j >= lo && e.j <= hi && e.arg >= T::lit(3.0))
    }
}

/// Builds series entries for one law.
#[derive(Debug, Clone)]
pub struct Standardizer<T, L> {
    law: L,
    profile: MomentProfile<T>,
    mode: SeriesMode,
}

impl<T: Scalar, L: StepLaw<T>> Standardizer<T, L> {
    pub fn new(law: L, mode: SeriesMode) -> Result<Self> {
        let profile = law.moment_profile(T::one())?;
        // fails early on σ² = 0
        scales(&profile, T::lit(3.0))?;
        Ok(Standardizer { law, profile, mode })
    }

    pub fn profile(&self) -> &MomentProfile<T> {
        &self.profile
    }

    pub fn centering(&self, arg: T) -> Result<T> {
        match self.mode {
            SeriesMode::RenewalNu => Ok(arg / self.profile.mu),
            _ => centering_with(&self.law, &self.profile, arg),
        }
    }

    pub fn entry(&self, j: u32, arg: T, raw: T) -> Result<SeriesEntry<T>> {
        let centering = self.centering(arg)?;
        let v = self.profile.sigma2 / self.profile.mu.powi(3);
        let z = (raw - centering) / (v * arg).sqrt();
        let ell = if arg >= T::lit(3.0) {
            let (_, lil) = scales(&self.profile, arg)?;
            (raw - centering) / lil
        } else {
            T::nan()
        };
        Ok(SeriesEntry { j, arg, raw, centering, z, ell })
    }

    pub fn series(&self, points: impl IntoIterator<Item = (u32, T, T)>) -> Result<StandardizedSeries<T>> {
        let entries = points
            .into_iter()
            .map(|(j, arg, raw)| self.entry(j, arg, raw))
            .collect::<Result<Vec<_>>>()?;
        Ok(StandardizedSeries { mode: self.mode, law: self.law.to_string(), profile: self.profile, entries })
    }
}
