//! Limits as the radius goes to zero, evaluated on a geometric schedule.
//!
//! The band-infimum expressions behind every strict slope are monotone in the
//! radius, so the value at the smallest radius is reported as is together with
//! monotonicity and saturation diagnostics. No extrapolation is attempted.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ext::ExtReal;

pub const DEFAULT_TOL: f64 = 1e-6;

/// Radii `rho0 * gamma^k` for `k = 0..=steps`: the initial radius followed by
/// `steps` successive contractions.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadiusSchedule {
    pub rho0: f64,
    pub gamma: f64,
    pub steps: usize,
}

impl Default for RadiusSchedule {
    fn default() -> Self {
        RadiusSchedule {
            rho0: 1.0,
            gamma: 0.5,
            steps: 12,
        }
    }
}

impl RadiusSchedule {
    pub fn new(rho0: f64, gamma: f64, steps: usize) -> Result<Self> {
        let s = RadiusSchedule { rho0, gamma, steps };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return Err(Error::InvalidSchedule("rho0 must be positive and finite"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidSchedule("gamma must lie in (0, 1)"));
        }
        if self.steps < 2 {
            return Err(Error::ScheduleTooShort(self.steps));
        }
        Ok(())
    }

    pub fn radius(&self, k: usize) -> f64 {
        self.rho0 * libm::pow(self.gamma, k as f64)
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.radius(k)).collect()
    }

    pub fn finest(&self) -> f64 {
        self.radius(self.steps)
    }

    /// Drops trailing radii below `min_radius` (keeping at least two contractions).
    ///
    /// Used to keep every band above the resolution of a grid.
    pub fn truncated_at(&self, min_radius: f64) -> Self {
        let mut steps = self.steps;
        while steps > 2 && self.radius(steps) < min_radius {
            steps -= 1;
        }
        RadiusSchedule { steps, ..*self }
    }
}

/// Band values along a radius schedule plus diagnostics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LimitEstimate {
    pub per_radius: Vec<(f64, ExtReal)>,
    pub reported: ExtReal,
    pub monotone: bool,
    pub saturated: bool,
}

impl LimitEstimate {
    pub fn values(&self) -> impl Iterator<Item = ExtReal> + '_ {
        self.per_radius.iter().map(|&(_, v)| v)
    }

    pub fn first(&self) -> ExtReal {
        self.per_radius[0].1
    }

    fn build(per_radius: Vec<(f64, ExtReal)>, tol: f64, nondecreasing: bool) -> Self {
        let monotone = per_radius.windows(2).all(|w| {
            let (a, b) = (w[0].1, w[1].1);
            if nondecreasing {
                b.is_infinite() || (a.is_finite() && b.value() >= a.value() - tol)
            } else {
                a.is_infinite() || (b.is_finite() && b.value() <= a.value() + tol)
            }
        });
        let n = per_radius.len();
        let (prev, last) = (per_radius[n - 2].1, per_radius[n - 1].1);
        let saturated = (prev.is_infinite() && last.is_infinite())
            || (prev.is_finite() && last.is_finite() && (last.value() - prev.value()).abs() <= tol);
        LimitEstimate {
            reported: last,
            per_radius,
            monotone,
            saturated,
        }
    }
}

fn collect<F>(mut band: F, schedule: &RadiusSchedule, tol: f64) -> Result<Vec<(f64, ExtReal)>>
where
    F: FnMut(f64) -> f64,
{
    schedule.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    schedule
        .radii()
        .into_iter()
        .map(|rho| {
            ExtReal::new(band(rho))
                .map(|v| (rho, v))
                .ok_or(Error::BandNotAValue { radius: rho })
        })
        .collect()
}

/// `lim_{ρ↓0} inf_{band(ρ)}`: values are expected to be nondecreasing as the
/// bands shrink. `band_inf` returns an `f64` where `f64::INFINITY` encodes an
/// empty band; NaN or `-∞` is an error.
pub fn estimate_limit<F>(band_inf: F, schedule: &RadiusSchedule, tol: f64) -> Result<LimitEstimate>
where
    F: FnMut(f64) -> f64,
{
    let per_radius = collect(band_inf, schedule, tol)?;
    Ok(LimitEstimate::build(per_radius, tol, true))
}

/// `lim_{ρ↓0} sup_{band(ρ)}`: values are expected to be nonincreasing.
pub fn estimate_sup_limit<F>(band_sup: F, schedule: &RadiusSchedule, tol: f64) -> Result<LimitEstimate>
where
    F: FnMut(f64) -> f64,
{
    let per_radius = collect(band_sup, schedule, tol)?;
    Ok(LimitEstimate::build(per_radius, tol, false))
}
