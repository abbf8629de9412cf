//! Radius profiles of solids of revolution.
//!
//! The solid is generated by rotating `r(z)`, `z ∈ [0, H]`, about the
//! z axis. The base circle sits at `z = 0`; cones and paraboloids put their
//! apex at `z = H`.

use std::f64::consts::PI;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sum::CompensatedSum;

/// Midpoint panels used by the whole-solid quadrature oracle.
pub const ORACLE_PANELS: usize = 1 << 20;

/// Floor on the panel count of a bin-restricted quadrature, so that very
/// thin windows still sample the interior.
const MIN_BIN_PANELS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("height must be positive and finite, got {0}")]
    NonPositiveHeight(f64),
    #[error("radius must be positive and finite, got {0}")]
    NonPositiveRadius(f64),
    #[error("a tabulated profile needs at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("tabulated profile must start at z = 0, first sample is at z = {0}")]
    DoesNotStartAtZero(f64),
    #[error("sample {index}: z = {z} does not strictly increase")]
    NotIncreasing { index: usize, z: f64 },
    #[error("sample {index}: radius {r} is negative or not finite")]
    BadRadius { index: usize, r: f64 },
    #[error("z = {z} lies outside [0, {height}]")]
    OutOfRange { z: f64, height: f64 },
    #[error("window [{start}, {end}] lies outside [0, {height}]")]
    WindowOutOfRange { start: f64, end: f64, height: f64 },
    #[error("profile table: {0}")]
    Table(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Cone,
    Cylinder,
    Paraboloid,
    Tabulated,
}

/// Unvalidated description of a profile, as read from the command line or a
/// table file.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Cone {
        radius: f64,
        height: f64,
    },
    Cylinder {
        radius: f64,
        height: f64,
    },
    Paraboloid {
        radius: f64,
        height: f64,
    },
    /// `(z, r)` pairs, interpolated piecewise-linearly.
    Tabulated(Vec<(f64, f64)>),
}

/// A validated radius function on `[0, H]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    kind: ProfileKind,
    base_radius: f64,
    height: f64,
    samples: Vec<(f64, f64)>,
    monotone: bool,
}

impl Profile {
    pub fn cone(radius: f64, height: f64) -> Result<Self, ProfileError> {
        make_profile(ProfileSpec::Cone { radius, height })
    }

    pub fn cylinder(radius: f64, height: f64) -> Result<Self, ProfileError> {
        make_profile(ProfileSpec::Cylinder { radius, height })
    }

    pub fn paraboloid(radius: f64, height: f64) -> Result<Self, ProfileError> {
        make_profile(ProfileSpec::Paraboloid { radius, height })
    }

    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self, ProfileError> {
        make_profile(ProfileSpec::Tabulated(samples))
    }

    /// Reads a tabulated profile from CSV with header `z,r`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, ProfileError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| ProfileError::Table(e.to_string()))?;
        if headers.len() != 2 || &headers[0] != "z" || &headers[1] != "r" {
            return Err(ProfileError::Table(format!(
                "expected header `z,r`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut samples = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| ProfileError::Table(e.to_string()))?;
            let field = |i: usize| -> Result<f64, ProfileError> {
                record[i].parse::<f64>().map_err(|e| {
                    ProfileError::Table(format!("row {}: `{}`: {e}", line + 1, &record[i]))
                })
            };
            samples.push((field(0)?, field(1)?));
        }
        Self::tabulated(samples)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    /// `R` for analytic kinds; `r(0)` for tabulated profiles.
    pub fn base_radius(&self) -> f64 {
        self.base_radius
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// Sample table of a tabulated profile; empty for analytic kinds.
    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// True iff `r` is non-increasing or non-decreasing on `[0, H]`.
    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn radius(&self, z: f64) -> Result<f64, ProfileError> {
        self.check_z(z)?;
        Ok(self.radius_clamped(z))
    }

    /// Cross-section area `A(z) = π r(z)²`.
    pub fn area(&self, z: f64) -> Result<f64, ProfileError> {
        self.radius(z).map(area_of_radius)
    }

    /// Evaluates `r` with `z` clamped into `[0, H]`. Used where `z` is
    /// derived arithmetically and may overshoot `H` by a rounding.
    pub(crate) fn radius_clamped(&self, z: f64) -> f64 {
        let z = z.clamp(0.0, self.height);
        let t = z / self.height;
        match self.kind {
            ProfileKind::Cone => self.base_radius * (1.0 - t),
            ProfileKind::Cylinder => self.base_radius,
            ProfileKind::Paraboloid => self.base_radius * (1.0 - t).max(0.0).sqrt(),
            ProfileKind::Tabulated => interpolate(&self.samples, z),
        }
    }

    /// Upper bound on `|r(z + δ) − r(z)|` over the profile.
    pub fn modulus_of_continuity(&self, delta: f64) -> f64 {
        let delta = delta.abs();
        match self.kind {
            ProfileKind::Cone => self.base_radius * delta / self.height,
            ProfileKind::Cylinder => 0.0,
            // sqrt is 1/2-Hölder with constant 1
            ProfileKind::Paraboloid => self.base_radius * (delta / self.height).min(1.0).sqrt(),
            ProfileKind::Tabulated => {
                let slope = self
                    .samples
                    .windows(2)
                    .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                    .fold(0.0, f64::max);
                slope * delta
            }
        }
    }

    fn check_z(&self, z: f64) -> Result<(), ProfileError> {
        if z.is_finite() && (0.0..=self.height).contains(&z) {
            Ok(())
        } else {
            Err(ProfileError::OutOfRange {
                z,
                height: self.height,
            })
        }
    }
}

pub(crate) fn area_of_radius(r: f64) -> f64 {
    PI * r * r
}

fn interpolate(samples: &[(f64, f64)], z: f64) -> f64 {
    // first index whose z exceeds the query
    let hi = samples.partition_point(|&(zs, _)| zs <= z);
    if hi == 0 {
        return samples[0].1;
    }
    if hi == samples.len() {
        return samples[hi - 1].1;
    }
    let (z0, r0) = samples[hi - 1];
    let (z1, r1) = samples[hi];
    r0 + (r1 - r0) * ((z - z0) / (z1 - z0))
}

fn check_positive(x: f64, err: fn(f64) -> ProfileError) -> Result<f64, ProfileError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(err(x))
    }
}

/// Validates a profile description.
pub fn make_profile(spec: ProfileSpec) -> Result<Profile, ProfileError> {
    let analytic = |kind, radius: f64, height: f64| -> Result<Profile, ProfileError> {
        let height = check_positive(height, ProfileError::NonPositiveHeight)?;
        let base_radius = check_positive(radius, ProfileError::NonPositiveRadius)?;
        Ok(Profile {
            kind,
            base_radius,
            height,
            samples: Vec::new(),
            monotone: true,
        })
    };
    match spec {
        ProfileSpec::Cone { radius, height } => analytic(ProfileKind::Cone, radius, height),
        ProfileSpec::Cylinder { radius, height } => analytic(ProfileKind::Cylinder, radius, height),
        ProfileSpec::Paraboloid { radius, height } => {
            analytic(ProfileKind::Paraboloid, radius, height)
        }
        ProfileSpec::Tabulated(samples) => {
            if samples.len() < 2 {
                return Err(ProfileError::TooFewSamples(samples.len()));
            }
            if samples[0].0 != 0.0 {
                return Err(ProfileError::DoesNotStartAtZero(samples[0].0));
            }
            for (index, &(z, r)) in samples.iter().enumerate() {
                if !(r.is_finite() && r >= 0.0) {
                    return Err(ProfileError::BadRadius { index, r });
                }
                if !z.is_finite() || (index > 0 && z <= samples[index - 1].0) {
                    return Err(ProfileError::NotIncreasing { index, z });
                }
            }
            let height = samples[samples.len() - 1].0;
            let non_increasing = samples.windows(2).all(|w| w[1].1 <= w[0].1);
            let non_decreasing = samples.windows(2).all(|w| w[1].1 >= w[0].1);
            Ok(Profile {
                kind: ProfileKind::Tabulated,
                base_radius: samples[0].1,
                height,
                samples,
                monotone: non_increasing || non_decreasing,
            })
        }
    }
}

/// Exact volume for analytic kinds; a 2²⁰-panel midpoint quadrature of
/// `π r²` for tabulated profiles.
pub fn oracle_volume(p: &Profile) -> f64 {
    let (r, h) = (p.base_radius, p.height);
    match p.kind {
        ProfileKind::Cone => PI * r * r * h / 3.0,
        ProfileKind::Cylinder => PI * r * r * h,
        ProfileKind::Paraboloid => PI * r * r * h / 2.0,
        ProfileKind::Tabulated => midpoint_volume(p, 0.0, h, ORACLE_PANELS),
    }
}

/// Midpoint rule for `∫ π r(z)² dz` over `[start, end]` with `panels`
/// equal panels. The window is clamped into `[0, H]`.
pub fn midpoint_volume(p: &Profile, start: f64, end: f64, panels: usize) -> f64 {
    assert!(panels > 0, "midpoint_volume needs at least one panel");
    let width = (end - start) / panels as f64;
    let mut acc = CompensatedSum::new();
    for j in 0..panels {
        let z = start + (j as f64 + 0.5) * width;
        acc.add(area_of_radius(p.radius_clamped(z)));
    }
    acc.value() * width
}

/// Volume of the solid between the planes `z = start` and `z = end`,
/// from the oracle quadrature restricted to that window: the panel count
/// is the window's share of [`ORACLE_PANELS`] (at least 64).
pub fn bin_volume(p: &Profile, start: f64, end: f64) -> Result<f64, ProfileError> {
    let h = p.height;
    let slack = 1e-12 * h;
    if !(start.is_finite() && end.is_finite() && start >= 0.0 && start <= end && end <= h + slack) {
        return Err(ProfileError::WindowOutOfRange {
            start,
            end,
            height: h,
        });
    }
    if start == end {
        return Ok(0.0);
    }
    let share = (ORACLE_PANELS as f64 * (end - start) / h).round() as usize;
    Ok(midpoint_volume(
        p,
        start,
        end.min(h),
        share.max(MIN_BIN_PANELS),
    ))
}
