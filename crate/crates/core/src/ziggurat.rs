//! Inscribed and circumscribed cylinder stacks.
//!
//! A [`Ziggurat`] is a contiguous stack of [`Slab`]s: each slab's upper
//! plane is the next slab's lower plane. For a monotone profile the
//! inscribed stack uses the smaller endpoint radius of each slice and the
//! circumscribed stack the larger one, so every inscribed slab equals the
//! circumscribed slab just above or below it and the two volumes differ by
//! a single end slab.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::sig17;
use crate::profiles::{area_of_radius, Profile, ProfileError};
use crate::sum::{compensated_sum, CompensatedSum};

/// Relative tolerance (in units of total stack height) for the pasting
/// condition and for thickness uniformity.
pub const PASTING_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZigguratError {
    #[error("slab count must be at least 1")]
    NoSlabs,
    #[error("slab {index}: thickness {thickness} must be positive and finite")]
    BadThickness { index: usize, thickness: f64 },
    #[error("slab {index}: volume {volume} must be non-negative and finite")]
    BadVolume { index: usize, volume: f64 },
    #[error("slab {index} starts at {found}, expected {expected} (pasting condition)")]
    NotPasted {
        index: usize,
        expected: f64,
        found: f64,
    },
    #[error("origin {origin} does not match the first slab start {first}")]
    OriginMismatch { origin: f64, first: f64 },
    #[error("the telescoping gap needs a monotone profile")]
    NotMonotone,
    #[error("cutter [{z}, {z} + {eps}] must satisfy 0 <= z < z + eps <= {height}")]
    BadCut { z: f64, eps: f64, height: f64 },
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// One cylinder of a stack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slab {
    pub z_start: f64,
    pub thickness: f64,
    pub volume: f64,
}

impl Slab {
    pub fn new(z_start: f64, thickness: f64, volume: f64) -> Result<Self, ZigguratError> {
        let slab = Self {
            z_start,
            thickness,
            volume,
        };
        slab.validate(0)?;
        Ok(slab)
    }

    /// Cylinder of the given radius.
    pub fn with_radius(z_start: f64, thickness: f64, radius: f64) -> Result<Self, ZigguratError> {
        Self::new(z_start, thickness, area_of_radius(radius) * thickness)
    }

    pub fn z_end(&self) -> f64 {
        self.z_start + self.thickness
    }

    /// Radius of the cylinder with this slab's thickness and volume.
    pub fn effective_radius(&self) -> f64 {
        (self.volume / (PI * self.thickness)).sqrt()
    }

    fn validate(&self, index: usize) -> Result<(), ZigguratError> {
        if !(self.thickness.is_finite() && self.thickness > 0.0) {
            return Err(ZigguratError::BadThickness {
                index,
                thickness: self.thickness,
            });
        }
        if !(self.volume.is_finite() && self.volume >= 0.0) {
            return Err(ZigguratError::BadVolume {
                index,
                volume: self.volume,
            });
        }
        if !self.z_start.is_finite() {
            return Err(ZigguratError::NotPasted {
                index,
                expected: f64::NAN,
                found: self.z_start,
            });
        }
        Ok(())
    }
}

/// Which side of the solid a stack approximates from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Inscribed,
    Circumscribed,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Inscribed => "inscribed",
            Mode::Circumscribed => "circumscribed",
        }
    }
}

/// An ordered, contiguous stack of slabs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ZigguratRepr")]
pub struct Ziggurat {
    origin: f64,
    slabs: Vec<Slab>,
    /// False when built from a non-monotone profile: the endpoint radii
    /// then no longer bracket the solid.
    #[serde(skip_serializing_if = "is_true")]
    rigorous: bool,
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Deserialize)]
struct ZigguratRepr {
    origin: f64,
    slabs: Vec<Slab>,
    #[serde(default = "default_rigorous")]
    rigorous: bool,
}

fn default_rigorous() -> bool {
    true
}

impl TryFrom<ZigguratRepr> for Ziggurat {
    type Error = ZigguratError;

    fn try_from(repr: ZigguratRepr) -> Result<Self, Self::Error> {
        if let Some(first) = repr.slabs.first() {
            let tol = PASTING_TOLERANCE * total_thickness(&repr.slabs);
            if (first.z_start - repr.origin).abs() > tol {
                return Err(ZigguratError::OriginMismatch {
                    origin: repr.origin,
                    first: first.z_start,
                });
            }
        }
        let mut zg = if repr.slabs.is_empty() {
            Ziggurat::empty(repr.origin)
        } else {
            Ziggurat::new(repr.slabs)?
        };
        zg.rigorous = repr.rigorous;
        Ok(zg)
    }
}

fn total_thickness(slabs: &[Slab]) -> f64 {
    compensated_sum(slabs.iter().map(|s| s.thickness))
}

impl Ziggurat {
    /// Builds a stack from slabs, checking the pasting condition to within
    /// `1e-12` of the total height. The origin is the first slab's start.
    pub fn new(slabs: Vec<Slab>) -> Result<Self, ZigguratError> {
        let first = slabs.first().ok_or(ZigguratError::NoSlabs)?;
        let origin = first.z_start;
        for (i, s) in slabs.iter().enumerate() {
            s.validate(i)?;
        }
        let tol = PASTING_TOLERANCE * total_thickness(&slabs);
        for (i, w) in slabs.windows(2).enumerate() {
            let expected = w[0].z_end();
            if (w[1].z_start - expected).abs() > tol {
                return Err(ZigguratError::NotPasted {
                    index: i + 1,
                    expected,
                    found: w[1].z_start,
                });
            }
        }
        Ok(Self {
            origin,
            slabs,
            rigorous: true,
        })
    }

    pub fn empty(origin: f64) -> Self {
        Self {
            origin,
            slabs: Vec::new(),
            rigorous: true,
        }
    }

    /// Stack of `n` equal cylinders of radius `radius` on `[origin, origin + n·thickness]`.
    pub fn constant_radius(
        origin: f64,
        thickness: f64,
        radius: f64,
        n: usize,
    ) -> Result<Self, ZigguratError> {
        let slabs = (0..n)
            .map(|i| Slab::with_radius(origin + i as f64 * thickness, thickness, radius))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(slabs)
    }

    pub(crate) fn from_parts_unchecked(origin: f64, slabs: Vec<Slab>, rigorous: bool) -> Self {
        Self {
            origin,
            slabs,
            rigorous,
        }
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn slabs(&self) -> &[Slab] {
        &self.slabs
    }

    pub fn len(&self) -> usize {
        self.slabs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slabs.is_empty()
    }

    pub fn is_rigorous(&self) -> bool {
        self.rigorous
    }

    /// Sum of slab volumes, accumulated left to right.
    pub fn total_volume(&self) -> f64 {
        compensated_sum(self.slabs.iter().map(|s| s.volume))
    }

    pub fn total_thickness(&self) -> f64 {
        total_thickness(&self.slabs)
    }

    /// The common slab thickness, if every slab matches the first to within
    /// `1e-12` of the total height.
    pub fn uniform_thickness(&self) -> Option<f64> {
        let first = self.slabs.first()?.thickness;
        let tol = PASTING_TOLERANCE * self.total_thickness();
        self.slabs
            .iter()
            .all(|s| (s.thickness - first).abs() <= tol)
            .then_some(first)
    }

    pub fn effective_radii(&self) -> Vec<f64> {
        self.slabs.iter().map(Slab::effective_radius).collect()
    }

    /// JSON `{origin, slabs:[{z_start, thickness, volume}]}` with 17-digit floats.
    pub fn to_json(&self) -> String {
        crate::format::to_json(self).expect("ziggurat serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// CSV with header `z_start,thickness,volume`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("z_start,thickness,volume\n");
        for s in &self.slabs {
            let _ = writeln!(
                out,
                "{},{},{}",
                sig17(s.z_start),
                sig17(s.thickness),
                sig17(s.volume)
            );
        }
        out
    }
}

/// Radii of `r` at the `n + 1` nodes `i·H/n`. Node `n` is pinned to `H`.
fn node_radii(p: &Profile, n: usize) -> Vec<f64> {
    let h = p.height() / n as f64;
    (0..=n)
        .map(|i| {
            let z = if i == n { p.height() } else { i as f64 * h };
            p.radius_clamped(z)
        })
        .collect()
}

/// Builds the `n`-slab inscribed or circumscribed stack of `p`.
///
/// Slab `i` spans `[i·h, (i+1)·h]` with `h = H/n`; its radius is the min
/// (inscribed) or max (circumscribed) of `r` at the two endpoints. Each
/// node radius is evaluated once and shared by the two slabs meeting there.
/// Non-monotone profiles produce a stack marked non-rigorous.
pub fn build_ziggurat(p: &Profile, n: usize, mode: Mode) -> Result<Ziggurat, ZigguratError> {
    if n == 0 {
        return Err(ZigguratError::NoSlabs);
    }
    let h = p.height() / n as f64;
    let radii = node_radii(p, n);
    let slabs = radii
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let r = match mode {
                Mode::Inscribed => w[0].min(w[1]),
                Mode::Circumscribed => w[0].max(w[1]),
            };
            Slab {
                z_start: i as f64 * h,
                thickness: h,
                volume: area_of_radius(r) * h,
            }
        })
        .collect();
    Ok(Ziggurat::from_parts_unchecked(0.0, slabs, p.is_monotone()))
}

/// Circumscribed minus inscribed volume, computed two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap {
    /// Difference of the two stacks, slab by slab, compensated-summed.
    pub subtracted: f64,
    /// `π·h·|r(0)² − r(H)²|`: the single end slab left after telescoping.
    pub telescoped: f64,
}

/// Volume gap between the circumscribed and inscribed `n`-slab stacks of
/// a monotone profile.
pub fn gap(p: &Profile, n: usize) -> Result<Gap, ZigguratError> {
    if !p.is_monotone() {
        return Err(ZigguratError::NotMonotone);
    }
    let outer = build_ziggurat(p, n, Mode::Circumscribed)?;
    let inner = build_ziggurat(p, n, Mode::Inscribed)?;
    let mut acc = CompensatedSum::new();
    for (o, i) in outer.slabs().iter().zip(inner.slabs()) {
        acc.add(o.volume);
        acc.add(-i.volume);
    }
    let h = p.height() / n as f64;
    let r0 = p.radius_clamped(0.0);
    let r1 = p.radius_clamped(p.height());
    Ok(Gap {
        subtracted: acc.value(),
        telescoped: PI * h * (r0 * r0 - r1 * r1).abs(),
    })
}

/// Area mismatch `π(r(z)² − r(z+ε)²)` between the two circles a cutter of
/// thickness `eps` exposes at height `z`. Signed: positive where the
/// profile narrows upward.
pub fn democritus_gap(p: &Profile, z: f64, eps: f64) -> Result<f64, ZigguratError> {
    let h = p.height();
    let top = z + eps;
    let ok = z.is_finite()
        && eps.is_finite()
        && z >= 0.0
        && eps > 0.0
        && top > z
        && top <= h * (1.0 + PASTING_TOLERANCE);
    if !ok {
        return Err(ZigguratError::BadCut { z, eps, height: h });
    }
    let lower = area_of_radius(p.radius(z)?);
    let upper = area_of_radius(p.radius_clamped(top));
    Ok(lower - upper)
}
