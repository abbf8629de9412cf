//! Pairs of parallel planes.
//!
//! A [`QCovector`] is given by a unit axial direction, the signed offset of
//! its first plane along that direction, and the separation (modulus) of
//! the second plane. Two of them compose only when the second starts where
//! the first ends; the result is the thicker cutter spanning both. A zero
//! modulus still describes two planes, it just puts them at the same place.
//!
//! Cutters on the z axis act on a [`Profile`]: the volume they cut out,
//! divided by their modulus, tends to the cross-section area.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profiles::{bin_volume, Profile, ProfileError};
use crate::ziggurat::Slab;

const UNIT_TOLERANCE: f64 = 1e-12;

pub const Z_AXIS: [f64; 3] = [0.0, 0.0, 1.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CovectorError {
    #[error("axial vector has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("modulus {0} must be non-negative and finite")]
    BadModulus(f64),
    #[error("support {0} must be finite")]
    BadSupport(f64),
    #[error("directions differ (dot product {0})")]
    DirectionMismatch(f64),
    #[error("pasting violated: second cutter starts {gap} away from the end of the first")]
    PastingViolation { gap: f64 },
    #[error("only cutters along +z act on a profile")]
    NotAxisAligned,
    #[error("eps schedule: {0}")]
    BadSchedule(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// A placed pair of parallel planes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QCovectorRepr")]
pub struct QCovector {
    axial: [f64; 3],
    support: f64,
    modulus: f64,
}

#[derive(Deserialize)]
struct QCovectorRepr {
    axial: [f64; 3],
    support: f64,
    modulus: f64,
}

impl TryFrom<QCovectorRepr> for QCovector {
    type Error = CovectorError;

    fn try_from(r: QCovectorRepr) -> Result<Self, Self::Error> {
        QCovector::new(r.axial, r.support, r.modulus)
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl QCovector {
    pub fn new(axial: [f64; 3], support: f64, modulus: f64) -> Result<Self, CovectorError> {
        let norm = dot(axial, axial).sqrt();
        if norm.is_nan() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(CovectorError::NotUnit(norm));
        }
        if !support.is_finite() {
            return Err(CovectorError::BadSupport(support));
        }
        if !(modulus.is_finite() && modulus >= 0.0) {
            return Err(CovectorError::BadModulus(modulus));
        }
        Ok(Self {
            axial,
            support,
            modulus,
        })
    }

    /// Cutter perpendicular to the z axis; also the 1D covector on the axis.
    pub fn along_z(support: f64, modulus: f64) -> Result<Self, CovectorError> {
        Self::new(Z_AXIS, support, modulus)
    }

    /// The axis interval `[z_start, z_start + thickness]` of a slab.
    pub fn from_slab(slab: &Slab) -> Self {
        Self {
            axial: Z_AXIS,
            support: slab.z_start,
            modulus: slab.thickness,
        }
    }

    pub fn axial(&self) -> [f64; 3] {
        self.axial
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    /// Offsets of the starting and final planes. Always two planes.
    pub fn planes(&self) -> [f64; 2] {
        [self.support, self.end()]
    }

    pub fn end(&self) -> f64 {
        self.support + self.modulus
    }

    pub fn is_along_z(&self) -> bool {
        dot(self.axial, Z_AXIS) >= 1.0 - UNIT_TOLERANCE
    }

    pub fn to_json(&self) -> String {
        crate::format::to_json(self).expect("covector serialization is infallible")
    }
}

/// `1e-12` times the largest plane offset involved, the default pasting
/// tolerance for composing `a` and `b`.
pub fn default_tolerance(a: &QCovector, b: &QCovector) -> f64 {
    let scale = [a.support, a.end(), b.support, b.end()]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max);
    1e-12 * scale
}

/// Fuses `b` onto the end of `a`. Requires equal directions and
/// `|support(b) − end(a)| ≤ tol`.
pub fn compose(a: &QCovector, b: &QCovector, tol: f64) -> Result<QCovector, CovectorError> {
    let d = dot(a.axial, b.axial);
    if d.is_nan() || d < 1.0 - UNIT_TOLERANCE {
        return Err(CovectorError::DirectionMismatch(d));
    }
    let gap = (b.support - a.end()).abs();
    if gap.is_nan() || gap > tol {
        return Err(CovectorError::PastingViolation { gap });
    }
    Ok(QCovector {
        axial: a.axial,
        support: a.support,
        modulus: a.modulus + b.modulus,
    })
}

/// What a z-axis cutter removes from a solid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slice {
    pub volume: f64,
    /// Cross-section area on the starting plane.
    pub lower_area: f64,
    /// Cross-section area on the final plane.
    pub upper_area: f64,
}

/// Volume of `p` between the two planes of `c`, by the bin-restricted
/// quadrature oracle, together with the areas on both planes.
pub fn slice_volume(p: &Profile, c: &QCovector) -> Result<Slice, CovectorError> {
    if !c.is_along_z() {
        return Err(CovectorError::NotAxisAligned);
    }
    let [lo, hi] = c.planes();
    let volume = bin_volume(p, lo, hi)?;
    Ok(Slice {
        volume,
        lower_area: p.area(lo)?,
        upper_area: p.area(hi.min(p.height()))?,
    })
}

/// `slice_volume([z, z+ε]) / ε` for each `ε` in a strictly decreasing
/// schedule whose entries stay at or above `1e-8·H`.
pub fn density_limit(p: &Profile, z: f64, eps: &[f64]) -> Result<Vec<f64>, CovectorError> {
    let floor = 1e-8 * p.height();
    for (i, &e) in eps.iter().enumerate() {
        if !(e.is_finite() && e >= floor) {
            return Err(CovectorError::BadSchedule(format!(
                "entry {i} ({e}) is below 1e-8·H = {floor}"
            )));
        }
        if i > 0 && e >= eps[i - 1] {
            return Err(CovectorError::BadSchedule(format!(
                "entry {i} ({e}) does not decrease"
            )));
        }
    }
    eps.iter()
        .map(|&e| {
            let c = QCovector::along_z(z, e)?;
            // divide by the window actually cut, not the nominal eps
            let [lo, hi] = c.planes();
            Ok(slice_volume(p, &c)?.volume / (hi - lo))
        })
        .collect()
}
