//! Wilson averaging of cylinder stacks.
//!
//! [`coarse_grain`] replaces each consecutive pair of slabs, `(0,1)`,
//! `(2,3)`, … counted from the base, by one slab of doubled thickness
//! carrying the summed volume. Total volume is conserved. Stacks of equal
//! radii form the invariant family: only their nominal thickness changes.

use std::fmt::Write as _;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::format::{sig17, to_json};
use crate::profiles::{bin_volume, Profile};
use crate::ziggurat::{build_ziggurat, Mode, Slab, Ziggurat, ZigguratError};

/// Relative slack allowed when matching a target thickness to `h·2^k`.
const SCALE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RgError {
    #[error("cannot pair up an odd number of slabs ({0})")]
    OddSlabCount(usize),
    #[error("slab thicknesses are not uniform")]
    NonUniform,
    #[error("target thickness {target} is not {thickness} times a power of two")]
    UnreachableScale { thickness: f64, target: f64 },
    #[error("slab count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("empty stack")]
    Empty,
    #[error("base slab count must be at least 1")]
    NoBaseSlabs,
    #[error("level {0} needs more than 2^63 slabs")]
    TooManyLevels(u32),
    #[error(transparent)]
    Ziggurat(#[from] ZigguratError),
}

fn require_uniform(zg: &Ziggurat) -> Result<f64, RgError> {
    if zg.is_empty() {
        return Err(RgError::Empty);
    }
    zg.uniform_thickness().ok_or(RgError::NonUniform)
}

/// One Wilson averaging step: merges slabs pairwise from the base upward.
pub fn coarse_grain(zg: &Ziggurat) -> Result<Ziggurat, RgError> {
    if !zg.len().is_multiple_of(2) {
        return Err(RgError::OddSlabCount(zg.len()));
    }
    if zg.is_empty() {
        return Ok(zg.clone());
    }
    require_uniform(zg)?;
    let merged = zg
        .slabs()
        .chunks_exact(2)
        .map(|pair| Slab {
            z_start: pair[0].z_start,
            thickness: pair[0].thickness + pair[1].thickness,
            volume: pair[0].volume + pair[1].volume,
        })
        .collect();
    Ok(Ziggurat::from_parts_unchecked(
        zg.origin(),
        merged,
        zg.is_rigorous(),
    ))
}

/// Applies [`coarse_grain`] until the slab thickness equals `target`,
/// which must be the current thickness times `2^k`, `k ≥ 0`.
pub fn renormalize_to_scale(zg: &Ziggurat, target: f64) -> Result<Ziggurat, RgError> {
    let h = require_uniform(zg)?;
    let unreachable = RgError::UnreachableScale {
        thickness: h,
        target,
    };
    if !(target.is_finite() && target > 0.0) {
        return Err(unreachable);
    }
    let k = (target / h).log2().round();
    if !(0.0..64.0).contains(&k) || (h * k.exp2() - target).abs() > SCALE_TOLERANCE * target {
        return Err(unreachable);
    }
    let mut out = zg.clone();
    for _ in 0..k as u32 {
        out = coarse_grain(&out)?;
    }
    Ok(out)
}

/// One member of a renormalized series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesLevel {
    /// Refinement level: the bare stack had `n0·2^level` slabs.
    pub level: u32,
    pub figure: Ziggurat,
    /// `|volume − limit volume|` per bin.
    pub errors: Vec<f64>,
    /// `errors[level−1] / errors[level]` per bin; `None` at level 0 or
    /// where this level's error is zero.
    pub ratios: Vec<Option<f64>>,
}

/// Progressively finer stacks, each averaged back to `n0` slabs of
/// thickness `H/n0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenormalizedSeries {
    pub base_slab_count: usize,
    pub base_thickness: f64,
    pub mode: Mode,
    pub levels: Vec<SeriesLevel>,
    /// Slab `i` carries the exact volume of the solid over bin `i`.
    pub limit_figure: Ziggurat,
}

impl RenormalizedSeries {
    pub fn to_json(&self) -> String {
        to_json(self).expect("series serialization is infallible")
    }

    /// Flat CSV `level,bin,volume,error`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,bin,volume,error\n");
        for lv in &self.levels {
            for (bin, (slab, err)) in lv.figure.slabs().iter().zip(&lv.errors).enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    lv.level,
                    bin,
                    sig17(slab.volume),
                    sig17(*err)
                );
            }
        }
        out
    }
}

/// The exact-volume figure on `n0` equal bins of `[0, H]`.
pub fn limit_figure(p: &Profile, n0: usize) -> Result<Ziggurat, RgError> {
    if n0 == 0 {
        return Err(RgError::NoBaseSlabs);
    }
    let h0 = p.height() / n0 as f64;
    let slabs = (0..n0)
        .map(|i| {
            let start = i as f64 * h0;
            let end = if i + 1 == n0 {
                p.height()
            } else {
                (i + 1) as f64 * h0
            };
            let volume = bin_volume(p, start, end).map_err(ZigguratError::from)?;
            Ok(Slab {
                z_start: start,
                thickness: h0,
                volume,
            })
        })
        .collect::<Result<Vec<_>, RgError>>()?;
    Ok(Ziggurat::from_parts_unchecked(0.0, slabs, true))
}

/// Builds the `mode` stacks with `n0·2^k` slabs for `k = 0..=k_max`,
/// averages each back to `n0` slabs, and measures per-bin errors against
/// [`limit_figure`].
pub fn renormalized_series(
    p: &Profile,
    n0: usize,
    k_max: u32,
    mode: Mode,
) -> Result<RenormalizedSeries, RgError> {
    let limit = limit_figure(p, n0)?;
    let base_thickness = p.height() / n0 as f64;
    let mut levels: Vec<SeriesLevel> = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let n = 1usize
            .checked_shl(k)
            .and_then(|f| f.checked_mul(n0))
            .filter(|_| k < usize::BITS - 1)
            .ok_or(RgError::TooManyLevels(k))?;
        let bare = build_ziggurat(p, n, mode)?;
        let mut figure = bare;
        for _ in 0..k {
            figure = coarse_grain(&figure)?;
        }
        let errors: Vec<f64> = figure
            .slabs()
            .iter()
            .zip(limit.slabs())
            .map(|(s, l)| (s.volume - l.volume).abs())
            .collect();
        let ratios = match levels.last() {
            None => vec![None; errors.len()],
            Some(prev) => prev
                .errors
                .iter()
                .zip(&errors)
                .map(|(&a, &b)| (b != 0.0).then(|| a / b))
                .collect(),
        };
        levels.push(SeriesLevel {
            level: k,
            figure,
            errors,
            ratios,
        });
    }
    Ok(RenormalizedSeries {
        base_slab_count: n0,
        base_thickness,
        mode,
        levels,
        limit_figure: limit,
    })
}

/// Relative distance of a figure from the constant-radius family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    Value(f64),
    /// The figure has zero volume, so it has no reference radius.
    Degenerate,
}

impl Distance {
    pub fn value(self) -> Option<f64> {
        match self {
            Distance::Value(d) => Some(d),
            Distance::Degenerate => None,
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Distance::Value(d) => s.serialize_f64(*d),
            Distance::Degenerate => s.serialize_str("degenerate"),
        }
    }
}

/// `max |ρ_i − ρ̄| / ρ̄` over slab effective radii `ρ_i`, with
/// `ρ̄ = sqrt(V/(π·H))` the radius of the single cylinder holding the
/// whole volume. Zero exactly on constant-radius stacks.
pub fn invariance_distance(zg: &Ziggurat) -> Result<Distance, RgError> {
    require_uniform(zg)?;
    let total = zg.total_volume();
    if total <= 0.0 {
        return Ok(Distance::Degenerate);
    }
    let reference = Slab {
        z_start: zg.origin(),
        thickness: zg.total_thickness(),
        volume: total,
    }
    .effective_radius();
    let worst = zg
        .slabs()
        .iter()
        .map(|s| (s.effective_radius() - reference).abs())
        .fold(0.0, f64::max);
    Ok(Distance::Value(worst / reference))
}

/// Trajectory of a stack under repeated averaging down to one slab.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointReport {
    /// The input first, then each coarse-grained figure.
    pub iterates: Vec<Ziggurat>,
    pub terminal_radius: f64,
    pub invariance_distance: Vec<Distance>,
}

impl FixedPointReport {
    pub fn steps(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn terminal(&self) -> &Ziggurat {
        self.iterates
            .last()
            .expect("a report always holds its input")
    }

    pub fn to_json(&self) -> String {
        to_json(self).expect("report serialization is infallible")
    }

    /// Flat CSV `iterate,slabs,thickness,invariance_distance`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iterate,slabs,thickness,invariance_distance\n");
        for (i, (zg, d)) in self
            .iterates
            .iter()
            .zip(&self.invariance_distance)
            .enumerate()
        {
            let d = match d {
                Distance::Value(v) => sig17(*v),
                Distance::Degenerate => "degenerate".to_owned(),
            };
            let _ = writeln!(
                out,
                "{},{},{},{}",
                i,
                zg.len(),
                sig17(zg.slabs()[0].thickness),
                d
            );
        }
        out
    }
}

/// Coarse-grains a power-of-two stack until a single slab remains.
pub fn iterate_to_fixed_point(zg: &Ziggurat) -> Result<FixedPointReport, RgError> {
    if !zg.len().is_power_of_two() {
        return Err(RgError::NotPowerOfTwo(zg.len()));
    }
    require_uniform(zg)?;
    let mut iterates = vec![zg.clone()];
    let mut distances = vec![invariance_distance(zg)?];
    while iterates.last().map_or(0, Ziggurat::len) > 1 {
        let next = coarse_grain(iterates.last().unwrap())?;
        distances.push(invariance_distance(&next)?);
        iterates.push(next);
    }
    let terminal_radius = iterates.last().unwrap().slabs()[0].effective_radius();
    Ok(FixedPointReport {
        iterates,
        terminal_radius,
        invariance_distance: distances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn cone() -> Profile {
        Profile::cone(1.0, 1.0).unwrap()
    }

    #[test]
    fn merges_a_pair() {
        let zg = Ziggurat::new(vec![
            Slab::new(0.0, 0.25, 0.7).unwrap(),
            Slab::new(0.25, 0.25, 0.7).unwrap(),
        ])
        .unwrap();
        let out = coarse_grain(&zg).unwrap();
        assert_eq!(out.slabs(), &[Slab::new(0.0, 0.5, 1.4).unwrap()]);
    }

    #[test]
    fn cone_inscribed_n4_to_n2() {
        let zg = build_ziggurat(&cone(), 4, Mode::Inscribed).unwrap();
        let out = coarse_grain(&zg).unwrap();
        assert_eq!(out.len(), 2);
        let vols: Vec<f64> = out.slabs().iter().map(|s| s.volume / PI).collect();
        assert!((vols[0] - 0.203125).abs() < 1e-15);
        assert!((vols[1] - 0.015625).abs() < 1e-15);
        let radii = out.effective_radii();
        assert!((radii[0] - 0.637_377_4).abs() < 1e-7);
        assert!((radii[1] - 0.176_776_7).abs() < 1e-7);
        assert_eq!(out.uniform_thickness(), Some(0.5));
    }

    #[test]
    fn constant_radius_is_invariant() {
        let zg = Ziggurat::constant_radius(0.0, 0.125, 0.8, 8).unwrap();
        let out = coarse_grain(&zg).unwrap();
        assert_eq!(out.len(), 4);
        for r in out.effective_radii() {
            assert!(rel(r, 0.8) < 1e-12);
        }
        assert_eq!(invariance_distance(&out).unwrap().value().unwrap(), 0.0);
    }

    #[test]
    fn coarse_grain_errors() {
        let zg = build_ziggurat(&cone(), 3, Mode::Inscribed).unwrap();
        assert_eq!(coarse_grain(&zg), Err(RgError::OddSlabCount(3)));
        let uneven = Ziggurat::new(vec![
            Slab::new(0.0, 0.25, 0.1).unwrap(),
            Slab::new(0.25, 0.75, 0.1).unwrap(),
        ])
        .unwrap();
        assert_eq!(coarse_grain(&uneven), Err(RgError::NonUniform));
    }

    #[test]
    fn renormalize_examples() {
        let zg = build_ziggurat(&cone(), 8, Mode::Inscribed).unwrap();
        let out = renormalize_to_scale(&zg, 0.5).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.uniform_thickness(), Some(0.5));

        let four = build_ziggurat(&cone(), 4, Mode::Inscribed).unwrap();
        assert_eq!(
            renormalize_to_scale(&four, 0.5).unwrap(),
            coarse_grain(&four).unwrap()
        );
        assert_eq!(renormalize_to_scale(&four, 0.25).unwrap(), four);
    }

    #[test]
    fn renormalize_rejects_unreachable_targets() {
        let zg = build_ziggurat(&cone(), 8, Mode::Inscribed).unwrap();
        for target in [0.3, 0.0625, -0.5, f64::NAN] {
            assert!(matches!(
                renormalize_to_scale(&zg, target),
                Err(RgError::UnreachableScale { .. })
            ));
        }
        // reachable by doubling, but 6 slabs run into an odd count
        let six = build_ziggurat(&cone(), 6, Mode::Inscribed).unwrap();
        assert_eq!(
            renormalize_to_scale(&six, 4.0 / 6.0),
            Err(RgError::OddSlabCount(3))
        );
    }

    #[test]
    fn cone_series_limit_and_errors() {
        let s = renormalized_series(&cone(), 2, 2, Mode::Inscribed).unwrap();
        let lim: Vec<f64> = s.limit_figure.slabs().iter().map(|x| x.volume).collect();
        assert!(rel(lim[0], PI * 0.875 / 3.0) < 1e-12);
        assert!(rel(lim[1], PI * 0.125 / 3.0) < 1e-12);
        assert!((lim[0] - 0.916_297_9).abs() < 1e-7);
        assert!((lim[1] - 0.130_899_7).abs() < 1e-7);

        // hand sums: inscribed n=2,4,8 pair-summed back to two bins
        let want = [
            1.0 / 6.0,
            0.088_541_666_666_666_67,
            0.045_572_916_666_666_67,
        ];
        for (lv, w) in s.levels.iter().zip(want) {
            assert!(rel(lv.errors[0], w * PI) < 1e-10, "level {}", lv.level);
            assert_eq!(lv.figure.len(), 2);
            assert_eq!(lv.figure.uniform_thickness(), Some(0.5));
        }
        assert_eq!(s.levels[0].ratios, vec![None, None]);
        let r1 = s.levels[1].ratios[0].unwrap();
        let r2 = s.levels[2].ratios[0].unwrap();
        assert!((r1 - 1.88).abs() < 0.01 && (r2 - 1.94).abs() < 0.01);
    }

    #[test]
    fn cylinder_series_is_exact() {
        let p = Profile::cylinder(1.0, 1.0).unwrap();
        for n0 in [1, 2, 4] {
            let s = renormalized_series(&p, n0, 4, Mode::Circumscribed).unwrap();
            for lv in &s.levels {
                assert!(lv.errors.iter().all(|&e| e <= 1e-15), "{:?}", lv.errors);
            }
        }
    }

    #[test]
    fn fixed_point_of_cone_n4() {
        let zg = build_ziggurat(&cone(), 4, Mode::Inscribed).unwrap();
        let rep = iterate_to_fixed_point(&zg).unwrap();
        assert_eq!(rep.steps(), 2);
        assert!((rep.terminal_radius - 0.21875f64.sqrt()).abs() < 1e-15);
        assert!((rep.terminal_radius - 0.467_707_2).abs() < 1e-7);
        assert_eq!(rep.invariance_distance.last(), Some(&Distance::Value(0.0)));
        assert_eq!(rep.terminal().slabs()[0].thickness, 1.0);
    }

    #[test]
    fn fixed_point_of_invariant_stack() {
        let zg = Ziggurat::constant_radius(0.0, 0.125, 0.3, 8).unwrap();
        let rep = iterate_to_fixed_point(&zg).unwrap();
        assert_eq!(rep.steps(), 3);
        assert!(rel(rep.terminal_radius, 0.3) < 1e-15);
        for d in &rep.invariance_distance {
            assert!(d.value().unwrap() <= 1e-15);
        }
    }

    #[test]
    fn fixed_point_single_slab_and_errors() {
        let one = Ziggurat::constant_radius(0.0, 1.0, 2.0, 1).unwrap();
        let rep = iterate_to_fixed_point(&one).unwrap();
        assert_eq!(rep.iterates.len(), 1);
        assert_eq!(rep.invariance_distance, vec![Distance::Value(0.0)]);

        let six = build_ziggurat(&cone(), 6, Mode::Inscribed).unwrap();
        assert_eq!(iterate_to_fixed_point(&six), Err(RgError::NotPowerOfTwo(6)));
        assert_eq!(
            iterate_to_fixed_point(&Ziggurat::empty(0.0)),
            Err(RgError::NotPowerOfTwo(0))
        );
    }

    #[test]
    fn distance_examples() {
        let zg = build_ziggurat(&cone(), 2, Mode::Inscribed).unwrap();
        let d = invariance_distance(&zg).unwrap().value().unwrap();
        assert!((d - 1.0).abs() < 1e-12, "{d}");

        let degenerate = build_ziggurat(&cone(), 1, Mode::Inscribed).unwrap();
        assert_eq!(invariance_distance(&degenerate), Ok(Distance::Degenerate));
    }

    #[test]
    fn distance_is_scale_free() {
        let zg =
            build_ziggurat(&Profile::paraboloid(1.0, 1.0).unwrap(), 16, Mode::Inscribed).unwrap();
        let d = invariance_distance(&zg).unwrap().value().unwrap();
        for c in [1e-3, 0.5, 7.0, 1e4] {
            let scaled: Vec<Slab> = zg
                .slabs()
                .iter()
                .map(|s| Slab::new(s.z_start, s.thickness, s.volume * c).unwrap())
                .collect();
            let ds = invariance_distance(&Ziggurat::new(scaled).unwrap())
                .unwrap()
                .value()
                .unwrap();
            assert!((ds - d).abs() <= 1e-12 * d);
        }
    }

    #[test]
    fn encodings() {
        let s = renormalized_series(&cone(), 2, 1, Mode::Inscribed).unwrap();
        let csv = s.to_csv();
        assert_eq!(csv.lines().count(), 1 + 2 * 2);
        assert!(csv.starts_with("level,bin,volume,error\n0,0,"));
        let json: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(json["base_slab_count"], 2);
        assert_eq!(
            json["levels"][1]["figure"]["slabs"]
                .as_array()
                .unwrap()
                .len(),
            2
        );
        assert!(json["levels"][0]["ratios"][0].is_null());

        let rep =
            iterate_to_fixed_point(&build_ziggurat(&cone(), 1, Mode::Inscribed).unwrap()).unwrap();
        assert_eq!(
            rep.to_csv(),
            "iterate,slabs,thickness,invariance_distance\n0,1,1.0000000000000000,degenerate\n"
        );
        assert!(rep
            .to_json()
            .contains("\"invariance_distance\":[\"degenerate\"]"));
    }
}
