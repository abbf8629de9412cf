//! Cylinder-stack bounds, Wilson averaging and pair-of-planes covectors for
//! solids of revolution.
//!
//! - [`profiles`]: radius functions `r(z)`, cross-section areas and
//!   quadrature oracles.
//! - [`ziggurat`]: inscribed/circumscribed stacks and the telescoping gap.
//! - [`rg`]: pairwise averaging, renormalized series and the fixed point.
//! - [`qcovector`]: pasting composition and the thin-slice density limit.

pub mod format;
pub mod profiles;
pub mod qcovector;
pub mod rg;
pub mod sum;
pub mod ziggurat;

pub use profiles::{make_profile, oracle_volume, Profile, ProfileError, ProfileKind, ProfileSpec};
pub use qcovector::{compose, density_limit, slice_volume, CovectorError, QCovector};
pub use rg::{
    coarse_grain, invariance_distance, iterate_to_fixed_point, renormalize_to_scale,
    renormalized_series, Distance, FixedPointReport, RenormalizedSeries, RgError,
};
pub use ziggurat::{build_ziggurat, democritus_gap, gap, Gap, Mode, Slab, Ziggurat, ZigguratError};

use thiserror::Error;

/// Any error raised by this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Ziggurat(#[from] ZigguratError),
    #[error(transparent)]
    Rg(#[from] RgError),
    #[error(transparent)]
    Covector(#[from] CovectorError),
}
