//! Command dispatch.

use std::fs::File;
use std::io::BufReader;

use conecut::ziggurat::build_ziggurat;
use conecut::{
    democritus_gap, density_limit, gap, iterate_to_fixed_point, oracle_volume, renormalized_series,
    Distance, Mode, Profile,
};
use thiserror::Error;

use crate::config::{
    Command, Format, ProfileArg, RunConfig, Scale, VolumeMode, DEFAULT_HEIGHT, DEFAULT_RADIUS,
};
use crate::report::{Cell, Table};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Conecut(#[from] conecut::Error),
    #[error("cannot read profile table {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("reference thickness {target} does not divide the height {height}")]
    BadTarget { target: f64, height: f64 },
}

fn lib<E: Into<conecut::Error>>(e: E) -> RunError {
    RunError::Conecut(e.into())
}

/// Builds the profile named by the config, reading the table file if any.
pub fn load_profile(cfg: &RunConfig) -> Result<Profile, RunError> {
    let radius = cfg.radius.unwrap_or(DEFAULT_RADIUS);
    let height = cfg.height.unwrap_or(DEFAULT_HEIGHT);
    let p = match &cfg.profile {
        ProfileArg::Cone => Profile::cone(radius, height),
        ProfileArg::Cylinder => Profile::cylinder(radius, height),
        ProfileArg::Paraboloid => Profile::paraboloid(radius, height),
        ProfileArg::Table(path) => {
            let file = File::open(path).map_err(|source| RunError::Io {
                path: path.display().to_string(),
                source,
            })?;
            Profile::from_csv(BufReader::new(file))
        }
    };
    p.map_err(lib)
}

/// Runs one command and returns the encoded report.
pub fn run(cfg: &RunConfig) -> Result<String, RunError> {
    let p = load_profile(cfg)?;
    let name = cfg.command_name();
    let table = match &cfg.command {
        Command::Volume { slabs, mode } => volume(&p, *slabs, *mode, name)?,
        Command::Converge { base_slabs, levels } => converge(&p, *base_slabs, *levels, name)?,
        Command::Rg {
            scale,
            levels,
            mode,
        } => {
            let n0 = match *scale {
                Scale::BaseSlabs(n) => n,
                Scale::Thickness(t) => slabs_for_thickness(&p, t)?,
            };
            let series = renormalized_series(&p, n0, *levels, (*mode).into()).map_err(lib)?;
            match cfg.format {
                Format::Csv => return Ok(series.to_csv()),
                Format::Json => return Ok(series.to_json() + "\n"),
                Format::Table => rg_table(&series, name),
            }
        }
        Command::FixedPoint { slabs, mode } => {
            let zg = build_ziggurat(&p, *slabs, (*mode).into()).map_err(lib)?;
            let report = iterate_to_fixed_point(&zg).map_err(lib)?;
            match cfg.format {
                Format::Csv => return Ok(report.to_csv()),
                Format::Json => return Ok(report.to_json() + "\n"),
                Format::Table => fixedpoint_table(&report, name),
            }
        }
        Command::Democritus { z, eps } => democritus(&p, *z, eps, name)?,
        Command::Density { z, eps } => density(&p, *z, eps, name)?,
    };
    Ok(match cfg.format {
        Format::Table => table.to_text(),
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    })
}

fn slabs_for_thickness(p: &Profile, target: f64) -> Result<usize, RunError> {
    let n = (p.height() / target).round();
    let bad = RunError::BadTarget {
        target,
        height: p.height(),
    };
    if n < 1.0 || (n * target - p.height()).abs() > 1e-9 * p.height() {
        return Err(bad);
    }
    Ok(n as usize)
}

fn volume(p: &Profile, n: usize, mode: VolumeMode, name: &'static str) -> Result<Table, RunError> {
    let build = |m| {
        build_ziggurat(p, n, m)
            .map(|z| z.total_volume())
            .map_err(lib)
    };
    let exact = oracle_volume(p);
    let mut t = match mode {
        VolumeMode::Both => {
            let g = gap(p, n).map_err(lib)?;
            let mut t = Table::new(
                name,
                vec!["slabs", "inscribed", "circumscribed", "exact", "gap"],
            );
            t.push(vec![
                n.into(),
                build(Mode::Inscribed)?.into(),
                build(Mode::Circumscribed)?.into(),
                exact.into(),
                g.subtracted.into(),
            ]);
            t.notes.push(format!(
                "closed-form gap pi*h*|r(0)^2 - r(H)^2| = {}",
                conecut::format::sig(g.telescoped, conecut::format::TABLE_DIGITS)
            ));
            t
        }
        VolumeMode::Inscribed | VolumeMode::Circumscribed => {
            let (m, col) = if mode == VolumeMode::Inscribed {
                (Mode::Inscribed, "inscribed")
            } else {
                (Mode::Circumscribed, "circumscribed")
            };
            let mut t = Table::new(name, vec!["slabs", col, "exact"]);
            t.push(vec![n.into(), build(m)?.into(), exact.into()]);
            t
        }
    };
    if !p.is_monotone() {
        t.notes
            .push("profile is not monotone: stack volumes do not bracket the solid".into());
    }
    Ok(t)
}

fn ratio(prev: Option<f64>, cur: f64) -> Cell {
    match prev {
        Some(a) if cur != 0.0 => Cell::Num(a / cur),
        _ => Cell::Missing,
    }
}

fn converge(p: &Profile, n0: usize, levels: u32, name: &'static str) -> Result<Table, RunError> {
    let exact = oracle_volume(p);
    let mut t = Table::new(
        name,
        vec![
            "slabs",
            "inscribed",
            "circumscribed",
            "gap",
            "inscribed_error",
            "circumscribed_error",
            "inscribed_ratio",
            "circumscribed_ratio",
        ],
    );
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=levels {
        let n = n0
            .checked_mul(1usize.checked_shl(k).unwrap_or(0))
            .filter(|&n| n > 0)
            .ok_or_else(|| lib(conecut::RgError::TooManyLevels(k)))?;
        let inner = build_ziggurat(p, n, Mode::Inscribed)
            .map_err(lib)?
            .total_volume();
        let outer = build_ziggurat(p, n, Mode::Circumscribed)
            .map_err(lib)?
            .total_volume();
        let g = gap(p, n).map_err(lib)?;
        let (ei, eo) = ((inner - exact).abs(), (outer - exact).abs());
        t.push(vec![
            n.into(),
            inner.into(),
            outer.into(),
            g.subtracted.into(),
            ei.into(),
            eo.into(),
            ratio(prev.map(|x| x.0), ei),
            ratio(prev.map(|x| x.1), eo),
        ]);
        prev = Some((ei, eo));
    }
    Ok(t)
}

fn rg_table(s: &conecut::RenormalizedSeries, name: &'static str) -> Table {
    let mut t = Table::new(
        name,
        vec!["level", "bin", "volume", "limit", "error", "ratio"],
    );
    for lv in &s.levels {
        for (bin, slab) in lv.figure.slabs().iter().enumerate() {
            t.push(vec![
                (lv.level as usize).into(),
                bin.into(),
                slab.volume.into(),
                s.limit_figure.slabs()[bin].volume.into(),
                lv.errors[bin].into(),
                lv.ratios[bin].into(),
            ]);
        }
    }
    t.notes.push(format!(
        "{} {} bins of thickness {}",
        s.base_slab_count,
        s.mode.as_str(),
        conecut::format::sig(s.base_thickness, conecut::format::TABLE_DIGITS)
    ));
    t
}

fn fixedpoint_table(r: &conecut::FixedPointReport, name: &'static str) -> Table {
    let mut t = Table::new(
        name,
        vec![
            "iterate",
            "slabs",
            "thickness",
            "total_volume",
            "invariance_distance",
        ],
    );
    for (i, (zg, d)) in r.iterates.iter().zip(&r.invariance_distance).enumerate() {
        let d = match d {
            Distance::Value(v) => Cell::Num(*v),
            Distance::Degenerate => Cell::Text("degenerate".into()),
        };
        t.push(vec![
            i.into(),
            zg.len().into(),
            zg.slabs()[0].thickness.into(),
            zg.total_volume().into(),
            d,
        ]);
    }
    t.notes.push(format!(
        "terminal radius {}",
        conecut::format::sig(r.terminal_radius, conecut::format::TABLE_DIGITS)
    ));
    t
}

fn democritus(p: &Profile, z: f64, eps: &[f64], name: &'static str) -> Result<Table, RunError> {
    let mut t = Table::new(name, vec!["eps", "gap", "gap_over_eps"]);
    for &e in eps {
        let g = democritus_gap(p, z, e).map_err(lib)?;
        t.push(vec![e.into(), g.into(), (g / e).into()]);
    }
    Ok(t)
}

fn density(p: &Profile, z: f64, eps: &[f64], name: &'static str) -> Result<Table, RunError> {
    let values = density_limit(p, z, eps).map_err(lib)?;
    let area = p.area(z).map_err(lib)?;
    let mut t = Table::new(name, vec!["eps", "density", "area", "error", "ratio"]);
    let mut prev = None;
    for (&e, &d) in eps.iter().zip(&values) {
        let err = (d - area).abs();
        t.push(vec![
            e.into(),
            d.into(),
            area.into(),
            err.into(),
            ratio(prev, err),
        ]);
        prev = Some(err);
    }
    Ok(t)
}
