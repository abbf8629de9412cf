//! Argument parsing.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Defaults shared by every command.
pub const DEFAULT_RADIUS: f64 = 1.0;
pub const DEFAULT_HEIGHT: f64 = 1.0;
pub const DEFAULT_SLABS: usize = 1024;
pub const DEFAULT_BASE_SLABS: usize = 2;
pub const DEFAULT_LEVELS: u32 = 10;
pub const DEFAULT_Z: f64 = 0.5;

/// `1e-1, 1e-2, …, 1e-6`.
pub fn default_democritus_eps() -> Vec<f64> {
    (1..=6).map(|k| 10f64.powi(-k)).collect()
}

/// `1e-2` halved ten times, down to about `9.8e-6`.
pub fn default_density_eps() -> Vec<f64> {
    (0..=10).map(|k| 1e-2 / f64::powi(2.0, k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StackMode {
    Inscribed,
    Circumscribed,
}

impl From<StackMode> for conecut::Mode {
    fn from(m: StackMode) -> Self {
        match m {
            StackMode::Inscribed => conecut::Mode::Inscribed,
            StackMode::Circumscribed => conecut::Mode::Circumscribed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VolumeMode {
    Inscribed,
    Circumscribed,
    Both,
}

/// Which solid to use, before its dimensions are attached.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileArg {
    Cone,
    Cylinder,
    Paraboloid,
    Table(PathBuf),
}

impl fmt::Display for ProfileArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileArg::Cone => f.write_str("cone"),
            ProfileArg::Cylinder => f.write_str("cylinder"),
            ProfileArg::Paraboloid => f.write_str("paraboloid"),
            ProfileArg::Table(p) => write!(f, "table:{}", p.display()),
        }
    }
}

fn parse_profile(s: &str) -> Result<ProfileArg, String> {
    match s {
        "cone" => Ok(ProfileArg::Cone),
        "cylinder" => Ok(ProfileArg::Cylinder),
        "paraboloid" => Ok(ProfileArg::Paraboloid),
        _ => match s.strip_prefix("table:") {
            Some(path) if !path.is_empty() => Ok(ProfileArg::Table(PathBuf::from(path))),
            _ => Err("expected cone, cylinder, paraboloid or table:<path>".into()),
        },
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err("must be a positive number".into())
    }
}

fn parse_nonneg(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err("must be a non-negative number".into())
    }
}

fn parse_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err("must be a positive integer".into()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "conecut",
    version,
    about = "Cylinder stacks, Wilson averaging and thin-slice limits for solids of revolution"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Args)]
struct Common {
    /// cone, cylinder, paraboloid, or table:<path> (CSV with header `z,r`)
    #[arg(long, value_parser = parse_profile, default_value = "cone")]
    profile: ProfileArg,
    /// Base radius of an analytic profile [default: 1]
    #[arg(long, value_parser = parse_positive, allow_negative_numbers = true)]
    radius: Option<f64>,
    /// Height of an analytic profile [default: 1]
    #[arg(long, value_parser = parse_positive, allow_negative_numbers = true)]
    height: Option<f64>,
    #[arg(long, value_enum, env = "CONECUT_FORMAT", default_value = "table")]
    format: Format,
    /// Write the report here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Inscribed and circumscribed volumes, exact volume and gap for one slab count
    Volume {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_count, allow_negative_numbers = true, default_value_t = DEFAULT_SLABS)]
        slabs: usize,
        #[arg(long, value_enum, default_value = "both")]
        mode: VolumeMode,
    },
    /// Both volumes, gap and errors over n = n0·2^k
    Converge {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_count, allow_negative_numbers = true, default_value_t = DEFAULT_BASE_SLABS)]
        base_slabs: usize,
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: u32,
    },
    /// Renormalized series at a fixed reference thickness
    Rg {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_count, allow_negative_numbers = true, conflicts_with = "target")]
        base_slabs: Option<usize>,
        /// Reference thickness; must divide the height
        #[arg(long, value_parser = parse_positive, allow_negative_numbers = true)]
        target: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: u32,
        #[arg(long, value_enum, default_value = "inscribed")]
        mode: StackMode,
    },
    /// Repeated averaging of one stack down to a single slab
    Fixedpoint {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_count, allow_negative_numbers = true, default_value_t = DEFAULT_SLABS)]
        slabs: usize,
        #[arg(long, value_enum, default_value = "inscribed")]
        mode: StackMode,
    },
    /// Area mismatch of the two circles exposed by a cutter of thickness eps
    Democritus {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_nonneg, default_value_t = DEFAULT_Z)]
        z: f64,
        /// Comma-separated cutter thicknesses [default: 1e-1,…,1e-6]
        #[arg(long, value_parser = parse_positive, value_delimiter = ',')]
        eps: Vec<f64>,
    },
    /// Slice volume over eps against the cross-section area
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_nonneg, default_value_t = DEFAULT_Z)]
        z: f64,
        /// Comma-separated, strictly decreasing [default: 1e-2 halved ten times]
        #[arg(long, value_parser = parse_positive, value_delimiter = ',')]
        eps: Vec<f64>,
    },
}

/// What to compute.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Volume {
        slabs: usize,
        mode: VolumeMode,
    },
    Converge {
        base_slabs: usize,
        levels: u32,
    },
    Rg {
        scale: Scale,
        levels: u32,
        mode: StackMode,
    },
    FixedPoint {
        slabs: usize,
        mode: StackMode,
    },
    Democritus {
        z: f64,
        eps: Vec<f64>,
    },
    Density {
        z: f64,
        eps: Vec<f64>,
    },
}

/// Reference scale of a renormalized series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    BaseSlabs(usize),
    Thickness(f64),
}

/// A fully parsed invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub profile: ProfileArg,
    pub radius: Option<f64>,
    pub height: Option<f64>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

/// Parses `argv` (program name first). Errors are clap errors; their exit
/// code is 2 for usage problems and 0 for `--help`/`--version`.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (common, command) = match cli.command {
        CliCommand::Volume {
            common,
            slabs,
            mode,
        } => (common, Command::Volume { slabs, mode }),
        CliCommand::Converge {
            common,
            base_slabs,
            levels,
        } => (common, Command::Converge { base_slabs, levels }),
        CliCommand::Rg {
            common,
            base_slabs,
            target,
            levels,
            mode,
        } => {
            let scale = match (base_slabs, target) {
                (_, Some(t)) => Scale::Thickness(t),
                (Some(n), None) => Scale::BaseSlabs(n),
                (None, None) => Scale::BaseSlabs(DEFAULT_BASE_SLABS),
            };
            (
                common,
                Command::Rg {
                    scale,
                    levels,
                    mode,
                },
            )
        }
        CliCommand::Fixedpoint {
            common,
            slabs,
            mode,
        } => (common, Command::FixedPoint { slabs, mode }),
        CliCommand::Democritus { common, z, eps } => {
            let eps = if eps.is_empty() {
                default_democritus_eps()
            } else {
                eps
            };
            (common, Command::Democritus { z, eps })
        }
        CliCommand::Density { common, z, eps } => {
            let eps = if eps.is_empty() {
                default_density_eps()
            } else {
                eps
            };
            (common, Command::Density { z, eps })
        }
    };
    if let ProfileArg::Table(_) = common.profile {
        for (flag, given) in [("--radius", common.radius), ("--height", common.height)] {
            if given.is_some() {
                return Err(Cli::command_error(format!(
                    "{flag} does not apply to table profiles"
                )));
            }
        }
    }
    Ok(RunConfig {
        command,
        profile: common.profile,
        radius: common.radius,
        height: common.height,
        format: common.format,
        output: common.output,
    })
}

impl Cli {
    fn command_error(msg: String) -> clap::Error {
        use clap::CommandFactory;
        Cli::command().error(clap::error::ErrorKind::ArgumentConflict, msg)
    }
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_owned()
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn command_name(&self) -> &'static str {
        match self.command {
            Command::Volume { .. } => "volume",
            Command::Converge { .. } => "converge",
            Command::Rg { .. } => "rg",
            Command::FixedPoint { .. } => "fixedpoint",
            Command::Democritus { .. } => "democritus",
            Command::Density { .. } => "density",
        }
    }

    /// Canonical argument vector (without the program name). Parsing it
    /// back yields an equal config.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec![
            self.command_name().to_owned(),
            "--profile".into(),
            self.profile.to_string(),
        ];
        if let Some(r) = self.radius {
            args.extend(["--radius".into(), r.to_string()]);
        }
        if let Some(h) = self.height {
            args.extend(["--height".into(), h.to_string()]);
        }
        match &self.command {
            Command::Volume { slabs, mode } => {
                args.extend(["--slabs".into(), slabs.to_string()]);
                args.extend(["--mode".into(), value_name(*mode)]);
            }
            Command::Converge { base_slabs, levels } => {
                args.extend(["--base-slabs".into(), base_slabs.to_string()]);
                args.extend(["--levels".into(), levels.to_string()]);
            }
            Command::Rg {
                scale,
                levels,
                mode,
            } => {
                match scale {
                    Scale::BaseSlabs(n) => args.extend(["--base-slabs".into(), n.to_string()]),
                    Scale::Thickness(t) => args.extend(["--target".into(), t.to_string()]),
                }
                args.extend(["--levels".into(), levels.to_string()]);
                args.extend(["--mode".into(), value_name(*mode)]);
            }
            Command::FixedPoint { slabs, mode } => {
                args.extend(["--slabs".into(), slabs.to_string()]);
                args.extend(["--mode".into(), value_name(*mode)]);
            }
            Command::Democritus { z, eps } | Command::Density { z, eps } => {
                args.extend(["--z".into(), z.to_string()]);
                args.extend(["--eps".into(), join(eps)]);
            }
        }
        args.extend(["--format".into(), value_name(self.format)]);
        if let Some(out) = &self.output {
            args.extend(["--output".into(), out.display().to_string()]);
        }
        args
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_args().join(" "))
    }
}
