use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kee_core::SurfaceIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, ValueEnum)]
pub enum Command {
    Solve,
    Scan,
    Verify,
    Fiber,
    Classes,
    Limit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Scan => "scan",
            Command::Verify => "verify",
            Command::Fiber => "fiber",
            Command::Classes => "classes",
            Command::Limit => "limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

/// Validated run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: u32,
    pub beta1: Vec<f64>,
    pub grid: usize,
    pub fd_step: f64,
    pub quad_tol: f64,
    pub s_hull: f64,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub emit_profile: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UsageKind {
    /// `--help` or `--version`; printed to stdout, exit 0.
    Info,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError {
    pub kind: UsageKind,
    pub message: String,
}

impl UsageError {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            kind: UsageKind::Invalid,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            UsageKind::Info => 0,
            UsageKind::Invalid => 2,
        }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for UsageError {}

/// Kähler–Einstein edge metrics on Hirzebruch surfaces.
#[derive(Debug, Parser)]
#[command(name = "kee", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Profile, angles, roots, volumes and classes for each beta1.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Append N equispaced (tau, phi, phi') samples per profile.
        #[arg(long, value_name = "N", default_value_t = 0)]
        emit_profile: usize,
    },
    /// Sweep beta1 over a grid (log-spaced unless --linear).
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-3)]
        from: f64,
        /// Upper end; defaults to 0.99 times the admissible supremum.
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long)]
        linear: bool,
    },
    /// Finite-difference Einstein check, boundary data and cone probes.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Meridian length, fiber area and cone probes.
    Fiber {
        #[command(flatten)]
        common: Common,
    },
    /// Intersection-theoretic identities for the edge metric class.
    Classes {
        #[command(flatten)]
        common: Common,
    },
    /// Small-angle collapse diagnostics along a decreasing beta1 sequence.
    Limit {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Hirzebruch index n >= 1.
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, conflicts_with = "beta1_seq")]
    beta1: Option<f64>,
    /// Comma-separated list of beta1 values.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    beta1_seq: Option<Vec<f64>>,
    /// Points per direction of the chart grid (grid x grid x 3).
    #[arg(long, default_value_t = 5)]
    grid: usize,
    #[arg(long, default_value_t = 1e-3)]
    fd_step: f64,
    #[arg(long, default_value_t = 1e-10)]
    quad_tol: f64,
    #[arg(long, default_value_t = 40.0)]
    s_hull: f64,
    #[arg(long, visible_alias = "out", value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
}

fn positive(name: &str, v: f64) -> Result<(), UsageError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(UsageError::invalid(format!("--{name} must be a positive number, got {v}")))
    }
}

fn scan_grid(n: SurfaceIndex, from: f64, to: Option<f64>, points: usize, linear: bool) -> Result<Vec<f64>, UsageError> {
    let to = to.unwrap_or(0.99 * n.beta1_sup());
    if points < 2 {
        return Err(UsageError::invalid("--points must be at least 2"));
    }
    if !(from < to) {
        return Err(UsageError::invalid(format!("--from ({from}) must be below --to ({to})")));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            let t = k as f64 / last;
            if linear {
                from + (to - from) * t
            } else {
                from * (to / from).powf(t)
            }
        })
        .collect())
}

/// Parses `argv` (including the program name) into a validated config.
pub fn parse<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        let kind = match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => UsageKind::Info,
            _ => UsageKind::Invalid,
        };
        UsageError {
            kind,
            message: e.render().to_string(),
        }
    })?;

    let (command, common, emit_profile, scan) = match cli.command {
        Sub::Solve { common, emit_profile } => (Command::Solve, common, emit_profile, None),
        Sub::Scan {
            common,
            from,
            to,
            points,
            linear,
        } => (Command::Scan, common, 0, Some((from, to, points, linear))),
        Sub::Verify { common } => (Command::Verify, common, 0, None),
        Sub::Fiber { common } => (Command::Fiber, common, 0, None),
        Sub::Classes { common } => (Command::Classes, common, 0, None),
        Sub::Limit { common } => (Command::Limit, common, 0, None),
    };

    let n = SurfaceIndex::new(common.n).map_err(|_| UsageError::invalid("--n must be a positive integer"))?;
    let beta1 = match (scan, common.beta1, common.beta1_seq) {
        (Some((from, to, points, linear)), None, None) => scan_grid(n, from, to, points, linear)?,
        (Some(_), _, _) => return Err(UsageError::invalid("scan takes --from/--to/--points, not --beta1")),
        (None, Some(b), None) => vec![b],
        (None, None, Some(list)) if !list.is_empty() => list,
        _ => return Err(UsageError::invalid("one of --beta1 or --beta1-seq is required")),
    };
    for &b in &beta1 {
        if n.check_beta1(b).is_err() {
            return Err(UsageError::invalid(format!(
                "--beta1: beta1 must lie in (0, 2/n) ∩ (0,1]; got beta1 = {b} with n = {}",
                common.n
            )));
        }
    }
    if command == Command::Limit && beta1.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(UsageError::invalid("--beta1-seq: limit needs a strictly decreasing sequence"));
    }
    if common.grid == 0 {
        return Err(UsageError::invalid("--grid must be at least 1"));
    }
    positive("fd-step", common.fd_step)?;
    positive("quad-tol", common.quad_tol)?;
    positive("s-hull", common.s_hull)?;

    Ok(RunConfig {
        command,
        n: common.n,
        beta1,
        grid: common.grid,
        fd_step: common.fd_step,
        quad_tol: common.quad_tol,
        s_hull: common.s_hull,
        format: common.format,
        output: common.output,
        emit_profile,
    })
}
