//! The `omega` command-line tool: JSON instance documents in, JSON reports out.
//!
//! Exit codes: 0 computed and every asserted property holds, 1 a predicate is
//! false, a witness was produced or no certificate exists, 2 invalid input,
//! 3 resource limit.

mod commands;
pub mod schema;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use omega_core::{Limits, Norm};
use serde_json::Value;

pub use schema::{parse_instance, InstanceDocument, SchemaError, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "omega", version, about = "Generalized convexity checks and exact support certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Cap on table cells or tuples enumerated by a single check.
    #[arg(long, global = true, value_name = "N")]
    pub max_cells: Option<u64>,
    /// Cap on simplex pivots per linear program.
    #[arg(long, global = true, value_name = "N")]
    pub max_pivots: Option<u64>,
}

impl GlobalArgs {
    fn limits(&self) -> Limits {
        let mut limits = Limits::default();
        if let Some(n) = self.max_cells {
            limits.max_cells = n;
        }
        if let Some(n) = self.max_pivots {
            limits.max_pivots = n;
        }
        limits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    L1,
    Linf,
    L2,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Norm {
        match n {
            NormArg::L1 => Norm::L1,
            NormArg::Linf => Norm::Linf,
            NormArg::L2 => Norm::L2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConeAction {
    Dual,
    Sharp,
    Salient,
    Control,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structural hypothesis checks: reflexivity, distributivity and, with a range, its order conditions.
    Check { instance: PathBuf },
    /// Convex hull of a named set.
    Hull {
        #[arg(long = "set", value_name = "NAME")]
        set: String,
        instance: PathBuf,
    },
    /// Extreme hull of a named set.
    ExtremeHull {
        #[arg(long = "set", value_name = "NAME")]
        set: String,
        instance: PathBuf,
    },
    /// Points whose extreme hull is the whole carrier.
    Interior { instance: PathBuf },
    /// Complement of the interior.
    Boundary { instance: PathBuf },
    /// Convex, concave and affine verdicts for a function into the range.
    ClassifyMap {
        /// Defaults to the support function, or the only named function.
        #[arg(long, value_name = "NAME")]
        function: Option<String>,
        instance: PathBuf,
    },
    /// Affine minorant agreeing with f on the anchor set D.
    Support {
        /// Skip the hypothesis checks and report infeasibility instead.
        #[arg(long)]
        override_preconditions: bool,
        instance: PathBuf,
    },
    /// Affine minorant touching f at one interior point.
    SupportAt {
        #[arg(long, value_name = "INDEX")]
        point: Option<usize>,
        #[arg(long)]
        override_preconditions: bool,
        instance: PathBuf,
    },
    /// Additive minorant of a subadditive function on a finite semigroup.
    Subadditive { instance: PathBuf },
    /// Linear minorant of a sampled sublinear map.
    Sublinear { instance: PathBuf },
    /// Compile and check an additive-map instance on a polytope.
    Mt2 { instance: PathBuf },
    /// Dyadic chain certifying that p is a relative interior point.
    RiCert { instance: PathBuf },
    /// (s,t)-affine pair supporting a delta-convex map on a sample.
    DeltaSupport {
        /// Overrides the norm given in the instance.
        #[arg(long, value_enum)]
        norm: Option<NormArg>,
        instance: PathBuf,
    },
    /// Cone duality, sharpness, salience and controllability.
    Cone {
        #[arg(value_enum)]
        action: ConeAction,
        /// Defaults to the only named cone.
        #[arg(long, value_name = "NAME")]
        cone: Option<String>,
        #[arg(long, value_enum, default_value = "l1")]
        norm: NormArg,
        instance: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Hull { .. } => "hull",
            Command::ExtremeHull { .. } => "extreme-hull",
            Command::Interior { .. } => "interior",
            Command::Boundary { .. } => "boundary",
            Command::ClassifyMap { .. } => "classify-map",
            Command::Support { .. } => "support",
            Command::SupportAt { .. } => "support-at",
            Command::Subadditive { .. } => "subadditive",
            Command::Sublinear { .. } => "sublinear",
            Command::Mt2 { .. } => "mt2",
            Command::RiCert { .. } => "ri-cert",
            Command::DeltaSupport { .. } => "delta-support",
            Command::Cone { .. } => "cone",
        }
    }

    fn instance(&self) -> &PathBuf {
        match self {
            Command::Check { instance }
            | Command::Hull { instance, .. }
            | Command::ExtremeHull { instance, .. }
            | Command::Interior { instance }
            | Command::Boundary { instance }
            | Command::ClassifyMap { instance, .. }
            | Command::Support { instance, .. }
            | Command::SupportAt { instance, .. }
            | Command::Subadditive { instance }
            | Command::Sublinear { instance }
            | Command::Mt2 { instance }
            | Command::RiCert { instance }
            | Command::DeltaSupport { instance, .. }
            | Command::Cone { instance, .. } => instance,
        }
    }
}

/// What a run prints and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub code: i32,
    /// Standard output: pretty JSON with sorted keys, newline-terminated.
    pub stdout: String,
    /// Standard error, for argument errors only.
    pub stderr: String,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Response
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Response { code, stdout: String::new(), stderr: text }
            } else {
                Response { code, stdout: text, stderr: String::new() }
            };
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Response {
    let name = cli.command.name();
    let path = cli.command.instance();
    let report = match std::fs::read_to_string(path) {
        Ok(text) => match parse_instance(&text) {
            Ok(doc) => commands::dispatch(&cli.command, &doc, &cli.global.limits()),
            Err(errors) => commands::Report::schema_errors(errors),
        },
        Err(e) => commands::Report::schema_errors(vec![SchemaError {
            path: "$".into(),
            message: format!("cannot read {}: {e}", path.display()),
        }]),
    };
    let (code, value) = report.finish(name);
    Response { code, stdout: render(&value), stderr: String::new() }
}

fn render(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    out.push('\n');
    out
}
