//! Flag parsing and config resolution.
//!
//! Every subcommand accepts the same flag set; a JSON config file can supply
//! any subset of the same keys, and explicit flags win over the file. Each
//! command then states which resolved parameters it needs; a missing one is a
//! usage error (exit 2), not a computation error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "building-walks",
    version = building_walks::report::library_version(),
    about = "Random walks on rank-2 incidence geometries and the C2-tilde vertex lattice: \
             exact and spectral transition curves, mixing bounds, local-limit asymptotics, \
             feasibility checks, model audits, and seeded Monte Carlo.",
    after_help = "Reports go to stdout (or --out) as CSV or JSON; every report embeds the \
                  resolved configuration and the library version. Computation failures exit 1 \
                  with a JSON error object on stderr; usage problems exit 2.\n\
                  BUILDING_WALKS_THREADS overrides the simulation worker count (never the output)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Transition curve p^(n)(x,y) per Weyl distance, via character sums (needs --m --q --r --n)
    #[command(name = "polygon-pn")]
    PolygonPn(CommonArgs),
    /// Return probability, exact total-variation distance, and spectral TV bound per step (needs --m --q --r --n)
    #[command(name = "polygon-mix")]
    PolygonMix(CommonArgs),
    /// Closed-form quadrangle SRW return probability and TV bound (needs --q --r --n; m fixed at 4)
    #[command(name = "quadrangle-closed-form")]
    QuadrangleClosedForm(CommonArgs),
    /// Multiplicity-rationality existence test for a thick generalized m-gon (needs --m --q --r)
    #[command(name = "feit-higman")]
    FeitHigman(CommonArgs),
    /// Known parameter feasibility conditions for thick generalized m-gons (needs --m --q --r)
    #[command(name = "param-check")]
    ParamCheck(CommonArgs),
    /// C2-tilde vertex walk coefficients by exact recursion (needs --q --r --n)
    #[command(name = "c2-exact")]
    C2Exact(CommonArgs),
    /// C2-tilde vertex walk probabilities by Plancherel quadrature (needs --q --r --n; --grid N1xN2)
    #[command(name = "c2-spectral")]
    C2Spectral(CommonArgs),
    /// C2-tilde SRW local limit: spectral radius and exact/asymptote ratio table (needs --q --r --n)
    #[command(name = "c2-llt")]
    C2Llt(CommonArgs),
    /// Build an explicit incidence model and report its structural audit (needs --m --q --r)
    #[command(name = "model-audit")]
    ModelAudit(CommonArgs),
    /// Seeded Monte Carlo walk on an explicit model; per-chamber distribution (needs --m --q --r --n --seed; --trials)
    #[command(name = "simulate")]
    Simulate(CommonArgs),
    /// Spectral radius of the chamber SRW on thick A2-tilde buildings (needs --q)
    #[command(name = "a2-rho")]
    A2Rho(CommonArgs),
    /// Classify rotation orders k1 k2 k3 ...: hyperbolicity and thick-building existence
    #[command(name = "fuchsian-check")]
    FuchsianCheck(FuchsianArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::PolygonPn(_) => "polygon-pn",
            Command::PolygonMix(_) => "polygon-mix",
            Command::QuadrangleClosedForm(_) => "quadrangle-closed-form",
            Command::FeitHigman(_) => "feit-higman",
            Command::ParamCheck(_) => "param-check",
            Command::C2Exact(_) => "c2-exact",
            Command::C2Spectral(_) => "c2-spectral",
            Command::C2Llt(_) => "c2-llt",
            Command::ModelAudit(_) => "model-audit",
            Command::Simulate(_) => "simulate",
            Command::A2Rho(_) => "a2-rho",
            Command::FuchsianCheck(_) => "fuchsian-check",
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::PolygonPn(c)
            | Command::PolygonMix(c)
            | Command::QuadrangleClosedForm(c)
            | Command::FeitHigman(c)
            | Command::ParamCheck(c)
            | Command::C2Exact(c)
            | Command::C2Spectral(c)
            | Command::C2Llt(c)
            | Command::ModelAudit(c)
            | Command::Simulate(c)
            | Command::A2Rho(c) => c,
            Command::FuchsianCheck(f) => &f.common,
        }
    }
}

#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Gonality / model selector
    #[arg(long)]
    pub m: Option<u32>,
    /// Thickness parameter q (panel size minus one on the first node)
    #[arg(long)]
    pub q: Option<u64>,
    /// Thickness parameter r (second node)
    #[arg(long)]
    pub r: Option<u64>,
    /// Step horizon
    #[arg(long)]
    pub n: Option<u32>,
    /// Quadrature grid, e.g. 200x200
    #[arg(long)]
    pub grid: Option<String>,
    /// Monte Carlo trial count
    #[arg(long)]
    pub trials: Option<u64>,
    /// RNG seed (mandatory for simulate)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scalar arithmetic
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Output file (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format (per-command default: curves CSV, verdicts JSON)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON config file mirroring these flags; explicit flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Default)]
pub struct FuchsianArgs {
    /// Rotation orders (at least three), e.g. `fuchsian-check 3 3 4`
    #[arg(value_name = "ORDER")]
    pub orders: Vec<u32>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Exact arithmetic: big rationals, extended by sqrt(2), sqrt(3) where characters need them
    Rational,
    /// Double-precision floating point
    Float,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// The config-file mirror of the flag set. Unknown keys are rejected so a
/// typo cannot silently fall back to a default.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    m: Option<u32>,
    q: Option<u64>,
    r: Option<u64>,
    n: Option<u32>,
    grid: Option<String>,
    trials: Option<u64>,
    seed: Option<u64>,
    mode: Option<Mode>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

/// Fully resolved run configuration: flags merged over the config file, grid
/// parsed. This is the object embedded in every report, so it contains
/// exactly the values that determine the output bytes (the worker count
/// deliberately is not one of them). Fields with per-command defaults (mode,
/// grid, trials) start as the user-supplied value and are filled in by the
/// command before it computes, so the embedded config always shows the
/// effective value.
#[derive(Debug)]
pub struct Resolved {
    pub command: &'static str,
    pub m: Option<u32>,
    pub q: Option<u64>,
    pub r: Option<u64>,
    pub n: Option<u32>,
    pub grid: Option<(u32, u32)>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub orders: Vec<u32>,
}

impl Resolved {
    pub fn from_command(cmd: &Command) -> Result<Self, CliError> {
        let args = cmd.common();
        let file: ConfigFile = match &args.config {
            None => ConfigFile::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Usage(format!("cannot parse config file {}: {e}", path.display()))
                })?
            }
        };
        let grid_text = args.grid.clone().or(file.grid);
        let grid = grid_text.map(|g| parse_grid(&g)).transpose()?;
        let orders = match cmd {
            Command::FuchsianCheck(f) => f.orders.clone(),
            _ => Vec::new(),
        };
        Ok(Resolved {
            command: cmd.name(),
            m: args.m.or(file.m),
            q: args.q.or(file.q),
            r: args.r.or(file.r),
            n: args.n.or(file.n),
            grid,
            trials: args.trials.or(file.trials),
            seed: args.seed.or(file.seed),
            mode: args.mode.or(file.mode),
            format: args.format.or(file.format),
            out: args.out.clone().or(file.out),
            orders,
        })
    }

    fn missing(&self, flag: &str) -> CliError {
        CliError::Usage(format!(
            "--{flag} is required for `{}` (give it as a flag or in the --config file)",
            self.command
        ))
    }

    pub fn need_m(&self) -> Result<u32, CliError> {
        self.m.ok_or_else(|| self.missing("m"))
    }

    pub fn need_q(&self) -> Result<u64, CliError> {
        self.q.ok_or_else(|| self.missing("q"))
    }

    pub fn need_r(&self) -> Result<u64, CliError> {
        self.r.ok_or_else(|| self.missing("r"))
    }

    pub fn need_n(&self) -> Result<u32, CliError> {
        self.n.ok_or_else(|| self.missing("n"))
    }

    pub fn need_seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| self.missing("seed"))
    }

    /// Scalar mode with a per-command default, recorded back into the config.
    pub fn resolve_mode(&mut self, default: Mode) -> Mode {
        let mode = self.mode.unwrap_or(default);
        self.mode = Some(mode);
        mode
    }

    /// For inherently floating-point routes: reject an explicit rational
    /// request, record float.
    pub fn require_float_mode(&mut self) -> Result<(), CliError> {
        if self.mode == Some(Mode::Rational) {
            return Err(CliError::Usage(format!(
                "`{}` runs in floating point; --mode rational is not available here",
                self.command
            )));
        }
        self.mode = Some(Mode::Float);
        Ok(())
    }

    /// Quadrature grid with a default, recorded back into the config.
    pub fn resolve_grid(&mut self, default: (u32, u32)) -> (u32, u32) {
        let grid = self.grid.unwrap_or(default);
        self.grid = Some(grid);
        grid
    }

    /// Trial count with a default, recorded back into the config.
    pub fn resolve_trials(&mut self, default: u64) -> u64 {
        let trials = self.trials.unwrap_or(default);
        self.trials = Some(trials);
        trials
    }

    /// The configuration block embedded in every report: all resolved values
    /// that were actually set, in a stable shape.
    pub fn as_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        if let Some(m) = self.m {
            map.insert("m".into(), m.into());
        }
        if let Some(q) = self.q {
            map.insert("q".into(), q.into());
        }
        if let Some(r) = self.r {
            map.insert("r".into(), r.into());
        }
        if let Some(n) = self.n {
            map.insert("n".into(), n.into());
        }
        if let Some((n1, n2)) = self.grid {
            map.insert("grid".into(), format!("{n1}x{n2}").into());
        }
        if let Some(t) = self.trials {
            map.insert("trials".into(), t.into());
        }
        if let Some(s) = self.seed {
            map.insert("seed".into(), s.into());
        }
        if let Some(mode) = self.mode {
            map.insert("mode".into(), mode.name().into());
        }
        if !self.orders.is_empty() {
            map.insert("orders".into(), self.orders.clone().into());
        }
        serde_json::Value::Object(map)
    }
}

fn parse_grid(text: &str) -> Result<(u32, u32), CliError> {
    let bad = || {
        CliError::Usage(format!(
            "--grid must look like 200x200 (two positive integers joined by 'x'), got {text:?}"
        ))
    };
    let (a, b) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    let n1: u32 = a.trim().parse().map_err(|_| bad())?;
    let n2: u32 = b.trim().parse().map_err(|_| bad())?;
    if n1 == 0 || n2 == 0 {
        return Err(bad());
    }
    Ok((n1, n2))
}

/// Simulation worker count: the environment override if set, else the
/// machine's parallelism. A malformed override is a usage error rather than a
/// silent fallback.
pub fn worker_count() -> Result<usize, CliError> {
    match std::env::var("BUILDING_WALKS_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(std::thread::available_parallelism()
            .map(std::num::NonZeroUsize::get)
            .unwrap_or(1)),
        Err(e) => Err(CliError::Usage(format!(
            "cannot read BUILDING_WALKS_THREADS: {e}"
        ))),
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(w) if w >= 1 => Ok(w),
            _ => Err(CliError::Usage(format!(
                "BUILDING_WALKS_THREADS must be a positive integer, got {text:?}"
            ))),
        },
    }
}
