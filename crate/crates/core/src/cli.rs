//! Scenario files, policy specs, and CSV emission for the command-line
//! front end.
//!
//! A scenario file is TOML mirroring [`ScenarioParams`] field for field. An
//! optional `preset` key ("burundi" | "india" | "us") supplies defaults that
//! individual keys then override:
//!
//! ```toml
//! preset = "india"
//!
//! [cost]
//! c1 = 60000.0
//! ```
//!
//! Without a preset, every field must be present. The merged scenario is
//! validated before use.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::Error;
use crate::harness::SweepItem;
use crate::integrator::{ControlPolicy, Trajectory};
use crate::model::{preset, validate, Country, ScenarioParams, SystemState, Violation};

/// Errors surfaced to the command line, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed input: TOML syntax, bad flag syntax, unknown preset,
    /// missing fields.
    #[error("parse error: {0}")]
    Parse(String),

    /// The merged scenario violates its invariants.
    #[error("invalid scenario:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<Violation>),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// Simulation or optimization failure.
    #[error(transparent)]
    Run(#[from] Error),
}

/// Exit codes: parse 2, validation 3, i/o 4, non-convergence 5.
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_NON_CONVERGENCE: i32 = 5;

impl CliError {
    #[must_use]
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Validation(_) | CliError::Run(Error::InvalidScenario(_)) => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
            CliError::Run(_) => 1,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EpidemicFile {
    mu: Option<f64>,
    carrying_capacity: Option<f64>,
    beta0: Option<f64>,
    k0: Option<f64>,
    gamma: Option<f64>,
    delta: Option<f64>,
    l_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EconomicFile {
    alpha: Option<f64>,
    a1: Option<f64>,
    m1: Option<f64>,
    m2: Option<f64>,
    g0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostFile {
    c1: Option<f64>,
    c2: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialStateFile {
    susceptible: Option<f64>,
    infected: Option<f64>,
    recovered: Option<f64>,
    dead: Option<f64>,
    economy: Option<f64>,
}

/// Deserialized scenario file before preset merge.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    preset: Option<String>,
    name: Option<String>,
    horizon: Option<f64>,
    dt: Option<f64>,
    #[serde(default)]
    epidemic: EpidemicFile,
    #[serde(default)]
    economic: EconomicFile,
    #[serde(default)]
    cost: CostFile,
    #[serde(default)]
    initial_state: InitialStateFile,
}

impl ScenarioFile {
    /// Merge onto the preset (when named) and validate.
    pub fn resolve(self) -> Result<ScenarioParams, CliError> {
        let base = match &self.preset {
            Some(name) => {
                let country =
                    Country::from_str(name).map_err(|e| CliError::Parse(e.to_string()))?;
                Some(preset(country))
            }
            None => None,
        };

        let mut missing: Vec<&'static str> = Vec::new();
        let mut field = |value: Option<f64>, fallback: Option<f64>, name: &'static str| -> f64 {
            match value.or(fallback) {
                Some(v) => v,
                None => {
                    missing.push(name);
                    f64::NAN
                }
            }
        };

        let b = base.as_ref();
        let params = ScenarioParams {
            name: self
                .name
                .or_else(|| b.map(|p| p.name.clone()))
                .unwrap_or_else(|| "scenario".to_string()),
            epidemic: crate::model::EpidemicParams {
                mu: field(self.epidemic.mu, b.map(|p| p.epidemic.mu), "epidemic.mu"),
                carrying_capacity: field(
                    self.epidemic.carrying_capacity,
                    b.map(|p| p.epidemic.carrying_capacity),
                    "epidemic.carrying_capacity",
                ),
                beta0: field(
                    self.epidemic.beta0,
                    b.map(|p| p.epidemic.beta0),
                    "epidemic.beta0",
                ),
                k0: field(self.epidemic.k0, b.map(|p| p.epidemic.k0), "epidemic.k0"),
                gamma: field(
                    self.epidemic.gamma,
                    b.map(|p| p.epidemic.gamma),
                    "epidemic.gamma",
                ),
                delta: field(
                    self.epidemic.delta,
                    b.map(|p| p.epidemic.delta),
                    "epidemic.delta",
                ),
                l_max: field(
                    self.epidemic.l_max,
                    b.map(|p| p.epidemic.l_max),
                    "epidemic.l_max",
                ),
            },
            economic: crate::model::EconomicParams {
                alpha: field(
                    self.economic.alpha,
                    b.map(|p| p.economic.alpha),
                    "economic.alpha",
                ),
                a1: field(self.economic.a1, b.map(|p| p.economic.a1), "economic.a1"),
                m1: field(self.economic.m1, b.map(|p| p.economic.m1), "economic.m1"),
                m2: field(self.economic.m2, b.map(|p| p.economic.m2), "economic.m2"),
                g0: field(self.economic.g0, b.map(|p| p.economic.g0), "economic.g0"),
            },
            cost: crate::model::CostParams {
                c1: field(self.cost.c1, b.map(|p| p.cost.c1), "cost.c1"),
                c2: field(self.cost.c2, b.map(|p| p.cost.c2), "cost.c2"),
            },
            initial_state: SystemState {
                susceptible: field(
                    self.initial_state.susceptible,
                    b.map(|p| p.initial_state.susceptible),
                    "initial_state.susceptible",
                ),
                infected: field(
                    self.initial_state.infected,
                    b.map(|p| p.initial_state.infected),
                    "initial_state.infected",
                ),
                recovered: field(
                    self.initial_state.recovered,
                    b.map(|p| p.initial_state.recovered),
                    "initial_state.recovered",
                ),
                dead: field(
                    self.initial_state.dead,
                    b.map(|p| p.initial_state.dead),
                    "initial_state.dead",
                ),
                economy: field(
                    self.initial_state.economy,
                    b.map(|p| p.initial_state.economy),
                    "initial_state.economy",
                ),
            },
            horizon: field(self.horizon, b.map(|p| p.horizon), "horizon"),
            dt: field(self.dt, b.map(|p| p.dt), "dt"),
        };

        if !missing.is_empty() {
            return Err(CliError::Parse(format!(
                "no preset named and fields missing: {}",
                missing.join(", ")
            )));
        }
        let violations = validate(&params);
        if !violations.is_empty() {
            return Err(CliError::Validation(violations));
        }
        Ok(params)
    }
}

/// Parse a scenario from TOML text.
pub fn load_scenario_str(text: &str) -> Result<ScenarioParams, CliError> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    file.resolve()
}

/// Load and resolve a scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioParams, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_scenario_str(&text)
}

/// How the user names a policy: a constant level or a CSV of per-step
/// values.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    Constant(f64),
    File(PathBuf),
}

impl FromStr for PolicySpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(level) = s.strip_prefix("constant:") {
            let level: f64 = level
                .parse()
                .map_err(|_| CliError::Parse(format!("bad constant policy level {level:?}")))?;
            Ok(PolicySpec::Constant(level))
        } else {
            Ok(PolicySpec::File(PathBuf::from(s)))
        }
    }
}

/// Materialize a policy spec against a scenario.
pub fn resolve_policy(
    spec: &PolicySpec,
    params: &ScenarioParams,
) -> Result<ControlPolicy, CliError> {
    match spec {
        PolicySpec::Constant(level) => Ok(ControlPolicy::constant(*level, params)?),
        PolicySpec::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let values = parse_policy_csv(&text)?;
            Ok(ControlPolicy::from_values(values, params)?)
        }
    }
}

/// Read per-step lockdown values from CSV text: one row per step, the value
/// in the last column, an optional non-numeric header row.
pub fn parse_policy_csv(text: &str) -> Result<Vec<f64>, CliError> {
    let mut values = Vec::new();
    for (number, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let last = line.rsplit(',').next().unwrap_or(line).trim();
        match last.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if number == 0 => continue, // header
            Err(_) => {
                return Err(CliError::Parse(format!(
                    "policy line {}: {last:?} is not a number",
                    number + 1
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(CliError::Parse("policy file has no values".into()));
    }
    Ok(values)
}

/// Parse a `lo:hi:n` log-spaced grid flag.
pub fn parse_c1_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(CliError::Parse(format!(
            "bad grid {spec:?}: expected lo:hi:n"
        )));
    };
    let lo: f64 = lo
        .parse()
        .map_err(|_| CliError::Parse(format!("bad grid low endpoint {lo:?}")))?;
    let hi: f64 = hi
        .parse()
        .map_err(|_| CliError::Parse(format!("bad grid high endpoint {hi:?}")))?;
    let n: usize = n
        .parse()
        .map_err(|_| CliError::Parse(format!("bad grid point count {n:?}")))?;
    if n == 0 {
        return Err(CliError::Parse("grid needs at least one point".into()));
    }
    if lo <= 0.0 || lo.is_nan() || hi < lo {
        return Err(CliError::Parse(format!(
            "grid needs 0 < lo <= hi, got {lo}..{hi}"
        )));
    }
    Ok(crate::harness::log_spaced(lo, hi, n))
}

/// Trajectory CSV: `t,S,I,R,D,N,G,l`, one row per grid instant, `l` holding
/// the control on the interval that starts at `t` (blank on the final row).
/// All numbers use the shortest representation that round-trips.
pub fn write_trajectory_csv(out: &mut impl Write, trajectory: &Trajectory) -> io::Result<()> {
    writeln!(out, "t,S,I,R,D,N,G,l")?;
    let controls = trajectory.controls().values();
    for (j, (t, state)) in trajectory
        .times()
        .iter()
        .zip(trajectory.states())
        .enumerate()
    {
        let control = controls.get(j).map(|l| format!("{l}")).unwrap_or_default();
        writeln!(
            out,
            "{t},{},{},{},{},{},{},{control}",
            state.susceptible,
            state.infected,
            state.recovered,
            state.dead,
            state.living(),
            state.economy,
        )?;
    }
    Ok(())
}

/// Policy CSV: `t,l`, one row per control step.
pub fn write_policy_csv(
    out: &mut impl Write,
    policy: &ControlPolicy,
    params: &ScenarioParams,
) -> io::Result<()> {
    writeln!(out, "t,l")?;
    for (j, l) in policy.values().iter().enumerate() {
        writeln!(out, "{},{l}", params.step_time(j))?;
    }
    Ok(())
}

/// Sweep CSV, one row per grid point. Failed points keep their row with
/// `nan` values so the grid stays aligned.
pub fn write_sweep_csv(out: &mut impl Write, items: &[SweepItem]) -> io::Result<()> {
    writeln!(
        out,
        "c1,J_opt,J_unc,deaths_opt,deaths_unc,infected_opt,infected_unc,G_opt,G_unc,mean_lockdown,converged,iterations"
    )?;
    for item in items {
        match &item.outcome {
            Ok(r) => {
                let iterations: usize = r.optimal.iterations.iter().sum();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{iterations}",
                    item.c1,
                    r.optimal.cost.total,
                    r.uncontrolled.total,
                    r.deaths_opt,
                    r.deaths_unc,
                    r.infected_opt,
                    r.infected_unc,
                    r.economy_opt,
                    r.economy_unc,
                    r.mean_lockdown,
                    r.optimal.converged,
                )?;
            }
            Err(_) => {
                writeln!(
                    out,
                    "{},nan,nan,nan,nan,nan,nan,nan,nan,nan,false,0",
                    item.c1
                )?;
            }
        }
    }
    Ok(())
}

/// Human summary of a terminal state and its cost, printed by `simulate`.
#[must_use]
pub fn format_summary(state: &SystemState, cost: &crate::objective::CostBreakdown, t: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "final state at t = {t}:");
    let _ = writeln!(s, "  S = {}", state.susceptible);
    let _ = writeln!(s, "  I = {}", state.infected);
    let _ = writeln!(s, "  R = {}", state.recovered);
    let _ = writeln!(s, "  D = {}", state.dead);
    let _ = writeln!(s, "  N = {}", state.living());
    let _ = writeln!(s, "  G = {}", state.economy);
    let _ = writeln!(s, "cost breakdown:");
    let _ = writeln!(s, "  death_cost = {}", cost.death_cost);
    let _ = writeln!(s, "  infection_cost = {}", cost.infection_cost);
    let _ = writeln!(s, "  economy_value = {}", cost.economy_value);
    let _ = write!(s, "  total = {}", cost.total);
    s
}
