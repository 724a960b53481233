//! Domain types and calibrated country presets.
//!
//! A scenario couples an SIRD epidemic with an interaction-driven economy on
//! a region normalized to a carrying capacity of 50,000 people. Three presets
//! (Burundi, India, United States) share the epidemic parameters and differ
//! in their economic calibration.

use std::fmt;
use std::str::FromStr;

/// Epidemic-side parameters of the coupled model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpidemicParams {
    /// Net migration rate (per day). Negative means net outflow.
    pub mu: f64,
    /// Carrying capacity of the region (persons).
    pub carrying_capacity: f64,
    /// Infectivity per interaction (per interaction per day).
    pub beta0: f64,
    /// Pre-epidemic average interactions per person per day.
    pub k0: f64,
    /// Recovery rate (per day).
    pub gamma: f64,
    /// Death rate of infected individuals (per day).
    pub delta: f64,
    /// Maximum feasible lockdown strength, strictly below 1 (essential
    /// services keep a fraction of interactions alive).
    pub l_max: f64,
}

/// Economy-side parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconomicParams {
    /// Employed fraction of the population.
    pub alpha: f64,
    /// Fraction of interactions that are economically beneficial in the
    /// absence of an epidemic.
    pub a1: f64,
    /// Value generated per economically beneficial interaction ($).
    pub m1: f64,
    /// Per-capita consumption ($ per person per day).
    pub m2: f64,
    /// Pre-epidemic value of the economy ($ total over the region).
    pub g0: f64,
}

/// Weights of the terminal cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    /// Value of a statistical life ($ per death).
    pub c1: f64,
    /// Economic cost per infection ($ per infected person).
    pub c2: f64,
}

/// The five integrated quantities at one instant.
///
/// The living population `N = S + I + R` is derived, not stored; the dead are
/// not part of it. `economy` is the accumulated value `G` and may be negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemState {
    /// Susceptible population (persons).
    pub susceptible: f64,
    /// Infected population (persons).
    pub infected: f64,
    /// Recovered population (persons).
    pub recovered: f64,
    /// Cumulative deaths (persons).
    pub dead: f64,
    /// Accumulated economy value ($).
    pub economy: f64,
}

impl SystemState {
    /// Living population `N = S + I + R`.
    #[must_use]
    pub fn living(&self) -> f64 {
        self.susceptible + self.infected + self.recovered
    }
}

/// A complete scenario: parameters, initial condition, horizon and step.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    /// Free-text label, e.g. the preset name.
    pub name: String,
    pub epidemic: EpidemicParams,
    pub economic: EconomicParams,
    pub cost: CostParams,
    pub initial_state: SystemState,
    /// Total duration `T` (days).
    pub horizon: f64,
    /// Integration and control step (days). The control is piecewise
    /// constant on the same grid the integrator steps on.
    pub dt: f64,
}

impl ScenarioParams {
    /// Number of integration/control steps, `ceil(horizon / dt)`.
    ///
    /// The final step is shortened when the horizon is not a multiple of
    /// `dt`, so the last grid instant lands exactly on the horizon.
    #[must_use]
    pub fn step_count(&self) -> usize {
        let mut n = (self.horizon / self.dt).ceil() as usize;
        n = n.max(1);
        // Guard against ceil() overshooting by one when horizon/dt rounds up
        // past an integer: a step must have positive length.
        while n > 1 && (n - 1) as f64 * self.dt >= self.horizon {
            n -= 1;
        }
        n
    }

    /// Grid instant of step boundary `j` (0-based); `j = step_count()` is the
    /// horizon itself.
    #[must_use]
    pub fn step_time(&self, j: usize) -> f64 {
        if j >= self.step_count() {
            self.horizon
        } else {
            j as f64 * self.dt
        }
    }

    /// Uncontrolled spreading rate `beta0 * k0`.
    #[must_use]
    pub fn spreading_rate(&self) -> f64 {
        self.epidemic.beta0 * self.epidemic.k0
    }
}

/// The three calibrated presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Country {
    Burundi,
    India,
    UnitedStates,
}

impl Country {
    pub const ALL: [Country; 3] = [Country::Burundi, Country::India, Country::UnitedStates];

    /// Lower-case label used in scenario files and output.
    #[must_use]
    pub fn label(&self) -> &'static str {
        match self {
            Country::Burundi => "burundi",
            Country::India => "india",
            Country::UnitedStates => "us",
        }
    }
}

impl fmt::Display for Country {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Country {
    type Err = UnknownCountry;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "burundi" => Ok(Country::Burundi),
            "india" => Ok(Country::India),
            "us" => Ok(Country::UnitedStates),
            _ => Err(UnknownCountry(s.to_string())),
        }
    }
}

/// Error for a preset name that is not one of `burundi`, `india`, `us`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown preset {0:?} (expected one of: burundi, india, us)")]
pub struct UnknownCountry(pub String);

// Parameters shared by all presets.
const CARRYING_CAPACITY: f64 = 50_000.0;
const HORIZON_DAYS: f64 = 366.0;
const CONTACTS_PER_DAY: f64 = 22.0;
const BENEFICIAL_FRACTION: f64 = 0.6;
const INFECTIVITY: f64 = 0.015;
const RECOVERY_RATE: f64 = 0.1;
const DEATH_RATE: f64 = 0.004;
const INITIAL_INFECTED: f64 = 500.0;
const LOCKDOWN_CAP: f64 = 0.75;
const STEP_DAYS: f64 = 3.0;

/// Fully populated scenario for one of the calibrated countries.
///
/// All three share the epidemic side (an uncontrolled spreading rate of
/// `0.015 * 22 = 0.33`, recovery in 10 days on average, 1% initially
/// infected) and differ in migration and the economic calibration.
#[must_use]
pub fn preset(country: Country) -> ScenarioParams {
    // (mu, alpha, m1, m2, per-capita GDP, c1, c2)
    let (mu, alpha, m1, m2, gdp_per_capita, c1, c2) = match country {
        Country::India => (-0.000383, 0.9473, 0.2665, 3.1, 2101.0, 30_000.0, 500.0),
        Country::UnitedStates => (0.002893, 0.9633, 13.91, 173.0, 65_000.0, 350_000.0, 20_000.0),
        Country::Burundi => (0.000171, 0.992, 0.043015, 0.55, 261.0, 467.0, 26.7),
    };
    let g0 = gdp_per_capita * CARRYING_CAPACITY;
    ScenarioParams {
        name: country.label().to_string(),
        epidemic: EpidemicParams {
            mu,
            carrying_capacity: CARRYING_CAPACITY,
            beta0: INFECTIVITY,
            k0: CONTACTS_PER_DAY,
            gamma: RECOVERY_RATE,
            delta: DEATH_RATE,
            l_max: LOCKDOWN_CAP,
        },
        economic: EconomicParams {
            alpha,
            a1: BENEFICIAL_FRACTION,
            m1,
            m2,
            g0,
        },
        cost: CostParams { c1, c2 },
        initial_state: SystemState {
            susceptible: CARRYING_CAPACITY - INITIAL_INFECTED,
            infected: INITIAL_INFECTED,
            recovered: 0.0,
            dead: 0.0,
            economy: g0,
        },
        horizon: HORIZON_DAYS,
        dt: STEP_DAYS,
    }
}

/// One violated invariant, reported by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Dotted path of the offending field, e.g. `epidemic.l_max`.
    pub field: &'static str,
    /// The offending value.
    pub value: f64,
    /// What the field must satisfy.
    pub requirement: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {} violates: {}",
            self.field, self.value, self.requirement
        )
    }
}

/// Check every type invariant of a scenario, returning all violations.
///
/// An empty list means the scenario is valid. Violations are collected, not
/// thrown, so a caller can report them all at once.
#[must_use]
pub fn validate(params: &ScenarioParams) -> Vec<Violation> {
    let mut v = Vec::new();
    let mut check = |ok: bool, field: &'static str, value: f64, requirement: &'static str| {
        if !ok {
            v.push(Violation {
                field,
                value,
                requirement,
            });
        }
    };

    let ep = &params.epidemic;
    check(ep.mu.is_finite(), "epidemic.mu", ep.mu, "must be finite");
    check(
        ep.carrying_capacity.is_finite() && ep.carrying_capacity > 0.0,
        "epidemic.carrying_capacity",
        ep.carrying_capacity,
        "must be > 0",
    );
    check(
        ep.beta0.is_finite() && ep.beta0 >= 0.0,
        "epidemic.beta0",
        ep.beta0,
        "must be >= 0",
    );
    check(
        ep.k0.is_finite() && ep.k0 > 0.0,
        "epidemic.k0",
        ep.k0,
        "must be > 0",
    );
    check(
        ep.gamma.is_finite() && ep.gamma > 0.0,
        "epidemic.gamma",
        ep.gamma,
        "must be > 0",
    );
    check(
        ep.delta.is_finite() && ep.delta >= 0.0,
        "epidemic.delta",
        ep.delta,
        "must be >= 0",
    );
    check(
        ep.l_max.is_finite() && (0.0..1.0).contains(&ep.l_max),
        "epidemic.l_max",
        ep.l_max,
        "must lie in [0, 1)",
    );

    let ec = &params.economic;
    check(
        ec.alpha.is_finite() && (0.0..=1.0).contains(&ec.alpha),
        "economic.alpha",
        ec.alpha,
        "must lie in [0, 1]",
    );
    check(
        ec.a1.is_finite() && (0.0..=1.0).contains(&ec.a1),
        "economic.a1",
        ec.a1,
        "must lie in [0, 1]",
    );
    check(
        ec.m1.is_finite() && ec.m1 >= 0.0,
        "economic.m1",
        ec.m1,
        "must be >= 0",
    );
    check(
        ec.m2.is_finite() && ec.m2 >= 0.0,
        "economic.m2",
        ec.m2,
        "must be >= 0",
    );
    check(ec.g0.is_finite(), "economic.g0", ec.g0, "must be finite");

    let cost = &params.cost;
    check(
        cost.c1.is_finite() && cost.c1 >= 0.0,
        "cost.c1",
        cost.c1,
        "must be >= 0",
    );
    check(
        cost.c2.is_finite() && cost.c2 >= 0.0,
        "cost.c2",
        cost.c2,
        "must be >= 0",
    );

    let st = &params.initial_state;
    check(
        st.susceptible.is_finite() && st.susceptible >= 0.0,
        "initial_state.susceptible",
        st.susceptible,
        "must be >= 0",
    );
    check(
        st.infected.is_finite() && st.infected >= 0.0,
        "initial_state.infected",
        st.infected,
        "must be >= 0",
    );
    check(
        st.recovered.is_finite() && st.recovered >= 0.0,
        "initial_state.recovered",
        st.recovered,
        "must be >= 0",
    );
    check(
        st.dead.is_finite() && st.dead >= 0.0,
        "initial_state.dead",
        st.dead,
        "must be >= 0",
    );
    check(
        st.economy.is_finite(),
        "initial_state.economy",
        st.economy,
        "must be finite",
    );
    check(
        st.living().is_finite() && st.living() > 0.0,
        "initial_state",
        st.living(),
        "living population S + I + R must be > 0",
    );

    check(
        params.horizon.is_finite() && params.horizon > 0.0,
        "horizon",
        params.horizon,
        "must be > 0",
    );
    check(
        params.dt.is_finite() && params.dt > 0.0,
        "dt",
        params.dt,
        "must be > 0",
    );
    if params.dt > 0.0 {
        check(
            params.horizon / params.dt >= 1.0,
            "dt",
            params.dt,
            "horizon / dt must be >= 1",
        );
    }

    v
}
