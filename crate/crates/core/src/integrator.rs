//! Fixed-step 4th-order Runge-Kutta integration under piecewise-constant
//! control.
//!
//! The control grid and the integration grid coincide: one lockdown value per
//! RK4 step, held constant through all four stages. After each step any of
//! S, I, R that undershoots zero is clamped back to zero; the magnitudes
//! involved are tiny (epidemic extinction) but the clamp keeps `N` positive
//! and the sine argument of the economy in range. This is the one place the
//! discrete solution deviates from the raw ODE.

use crate::dynamics::{full_rhs, DegenerateState, StateDerivative};
use crate::error::Error;
use crate::model::{validate, ScenarioParams, SystemState};

/// Piecewise-constant lockdown signal on the integration grid.
///
/// Invariants (enforced at construction): one value per scenario step, every
/// value inside `[0, l_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPolicy {
    values: Vec<f64>,
    dt: f64,
    l_max: f64,
}

impl ControlPolicy {
    /// Policy holding `level` on every step of `scenario`.
    pub fn constant(level: f64, scenario: &ScenarioParams) -> Result<Self, Error> {
        Self::from_values(vec![level; scenario.step_count()], scenario)
    }

    /// Policy from explicit per-step values; checks length and bounds.
    pub fn from_values(values: Vec<f64>, scenario: &ScenarioParams) -> Result<Self, Error> {
        let expected = scenario.step_count();
        if values.len() != expected {
            return Err(Error::PolicyLength {
                expected,
                actual: values.len(),
            });
        }
        let l_max = scenario.epidemic.l_max;
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value < 0.0 || value > l_max {
                return Err(Error::PolicyValue {
                    index,
                    value,
                    l_max,
                });
            }
        }
        Ok(Self {
            values,
            dt: scenario.dt,
            l_max,
        })
    }

    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[must_use]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[must_use]
    pub fn l_max(&self) -> f64 {
        self.l_max
    }
}

/// Discrete solution: states at every grid instant plus the control applied
/// on each interval. `states.len() == times.len() == controls.len() + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<SystemState>,
    controls: ControlPolicy,
}

impl Trajectory {
    #[must_use]
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    #[must_use]
    pub fn states(&self) -> &[SystemState] {
        &self.states
    }

    #[must_use]
    pub fn controls(&self) -> &ControlPolicy {
        &self.controls
    }

    /// State at the horizon.
    #[must_use]
    pub fn final_state(&self) -> &SystemState {
        self.states.last().expect("trajectory has an initial state")
    }

    #[must_use]
    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has an initial instant")
    }

    /// Largest infected count over the grid.
    #[must_use]
    pub fn peak_infected(&self) -> f64 {
        self.states.iter().map(|s| s.infected).fold(0.0, f64::max)
    }

    /// Duration-weighted time average of the applied lockdown strength.
    #[must_use]
    pub fn mean_lockdown(&self) -> f64 {
        mean_lockdown(self.controls.values(), &self.times)
    }
}

/// Duration-weighted mean of per-step control values given the grid instants
/// (`times.len() == values.len() + 1`).
#[must_use]
pub fn mean_lockdown(values: &[f64], times: &[f64]) -> f64 {
    let total: f64 = times.last().copied().unwrap_or(0.0) - times.first().copied().unwrap_or(0.0);
    if total <= 0.0 {
        return 0.0;
    }
    let weighted: f64 = values
        .iter()
        .zip(times.windows(2))
        .map(|(&l, w)| l * (w[1] - w[0]))
        .sum();
    weighted / total
}

fn add_scaled(y: &SystemState, d: &StateDerivative, h: f64) -> SystemState {
    SystemState {
        susceptible: y.susceptible + h * d.susceptible,
        infected: y.infected + h * d.infected,
        recovered: y.recovered + h * d.recovered,
        dead: y.dead + h * d.dead,
        economy: y.economy + h * d.economy,
    }
}

/// One classical RK4 step of length `dt` with the control held at `l`
/// through all four stages. S, I, R are clamped at zero afterwards.
pub fn rk4_step(
    state: &SystemState,
    params: &ScenarioParams,
    l: f64,
    dt: f64,
) -> Result<SystemState, DegenerateState> {
    let k1 = full_rhs(state, params, l)?;
    let k2 = full_rhs(&add_scaled(state, &k1, 0.5 * dt), params, l)?;
    let k3 = full_rhs(&add_scaled(state, &k2, 0.5 * dt), params, l)?;
    let k4 = full_rhs(&add_scaled(state, &k3, dt), params, l)?;

    let combined = StateDerivative {
        susceptible: k1.susceptible + 2.0 * k2.susceptible + 2.0 * k3.susceptible + k4.susceptible,
        infected: k1.infected + 2.0 * k2.infected + 2.0 * k3.infected + k4.infected,
        recovered: k1.recovered + 2.0 * k2.recovered + 2.0 * k3.recovered + k4.recovered,
        dead: k1.dead + 2.0 * k2.dead + 2.0 * k3.dead + k4.dead,
        economy: k1.economy + 2.0 * k2.economy + 2.0 * k3.economy + k4.economy,
    };
    let mut next = add_scaled(state, &combined, dt / 6.0);
    next.susceptible = next.susceptible.max(0.0);
    next.infected = next.infected.max(0.0);
    next.recovered = next.recovered.max(0.0);
    Ok(next)
}

/// Integrate the scenario under `policy`, storing the state at every grid
/// instant.
pub fn simulate(policy: &ControlPolicy, params: &ScenarioParams) -> Result<Trajectory, Error> {
    let violations = validate(params);
    if !violations.is_empty() {
        return Err(Error::InvalidScenario(violations));
    }
    let n = params.step_count();
    if policy.len() != n {
        return Err(Error::PolicyLength {
            expected: n,
            actual: policy.len(),
        });
    }

    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut state = params.initial_state;
    times.push(0.0);
    states.push(state);
    for (step, &l) in policy.values().iter().enumerate() {
        let t0 = params.step_time(step);
        let t1 = params.step_time(step + 1);
        state = rk4_step(&state, params, l, t1 - t0)
            .map_err(|e| Error::DegenerateState {
                living: e.living,
                step,
            })?;
        times.push(t1);
        states.push(state);
    }

    Ok(Trajectory {
        times,
        states,
        controls: policy.clone(),
    })
}

/// Integrate and return only the state at the horizon.
///
/// Same arithmetic as [`simulate`], without storing the trajectory; this is
/// the hot path of finite-difference gradients and line searches, so beyond
/// the length check it trusts the caller: the scenario should validate and
/// the values should lie in `[0, l_max]`.
pub fn integrate_final(
    values: &[f64],
    params: &ScenarioParams,
) -> Result<SystemState, Error> {
    let n = params.step_count();
    if values.len() != n {
        return Err(Error::PolicyLength {
            expected: n,
            actual: values.len(),
        });
    }
    let mut state = params.initial_state;
    for (step, &l) in values.iter().enumerate() {
        let dt = params.step_time(step + 1) - params.step_time(step);
        state = rk4_step(&state, params, l, dt).map_err(|e| Error::DegenerateState {
            living: e.living,
            step,
        })?;
    }
    Ok(state)
}
