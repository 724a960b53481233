//! Terminal cost of a trajectory.
//!
//! The cost is Mayer-form: it reads only the state at the horizon,
//! `J = c1 * D(T) + c2 * (R(T) + I(T)) - G(T)`. Deaths are priced at the
//! value of a statistical life, everyone who went through the infection
//! carries a one-time cost, and the accumulated economy counts against the
//! total. There is no running cost and no discounting.

use crate::error::Error;
use crate::integrator::{simulate, ControlPolicy, Trajectory};
use crate::model::{CostParams, ScenarioParams, SystemState};

/// The three components of the terminal cost plus their total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// `c1 * D(T)` ($).
    pub death_cost: f64,
    /// `c2 * (R(T) + I(T))` ($).
    pub infection_cost: f64,
    /// `G(T)` ($); enters the total with a minus sign.
    pub economy_value: f64,
    /// `death_cost + infection_cost - economy_value` ($).
    pub total: f64,
}

impl CostBreakdown {
    /// Cost of a terminal state under the given weights.
    #[must_use]
    pub fn from_final_state(state: &SystemState, cost: &CostParams) -> Self {
        let death_cost = cost.c1 * state.dead;
        let infection_cost = cost.c2 * (state.recovered + state.infected);
        let economy_value = state.economy;
        CostBreakdown {
            death_cost,
            infection_cost,
            economy_value,
            total: death_cost + infection_cost - economy_value,
        }
    }
}

/// Cost of a trajectory: reads the final state only.
pub fn evaluate(trajectory: &Trajectory, cost: &CostParams) -> Result<CostBreakdown, Error> {
    let state = trajectory.states().last().ok_or(Error::EmptyTrajectory)?;
    Ok(CostBreakdown::from_final_state(state, cost))
}

/// Cost of a policy: simulate, then evaluate.
pub fn objective_of_policy(
    policy: &ControlPolicy,
    params: &ScenarioParams,
) -> Result<CostBreakdown, Error> {
    let trajectory = simulate(policy, params)?;
    evaluate(&trajectory, &params.cost)
}
