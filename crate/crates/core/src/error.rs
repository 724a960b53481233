//! Crate-wide error type for simulation and optimization.

use crate::model::Violation;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The living population hit zero or below during integration; the
    /// dynamics divide by it.
    #[error("degenerate state at step {step}: living population N = {living}")]
    DegenerateState { living: f64, step: usize },

    /// A control policy does not have one value per integration step.
    #[error("policy has {actual} values but the scenario needs {expected}")]
    PolicyLength { expected: usize, actual: usize },

    /// A control value escaped the feasible box [0, l_max].
    #[error("policy value {value} at index {index} outside [0, {l_max}]")]
    PolicyValue {
        index: usize,
        value: f64,
        l_max: f64,
    },

    /// The scenario failed validation.
    #[error("invalid scenario: {}", format_violations(.0))]
    InvalidScenario(Vec<Violation>),

    /// A cost was requested from a trajectory with no states.
    #[error("cannot evaluate the objective of an empty trajectory")]
    EmptyTrajectory,

    /// A multi-start initial policy lies outside the feasible box.
    #[error("start policy {start} outside [0, {l_max}]")]
    InvalidStart { start: f64, l_max: f64 },

    /// The optimizer needs at least one start.
    #[error("optimizer options contain no starts")]
    NoStarts,

    /// The economic-loss denominator (no-epidemic counterfactual) is zero.
    #[error("no-epidemic reference economy is zero; loss fraction undefined")]
    DegenerateReference,
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
