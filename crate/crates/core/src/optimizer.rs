//! Projected gradient search over the discretized control.
//!
//! The control is a vector of per-step lockdown strengths in the box
//! `[0, l_max]^n`. Gradients come from central finite differences (one-sided
//! at active bounds), each component re-simulating the trajectory, and steps
//! follow a backtracking Armijo line search with projection onto the box.
//! The landscape is not convex — the interesting scenarios have distinct
//! "mostly open" and "suppress hard" basins — so the search restarts from a
//! configurable set of constant policies and keeps the best local result.
//!
//! Finite differences and the multi-start runs are embarrassingly parallel;
//! they run on rayon but reduce in fixed order, so results are independent
//! of thread scheduling.

use rayon::prelude::*;

use crate::error::Error;
use crate::integrator::{integrate_final, mean_lockdown, ControlPolicy};
use crate::model::{validate, ScenarioParams};
use crate::objective::CostBreakdown;

/// Backtracking line-search parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchOptions {
    /// Length of the first trial displacement, in control units; the actual
    /// trial step is `initial_step / |gradient|`.
    pub initial_step: f64,
    /// Multiplicative backoff applied after each rejected trial.
    pub shrink: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo_c: f64,
    /// Trials before the line search gives up (gradient-precision floor).
    pub max_backtracks: usize,
}

impl Default for LineSearchOptions {
    fn default() -> Self {
        LineSearchOptions {
            initial_step: 1.0,
            shrink: 0.5,
            armijo_c: 1e-4,
            max_backtracks: 50,
        }
    }
}

/// Optimizer configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerOptions {
    /// Iteration budget per start.
    pub max_iterations: usize,
    /// Stop once the relative objective improvement of an accepted step
    /// falls below this.
    pub tol_rel: f64,
    /// Finite-difference step in control units.
    pub fd_step: f64,
    /// Constant initial policies, each in `[0, l_max]`.
    pub starts: Vec<f64>,
    pub line_search: LineSearchOptions,
}

impl OptimizerOptions {
    /// Defaults with the multi-start set `{0, l_max/2, l_max}`.
    #[must_use]
    pub fn for_l_max(l_max: f64) -> Self {
        OptimizerOptions {
            max_iterations: 500,
            tol_rel: 1e-8,
            fd_step: 1e-4,
            starts: vec![0.0, 0.5 * l_max, l_max],
            line_search: LineSearchOptions::default(),
        }
    }
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self::for_l_max(0.75)
    }
}

/// Outcome of a multi-start optimization.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    /// Best policy found, feasible by construction.
    pub policy: ControlPolicy,
    /// Cost of that policy.
    pub cost: CostBreakdown,
    /// Accepted-iteration count per start, in `starts` order.
    pub iterations: Vec<usize>,
    /// The constant level of the start that won.
    pub start_used: f64,
    /// True when the winning start stopped on the tolerance rather than the
    /// iteration budget.
    pub converged: bool,
    /// Euclidean norm of the projected gradient step `x - P(x - g)` at the
    /// winning iterate.
    pub gradient_norm: f64,
}

/// Componentwise clamp onto `[0, l_max]`.
#[must_use]
pub fn project(values: &[f64], l_max: f64) -> Vec<f64> {
    values.iter().map(|&v| v.clamp(0.0, l_max)).collect()
}

fn objective_value(values: &[f64], params: &ScenarioParams) -> Result<f64, Error> {
    let state = integrate_final(values, params)?;
    Ok(CostBreakdown::from_final_state(&state, &params.cost).total)
}

/// Finite-difference gradient of the cost with respect to each control
/// value.
///
/// Central differences where both probes stay inside the box, one-sided at
/// active bounds. Every probe re-simulates the whole trajectory.
pub fn gradient(
    policy: &ControlPolicy,
    params: &ScenarioParams,
    fd_step: f64,
) -> Result<Vec<f64>, Error> {
    gradient_of_values(policy.values(), params, fd_step)
}

fn gradient_of_values(
    values: &[f64],
    params: &ScenarioParams,
    fd_step: f64,
) -> Result<Vec<f64>, Error> {
    let l_max = params.epidemic.l_max;
    // Shared by every one-sided difference; computed lazily would save one
    // simulation per call but complicate the parallel loop for nothing.
    let base = objective_value(values, params)?;
    (0..values.len())
        .into_par_iter()
        .map(|j| {
            let mut probe = values.to_vec();
            let v = values[j];
            let up = v + fd_step;
            let down = v - fd_step;
            let (numerator, denominator) = if up > l_max {
                probe[j] = down;
                (base - objective_value(&probe, params)?, fd_step)
            } else if down < 0.0 {
                probe[j] = up;
                (objective_value(&probe, params)? - base, fd_step)
            } else {
                probe[j] = up;
                let high = objective_value(&probe, params)?;
                probe[j] = down;
                let low = objective_value(&probe, params)?;
                (high - low, 2.0 * fd_step)
            };
            Ok(numerator / denominator)
        })
        .collect()
}

struct StartOutcome {
    values: Vec<f64>,
    cost: CostBreakdown,
    iterations: usize,
    converged: bool,
    gradient_norm: f64,
    mean_lockdown: f64,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn projected_gradient_norm(values: &[f64], grad: &[f64], l_max: f64) -> f64 {
    values
        .iter()
        .zip(grad)
        .map(|(&x, &g)| {
            let moved = (x - g).clamp(0.0, l_max);
            let d = x - moved;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

fn descend_from(
    start: f64,
    params: &ScenarioParams,
    opts: &OptimizerOptions,
) -> Result<StartOutcome, Error> {
    let n = params.step_count();
    let l_max = params.epidemic.l_max;
    let ls = &opts.line_search;

    let mut x = vec![start; n];
    let mut current = objective_value(&x, params)?;
    let mut iterations = 0;
    let mut converged = false;
    let mut grad = gradient_of_values(&x, params, opts.fd_step)?;

    for _ in 0..opts.max_iterations {
        let gnorm = norm2(&grad);
        if gnorm == 0.0 {
            converged = true;
            break;
        }

        let mut step = ls.initial_step / gnorm;
        let mut accepted = None;
        for _ in 0..ls.max_backtracks {
            let candidate: Vec<f64> = x
                .iter()
                .zip(&grad)
                .map(|(&xi, &gi)| (xi - step * gi).clamp(0.0, l_max))
                .collect();
            let value = objective_value(&candidate, params)?;
            let decrease: f64 = grad
                .iter()
                .zip(candidate.iter().zip(&x))
                .map(|(&gi, (&ci, &xi))| gi * (ci - xi))
                .sum();
            if value <= current + ls.armijo_c * decrease {
                accepted = Some((candidate, value));
                break;
            }
            step *= ls.shrink;
        }

        let Some((candidate, value)) = accepted else {
            // No decrease at any trial step: stationary to gradient
            // precision.
            converged = true;
            break;
        };
        iterations += 1;
        let improvement = (current - value) / current.abs().max(1.0);
        x = candidate;
        current = value;
        if improvement < opts.tol_rel {
            converged = true;
            break;
        }
        grad = gradient_of_values(&x, params, opts.fd_step)?;
    }

    let final_grad = gradient_of_values(&x, params, opts.fd_step)?;
    let gradient_norm = projected_gradient_norm(&x, &final_grad, l_max);
    let mean = mean_lockdown(
        &x,
        &(0..=n).map(|j| params.step_time(j)).collect::<Vec<_>>(),
    );
    let state = integrate_final(&x, params)?;
    Ok(StartOutcome {
        values: x,
        cost: CostBreakdown::from_final_state(&state, &params.cost),
        iterations,
        converged,
        gradient_norm,
        mean_lockdown: mean,
    })
}

/// Minimize the terminal cost over feasible policies by multi-start
/// projected gradient descent.
///
/// Returns the best policy across starts; ties in cost break toward the
/// smaller time-averaged lockdown, then toward the earlier start. The result
/// never loses to any of its own starting policies. Non-convergence (an
/// iteration budget running out) is reported through `converged`, not an
/// error.
pub fn optimize(
    params: &ScenarioParams,
    opts: &OptimizerOptions,
) -> Result<OptimizationResult, Error> {
    let violations = validate(params);
    if !violations.is_empty() {
        return Err(Error::InvalidScenario(violations));
    }
    if opts.starts.is_empty() {
        return Err(Error::NoStarts);
    }
    let l_max = params.epidemic.l_max;
    for &start in &opts.starts {
        if !start.is_finite() || start < 0.0 || start > l_max {
            return Err(Error::InvalidStart { start, l_max });
        }
    }

    let outcomes: Vec<Result<StartOutcome, Error>> = opts
        .starts
        .par_iter()
        .map(|&start| descend_from(start, params, opts))
        .collect();

    let mut iterations = Vec::with_capacity(outcomes.len());
    let mut best: Option<(usize, StartOutcome)> = None;
    for (index, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        iterations.push(outcome.iterations);
        let better = match &best {
            None => true,
            Some((_, incumbent)) => {
                outcome.cost.total < incumbent.cost.total
                    || (outcome.cost.total == incumbent.cost.total
                        && outcome.mean_lockdown < incumbent.mean_lockdown)
            }
        };
        if better {
            best = Some((index, outcome));
        }
    }
    let (winner_index, winner) = best.expect("at least one start");

    Ok(OptimizationResult {
        policy: ControlPolicy::from_values(winner.values, params)?,
        cost: winner.cost,
        iterations,
        start_used: opts.starts[winner_index],
        converged: winner.converged,
        gradient_norm: winner.gradient_norm,
    })
}
