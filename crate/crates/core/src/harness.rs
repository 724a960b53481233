//! Sweep of the optimal policy over the value of statistical life.
//!
//! For each `c1` on a grid the harness optimizes the lockdown policy, runs
//! the uncontrolled (`l = 0`) baseline at the same weights, and records the
//! terminal outcomes side by side. Economic losses are measured against a
//! no-epidemic counterfactual: the same scenario with the seed infections
//! moved back into the susceptible pool and no lockdown, so the reference
//! includes the growth the region would have seen anyway.

use rayon::prelude::*;

use crate::error::Error;
use crate::integrator::{integrate_final, simulate, ControlPolicy};
use crate::model::ScenarioParams;
use crate::objective::{evaluate, CostBreakdown};
use crate::optimizer::{optimize, OptimizationResult, OptimizerOptions};

/// A `c1` sweep over one scenario.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub scenario: ScenarioParams,
    /// Values of statistical life to evaluate, in output order.
    pub c1_values: Vec<f64>,
    pub optimizer: OptimizerOptions,
}

/// Outcome of one grid point.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    /// The value of statistical life this record was optimized under.
    pub c1: f64,
    /// Optimizer outcome at this `c1`.
    pub optimal: OptimizationResult,
    /// Cost of the uncontrolled baseline at the same weights.
    pub uncontrolled: CostBreakdown,
    /// Terminal deaths under the optimal policy / the baseline (persons).
    pub deaths_opt: f64,
    pub deaths_unc: f64,
    /// Terminal `R + I` under the optimal policy / the baseline (persons).
    pub infected_opt: f64,
    pub infected_unc: f64,
    /// Terminal economy value under the optimal policy / the baseline ($).
    pub economy_opt: f64,
    pub economy_unc: f64,
    /// Terminal economy of the no-epidemic counterfactual ($); the
    /// denominator of [`economic_loss_fraction`].
    pub economy_reference: f64,
    /// Duration-weighted time average of the optimal lockdown strength.
    pub mean_lockdown: f64,
}

/// One grid point of a sweep: either a record or the error that spoiled it.
#[derive(Debug)]
pub struct SweepItem {
    pub c1: f64,
    pub outcome: Result<SweepRecord, Error>,
}

/// The scenario with the epidemic removed: seed infections are returned to
/// the susceptible pool so the total population is unchanged.
#[must_use]
pub fn without_epidemic(scenario: &ScenarioParams) -> ScenarioParams {
    let mut counterfactual = scenario.clone();
    counterfactual.initial_state.susceptible += counterfactual.initial_state.infected;
    counterfactual.initial_state.infected = 0.0;
    counterfactual
}

/// Terminal economy of the no-epidemic, no-lockdown counterfactual ($).
pub fn no_epidemic_reference(scenario: &ScenarioParams) -> Result<f64, Error> {
    let counterfactual = without_epidemic(scenario);
    let values = vec![0.0; counterfactual.step_count()];
    Ok(integrate_final(&values, &counterfactual)?.economy)
}

/// Economic loss of the optimal policy relative to the no-epidemic
/// counterfactual: `(reference - economy_opt) / |reference|`.
///
/// When the optimal policy is no better than doing nothing this reduces to
/// the epidemic's own economic damage, so it is nonnegative for any sensible
/// record.
pub fn economic_loss_fraction(record: &SweepRecord) -> Result<f64, Error> {
    if record.economy_reference == 0.0 {
        return Err(Error::DegenerateReference);
    }
    Ok((record.economy_reference - record.economy_opt) / record.economy_reference.abs())
}

fn run_point(
    scenario: &ScenarioParams,
    c1: f64,
    opts: &OptimizerOptions,
    economy_reference: f64,
) -> Result<SweepRecord, Error> {
    let mut point = scenario.clone();
    point.cost.c1 = c1;

    let optimal = optimize(&point, opts)?;
    let optimal_end = integrate_final(optimal.policy.values(), &point)?;

    let baseline_policy = ControlPolicy::constant(0.0, &point)?;
    let baseline = simulate(&baseline_policy, &point)?;
    let uncontrolled = evaluate(&baseline, &point.cost)?;
    let baseline_end = baseline.final_state();

    let mean_lockdown = {
        let times: Vec<f64> = (0..=point.step_count()).map(|j| point.step_time(j)).collect();
        crate::integrator::mean_lockdown(optimal.policy.values(), &times)
    };

    Ok(SweepRecord {
        c1,
        deaths_opt: optimal_end.dead,
        deaths_unc: baseline_end.dead,
        infected_opt: optimal_end.recovered + optimal_end.infected,
        infected_unc: baseline_end.recovered + baseline_end.infected,
        economy_opt: optimal_end.economy,
        economy_unc: baseline_end.economy,
        economy_reference,
        mean_lockdown,
        optimal,
        uncontrolled,
    })
}

/// Run the sweep. Failed grid points are recorded, not dropped, and never
/// abort the rest; output order matches `c1_values`.
#[must_use]
pub fn run_sweep(spec: &SweepSpec) -> Vec<SweepItem> {
    spec.c1_values
        .par_iter()
        .map(|&c1| {
            let outcome = no_epidemic_reference(&spec.scenario)
                .and_then(|reference| run_point(&spec.scenario, c1, &spec.optimizer, reference));
            SweepItem { c1, outcome }
        })
        .collect()
}

/// Nine log-spaced grid points spanning a decade either side of `c1`.
#[must_use]
pub fn default_c1_grid(c1: f64) -> Vec<f64> {
    log_spaced(c1 / 10.0, c1 * 10.0, 9)
}

/// `n` log-spaced values from `lo` to `hi` inclusive; requires `lo > 0`.
/// The endpoints are exact, not round-tripped through exp(ln(..)).
#[must_use]
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo, "log grid needs 0 < lo <= hi");
    if n <= 1 {
        return vec![lo];
    }
    let (log_lo, log_hi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == n - 1 {
                hi
            } else {
                let f = k as f64 / (n - 1) as f64;
                (log_lo + f * (log_hi - log_lo)).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{preset, Country};

    /// Shortened Burundi scenario so sweep tests stay in the millisecond
    /// range; full-horizon behavior is covered by the acceptance suite.
    fn quick_spec(c1_values: Vec<f64>) -> SweepSpec {
        let mut scenario = preset(Country::Burundi);
        scenario.horizon = 60.0;
        SweepSpec {
            scenario,
            c1_values,
            optimizer: OptimizerOptions {
                max_iterations: 40,
                ..OptimizerOptions::default()
            },
        }
    }

    #[test]
    fn sweep_preserves_grid_order_and_dominates_baseline() {
        let spec = quick_spec(vec![46.7, 467.0, 4670.0]);
        let items = run_sweep(&spec);
        assert_eq!(items.len(), 3);
        for (item, &expected_c1) in items.iter().zip(&spec.c1_values) {
            assert_eq!(item.c1, expected_c1);
            let record = item.outcome.as_ref().expect("preset sweeps succeed");
            assert!(
                record.optimal.cost.total <= record.uncontrolled.total,
                "c1 = {}: optimal {} worse than uncontrolled {}",
                item.c1,
                record.optimal.cost.total,
                record.uncontrolled.total
            );
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let spec = quick_spec(vec![100.0, 1000.0]);
        let a = run_sweep(&spec);
        let b = run_sweep(&spec);
        for (x, y) in a.iter().zip(&b) {
            let (rx, ry) = (
                x.outcome.as_ref().unwrap(),
                y.outcome.as_ref().unwrap(),
            );
            assert_eq!(rx.optimal.cost.total.to_bits(), ry.optimal.cost.total.to_bits());
            assert_eq!(rx.mean_lockdown.to_bits(), ry.mean_lockdown.to_bits());
        }
    }

    #[test]
    fn loss_fraction_is_nonnegative_and_reference_based() {
        let spec = quick_spec(vec![467.0]);
        let items = run_sweep(&spec);
        let record = items[0].outcome.as_ref().unwrap();
        let loss = economic_loss_fraction(record).unwrap();
        assert!(loss >= 0.0, "loss fraction {loss}");
        // The reference beats any epidemic outcome.
        assert!(record.economy_reference >= record.economy_opt);
    }

    #[test]
    fn free_lives_minimize_the_economic_loss() {
        // With both health weights at zero the optimizer only protects the
        // economy, so the c1 = 0 record's loss against the no-epidemic
        // reference is the sweep's minimum and no worse than the
        // uncontrolled epidemic's own damage. (A nonzero c2 would still buy
        // lockdown at c1 = 0 to suppress infection costs.)
        let mut spec = quick_spec(vec![0.0, 467.0, 4670.0]);
        spec.scenario.cost.c2 = 0.0;
        let items = run_sweep(&spec);
        let losses: Vec<f64> = items
            .iter()
            .map(|i| economic_loss_fraction(i.outcome.as_ref().unwrap()).unwrap())
            .collect();
        assert!(
            losses.iter().all(|&l| l >= losses[0]),
            "c1 = 0 must have the smallest loss: {losses:?}"
        );
        let record = items[0].outcome.as_ref().unwrap();
        let intrinsic =
            (record.economy_reference - record.economy_unc) / record.economy_reference.abs();
        assert!(
            losses[0] <= intrinsic + 1e-12,
            "optimized loss {} above uncontrolled damage {intrinsic}",
            losses[0]
        );
    }

    #[test]
    fn loss_fraction_rejects_zero_reference() {
        let spec = quick_spec(vec![1.0]);
        let mut record = run_sweep(&spec)[0].outcome.as_ref().unwrap().clone();
        record.economy_reference = 0.0;
        assert!(matches!(
            economic_loss_fraction(&record),
            Err(Error::DegenerateReference)
        ));
    }

    #[test]
    fn no_epidemic_reference_keeps_population_and_grows() {
        for country in Country::ALL {
            let p = preset(country);
            let counterfactual = without_epidemic(&p);
            assert_eq!(
                counterfactual.initial_state.living(),
                p.initial_state.living()
            );
            assert_eq!(counterfactual.initial_state.infected, 0.0);
            let reference = no_epidemic_reference(&p).unwrap();
            assert!(
                reference > p.economic.g0,
                "{country}: reference {reference} below initial {}",
                p.economic.g0
            );
        }
    }

    #[test]
    fn default_grid_is_log_spaced_around_the_base_value() {
        let grid = default_c1_grid(467.0);
        assert_eq!(grid.len(), 9);
        assert!((grid[0] - 46.7).abs() < 1e-9);
        assert!((grid[4] - 467.0).abs() < 1e-9);
        assert!((grid[8] - 4670.0).abs() < 1e-9);
        for pair in grid.windows(2) {
            let ratio = pair[1] / pair[0];
            assert!((ratio - 10f64.powf(0.25)).abs() < 1e-9, "ratio {ratio}");
        }
    }

    #[test]
    fn single_point_grid_is_the_low_endpoint() {
        assert_eq!(log_spaced(30_000.0, 30_000.0, 1), vec![30_000.0]);
    }
}
