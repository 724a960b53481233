//! Right-hand sides of the coupled epidemic-economy ODE system.
//!
//! Epidemic (SIRD with logistic migration, `N = S + I + R`, `beta`
//! scaled by the lockdown signal `l`):
//!
//! ```text
//! dS/dt = mu*S - beta*S*I/N - mu*S*N/K        beta = beta0 * k0 * (1 - l)
//! dI/dt = mu*I + beta*S*I/N - (gamma + delta)*I - mu*I*N/K
//! dR/dt = mu*R + gamma*I - mu*R*N/K
//! dD/dt = delta*I
//! ```
//!
//! Economy (value generated by economically beneficial interactions minus
//! per-capita consumption):
//!
//! ```text
//! dG/dt = m1 * n_ei - m2 * N
//! n_ei  = alpha * N * k0 * a1 * sin(pi * (S + R) * (1 - l) / (2 * N))
//! ```
//!
//! The sine makes beneficial interactions grow sub-linearly in total
//! interactions: the few contacts allowed under a tight lockdown are mostly
//! the economically essential ones. Only the susceptible and recovered work,
//! which is why the argument carries `S + R`; note the consumption term still
//! counts the whole living population. Two normalization choices are worth
//! stating explicitly: the denominator uses the *current* living population
//! `N(t)` (not its pre-epidemic value), which keeps the argument inside
//! `[0, pi/2]` as deaths shrink the population, and the `k0` factor that a
//! literal reading of the interaction ratio would put in both numerator and
//! denominator is cancelled analytically.
//!
//! Everything here is a pure function of its value arguments — no clamping,
//! no state. Positivity of the compartments is the integrator's business.

use crate::model::{EconomicParams, EpidemicParams, ScenarioParams, SystemState};

/// Evaluating dynamics requires a positive living population; `N` appears as
/// a denominator.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("living population must be positive to evaluate dynamics (N = {living})")]
pub struct DegenerateState {
    pub living: f64,
}

/// Instantaneous rates of the four epidemic compartments (persons/day).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpidemicDerivative {
    pub susceptible: f64,
    pub infected: f64,
    pub recovered: f64,
    pub dead: f64,
}

/// Instantaneous rates of the full five-dimensional system.
///
/// Compartment rates are persons/day, `economy` is $/day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub susceptible: f64,
    pub infected: f64,
    pub recovered: f64,
    pub dead: f64,
    pub economy: f64,
}

/// Average interactions per person per day under lockdown strength `l`:
/// `k0 * (1 - l)`.
#[must_use]
pub fn effective_contacts(l: f64, k0: f64) -> f64 {
    k0 * (1.0 - l)
}

/// Epidemic rates at `state` under lockdown strength `l`.
pub fn epidemic_rhs(
    state: &SystemState,
    p: &EpidemicParams,
    l: f64,
) -> Result<EpidemicDerivative, DegenerateState> {
    let n = state.living();
    if n <= 0.0 || n.is_nan() {
        return Err(DegenerateState { living: n });
    }
    let s = state.susceptible;
    let i = state.infected;
    let r = state.recovered;

    let beta = p.beta0 * effective_contacts(l, p.k0);
    let infection = beta * s * i / n;
    let crowding = p.mu * n / p.carrying_capacity;

    Ok(EpidemicDerivative {
        susceptible: p.mu * s - infection - crowding * s,
        infected: p.mu * i + infection - (p.gamma + p.delta) * i - crowding * i,
        recovered: p.mu * r + p.gamma * i - crowding * r,
        dead: p.delta * i,
    })
}

/// Economically beneficial interactions per day at `state` under lockdown
/// strength `l`.
pub fn beneficial_interactions(
    state: &SystemState,
    ep: &EpidemicParams,
    ec: &EconomicParams,
    l: f64,
) -> Result<f64, DegenerateState> {
    let n = state.living();
    if n <= 0.0 || n.is_nan() {
        return Err(DegenerateState { living: n });
    }
    let working = state.susceptible + state.recovered;
    let arg = std::f64::consts::PI * working * (1.0 - l) / (2.0 * n);
    Ok(ec.alpha * n * ep.k0 * ec.a1 * arg.sin())
}

/// Net rate of economic value generation ($/day): `m1 * n_ei - m2 * N`.
pub fn economy_rhs(
    state: &SystemState,
    ep: &EpidemicParams,
    ec: &EconomicParams,
    l: f64,
) -> Result<f64, DegenerateState> {
    let n_ei = beneficial_interactions(state, ep, ec, l)?;
    Ok(ec.m1 * n_ei - ec.m2 * state.living())
}

/// Full five-dimensional rate vector: epidemic and economy together.
pub fn full_rhs(
    state: &SystemState,
    params: &ScenarioParams,
    l: f64,
) -> Result<StateDerivative, DegenerateState> {
    let epi = epidemic_rhs(state, &params.epidemic, l)?;
    let economy = economy_rhs(state, &params.epidemic, &params.economic, l)?;
    Ok(StateDerivative {
        susceptible: epi.susceptible,
        infected: epi.infected,
        recovered: epi.recovered,
        dead: epi.dead,
        economy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{preset, Country};
    use proptest::prelude::*;

    fn state(s: f64, i: f64, r: f64) -> SystemState {
        SystemState {
            susceptible: s,
            infected: i,
            recovered: r,
            dead: 0.0,
            economy: 0.0,
        }
    }

    fn assert_close(actual: f64, expected: f64, rel: f64, what: &str) {
        let scale = expected.abs().max(1.0);
        assert!(
            (actual - expected).abs() <= rel * scale,
            "{what}: got {actual}, expected {expected}"
        );
    }

    #[test]
    fn effective_contacts_scales_linearly() {
        assert_eq!(effective_contacts(0.0, 22.0), 22.0);
        assert_eq!(effective_contacts(0.75, 22.0), 5.5);
        assert_eq!(effective_contacts(0.5, 22.0), 11.0);
    }

    #[test]
    fn epidemic_rhs_matches_hand_evaluation_at_outbreak() {
        // At the preset initial condition N = K, so every logistic-migration
        // term vanishes and the rates reduce to the textbook SIRD values:
        // infection flux 0.33 * 49500 * 500 / 50000 = 163.35.
        let p = preset(Country::India);
        let d = epidemic_rhs(&p.initial_state, &p.epidemic, 0.0).unwrap();
        assert_close(d.susceptible, -163.35, 1e-12, "dS");
        assert_close(d.infected, 111.35, 1e-12, "dI");
        assert_close(d.recovered, 50.0, 1e-12, "dR");
        assert_close(d.dead, 2.0, 1e-12, "dD");
    }

    #[test]
    fn epidemic_rhs_scales_infection_by_lockdown() {
        // l = 0.75 scales the infection flux by exactly 1/4.
        let p = preset(Country::India);
        let d = epidemic_rhs(&p.initial_state, &p.epidemic, 0.75).unwrap();
        assert_close(d.susceptible, -40.8375, 1e-12, "dS");
        assert_close(d.infected, -11.1625, 1e-12, "dI");
        assert_close(d.recovered, 50.0, 1e-12, "dR");
        assert_close(d.dead, 2.0, 1e-12, "dD");
    }

    #[test]
    fn epidemic_rhs_is_quiescent_without_infection_at_capacity() {
        let p = preset(Country::UnitedStates);
        for l in [0.0, 0.3, 0.75] {
            let d = epidemic_rhs(&state(30_000.0, 0.0, 20_000.0), &p.epidemic, l).unwrap();
            assert_eq!(d.susceptible, 0.0);
            assert_eq!(d.infected, 0.0);
            assert_eq!(d.recovered, 0.0);
            assert_eq!(d.dead, 0.0);
        }
    }

    #[test]
    fn epidemic_rhs_rejects_empty_population() {
        let p = preset(Country::India);
        let err = epidemic_rhs(&state(0.0, 0.0, 0.0), &p.epidemic, 0.0).unwrap_err();
        assert_eq!(err.living, 0.0);
        assert!(full_rhs(&state(0.0, 0.0, 0.0), &p, 0.0).is_err());
    }

    #[test]
    fn beneficial_interactions_reduces_to_pre_epidemic_formula() {
        // Everyone susceptible, no lockdown: the sine argument is pi/2.
        let p = preset(Country::UnitedStates);
        let n = 50_000.0;
        let nei = beneficial_interactions(&state(n, 0.0, 0.0), &p.epidemic, &p.economic, 0.0)
            .unwrap();
        assert_eq!(nei, p.economic.alpha * n * p.epidemic.k0 * p.economic.a1);
    }

    #[test]
    fn beneficial_interactions_under_full_lockdown() {
        // S + R = N, l = 0.75: amplitude times sin(pi/8).
        const SIN_PI_8: f64 = 0.382_683_432_365_089_8;
        let p = preset(Country::India);
        let n = 50_000.0;
        let nei = beneficial_interactions(&state(40_000.0, 0.0, 10_000.0), &p.epidemic, &p.economic, 0.75)
            .unwrap();
        let amplitude = p.economic.alpha * n * p.epidemic.k0 * p.economic.a1;
        assert_close(nei, amplitude * SIN_PI_8, 1e-12, "n_ei at l_max");
    }

    #[test]
    fn beneficial_interactions_vanish_when_all_infected() {
        let p = preset(Country::Burundi);
        let nei = beneficial_interactions(&state(0.0, 1_000.0, 0.0), &p.epidemic, &p.economic, 0.0)
            .unwrap();
        assert_eq!(nei, 0.0);
    }

    #[test]
    fn economy_rhs_matches_observed_growth_rates() {
        // Pre-epidemic per-capita rate m1*alpha*k0*a1 - m2; annualized this
        // is ~2.2%/yr of US GDP and ~4.0%/yr of India's.
        let us = preset(Country::UnitedStates);
        let n = 50_000.0;
        let rate = economy_rhs(&state(n, 0.0, 0.0), &us.epidemic, &us.economic, 0.0).unwrap();
        assert_close(rate / n, 3.8734396, 1e-9, "US per-capita rate");

        let india = preset(Country::India);
        let rate = economy_rhs(&state(n, 0.0, 0.0), &india.epidemic, &india.economic, 0.0).unwrap();
        assert_close(rate / n, 0.23241194, 1e-9, "India per-capita rate");
    }

    #[test]
    fn economy_rhs_is_pure_consumption_when_all_infected() {
        let p = preset(Country::UnitedStates);
        let st = state(0.0, 2_000.0, 0.0);
        let rate = economy_rhs(&st, &p.epidemic, &p.economic, 0.0).unwrap();
        assert_eq!(rate, -p.economic.m2 * 2_000.0);
    }

    #[test]
    fn full_rhs_composes_the_two_systems() {
        let p = preset(Country::India);
        let st = state(30_000.0, 5_000.0, 9_000.0);
        for l in [0.0, 0.4, 0.75] {
            let full = full_rhs(&st, &p, l).unwrap();
            let epi = epidemic_rhs(&st, &p.epidemic, l).unwrap();
            let eco = economy_rhs(&st, &p.epidemic, &p.economic, l).unwrap();
            assert_eq!(full.susceptible, epi.susceptible);
            assert_eq!(full.infected, epi.infected);
            assert_eq!(full.recovered, epi.recovered);
            assert_eq!(full.dead, epi.dead);
            assert_eq!(full.economy, eco);
        }
    }

    #[test]
    fn full_rhs_quiescent_epidemic_leaves_linear_economy() {
        let p = preset(Country::India);
        let k = p.epidemic.carrying_capacity;
        let d = full_rhs(&state(k, 0.0, 0.0), &p, 0.0).unwrap();
        assert_eq!(d.susceptible, 0.0);
        assert_eq!(d.infected, 0.0);
        assert_eq!(d.recovered, 0.0);
        assert_eq!(d.dead, 0.0);
        let expected =
            p.economic.m1 * p.economic.alpha * k * p.epidemic.k0 * p.economic.a1 - p.economic.m2 * k;
        assert_close(d.economy, expected, 1e-12, "quiescent dG");
    }

    proptest! {
        /// dS + dI + dR + dD = mu*N*(1 - N/K): deaths and recoveries cancel
        /// inside the living population, leaving only net migration.
        #[test]
        fn mass_balance_identity(
            s in 0.0..100_000.0f64,
            i in 0.0..100_000.0f64,
            r in 0.0..100_000.0f64,
            l in 0.0..=0.75f64,
            country in prop::sample::select(&Country::ALL[..]),
        ) {
            let p = preset(country).epidemic;
            let st = state(s, i, r);
            let n = st.living();
            prop_assume!(n > 1.0);
            let d = epidemic_rhs(&st, &p, l).unwrap();
            let sum = d.susceptible + d.infected + d.recovered + d.dead;
            let expected = p.mu * n * (1.0 - n / p.carrying_capacity);
            // Cancellation headroom: the summed fluxes are O(beta * N).
            let tol = 1e-9 * (1.0 + n);
            prop_assert!(
                (sum - expected).abs() <= tol,
                "sum {} vs {} at N = {}", sum, expected, n
            );
        }

        /// Infection pressure never grows with lockdown strength.
        #[test]
        fn infection_rate_monotone_in_lockdown(
            s in 1.0..80_000.0f64,
            i in 1.0..80_000.0f64,
            r in 0.0..80_000.0f64,
            l1 in 0.0..=0.75f64,
            l2 in 0.0..=0.75f64,
        ) {
            let p = preset(Country::India).epidemic;
            let st = state(s, i, r);
            let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
            let d_lo = epidemic_rhs(&st, &p, lo).unwrap();
            let d_hi = epidemic_rhs(&st, &p, hi).unwrap();
            prop_assert!(d_hi.infected <= d_lo.infected + 1e-12);
        }

        /// Beneficial interactions never grow with lockdown strength.
        #[test]
        fn beneficial_interactions_monotone_in_lockdown(
            s in 0.0..80_000.0f64,
            i in 0.0..80_000.0f64,
            r in 0.0..80_000.0f64,
            l1 in 0.0..=0.75f64,
            l2 in 0.0..=0.75f64,
        ) {
            let p = preset(Country::UnitedStates);
            let st = state(s, i, r);
            prop_assume!(st.living() > 1.0);
            let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
            let n_lo = beneficial_interactions(&st, &p.epidemic, &p.economic, lo).unwrap();
            let n_hi = beneficial_interactions(&st, &p.epidemic, &p.economic, hi).unwrap();
            prop_assert!(n_hi <= n_lo + 1e-9);
        }

        /// dD is exactly delta * I, and dR decomposes into recovery plus
        /// migration with nothing left over.
        #[test]
        fn death_and_recovery_fluxes(
            s in 0.0..80_000.0f64,
            i in 0.0..80_000.0f64,
            r in 0.0..80_000.0f64,
            l in 0.0..=0.75f64,
        ) {
            let p = preset(Country::UnitedStates).epidemic;
            let st = state(s, i, r);
            prop_assume!(st.living() > 1.0);
            let d = epidemic_rhs(&st, &p, l).unwrap();
            prop_assert_eq!(d.dead, p.delta * i);
            let n = st.living();
            let residual = d.recovered - p.gamma * i - p.mu * r * (1.0 - n / p.carrying_capacity);
            prop_assert!(residual.abs() <= 1e-9 * (1.0 + n), "residual {}", residual);
        }

        /// Sub-linearity: with the whole population working, cutting
        /// interactions by (1 - l) cuts beneficial interactions by less.
        #[test]
        fn beneficial_interactions_sublinear(
            n in 1.0..100_000.0f64,
            l in 1e-6..=0.75f64,
        ) {
            let p = preset(Country::Burundi);
            let st = state(n, 0.0, 0.0);
            let at_l = beneficial_interactions(&st, &p.epidemic, &p.economic, l).unwrap();
            let at_zero = beneficial_interactions(&st, &p.epidemic, &p.economic, 0.0).unwrap();
            prop_assert!(
                at_l / at_zero > 1.0 - l,
                "ratio {} not above {}", at_l / at_zero, 1.0 - l
            );
        }
    }
}
