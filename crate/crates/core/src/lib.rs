//! Coupled epidemic-economy simulation and optimal lockdown policy search.
//!
//! The model couples an SIRD epidemic with logistic migration to an economy
//! driven by person-to-person interactions. A lockdown signal `l(t)` in
//! `[0, l_max]` scales interactions down, which suppresses both the
//! infection rate and the generation of economic value. The toolkit
//! integrates the five-dimensional system with fixed-step RK4, evaluates a
//! terminal cost trading deaths and infections against accumulated economic
//! value, and minimizes that cost over piecewise-constant policies with
//! multi-start projected gradient descent.
//!
//! Calibrated presets for Burundi, India and the United States come with a
//! sweep harness that maps how the optimal policy responds to the assumed
//! value of a statistical life.
//!
//! Everything is deterministic: no randomness anywhere, and parallel loops
//! reduce in fixed order, so identical inputs give bit-identical outputs.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod integrator;
pub mod model;
pub mod objective;
pub mod optimizer;

pub use error::Error;
