//! Reaction-diffusion simulation and traveling-wave analysis.
//!
//! Explicit finite differences on uniform grids: forward Euler in time,
//! 3-point/5-point Laplacians with no-flux boundaries in space, exactly
//! as the pattern phenomenology requires — invasion fronts and wakes in
//! 1D, spiral and chaotic patterns in 2D.

pub mod diagnostics;
pub mod field;
pub mod front;
pub mod stepper;
pub mod wave;

pub use diagnostics::{divergence_diagnostic, DivergenceReport, SENSITIVITY_THRESHOLD};
pub use field::{
    make_initial_condition, EllipticInit, Field, GridSpec, InitialCondition, PerturbedInit,
    StepInit,
};
pub use front::{front_position, measure_front_speed, FrontRecord, Species};
pub use stepper::{cfl_limit, simulate, Simulation, SimulationOutput, CFL_SAFETY};
pub use wave::{tw_eigen_analysis, tw_min_speed, TwAnalysis, WaveType};
