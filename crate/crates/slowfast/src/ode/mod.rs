//! Time integration of the kinetic system and everything built on it:
//! limit-cycle detection, classification, sweeps, and the canard-explosion
//! locator.

pub mod cycle;
pub mod integrator;
pub mod sweep;

pub use cycle::{detect_cycle, CycleKind, CycleOptions, DetectedCycle, JumpSide};
pub use integrator::{
    hermite, integrate, integrate_observed, IntegratorOptions, StepRecord, Stepper,
};
pub use sweep::{
    bifurcation_sweep, locate_explosion_window, ExplosionSearch, ExplosionWindow, SweepRow,
};
