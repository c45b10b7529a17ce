//! Slow-fast predator-prey dynamics with a weak Allee effect.
//!
//! The model couples a fast prey density `u` and a slow predator density `v`
//! on the fast timescale:
//!
//! ```text
//! du/dt = γ u (1-u)(u+β) - u v / (1+α u)
//! dv/dt = ε v ( u/(1+α u) - δ )
//! ```
//!
//! with `0 < ε ≤ 1` the timescale separation. The crate provides
//!
//! * [`kinetics`] — reaction terms, equilibria, Jacobians, stability
//!   thresholds, and the geometry of the critical manifold;
//! * [`gspt`] — singular-perturbation analytics: the slow-manifold
//!   expansion, blow-up/normal-form coefficients, Melnikov distance, the
//!   singular-Hopf and maximal-canard curves, the entry-exit map, and
//!   regime classification;
//! * [`ode`] — adaptive time integration, limit-cycle detection and
//!   classification, bifurcation sweeps, and the canard-explosion locator;
//! * [`pde`] — explicit reaction-diffusion stepping in 1D/2D, traveling-wave
//!   analysis, front-speed measurement, and a two-run divergence diagnostic.
//!
//! Everything is deterministic: no randomness, no wall-clock input, and
//! bitwise-reproducible parallel stepping.

pub mod error;
pub mod gspt;
pub mod kinetics;
pub mod ode;
pub mod params;
pub mod pde;

pub use error::{Error, Result};
pub use params::{AlleeRegime, ModelParams};
