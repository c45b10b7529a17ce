//! Geometric singular perturbation analysis: slow-manifold corrections,
//! canard-point normal form, Melnikov distances and their bifurcation
//! curves, entry–exit along the extinction axis, and regime bookkeeping.

pub mod entry_exit;
pub mod expansion;
pub mod melnikov;
pub mod normal_form;
pub mod regime;

pub use entry_exit::{
    attracting_branch_u, entry_exit_integral, exit_height, singular_orbit, SingularOrbit,
};
pub use expansion::{slow_drift_numerator, slow_manifold, slow_manifold_terms, SlowManifoldTerms};
pub use melnikov::{
    maximal_canard_delta, melnikov, melnikov_coefficients, melnikov_distances,
    singular_hopf_delta, MelnikovCoefficients, MelnikovReport,
};
pub use normal_form::{normal_form, NormalFormCoefficients};
pub use regime::{classify_regime, relaxation_feasible, Regime, RegimeReport};
