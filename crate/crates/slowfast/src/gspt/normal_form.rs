//! Local normal-form coefficients at the canard point.
//!
//! At δ = δ_H the coexistence equilibrium sits exactly on the fold of the
//! critical manifold. Translating that point to the origin and expanding
//! the kinetics gives
//!
//! ```text
//! U' = -b₁ V h₁(U,V) + U² h₂(U,V) + ε h₃(U,V),
//! V' = ε ( b₃ U h₄(U,V) - b₅... )                 (schematically)
//! ```
//!
//! whose leading coefficients are the only inputs the Melnikov distance
//! computation needs:
//!
//! * `b₁` — fast/slow coupling through f_v at the fold,
//! * `b₂` — curvature of the fold (half the second u-derivative of u·q₀),
//! * `b₃`, `b₄` — slow-drift linearization weights,
//! * `a₁…a₅` — cubic/cross corrections; for these kinetics the expansion of
//!   the predator equation is exactly bilinear in (V, U-drift), so a₁, a₄,
//!   a₅ vanish identically and a₂ normalizes to 1.
//!
//! The curvature coefficient is computed twice — once from the expanded
//! polynomial and once as q₀'(u*) + u* q₀''(u*)/2 — and the two must agree
//! to round-off, otherwise the whole downstream canard analysis would be
//! silently wrong.

use crate::error::{Error, Result};
use crate::kinetics::{
    coexistence_equilibrium, critical_manifold_q0, q0_prime, q0_second, stability_thresholds,
};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy)]
pub struct NormalFormCoefficients {
    /// The singular Hopf / canard value of δ (the mortality at which E*
    /// collides with the fold).
    pub delta_star: f64,
    pub u_star: f64,
    pub v_star: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
}

/// Expand the kinetics at the canard point of `p` (its δ field is ignored;
/// the expansion is taken at δ = δ_H(α, β)).
pub fn normal_form(p: &ModelParams) -> Result<NormalFormCoefficients> {
    let thresholds = stability_thresholds(p)?;
    let delta_star = thresholds.delta_h;
    if !(delta_star > 0.0) || delta_star * (1.0 + p.alpha) >= 1.0 {
        return Err(Error::AnalysisDegenerate(format!(
            "no feasible canard point: delta_H = {delta_star} lies outside \
             (0, {})",
            1.0 / (1.0 + p.alpha)
        )));
    }
    let at = ModelParams {
        delta: delta_star,
        ..*p
    };
    let (u_star, v_star) =
        coexistence_equilibrium(&at).expect("feasibility was checked above");
    debug_assert!((v_star - critical_manifold_q0(&at, u_star)).abs() < 1e-12);

    let (al, be, ga) = (p.alpha, p.beta, p.gamma);
    let b1 = u_star;
    let b2 = -ga
        * (-1.0 + 6.0 * u_star * u_star * al + 3.0 * u_star * (1.0 + al * (be - 1.0)) + be
            - al * be);
    let b3 = v_star * (1.0 - al * delta_star);
    let b4 = v_star * (1.0 + al * u_star);
    let a3 = -(ga + al * ga * (4.0 * u_star + be - 1.0));

    // Independent route to the fold curvature: (u q₀)''/2 evaluated at u*.
    let b2_check = q0_prime(&at, u_star) + u_star * q0_second(&at, u_star) / 2.0;
    if (b2 - b2_check).abs() > 1e-8 * (1.0 + b2.abs()) {
        return Err(Error::InternalConsistency(format!(
            "fold curvature mismatch: expansion gives {b2}, manifold \
             derivatives give {b2_check}"
        )));
    }
    if b2.abs() < 1e-12 || b1 <= 0.0 || b3 <= 0.0 {
        return Err(Error::AnalysisDegenerate(format!(
            "degenerate canard point: b1 = {b1}, b2 = {b2}, b3 = {b3}"
        )));
    }

    Ok(NormalFormCoefficients {
        delta_star,
        u_star,
        v_star,
        b1,
        b2,
        b3,
        b4,
        a1: 0.0,
        a2: 1.0,
        a3,
        a4: 0.0,
        a5: 0.0,
    })
}
