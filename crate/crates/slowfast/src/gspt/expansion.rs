//! Asymptotic expansion of the attracting slow manifold in powers of ε.
//!
//! Away from the fold and the v-axis the slow manifold is a graph
//! `v = q(u) = q₀(u) + ε q₁(u) + ε² q₂(u) + O(ε³)`. Substituting the graph
//! into the flow and matching orders of ε gives, with `w(u) = u(1-αδ) - δ`
//! (the numerator of the slow drift),
//!
//! ```text
//! q₁ = q₀ w / (-u q₀'),
//! q₂ = (q₁ w + u q₁ q₁') / (-u q₀').
//! ```
//!
//! Both correction terms vanish at u* where w does, so the expansion pins
//! the manifold to the coexistence equilibrium at every order. The common
//! denominator `-u q₀'` degenerates at the fold and at the origin; inside a
//! guard radius around either the expansion is refused rather than returned
//! with garbage significance.

use crate::error::{Error, Result};
use crate::kinetics::{critical_manifold_q0, q0_prime, q0_second};
use crate::params::ModelParams;

/// Half-width of the exclusion zones around u = 0 and q₀'(u) = 0 where the
/// expansion denominators blow up.
const GUARD: f64 = 1e-3;

/// Slow-drift numerator w(u) = u(1-αδ) - δ; the predator nullcline in
/// disguise (w = 0 exactly at u*).
pub fn slow_drift_numerator(p: &ModelParams, u: f64) -> f64 {
    u * (1.0 - p.alpha * p.delta) - p.delta
}

/// The first three coefficient functions of the slow-manifold expansion,
/// evaluated at one u.
#[derive(Debug, Clone, Copy)]
pub struct SlowManifoldTerms {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
}

fn guard(p: &ModelParams, u: f64) -> Result<()> {
    if u.abs() < GUARD {
        return Err(Error::SingularExpansion {
            u,
            reason: "inside the guard radius around the v-axis".into(),
        });
    }
    let slope = q0_prime(p, u);
    if slope.abs() < GUARD {
        return Err(Error::SingularExpansion {
            u,
            reason: format!("q0'(u) = {slope} is inside the guard radius around the fold"),
        });
    }
    Ok(())
}

/// Evaluate q₀, q₁, q₂ at `u`.
pub fn slow_manifold_terms(p: &ModelParams, u: f64) -> Result<SlowManifoldTerms> {
    guard(p, u)?;
    let q0 = critical_manifold_q0(p, u);
    let q0p = q0_prime(p, u);
    let q0pp = q0_second(p, u);
    let w = slow_drift_numerator(p, u);
    let wp = 1.0 - p.alpha * p.delta;

    let den = -u * q0p;
    let q1 = q0 * w / den;
    // q₁ = N/D with N = q₀ w, D = -u q₀'; differentiate the quotient.
    let n_p = q0p * w + q0 * wp;
    let d_p = -q0p - u * q0pp;
    let q1p = (n_p * den - q0 * w * d_p) / (den * den);
    let q2 = (q1 * w + u * q1 * q1p) / den;

    Ok(SlowManifoldTerms { q0, q1, q2 })
}

/// The slow manifold truncated after `order` ∈ {0, 1, 2} correction powers
/// of ε.
pub fn slow_manifold(p: &ModelParams, u: f64, order: usize) -> Result<f64> {
    if order > 2 {
        return Err(Error::InvalidInput(format!(
            "expansion order {order} not available (maximum is 2)"
        )));
    }
    let t = slow_manifold_terms(p, u)?;
    let e = p.epsilon;
    Ok(match order {
        0 => t.q0,
        1 => t.q0 + e * t.q1,
        _ => t.q0 + e * t.q1 + e * e * t.q2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(delta: f64, epsilon: f64) -> ModelParams {
        ModelParams::new(0.5, 0.2, 3.0, delta, epsilon, 1.0).unwrap()
    }

    #[test]
    fn corrections_vanish_at_coexistence() {
        let m = p(0.3, 0.01);
        let u_star = m.delta / (1.0 - m.alpha * m.delta);
        let t = slow_manifold_terms(&m, u_star).unwrap();
        assert!(t.q1.abs() < 1e-13);
        assert!(t.q2.abs() < 1e-13);
    }

    #[test]
    fn order_zero_is_the_critical_manifold() {
        let m = p(0.3, 0.05);
        for &u in &[0.1, 0.25, 0.6, 0.9] {
            let q = slow_manifold(&m, u, 0).unwrap();
            assert_eq!(q, critical_manifold_q0(&m, u));
        }
    }

    #[test]
    fn refuses_the_fold_and_axis_neighbourhoods() {
        let m = p(0.3, 0.01);
        assert!(matches!(
            slow_manifold(&m, 1e-4, 2),
            Err(Error::SingularExpansion { .. })
        ));
        // The fold of this parameter set sits near u = 0.4718.
        assert!(matches!(
            slow_manifold(&m, 0.4717797887, 2),
            Err(Error::SingularExpansion { .. })
        ));
        assert!(slow_manifold(&m, 0.6, 2).is_ok());
    }

    #[test]
    fn rejects_unavailable_orders() {
        let m = p(0.3, 0.01);
        assert!(matches!(
            slow_manifold(&m, 0.6, 3),
            Err(Error::InvalidInput(_))
        ));
    }

    /// Invariance defect of the truncated manifold, computed with a
    /// five-point finite-difference derivative of the *assembled* q so the
    /// check does not reuse the hand-written q₁', q₂ algebra it validates.
    fn residual(m: &ModelParams, u: f64) -> f64 {
        let h = 1e-3;
        let q = |x: f64| slow_manifold(m, x, 2).unwrap();
        let qp = (-q(u + 2.0 * h) + 8.0 * q(u + h) - 8.0 * q(u - h) + q(u - 2.0 * h))
            / (12.0 * h);
        let q0 = critical_manifold_q0(m, u);
        let w = slow_drift_numerator(m, u);
        m.epsilon * q(u) * w - u * qp * (q0 - q(u))
    }

    #[test]
    fn invariance_residual_shrinks_at_third_order() {
        for &u in &[0.15, 0.6, 0.9] {
            let r1 = residual(&p(0.3, 1e-2), u).abs();
            let r2 = residual(&p(0.3, 5e-3), u).abs();
            let ratio = r1 / r2;
            assert!(
                (6.0..10.0).contains(&ratio),
                "residual ratio {ratio} at u = {u} (r1 = {r1:e}, r2 = {r2:e})"
            );
        }
    }
}
