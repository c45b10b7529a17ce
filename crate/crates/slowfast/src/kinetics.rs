//! Reaction terms, equilibria, stability, and critical-manifold geometry.
//!
//! The kinetics are
//!
//! ```text
//! f(u,v) = γ u (1-u)(u+β) - u v / (1+α u)      (prey)
//! g(u,v) = v ( u/(1+α u) - δ )                 (predator, before the ε factor)
//! ```
//!
//! Three equilibria organize the phase plane: the origin `E₀ = (0,0)`, the
//! prey-only state `E₁ = (1,0)`, and the coexistence state
//! `E* = (u*, v*)` with `u* = δ/(1-αδ)` and `v* = q₀(u*)`, feasible iff
//! `δ(1+α) < 1`. The non-trivial branch of the fast-subsystem nullcline,
//!
//! ```text
//! q₀(u) = γ (1-u)(u+β)(1+α u),
//! ```
//!
//! is the critical manifold of the slow-fast decomposition. Its maximum — the
//! fold point — separates an attracting branch (right) from a repelling one
//! (left); the predator nullcline `u = u*` sweeping across the fold as δ
//! varies is what produces the transcritical (δ_T) and Hopf (δ_H) thresholds
//! computed here.
//!
//! All derivatives are hand-differentiated closed forms; nothing in this
//! module does finite differencing. Exactness near the thresholds matters
//! because downstream canard analytics evaluate these quantities at
//! parameter values where leading terms cancel.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Prey reaction term f(u,v).
pub fn prey_kinetics(p: &ModelParams, u: f64, v: f64) -> f64 {
    p.gamma * u * (1.0 - u) * (u + p.beta) - u * v / (1.0 + p.alpha * u)
}

/// Predator reaction term g(u,v), *without* the timescale factor ε.
pub fn predator_kinetics(p: &ModelParams, u: f64, v: f64) -> f64 {
    v * (u / (1.0 + p.alpha * u) - p.delta)
}

/// Full right-hand side of the kinetic system: `(du/dt, dv/dt) = (f, εg)`.
pub fn reaction_rates(p: &ModelParams, u: f64, v: f64) -> Result<(f64, f64)> {
    if !(u.is_finite() && v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite state (u, v) = ({u}, {v})"
        )));
    }
    Ok((prey_kinetics(p, u, v), p.epsilon * predator_kinetics(p, u, v)))
}

/// The non-trivial branch of the prey nullcline, v = q₀(u).
pub fn critical_manifold_q0(p: &ModelParams, u: f64) -> f64 {
    p.gamma * (1.0 - u) * (u + p.beta) * (1.0 + p.alpha * u)
}

/// dq₀/du.
pub fn q0_prime(p: &ModelParams, u: f64) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    p.gamma * (-3.0 * a * u * u + 2.0 * (a - a * b - 1.0) * u + (1.0 - b + a * b))
}

/// d²q₀/du².
pub fn q0_second(p: &ModelParams, u: f64) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    p.gamma * (-6.0 * a * u + 2.0 * (a - a * b - 1.0))
}

/// Jacobian of `(f, εg)` at an arbitrary state, row-major.
pub fn jacobian(p: &ModelParams, u: f64, v: f64) -> [[f64; 2]; 2] {
    let (a, b, g, dl, e) = (p.alpha, p.beta, p.gamma, p.delta, p.epsilon);
    let s = 1.0 + a * u;
    let f_u = g * (u * (2.0 - 3.0 * u - 2.0 * b) + b) - v / (s * s);
    let f_v = -u / s;
    let g_u = e * v / (s * s);
    let g_v = e * (u / s - dl);
    [[f_u, f_v], [g_u, g_v]]
}

/// Eigenvalues of a real 2×2 matrix.
pub fn eigenvalues_2x2(j: [[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let r = disc.sqrt();
        [
            Complex64::new((tr + r) / 2.0, 0.0),
            Complex64::new((tr - r) / 2.0, 0.0),
        ]
    } else {
        let w = (-disc).sqrt() / 2.0;
        [Complex64::new(tr / 2.0, w), Complex64::new(tr / 2.0, -w)]
    }
}

/// Which equilibrium a report describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    Origin,
    PreyOnly,
    Coexistence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    StableNode,
    StableFocus,
    UnstableNode,
    UnstableFocus,
    Saddle,
    NonHyperbolic,
}

impl Stability {
    pub fn label(self) -> &'static str {
        match self {
            Stability::StableNode => "stable node",
            Stability::StableFocus => "stable focus",
            Stability::UnstableNode => "unstable node",
            Stability::UnstableFocus => "unstable focus",
            Stability::Saddle => "saddle",
            Stability::NonHyperbolic => "non-hyperbolic",
        }
    }
}

/// An eigenvalue real part within this tolerance of zero makes the point
/// non-hyperbolic; keeps Hopf-threshold classification honest.
const HYPERBOLICITY_TOL: f64 = 1e-9;

/// Classify a 2×2 spectrum.
pub fn classify_spectrum(ev: [Complex64; 2]) -> Stability {
    if ev[0].im != 0.0 {
        let re = ev[0].re;
        if re.abs() < HYPERBOLICITY_TOL {
            Stability::NonHyperbolic
        } else if re < 0.0 {
            Stability::StableFocus
        } else {
            Stability::UnstableFocus
        }
    } else {
        let (l1, l2) = (ev[0].re, ev[1].re);
        if l1.abs() < HYPERBOLICITY_TOL || l2.abs() < HYPERBOLICITY_TOL {
            Stability::NonHyperbolic
        } else if l1 * l2 < 0.0 {
            Stability::Saddle
        } else if l1 > 0.0 {
            Stability::UnstableNode
        } else {
            Stability::StableNode
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EquilibriumReport {
    pub u: f64,
    pub v: f64,
    pub kind: EquilibriumKind,
    pub stability: Stability,
    pub eigenvalues: [Complex64; 2],
}

/// `(u*, v*)` when the coexistence state is feasible (`δ(1+α) < 1`).
pub fn coexistence_equilibrium(p: &ModelParams) -> Option<(f64, f64)> {
    if p.delta * (1.0 + p.alpha) >= 1.0 {
        return None;
    }
    let u = p.delta / (1.0 - p.alpha * p.delta);
    Some((u, critical_manifold_q0(p, u)))
}

/// All equilibria of the kinetic system with their linearizations.
pub fn equilibria(p: &ModelParams) -> Vec<EquilibriumReport> {
    let mut out = Vec::with_capacity(3);
    for (u, v, kind) in [
        (0.0, 0.0, EquilibriumKind::Origin),
        (1.0, 0.0, EquilibriumKind::PreyOnly),
    ] {
        let ev = eigenvalues_2x2(jacobian(p, u, v));
        out.push(EquilibriumReport {
            u,
            v,
            kind,
            stability: classify_spectrum(ev),
            eigenvalues: ev,
        });
    }
    if let Some((u, v)) = coexistence_equilibrium(p) {
        let ev = eigenvalues_2x2(jacobian(p, u, v));
        out.push(EquilibriumReport {
            u,
            v,
            kind: EquilibriumKind::Coexistence,
            stability: classify_spectrum(ev),
            eigenvalues: ev,
        });
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct StabilityThresholds {
    /// Transcritical threshold δ_T = 1/(1+α): E₁ is stable for δ > δ_T.
    pub delta_t: f64,
    /// Hopf threshold: E* destabilizes as δ decreases through δ_H.
    pub delta_h: f64,
}

/// Radicand shared by the Hopf-threshold and fold-point formulas.
fn threshold_radicand(alpha: f64, beta: f64) -> f64 {
    1.0 + alpha + alpha * alpha - alpha * beta
        + alpha * alpha * beta
        + alpha * alpha * beta * beta
}

/// Closed-form δ_H.
fn delta_h_formula(alpha: f64, beta: f64) -> Result<f64> {
    let rad = threshold_radicand(alpha, beta);
    if rad < 0.0 {
        return Err(Error::AnalysisDegenerate(format!(
            "Hopf threshold radicand is negative ({rad})"
        )));
    }
    let den = alpha * (-1.0 - alpha + alpha * beta + alpha * alpha * beta);
    if den.abs() < 1e-14 {
        return Err(Error::AnalysisDegenerate(format!(
            "Hopf threshold denominator vanishes for alpha={alpha}, beta={beta}"
        )));
    }
    Ok((1.0 + alpha * alpha * beta - rad.sqrt()) / den)
}

/// Transcritical and Hopf thresholds in δ. The mortality field of `p` is
/// ignored — both thresholds are functions of (α, β) alone, though the
/// cross-validation below exercises γ and ε as well.
///
/// The closed form for δ_H is always checked against a bisection root of
/// trace J(E*) over the feasible δ range; a disagreement beyond 1e-6 means a
/// transcription error somewhere and is reported as such rather than
/// returned.
pub fn stability_thresholds(p: &ModelParams) -> Result<StabilityThresholds> {
    let delta_t = 1.0 / (1.0 + p.alpha);
    let delta_h = delta_h_formula(p.alpha, p.beta)?;

    if delta_h > 0.0 && delta_h < delta_t {
        let trace_at = |delta: f64| -> f64 {
            let q = ModelParams { delta, ..*p };
            let (u, v) = coexistence_equilibrium(&q)
                .expect("delta inside the feasible range");
            let j = jacobian(&q, u, v);
            j[0][0] + j[1][1]
        };
        // Trace is positive for small δ (E* on the repelling branch) and
        // negative near δ_T; bisect the sign change.
        let mut a = delta_t * 1e-9;
        let mut b = delta_t * (1.0 - 1e-9);
        if trace_at(a) > 0.0 && trace_at(b) < 0.0 {
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if trace_at(m) > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
                if b - a < 1e-14 {
                    break;
                }
            }
            let root = 0.5 * (a + b);
            if (root - delta_h).abs() > 1e-6 {
                return Err(Error::InternalConsistency(format!(
                    "closed-form delta_H = {delta_h} but trace root = {root}"
                )));
            }
        } else {
            return Err(Error::InternalConsistency(format!(
                "trace of J at E* does not change sign over (0, {delta_t}) \
                 although delta_H = {delta_h} lies inside"
            )));
        }
    }

    Ok(StabilityThresholds { delta_t, delta_h })
}

/// Geometry of the critical manifold: fold point, transcritical point, and
/// the attracting/repelling branch ranges.
#[derive(Debug, Clone, Copy)]
pub struct CriticalManifoldGeometry {
    pub fold_u: f64,
    pub fold_v: f64,
    /// v-coordinate γβ of the transcritical point on the v-axis.
    pub transcritical_v: f64,
    /// u-interval (fold_u, 1] where the branch v = q₀(u) attracts fast flow.
    pub attracting_range: (f64, f64),
    /// u-interval [0, fold_u) where it repels.
    pub repelling_range: (f64, f64),
}

/// Fold point of the critical manifold (the maximum of q₀ in (0,1)).
///
/// Besides evaluating the closed form, this verifies the defining fold
/// conditions numerically: ∂f/∂u = 0, ∂f/∂v ≠ 0, ∂²f/∂u² ≠ 0 at the fold.
pub fn fold_point(p: &ModelParams) -> Result<CriticalManifoldGeometry> {
    let (a, b) = (p.alpha, p.beta);
    let rad = threshold_radicand(a, b);
    if rad < 0.0 {
        return Err(Error::AnalysisDegenerate(format!(
            "fold-point radicand is negative ({rad})"
        )));
    }
    let u_f = ((a - a * b - 1.0) + rad.sqrt()) / (3.0 * a);
    let v_f = critical_manifold_q0(p, u_f);

    // ∂f/∂u vanishes on the manifold exactly where q₀' does.
    let slope = q0_prime(p, u_f);
    if slope.abs() > 1e-9 * (1.0 + p.gamma) {
        return Err(Error::InternalConsistency(format!(
            "q0'(u_f) = {slope} is not zero at the computed fold"
        )));
    }
    let s = 1.0 + a * u_f;
    let f_v = -u_f / s;
    let f_uu = p.gamma * (2.0 - 6.0 * u_f - 2.0 * b) + 2.0 * a * v_f / (s * s * s);
    if f_v.abs() < 1e-12 || f_uu.abs() < 1e-9 {
        return Err(Error::AnalysisDegenerate(format!(
            "fold is degenerate: f_v = {f_v}, f_uu = {f_uu}"
        )));
    }

    Ok(CriticalManifoldGeometry {
        fold_u: u_f,
        fold_v: v_f,
        transcritical_v: p.gamma * p.beta,
        attracting_range: (u_f, 1.0),
        repelling_range: (0.0, u_f),
    })
}

/// Sign of the fast flow f(u, v_const) at fixed predator density: +1 grows
/// prey (moves right along the fast fiber), −1 shrinks it, 0 on the
/// critical manifold.
pub fn layer_flow_direction(p: &ModelParams, u: f64, v_const: f64) -> i8 {
    let f = prey_kinetics(p, u, v_const);
    let scale = 1e-12 * (1.0 + p.gamma + v_const.abs());
    if f.abs() <= scale {
        0
    } else if f > 0.0 {
        1
    } else {
        -1
    }
}
