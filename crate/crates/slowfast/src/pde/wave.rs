//! Traveling-wave analysis for the 1D reaction-diffusion system.
//!
//! In the co-moving frame ξ = x − ct, profiles (φ, ψ) satisfy
//!
//! ```text
//! φ'' + cφ' + f(φ, ψ)     = 0
//! dψ'' + cψ' + ε·g(φ, ψ) = 0
//! ```
//!
//! With p = −φ', q = −ψ' this becomes a four-dimensional first-order
//! system in (φ, p, ψ, q):
//!
//! ```text
//! φ' = −p
//! p' = −cp + f(φ, ψ)
//! ψ' = −q
//! q' = (−cq + ε·g(φ, ψ)) / d
//! ```
//!
//! Invasion fronts connect the prey-only state Q₁ = (1, 0, 0, 0) to the
//! coexistence state Q* = (u*, 0, v*, 0).  Requiring the eigenvalues of
//! the linearization at Q₁ to be real (so the wave does not spiral into
//! negative densities) yields the minimum invasion speed; the eigenvalue
//! structure at Q* then distinguishes monotone, non-monotone and periodic
//! wave profiles.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinetics::{coexistence_equilibrium, jacobian};
use crate::params::ModelParams;

/// Predicted profile shape of the invasion front.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WaveType {
    /// All eigenvalues at Q* real: the profile relaxes monotonically.
    Monotone,
    /// Complex approach to a *stable* coexistence state: decaying
    /// oscillations behind the front.
    NonMonotone,
    /// Complex eigenvalues with the coexistence state unstable: the wake
    /// carries persistent periodic oscillations.
    Periodic,
}

impl WaveType {
    pub fn label(self) -> &'static str {
        match self {
            WaveType::Monotone => "monotone",
            WaveType::NonMonotone => "non_monotone",
            WaveType::Periodic => "periodic",
        }
    }
}

/// Linearization report for a traveling-wave speed `c`.
#[derive(Clone, Debug)]
pub struct TwAnalysis {
    pub c: f64,
    /// Eigenvalues at the prey-only state Q₁, sorted by (re, im).
    pub q1_eigenvalues: [Complex64; 4],
    /// Eigenvalues at the coexistence state Q*, if it exists.
    pub qstar_eigenvalues: Option<[Complex64; 4]>,
    /// Profile prediction; `None` when Q* does not exist.
    pub wave_type: Option<WaveType>,
}

/// Minimum speed of a biologically admissible invasion front,
/// `c_min = [4εd(1−δ−αδ)/(1+α)]^{1/2}`.
///
/// The same value arises as `2·[εd(1/(1+α)−δ)]^{1/2}` — the classical
/// linear-spreading speed — and both forms are evaluated and required to
/// agree to 1e-12 as an internal consistency check.  The speed scales
/// like √ε, so slower predator kinetics slow the invasion.
pub fn tw_min_speed(p: &ModelParams) -> Result<f64> {
    let product = p.delta * (1.0 + p.alpha);
    if product >= 1.0 {
        return Err(Error::InvasionInfeasible { product });
    }
    let c = (4.0 * p.epsilon * p.d * (1.0 - p.delta - p.alpha * p.delta) / (1.0 + p.alpha))
        .sqrt();
    let alt = 2.0 * (p.epsilon * p.d * (1.0 / (1.0 + p.alpha) - p.delta)).sqrt();
    if (c - alt).abs() > 1e-12 * (1.0 + c) {
        return Err(Error::InternalConsistency(format!(
            "minimum-speed forms disagree: {c} vs {alt}"
        )));
    }
    Ok(c)
}

/// Jacobian of the four-dimensional profile system at a homogeneous
/// state `(u0, v0)` for speed `c`.
fn tw_jacobian(p: &ModelParams, c: f64, u0: f64, v0: f64) -> Matrix4<f64> {
    let j = jacobian(p, u0, v0);
    // `jacobian` returns the kinetic rows (f_u, f_v; εg_u, εg_v); the
    // profile system needs the ε-scaled predator row divided by d.
    let (f_u, f_v) = (j[0][0], j[0][1]);
    let (eg_u, eg_v) = (j[1][0], j[1][1]);
    Matrix4::new(
        0.0, -1.0, 0.0, 0.0, //
        f_u, -c, f_v, 0.0, //
        0.0, 0.0, 0.0, -1.0, //
        eg_u / p.d, 0.0, eg_v / p.d, -c / p.d,
    )
}

fn sorted_eigenvalues(m: &Matrix4<f64>) -> [Complex64; 4] {
    let ev = m.complex_eigenvalues();
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (o, e) in out.iter_mut().zip(ev.iter()) {
        *o = Complex64::new(e.re, e.im);
    }
    out.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    out
}

/// Eigenvalue analysis of the profile system at Q₁ and Q* for speed `c`.
///
/// The wave-type rule: if every eigenvalue at Q* is real the profile is
/// monotone; otherwise the complex approach is oscillatory, and whether
/// the oscillations decay (non-monotone front) or persist (periodic
/// wake) is decided by the kinetic stability of the coexistence state —
/// the sign of the kinetic trace f_u(E*).
pub fn tw_eigen_analysis(p: &ModelParams, c: f64) -> Result<TwAnalysis> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "wave speed must be nonnegative and finite, got {c}"
        )));
    }
    if p.d <= 0.0 {
        return Err(Error::InvalidInput(
            "traveling-wave analysis requires a positive predator diffusivity".to_string(),
        ));
    }
    let q1_eigenvalues = sorted_eigenvalues(&tw_jacobian(p, c, 1.0, 0.0));
    let (qstar_eigenvalues, wave_type) = match coexistence_equilibrium(p) {
        None => (None, None),
        Some((us, vs)) => {
            let ev = sorted_eigenvalues(&tw_jacobian(p, c, us, vs));
            let scale = ev.iter().map(|e| e.norm()).fold(1.0f64, f64::max);
            let all_real = ev.iter().all(|e| e.im.abs() <= 1e-9 * scale);
            let kind = if all_real {
                WaveType::Monotone
            } else {
                let trace = jacobian(p, us, vs)[0][0];
                if trace < 0.0 {
                    WaveType::NonMonotone
                } else {
                    WaveType::Periodic
                }
            };
            (Some(ev), Some(kind))
        }
    };
    Ok(TwAnalysis {
        c,
        q1_eigenvalues,
        qstar_eigenvalues,
        wave_type,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(delta: f64, epsilon: f64) -> ModelParams {
        ModelParams::new(0.5, 0.22, 3.0, delta, epsilon, 1.0).unwrap()
    }

    #[test]
    fn minimum_speed_matches_reference_values() {
        assert!((tw_min_speed(&params(0.38, 1.0)).unwrap() - 1.070_825_2).abs() < 1e-6);
        assert!((tw_min_speed(&params(0.3, 1.0)).unwrap() - 1.211_060_1).abs() < 1e-6);
        assert!((tw_min_speed(&params(0.6, 1.0)).unwrap() - 0.516_397_78).abs() < 1e-6);
    }

    #[test]
    fn minimum_speed_scales_exactly_like_sqrt_epsilon() {
        let c1 = tw_min_speed(&params(0.3, 1.0)).unwrap();
        let c4 = tw_min_speed(&params(0.3, 0.25)).unwrap();
        assert!((c4 - 0.5 * c1).abs() < 1e-14);
        // And vanishes with d.
        let p0 = ModelParams::new(0.5, 0.22, 3.0, 0.3, 1.0, 0.0).unwrap();
        assert_eq!(tw_min_speed(&p0).unwrap(), 0.0);
    }

    #[test]
    fn infeasible_invasion_is_rejected_with_the_offending_product() {
        match tw_min_speed(&params(0.7, 1.0)) {
            Err(Error::InvasionInfeasible { product }) => {
                assert!((product - 1.05).abs() < 1e-12);
            }
            other => panic!("expected infeasible invasion, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn prey_only_eigenvalues_match_the_block_structure() {
        // At Q₁ the predator block decouples (g_u = 0 there), so the 4×4
        // spectrum is the union of two quadratic spectra:
        //   λ² + cλ − γ(1+β) = 0          (prey block)
        //   λ² + (c/d)λ + (ε/d)·g_v(1,0) = 0   (predator block)
        let p = params(0.3, 1.0);
        let c = tw_min_speed(&p).unwrap();
        let an = tw_eigen_analysis(&p, c).unwrap();
        let g = p.gamma * (1.0 + p.beta);
        let prey = [
            (-c - (c * c + 4.0 * g).sqrt()) / 2.0,
            (-c + (c * c + 4.0 * g).sqrt()) / 2.0,
        ];
        // At c = c_min the predator block has a double real root −c/(2d).
        let pred = -c / (2.0 * p.d);
        let mut want = vec![prey[0], pred, pred, prey[1]];
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (e, w) in an.q1_eigenvalues.iter().zip(&want) {
            assert!(e.im.abs() < 1e-6, "unexpected complex eigenvalue {e}");
            assert!((e.re - w).abs() < 1e-6, "eigenvalue {} vs {}", e.re, w);
        }
    }

    #[test]
    fn damped_oscillatory_regime_is_classified_non_monotone() {
        let p = params(0.38, 1.0);
        let c = tw_min_speed(&p).unwrap();
        let an = tw_eigen_analysis(&p, c).unwrap();
        assert_eq!(an.wave_type, Some(WaveType::NonMonotone));
        let ev = an.qstar_eigenvalues.unwrap();
        // Complex pair near −1.22 ± 0.423i.
        let neg_pair: Vec<_> = ev.iter().filter(|e| e.re < -1.0 && e.im != 0.0).collect();
        assert_eq!(neg_pair.len(), 2);
        assert!((neg_pair[0].re - (-1.222_794)).abs() < 1e-3);
        assert!((neg_pair[0].im.abs() - 0.422_745).abs() < 1e-3);
    }

    #[test]
    fn unstable_oscillatory_regime_is_classified_periodic() {
        let p = params(0.3, 1.0);
        let c = tw_min_speed(&p).unwrap();
        let an = tw_eigen_analysis(&p, c).unwrap();
        assert_eq!(an.wave_type, Some(WaveType::Periodic));
        let ev = an.qstar_eigenvalues.unwrap();
        let pos_pair: Vec<_> = ev
            .iter()
            .filter(|e| e.re > 0.0 && e.im != 0.0)
            .collect();
        assert_eq!(pos_pair.len(), 2);
        assert!((pos_pair[0].re - 0.033_539).abs() < 1e-3);
        assert!((pos_pair[0].im.abs() - 0.405_457).abs() < 1e-3);
    }

    #[test]
    fn strongly_damped_regime_is_classified_monotone() {
        let p = params(0.6, 1.0);
        let c = tw_min_speed(&p).unwrap();
        let an = tw_eigen_analysis(&p, c).unwrap();
        assert_eq!(an.wave_type, Some(WaveType::Monotone));
        let ev = an.qstar_eigenvalues.unwrap();
        assert!(ev.iter().all(|e| e.im.abs() < 1e-9));
    }

    #[test]
    fn complexity_boundary_sits_between_052_and_053() {
        let c52 = tw_min_speed(&params(0.52, 1.0)).unwrap();
        let a52 = tw_eigen_analysis(&params(0.52, 1.0), c52).unwrap();
        assert_ne!(a52.wave_type, Some(WaveType::Monotone));
        let c53 = tw_min_speed(&params(0.53, 1.0)).unwrap();
        let a53 = tw_eigen_analysis(&params(0.53, 1.0), c53).unwrap();
        assert_eq!(a53.wave_type, Some(WaveType::Monotone));
    }

    #[test]
    fn missing_coexistence_state_reports_q1_only() {
        // δ(1+α) < 1 fails at δ=0.7, but the Q₁ analysis is still valid
        // for a caller-supplied speed.
        let p = params(0.7, 1.0);
        let an = tw_eigen_analysis(&p, 1.0).unwrap();
        assert!(an.qstar_eigenvalues.is_none());
        assert!(an.wave_type.is_none());
        assert!(tw_eigen_analysis(&p, -1.0).is_err());
        assert!(tw_eigen_analysis(&p, f64::NAN).is_err());
    }
}
