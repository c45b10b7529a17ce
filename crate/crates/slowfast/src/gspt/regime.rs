//! Oscillation-regime classification in the (δ, ε) plane.
//!
//! For fixed kinetics and small ε the mortality axis splits into four
//! bands, separated by the singular-Hopf curve δ_H(√ε), the maximal-canard
//! curve δ_c(√ε), and the (simulation-derived) onset of full relaxation
//! δ_ro:
//!
//! * **I**   δ > δ_H — coexistence is a stable focus, no sustained cycles;
//! * **II**  δ_c < δ ≤ δ_H — small canard cycles without head;
//! * **III** δ_ro < δ ≤ δ_c — canard explosion, cycles with head;
//! * **IV**  δ ≤ δ_ro — relaxation oscillation hugging the axis.
//!
//! δ_ro has no closed form; it is located by cycle continuation in the
//! simulation layer and injected here. Without it, III and IV cannot be
//! told apart analytically and are reported as a merged band.

use crate::error::{Error, Result};
use crate::gspt::melnikov::{maximal_canard_delta, melnikov, singular_hopf_delta};
use crate::gspt::normal_form::normal_form;
use crate::kinetics::{coexistence_equilibrium, fold_point};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Band I: stable coexistence, perturbations spiral in.
    StableCoexistence,
    /// Band II: small canard cycles without head.
    CanardCycles,
    /// Band III: canard explosion, cycles with head.
    CanardExplosion,
    /// Band IV: relaxation oscillation along the extinction axis.
    RelaxationOscillation,
    /// Bands III–IV merged (no simulation-derived boundary available).
    CanardOrRelaxation,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::StableCoexistence => "I",
            Regime::CanardCycles => "II",
            Regime::CanardExplosion => "III",
            Regime::RelaxationOscillation => "IV",
            Regime::CanardOrRelaxation => "III∪IV",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RegimeReport {
    pub regime: Regime,
    /// Singular-Hopf boundary at this ε.
    pub delta_h: f64,
    /// Maximal-canard boundary at this ε.
    pub delta_c: f64,
    /// Relaxation-onset boundary, when one was supplied.
    pub delta_ro: Option<f64>,
}

/// Classify the regime of `p` at its own (δ, ε). `delta_ro`, if given, is
/// the simulation-located onset of relaxation used to split bands III/IV.
pub fn classify_regime(p: &ModelParams, delta_ro: Option<f64>) -> Result<RegimeReport> {
    if coexistence_equilibrium(p).is_none() {
        return Err(Error::NotApplicable(
            "no coexistence equilibrium at this mortality; the regime bands \
             are defined only below the feasibility threshold"
                .into(),
        ));
    }
    let nf = normal_form(p)?;
    let m = melnikov(&nf)?;
    let delta_h = singular_hopf_delta(&nf, p.epsilon);
    let delta_c = maximal_canard_delta(&nf, &m, p.epsilon)?;

    let regime = if p.delta > delta_h {
        Regime::StableCoexistence
    } else if p.delta > delta_c {
        Regime::CanardCycles
    } else {
        match delta_ro {
            Some(ro) if p.delta > ro => Regime::CanardExplosion,
            Some(_) => Regime::RelaxationOscillation,
            None => Regime::CanardOrRelaxation,
        }
    };
    Ok(RegimeReport {
        regime,
        delta_h,
        delta_c,
        delta_ro,
    })
}

/// Whether the geometry supports a relaxation oscillation at all: the
/// coexistence state must sit on the repelling branch, left of the fold.
pub fn relaxation_feasible(p: &ModelParams) -> Result<bool> {
    let (u_star, _) = coexistence_equilibrium(p).ok_or_else(|| {
        Error::NotApplicable("no coexistence equilibrium at this mortality".into())
    })?;
    let geom = fold_point(p)?;
    Ok(u_star < geom.fold_u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(delta: f64, epsilon: f64) -> ModelParams {
        ModelParams::new(0.5, 0.22, 3.0, delta, epsilon, 1.0).unwrap()
    }

    #[test]
    fn bands_at_reference_epsilon() {
        let ro = Some(0.376167);
        assert_eq!(
            classify_regime(&p(0.40, 0.01), ro).unwrap().regime,
            Regime::StableCoexistence
        );
        assert_eq!(
            classify_regime(&p(0.3764, 0.01), ro).unwrap().regime,
            Regime::CanardCycles
        );
        assert_eq!(
            classify_regime(&p(0.3762, 0.01), ro).unwrap().regime,
            Regime::CanardCycles
        );
        assert_eq!(
            classify_regime(&p(0.37617, 0.01), ro).unwrap().regime,
            Regime::CanardExplosion
        );
        assert_eq!(
            classify_regime(&p(0.376165, 0.01), ro).unwrap().regime,
            Regime::RelaxationOscillation
        );
        assert_eq!(
            classify_regime(&p(0.36, 0.01), ro).unwrap().regime,
            Regime::RelaxationOscillation
        );
    }

    #[test]
    fn merged_band_without_a_simulation_boundary() {
        let r = classify_regime(&p(0.36, 0.01), None).unwrap();
        assert_eq!(r.regime, Regime::CanardOrRelaxation);
        assert_eq!(r.regime.label(), "III∪IV");
    }

    #[test]
    fn report_carries_the_boundaries() {
        let r = classify_regime(&p(0.36, 0.01), None).unwrap();
        assert!((r.delta_h - 0.376869467904).abs() < 1e-10);
        assert!((r.delta_c - 0.376177232848).abs() < 1e-10);
        assert!(r.delta_ro.is_none());
    }

    #[test]
    fn infeasible_coexistence_is_not_classified() {
        assert!(matches!(
            classify_regime(&p(0.7, 0.01), None),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn relaxation_feasibility_tracks_the_fold() {
        assert!(relaxation_feasible(&p(0.3, 0.01)).unwrap());
        assert!(!relaxation_feasible(&p(0.55, 0.01)).unwrap());
        assert!(matches!(
            relaxation_feasible(&p(0.7, 0.01)),
            Err(Error::NotApplicable(_))
        ));
    }
}
