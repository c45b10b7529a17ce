//! Model parameters and their validation.

use crate::error::{Error, Result};

/// The five dimensionless kinetic parameters plus the diffusivity ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Inverse saturation level of the functional response (> 0).
    pub alpha: f64,
    /// Allee parameter; (0,1) is the weak-Allee range, negative values make
    /// the effect strong. Accepted outside (0,1) but labeled accordingly.
    pub beta: f64,
    /// Characteristic prey growth rate (> 0).
    pub gamma: f64,
    /// Predator mortality (> 0).
    pub delta: f64,
    /// Timescale ratio between predator and prey dynamics (0 < ε ≤ 1).
    pub epsilon: f64,
    /// Predator/prey diffusivity ratio (≥ 0); only spatial runs read it.
    pub d: f64,
}

/// Qualitative label for the prey growth term at low density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlleeRegime {
    /// 0 < β < 1: growth is damped but positive at low density.
    Weak,
    /// β < 0: growth is negative below the Allee threshold.
    Strong,
    /// β ≥ 1 (or β = 0): no Allee effect in the usual sense.
    Absent,
}

impl ModelParams {
    pub fn new(
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
        epsilon: f64,
        d: f64,
    ) -> Result<Self> {
        let p = ModelParams {
            alpha,
            beta,
            gamma,
            delta,
            epsilon,
            d,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let all = [
            self.alpha,
            self.beta,
            self.gamma,
            self.delta,
            self.epsilon,
            self.d,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite parameter in {self:?}"
            )));
        }
        if self.alpha <= 0.0 {
            return Err(Error::InvalidInput(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidInput(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if self.delta <= 0.0 {
            return Err(Error::InvalidInput(format!("delta must be > 0, got {}", self.delta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        if self.d < 0.0 {
            return Err(Error::InvalidInput(format!("d must be >= 0, got {}", self.d)));
        }
        Ok(())
    }

    /// Copy with a different mortality; re-validated.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.gamma, delta, self.epsilon, self.d)
    }

    /// Copy with a different timescale ratio; re-validated.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.gamma, self.delta, epsilon, self.d)
    }

    pub fn allee_regime(&self) -> AlleeRegime {
        if self.beta < 0.0 {
            AlleeRegime::Strong
        } else if self.beta > 0.0 && self.beta < 1.0 {
            AlleeRegime::Weak
        } else {
            AlleeRegime::Absent
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelParams {
        ModelParams::new(0.5, 0.22, 3.0, 0.3, 1.0, 1.0).unwrap()
    }

    #[test]
    fn accepts_the_reference_parameter_set() {
        let p = base();
        assert_eq!(p.allee_regime(), AlleeRegime::Weak);
    }

    #[test]
    fn rejects_out_of_range_values() {
        assert!(ModelParams::new(0.0, 0.2, 3.0, 0.3, 1.0, 1.0).is_err());
        assert!(ModelParams::new(0.5, 0.2, -3.0, 0.3, 1.0, 1.0).is_err());
        assert!(ModelParams::new(0.5, 0.2, 3.0, 0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(0.5, 0.2, 3.0, 0.3, 0.0, 1.0).is_err());
        assert!(ModelParams::new(0.5, 0.2, 3.0, 0.3, 1.1, 1.0).is_err());
        assert!(ModelParams::new(0.5, 0.2, 3.0, 0.3, 1.0, -0.5).is_err());
        assert!(ModelParams::new(f64::NAN, 0.2, 3.0, 0.3, 1.0, 1.0).is_err());
    }

    #[test]
    fn labels_allee_regimes() {
        let p = base();
        assert_eq!(p.with_delta(0.3).unwrap().allee_regime(), AlleeRegime::Weak);
        let strong = ModelParams::new(0.5, -0.1, 3.0, 0.3, 1.0, 1.0).unwrap();
        assert_eq!(strong.allee_regime(), AlleeRegime::Strong);
        let absent = ModelParams::new(0.5, 1.2, 3.0, 0.3, 1.0, 1.0).unwrap();
        assert_eq!(absent.allee_regime(), AlleeRegime::Absent);
    }
}
