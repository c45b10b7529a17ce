//! Melnikov distance along the maximal canard and the resulting small-ε
//! bifurcation curves.
//!
//! After blowing up the canard point, the separation between the attracting
//! and repelling slow manifolds — and the sensitivity of that separation to
//! the mortality parameter — reduce to Gaussian integrals
//!
//! ```text
//! d_r = e ∫ exp(-A₄ t²) (A₁ t⁴ + A₂ t² + A₃) dt = e (3A₁/(4A₄²) + A₂/(2A₄) + A₃) √(π/A₄),
//! d_λ = e A₅ √(π/A₄),
//! ```
//!
//! with the A's algebraic combinations of the normal-form coefficients. The
//! maximal-canard curve follows from d_r + d_λ·(δ - δ*)/ε = 0:
//!
//! ```text
//! δ_c(√ε) = δ* - (d_r / d_λ) ε + O(ε^{3/2}),
//! ```
//!
//! and the singular-Hopf curve from the linear part of the same expansion.
//! For these kinetics a₁ + a₅ = 0, so the Hopf curve has no ε-linear term;
//! that is not an approximation error — the predator equation's trace
//! contribution at E* vanishes identically, so the Hopf locus of the full
//! system really is ε-independent.

use crate::error::{Error, Result};
use crate::gspt::normal_form::NormalFormCoefficients;

/// Coefficients of the Melnikov integrand/prefactors. `a1..a3` weight the
/// quartic Gaussian integral for d_r, `a4` is the Gaussian decay rate, `a5`
/// the δ-sensitivity weight for d_λ.
#[derive(Debug, Clone, Copy)]
pub struct MelnikovCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct MelnikovReport {
    pub coefficients: MelnikovCoefficients,
    /// Parameter-independent part of the manifold separation.
    pub d_r: f64,
    /// Sensitivity of the separation to (δ - δ*)/ε.
    pub d_lambda: f64,
}

/// Assemble the integrand coefficients from the normal form.
pub fn melnikov_coefficients(nf: &NormalFormCoefficients) -> Result<MelnikovCoefficients> {
    let (b1, b2, b3, b4) = (nf.b1, nf.b2, nf.b3, nf.b4);
    let (a1, a2, a3, a4, a5) = (nf.a1, nf.a2, nf.a3, nf.a4, nf.a5);
    let c1 = a3 * b3 - a2 * b2 * b3 / b1;
    let c2 = a1 * b3 + a2 * b3 * b3 / (2.0 * b2) - a4 * b1 * b3 / (2.0 * b2) - a5 * b3 / 2.0;
    let c3 = a5 * b1 * b3 * b3 / (4.0 * b2 * b2);
    let c4 = 2.0 * b2 * b2 / (b1 * b3);
    let c5 = b1 * b3 * b4 / (2.0 * b2);
    if !(c4 > 0.0) {
        return Err(Error::AnalysisDegenerate(format!(
            "Gaussian decay rate {c4} is not positive"
        )));
    }
    Ok(MelnikovCoefficients {
        a1: c1,
        a2: c2,
        a3: c3,
        a4: c4,
        a5: c5,
    })
}

/// Closed-form values of the two Melnikov distances.
pub fn melnikov_distances(c: &MelnikovCoefficients) -> Result<(f64, f64)> {
    if !(c.a4 > 0.0) {
        return Err(Error::AnalysisDegenerate(format!(
            "Gaussian decay rate {} is not positive",
            c.a4
        )));
    }
    let root = (std::f64::consts::PI / c.a4).sqrt();
    let e = std::f64::consts::E;
    let d_r = e * (3.0 * c.a1 / (4.0 * c.a4 * c.a4) + c.a2 / (2.0 * c.a4) + c.a3) * root;
    let d_lambda = e * c.a5 * root;
    Ok((d_r, d_lambda))
}

/// Full Melnikov analysis of a canard point.
pub fn melnikov(nf: &NormalFormCoefficients) -> Result<MelnikovReport> {
    let coefficients = melnikov_coefficients(nf)?;
    let (d_r, d_lambda) = melnikov_distances(&coefficients)?;
    Ok(MelnikovReport {
        coefficients,
        d_r,
        d_lambda,
    })
}

/// Mortality value of the maximal canard at timescale separation ε.
pub fn maximal_canard_delta(
    nf: &NormalFormCoefficients,
    report: &MelnikovReport,
    epsilon: f64,
) -> Result<f64> {
    if report.d_lambda.abs() < 1e-300 {
        return Err(Error::AnalysisDegenerate(
            "Melnikov distance has no parameter sensitivity (d_lambda = 0)".into(),
        ));
    }
    Ok(nf.delta_star - report.d_r / report.d_lambda * epsilon)
}

/// Mortality value of the singular Hopf bifurcation at timescale
/// separation ε.
pub fn singular_hopf_delta(nf: &NormalFormCoefficients, epsilon: f64) -> f64 {
    nf.delta_star - nf.b3 * (nf.a1 + nf.a5) / (2.0 * nf.b2 * nf.b4) * epsilon
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gspt::normal_form::normal_form;
    use crate::params::ModelParams;

    fn reference() -> (NormalFormCoefficients, MelnikovReport) {
        let p = ModelParams::new(0.5, 0.22, 3.0, 0.3, 0.01, 1.0).unwrap();
        let nf = normal_form(&p).unwrap();
        let m = melnikov(&nf).unwrap();
        (nf, m)
    }

    #[test]
    fn reference_coefficients() {
        let (_, m) = reference();
        let c = m.coefficients;
        assert!((c.a1 - (-0.7660114173)).abs() < 1e-8);
        assert!((c.a2 - (-0.3322039003)).abs() < 1e-8);
        assert!(c.a3.abs() < 1e-14);
        assert!((c.a4 - 12.97545183).abs() < 1e-6);
        assert!((c.a5 - (-0.2342207282)).abs() < 1e-8);
        assert!(c.a4 > 0.0);
    }

    #[test]
    fn reference_canard_curve() {
        let (nf, m) = reference();
        let slope = m.d_r / m.d_lambda;
        assert!((slope - 0.06922350562).abs() < 1e-8);
        let dc = maximal_canard_delta(&nf, &m, 0.01).unwrap();
        assert!((dc - 0.376177232848).abs() < 1e-10);
    }

    #[test]
    fn curves_coincide_at_the_singular_limit() {
        let (nf, m) = reference();
        let dc0 = maximal_canard_delta(&nf, &m, 0.0).unwrap();
        let dh0 = singular_hopf_delta(&nf, 0.0);
        assert!((dc0 - dh0).abs() < 1e-12);
        assert!((dc0 - nf.delta_star).abs() < 1e-15);
    }

    #[test]
    fn hopf_curve_is_flat_for_these_kinetics() {
        let (nf, _) = reference();
        assert_eq!(singular_hopf_delta(&nf, 0.0), singular_hopf_delta(&nf, 0.04));
    }

    #[test]
    fn canard_lies_below_the_hopf_curve() {
        let (nf, m) = reference();
        for &eps in &[1e-3, 5e-3, 1e-2, 2e-2] {
            let dc = maximal_canard_delta(&nf, &m, eps).unwrap();
            assert!(dc < singular_hopf_delta(&nf, eps));
        }
    }

    #[test]
    fn pure_constant_integrand_reduces_to_ratio_of_weights() {
        let c = MelnikovCoefficients {
            a1: 0.0,
            a2: 0.0,
            a3: 0.7,
            a4: 4.2,
            a5: -1.3,
        };
        let (d_r, d_lambda) = melnikov_distances(&c).unwrap();
        assert!((d_r / d_lambda - 0.7 / (-1.3)).abs() < 1e-14);
    }

    /// Adaptive Simpson quadrature, used only to cross-check the closed-form
    /// Gaussian moments against an integral computed a completely different
    /// way.
    fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        fn s<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn rec<F: Fn(f64) -> f64>(
            f: &F,
            a: f64,
            b: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let left = s(f, a, m);
            let right = s(f, m, b);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, left, tol / 2.0, depth - 1)
                    + rec(f, m, b, right, tol / 2.0, depth - 1)
            }
        }
        rec(&f, a, b, s(&f, a, b), tol, depth)
    }

    #[test]
    fn closed_form_matches_quadrature_on_random_coefficients() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let c = MelnikovCoefficients {
                a1: rng.gen_range(-2.0..2.0),
                a2: rng.gen_range(-2.0..2.0),
                a3: rng.gen_range(-2.0..2.0),
                a4: rng.gen_range(0.5..20.0),
                a5: rng.gen_range(-2.0..2.0),
            };
            let (d_r, _) = melnikov_distances(&c).unwrap();
            let lim = 20.0 / c.a4.sqrt();
            let integrand = move |t: f64| {
                (-c.a4 * t * t).exp() * (c.a1 * t.powi(4) + c.a2 * t * t + c.a3)
            };
            let quad = std::f64::consts::E * simpson(integrand, -lim, lim, 1e-13, 40);
            assert!(
                (d_r - quad).abs() <= 1e-8 * (1.0 + d_r.abs()),
                "closed form {d_r} vs quadrature {quad} for {c:?}"
            );
        }
    }

    #[test]
    fn rejects_nonpositive_decay_rate() {
        let c = MelnikovCoefficients {
            a1: 0.0,
            a2: 0.0,
            a3: 1.0,
            a4: -1.0,
            a5: 1.0,
        };
        assert!(melnikov_distances(&c).is_err());
    }
}
