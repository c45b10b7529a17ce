//! Entry–exit (delay of stability loss) along the extinct-prey axis, and
//! the singular relaxation orbit built from it.
//!
//! The v-axis is invariant: with u = 0 the predator decays and the prey
//! linearization rate is γβ − v. A trajectory entering near the axis at
//! v₁ > γβ is first attracted (rate negative), then — after v drifts below
//! γβ — repelled; it leaves the axis only once the accumulated contraction
//! has been paid back. Because the slow drift on the axis is -δv, mortality
//! cancels from the balance and the exit height v₀ solves
//!
//! ```text
//! (v₁ − v₀) − γβ ln(v₁/v₀) = 0,   0 < v₀ < γβ < v₁ ,
//! ```
//!
//! which has exactly one root in (0, γβ) since the left side is strictly
//! increasing there. The singular relaxation cycle then consists of the
//! axis segment [v₀, v₁], two horizontal fast jumps, and the attracting
//! branch of the critical manifold between the landing point and the fold.

use crate::error::{Error, Result};
use crate::kinetics::{critical_manifold_q0, fold_point};
use crate::params::ModelParams;

/// The entry–exit balance ρ(v₀) = (v₁ − v₀) − γβ ln(v₁/v₀). Zero exactly at
/// the matched entry/exit pair.
pub fn entry_exit_integral(p: &ModelParams, v0: f64, v1: f64) -> f64 {
    (v1 - v0) - p.gamma * p.beta * (v1 / v0).ln()
}

/// Exit height v₀ for a trajectory entering the axis at height v₁.
pub fn exit_height(p: &ModelParams, v1: f64) -> Result<f64> {
    let gb = p.gamma * p.beta;
    if !(gb > 0.0) {
        return Err(Error::NoExit(format!(
            "the axis has no attracting segment when gamma*beta = {gb}"
        )));
    }
    if !(v1 > gb) {
        return Err(Error::NoExit(format!(
            "entry height v1 = {v1} does not exceed the transcritical height {gb}"
        )));
    }
    if !v1.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite entry height {v1}")));
    }

    // ρ is strictly increasing on (0, γβ), negative near 0 and positive at
    // γβ; shrink the lower end until the bracket is genuine, then bisect.
    let mut hi = gb * (1.0 - 1e-13);
    let mut lo = gb * 0.5;
    let mut guard = 0;
    while entry_exit_integral(p, lo, v1) >= 0.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 2000 {
            return Err(Error::InternalConsistency(
                "failed to bracket the entry-exit root".into(),
            ));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if entry_exit_integral(p, mid, v1) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < f64::EPSILON * gb {
            break;
        }
    }
    let v0 = 0.5 * (lo + hi);
    let residual = entry_exit_integral(p, v0, v1);
    if residual.abs() > 1e-12 * (1.0 + v1) {
        return Err(Error::InternalConsistency(format!(
            "entry-exit bisection left residual {residual}"
        )));
    }
    Ok(v0)
}

/// u-coordinate of the attracting-branch point at height v: the root of
/// q₀(u) = v with u > fold. This is where a fast fiber starting on the
/// v-axis at height v lands.
pub fn attracting_branch_u(p: &ModelParams, v: f64) -> Result<f64> {
    let geom = fold_point(p)?;
    if !(0.0..=geom.fold_v).contains(&v) {
        return Err(Error::InvalidInput(format!(
            "height {v} is outside the attracting branch range [0, {}]",
            geom.fold_v
        )));
    }
    // q₀ decreases strictly from v_fold to 0 on [u_fold, 1].
    let (mut lo, mut hi) = (geom.fold_u, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if critical_manifold_q0(p, mid) > v {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The ε → 0 relaxation cycle: axis segment, two fast jumps, and the
/// attracting-branch segment, described by its corner data.
#[derive(Debug, Clone, Copy)]
pub struct SingularOrbit {
    /// Top of the axis segment (= height of the jump off the fold).
    pub v1: f64,
    /// Exit height where the orbit leaves the axis.
    pub v0: f64,
    pub fold_u: f64,
    pub fold_v: f64,
    /// Where the fast fiber from (0, v₀) lands on the attracting branch.
    pub landing_u: f64,
}

/// Construct the singular relaxation orbit. The jump-off height defaults to
/// the fold height; passing `entry_v` overrides it (the orbit is then the
/// one entering the axis at that height instead).
pub fn singular_orbit(p: &ModelParams, entry_v: Option<f64>) -> Result<SingularOrbit> {
    let geom = fold_point(p)?;
    let v1 = entry_v.unwrap_or(geom.fold_v);
    let v0 = exit_height(p, v1)?;
    let landing_u = attracting_branch_u(p, v0)?;
    Ok(SingularOrbit {
        v1,
        v0,
        fold_u: geom.fold_u,
        fold_v: geom.fold_v,
        landing_u,
    })
}
