//! Invasion-front tracking for 1D runs: level-crossing positions per
//! snapshot and a least-squares speed estimate.
//!
//! The front is the *rightmost* crossing of the chosen level — the wake
//! behind an invasion front is often oscillatory and crosses the level
//! many times, but the leading edge is unique.

use crate::error::{Error, Result};
use crate::pde::field::Field;

/// Which density a measurement refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Species {
    U,
    V,
}

/// Level-crossing trace with a fitted propagation speed.
#[derive(Clone, Debug)]
pub struct FrontRecord {
    /// `(t, x_front)` samples, one per snapshot with a crossing.
    pub samples: Vec<(f64, f64)>,
    /// Slope of the least-squares line through the last half of the
    /// samples.
    pub speed: f64,
    /// Root-mean-square deviation of the fitted samples from the line.
    pub residual: f64,
}

/// Rightmost position where the species profile crosses `level`
/// (linear interpolation between cell centers), or `None` when the
/// profile never reaches the level or exceeds it in the last cell.
pub fn front_position(field: &Field, species: Species, level: f64) -> Option<f64> {
    let w = match species {
        Species::U => &field.u,
        Species::V => &field.v,
    };
    let i = w.iter().rposition(|x| *x >= level)?;
    if i + 1 == w.len() {
        return None;
    }
    // w[i] ≥ level > w[i+1], so the denominator is positive.
    let frac = (w[i] - level) / (w[i] - w[i + 1]);
    Some(field.cell_x(i) + frac * field.dx)
}

/// Fits a propagation speed to the front positions of a snapshot
/// sequence.  The line goes through the last half of the recorded
/// samples (the early transient is not representative), and at least 5
/// samples must land in that window.
pub fn measure_front_speed(
    snapshots: &[Field],
    species: Species,
    level: f64,
) -> Result<FrontRecord> {
    if !(level.is_finite() && level > 0.0) {
        return Err(Error::InvalidInput(format!(
            "crossing level must be positive and finite, got {level}"
        )));
    }
    let mut samples = Vec::new();
    for f in snapshots {
        if f.dims != 1 {
            return Err(Error::InvalidInput(
                "front tracking expects 1D snapshots".to_string(),
            ));
        }
        if let Some(x) = front_position(f, species, level) {
            samples.push((f.t, x));
        }
    }
    let fit = &samples[samples.len() / 2..];
    if fit.len() < 5 {
        return Err(Error::FrontNotFound(format!(
            "only {} usable crossings in the fit window (need 5)",
            fit.len()
        )));
    }
    let n = fit.len() as f64;
    let (mut st, mut sx) = (0.0, 0.0);
    for (t, x) in fit {
        st += t;
        sx += x;
    }
    let (tbar, xbar) = (st / n, sx / n);
    let (mut stt, mut stx) = (0.0, 0.0);
    for (t, x) in fit {
        stt += (t - tbar) * (t - tbar);
        stx += (t - tbar) * (x - xbar);
    }
    if stt == 0.0 {
        return Err(Error::FrontNotFound(
            "front samples share a single time stamp".to_string(),
        ));
    }
    let speed = stx / stt;
    let mut ss = 0.0;
    for (t, x) in fit {
        let r = x - xbar - speed * (t - tbar);
        ss += r * r;
    }
    let residual = (ss / n).sqrt();
    Ok(FrontRecord {
        samples,
        speed,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModelParams;
    use crate::pde::field::{make_initial_condition, GridSpec, InitialCondition, StepInit};
    use crate::pde::stepper::simulate;

    fn ramp_field(t: f64, x0: f64) -> Field {
        // u falls linearly from 1 to 0 between x0 and x0 + 10.
        let grid = GridSpec::one_d(200, 1.0).unwrap();
        let mut f = Field::zeros(&grid).unwrap();
        f.t = t;
        for i in 0..f.nx {
            let x = f.cell_x(i);
            f.u[i] = ((x0 + 10.0 - x) / 10.0).clamp(0.0, 1.0);
        }
        f
    }

    #[test]
    fn crossing_position_is_interpolated_between_cells() {
        let f = ramp_field(0.0, 50.0);
        // u = 0.5 exactly at x = 55.
        let x = front_position(&f, Species::U, 0.5).unwrap();
        assert!((x - 55.0).abs() < 1e-9, "got {x}");
    }

    #[test]
    fn rightmost_crossing_wins_when_the_wake_oscillates() {
        let grid = GridSpec::one_d(100, 1.0).unwrap();
        let mut f = Field::zeros(&grid).unwrap();
        for i in 0..f.nx {
            let x = f.cell_x(i);
            // Oscillatory wake for x < 60, decaying tail beyond.
            f.u[i] = if x < 60.0 {
                0.5 + 0.4 * (x).sin()
            } else {
                0.8 * (-(x - 60.0) / 5.0).exp()
            };
        }
        let x = front_position(&f, Species::U, 0.4).unwrap();
        assert!(x > 60.0, "picked a wake crossing at {x}");
    }

    #[test]
    fn missing_or_saturated_fronts_are_detected() {
        let grid = GridSpec::one_d(50, 1.0).unwrap();
        let low = Field::homogeneous(&grid, 0.1, 0.0).unwrap();
        assert!(front_position(&low, Species::U, 0.5).is_none());
        // Profile above the level everywhere: no crossing to the right.
        let high = Field::homogeneous(&grid, 0.9, 0.0).unwrap();
        assert!(front_position(&high, Species::U, 0.5).is_none());
        let snaps = vec![low; 12];
        assert!(matches!(
            measure_front_speed(&snaps, Species::U, 0.5),
            Err(Error::FrontNotFound(_))
        ));
    }

    #[test]
    fn exact_uniform_motion_is_fitted_exactly() {
        let c = 1.375;
        let snaps: Vec<Field> = (0..20)
            .map(|k| {
                let t = k as f64 * 2.0;
                ramp_field(t, 30.0 + c * t)
            })
            .collect();
        let rec = measure_front_speed(&snaps, Species::U, 0.5).unwrap();
        assert!((rec.speed - c).abs() < 1e-9, "speed {}", rec.speed);
        assert!(rec.residual < 1e-9);
        assert_eq!(rec.samples.len(), 20);
    }

    #[test]
    fn stationary_profile_has_zero_speed() {
        let snaps: Vec<Field> = (0..10)
            .map(|k| ramp_field(k as f64, 40.0))
            .collect();
        let rec = measure_front_speed(&snaps, Species::U, 0.5).unwrap();
        assert!(rec.speed.abs() < 1e-12);
    }

    #[test]
    fn monotone_invasion_front_moves_near_the_linear_spreading_speed() {
        // Strong-damping regime: all eigenvalues at the coexistence state
        // are real and the front relaxes monotonically.
        let p = ModelParams::new(0.5, 0.22, 3.0, 0.6, 1.0, 1.0).unwrap();
        let grid = GridSpec::one_d(600, 0.5).unwrap();
        let ic = InitialCondition::Step(StepInit::equilibrium_core(&p, 3.0).unwrap());
        let (f, _) = make_initial_condition(&p, &ic, &grid).unwrap();
        let out = simulate(f, &p, 0.005, 300.0, 2.0).unwrap();
        let vs = StepInit::equilibrium_core(&p, 3.0).unwrap().v_core;
        let rec = measure_front_speed(&out.snapshots, Species::V, vs / 2.0).unwrap();
        // Pulled-front convergence is slow; stay within 10% of
        // c_min = 0.5164.
        let c_min = 0.516_397_78;
        assert!(
            (rec.speed - c_min).abs() < 0.1 * c_min,
            "speed {} vs c_min {c_min}",
            rec.speed
        );
    }
}
