//! Adaptive Dormand–Prince 5(4) integration of the kinetic system.
//!
//! The slow-fast structure makes trajectories alternate between crawls
//! along the slow manifold (large stable steps) and O(1/ε)-fast jumps, so
//! a fixed step is hopeless; the embedded 5(4) pair with PI-free step
//! control handles both phases. Two departures from the textbook loop:
//!
//! * **Nonnegativity projection.** Populations that overshoot zero by less
//!   than the tolerance are clamped to the invariant axis (entry–exit
//!   passages spend long stretches exponentially close to u = 0); larger
//!   overshoots reject the step and halve h instead of corrupting the
//!   state.
//! * **Dense output.** Every accepted step records endpoint derivatives,
//!   enough for cubic Hermite interpolation inside the step; the cycle
//!   detector refines Poincaré crossings with it.

use crate::error::{Error, Result};
use crate::kinetics::{predator_kinetics, prey_kinetics};
use crate::params::ModelParams;

/// Butcher tableau of the Dormand–Prince 5(4) pair.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Difference between the 5th- and 4th-order weights (error estimator).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;
const H_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    /// Absolute and relative tolerance (used as both).
    pub tol: f64,
    /// Initial step size.
    pub h0: f64,
    /// Hard cap on accepted + rejected steps.
    pub max_steps: usize,
    /// Upper bound on the step size. Needed whenever one component decays
    /// far below the absolute tolerance while the others stay smooth: the
    /// error test then no longer sees that component, and without a cap
    /// the step grows past the explicit stability limit of its (still
    /// O(1)-rate) dynamics, leaving it stuck at a noise floor instead of
    /// following its true exponential decay. Entry–exit passages along the
    /// extinction axis are exactly this situation.
    pub max_h: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            tol: 1e-10,
            h0: 1e-4,
            max_steps: 50_000_000,
            max_h: f64::INFINITY,
        }
    }
}

/// One accepted step with endpoint derivatives for dense output.
#[derive(Debug, Clone, Copy)]
pub struct StepRecord {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; 2],
    pub y1: [f64; 2],
    pub f0: [f64; 2],
    pub f1: [f64; 2],
}

/// Cubic Hermite interpolant of a step at fraction θ ∈ [0, 1].
pub fn hermite(rec: &StepRecord, theta: f64) -> [f64; 2] {
    let h = rec.t1 - rec.t0;
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let c00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let c10 = t3 - 2.0 * t2 + theta;
    let c01 = -2.0 * t3 + 3.0 * t2;
    let c11 = t3 - t2;
    [
        c00 * rec.y0[0] + c10 * h * rec.f0[0] + c01 * rec.y1[0] + c11 * h * rec.f1[0],
        c00 * rec.y0[1] + c10 * h * rec.f0[1] + c01 * rec.y1[1] + c11 * h * rec.f1[1],
    ]
}

fn rhs(p: &ModelParams, y: [f64; 2]) -> [f64; 2] {
    [
        prey_kinetics(p, y[0], y[1]),
        p.epsilon * predator_kinetics(p, y[0], y[1]),
    ]
}

/// Re-entrant stepper: owns the current state and advances one accepted
/// step at a time, never past the supplied limit.
pub struct Stepper<'a> {
    p: &'a ModelParams,
    pub t: f64,
    pub y: [f64; 2],
    f: [f64; 2],
    h: f64,
    tol: f64,
    steps: usize,
    max_steps: usize,
    max_h: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(p: &'a ModelParams, y0: [f64; 2], t0: f64, opts: &IntegratorOptions) -> Result<Self> {
        if !(y0[0].is_finite() && y0[1].is_finite() && t0.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite initial state ({}, {}) at t = {t0}",
                y0[0], y0[1]
            )));
        }
        if !(opts.tol > 0.0 && opts.h0 > 0.0 && opts.max_h > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance and step bounds must be positive (tol = {}, h0 = {}, max_h = {})",
                opts.tol, opts.h0, opts.max_h
            )));
        }
        Ok(Stepper {
            p,
            t: t0,
            y: y0,
            f: rhs(p, y0),
            h: opts.h0.min(opts.max_h),
            tol: opts.tol,
            steps: 0,
            max_steps: opts.max_steps,
            max_h: opts.max_h,
        })
    }

    /// Take one accepted step, shortened if necessary to not pass
    /// `t_limit`. Must not be called once `self.t >= t_limit`.
    pub fn advance(&mut self, t_limit: f64) -> Result<StepRecord> {
        assert!(self.t < t_limit, "advance called past the time limit");
        loop {
            self.steps += 1;
            if self.steps > self.max_steps {
                return Err(Error::InternalConsistency(format!(
                    "step budget of {} exhausted at t = {}",
                    self.max_steps, self.t
                )));
            }
            let h = self.h.min(t_limit - self.t);
            if h < H_FLOOR {
                return Err(Error::StiffnessFailure { t: self.t, h });
            }

            let mut k = [[0.0f64; 2]; 7];
            k[0] = self.f;
            for s in 0..6 {
                let mut ys = self.y;
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    ys[0] += h * A[s][j] * kj[0];
                    ys[1] += h * A[s][j] * kj[1];
                }
                k[s + 1] = rhs(self.p, ys);
            }
            // The 6th stage row doubles as the 5th-order weights: k[6] was
            // evaluated at the candidate endpoint (FSAL).
            let mut y1 = self.y;
            for (j, kj) in k.iter().enumerate().take(6) {
                y1[0] += h * A[5][j] * kj[0];
                y1[1] += h * A[5][j] * kj[1];
            }

            let mut err2 = 0.0;
            for i in 0..2 {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[i];
                }
                e *= h;
                let scale = self.tol + self.tol * self.y[i].abs().max(y1[i].abs());
                err2 += (e / scale) * (e / scale);
            }
            let err = (err2 / 2.0).sqrt();

            if !err.is_finite() {
                self.h = h / 2.0;
                continue;
            }
            if err > 1.0 {
                self.h = h * (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, 1.0);
                continue;
            }
            // Populations may graze zero; forgive overshoots within the
            // tolerance, refuse larger ones.
            let mut clamped = false;
            let mut excessive = false;
            for v in y1.iter_mut() {
                if *v < 0.0 {
                    if -*v < self.tol {
                        *v = 0.0;
                        clamped = true;
                    } else {
                        excessive = true;
                    }
                }
            }
            if excessive {
                self.h = h / 2.0;
                continue;
            }

            let f1 = if clamped { rhs(self.p, y1) } else { k[6] };
            let rec = StepRecord {
                t0: self.t,
                t1: self.t + h,
                y0: self.y,
                y1,
                f0: k[0],
                f1,
            };
            self.t += h;
            self.y = y1;
            self.f = f1;
            self.h = (h * (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE)).min(self.max_h);
            return Ok(rec);
        }
    }
}

/// Integrate from t0 to t1 and return the final state.
pub fn integrate(
    p: &ModelParams,
    y0: [f64; 2],
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
) -> Result<[f64; 2]> {
    integrate_observed(p, y0, t0, t1, opts, |_| {})
}

/// Integrate from t0 to t1, invoking the observer on every accepted step.
pub fn integrate_observed(
    p: &ModelParams,
    y0: [f64; 2],
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
    mut observe: impl FnMut(&StepRecord),
) -> Result<[f64; 2]> {
    if !(t1 > t0) {
        return Err(Error::InvalidInput(format!(
            "integration interval [{t0}, {t1}] is empty or reversed"
        )));
    }
    let mut stepper = Stepper::new(p, y0, t0, opts)?;
    while stepper.t < t1 {
        let rec = stepper.advance(t1)?;
        observe(&rec);
    }
    Ok(stepper.y)
}
