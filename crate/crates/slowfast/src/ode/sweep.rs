//! Parameter sweeps over mortality: the cycle family and the canard
//! explosion window.
//!
//! The canard explosion compresses the transition from small cycles to
//! full relaxation oscillations into an exponentially narrow band of δ, so
//! naive gridding cannot resolve it. The locator instead brackets the
//! amplitude jump and bisects two level crossings of the amplitude — one
//! from above, one from below — which pins the window to arbitrary δ
//! resolution with a few dozen cycle detections. A third bisection finds
//! where the orbit first reaches the extinction axis, the operational
//! onset of relaxation used by the regime classifier.

use crate::error::{Error, Result};
use crate::gspt::melnikov::{maximal_canard_delta, melnikov, singular_hopf_delta};
use crate::gspt::normal_form::normal_form;
use crate::ode::cycle::{detect_cycle, CycleOptions, DetectedCycle};
use crate::params::ModelParams;

/// One entry of a mortality sweep. Failures are recorded per-point so one
/// bad parameter value cannot take down a whole sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub delta: f64,
    pub epsilon: f64,
    pub outcome: Result<Option<DetectedCycle>>,
}

/// Detect cycles across a list of mortality values, seeding each detection
/// with the final state of the nearest previously completed one.
pub fn bifurcation_sweep(
    p: &ModelParams,
    deltas: &[f64],
    opts: &CycleOptions,
) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(deltas.len());
    let mut carry: Option<[f64; 2]> = opts.seed;
    for &delta in deltas {
        let outcome = p.with_delta(delta).and_then(|m| {
            let point_opts = CycleOptions {
                seed: carry,
                ..*opts
            };
            detect_cycle(&m, &point_opts)
        });
        if let Ok(Some(cycle)) = &outcome {
            carry = Some(cycle.final_state);
        }
        rows.push(SweepRow {
            delta,
            epsilon: p.epsilon,
            outcome,
        });
    }
    rows
}

#[derive(Debug, Clone, Copy)]
pub struct ExplosionWindow {
    /// Largest mortality at which the cycle is already large (amplitude
    /// above the upper threshold).
    pub delta_lo: f64,
    /// Smallest mortality at which the cycle is still small (amplitude
    /// below the lower threshold).
    pub delta_hi: f64,
    pub width: f64,
    /// Largest mortality whose cycle reaches the extinction axis; the
    /// operational onset of relaxation oscillation.
    pub delta_ro: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ExplosionSearch {
    /// Amplitude below which a cycle counts as small.
    pub amp_small: f64,
    /// Amplitude above which a cycle counts as large.
    pub amp_large: f64,
    /// δ-resolution of the bisections.
    pub resolution: f64,
    /// Windows wider than this are not an explosion.
    pub max_width: f64,
}

impl Default for ExplosionSearch {
    fn default() -> Self {
        ExplosionSearch {
            amp_small: 0.3,
            amp_large: 0.8,
            resolution: 1e-7,
            max_width: 0.02,
        }
    }
}

const AXIS_PROXIMITY: f64 = 0.05;

struct AmpProbe<'a> {
    p: &'a ModelParams,
    /// (δ, amplitude, u_min, final state) of every completed detection.
    cache: Vec<(f64, f64, f64, [f64; 2])>,
}

impl AmpProbe<'_> {
    fn eval(&mut self, delta: f64) -> Result<(f64, f64)> {
        if let Some(hit) = self
            .cache
            .iter()
            .find(|(d, ..)| (d - delta).abs() < f64::EPSILON)
        {
            return Ok((hit.1, hit.2));
        }
        let seed = self
            .cache
            .iter()
            .min_by(|a, b| {
                (a.0 - delta)
                    .abs()
                    .partial_cmp(&(b.0 - delta).abs())
                    .unwrap()
            })
            .map(|hit| hit.3);
        let eps = self.p.epsilon;
        let opts = CycleOptions {
            seed,
            // Seeded from a converged neighbour the transient can be much
            // shorter; amplitude only needs a couple of digits.
            transient: seed.map(|_| (10.0 / eps).max(100.0)),
            max_time: Some((120.0 / eps).max(12_000.0)),
            match_tol: 1e-4,
            ..Default::default()
        };
        let m = self.p.with_delta(delta)?;
        let cycle = detect_cycle(&m, &opts)?;
        let (amp, u_min, state) = match &cycle {
            Some(c) => (
                (c.u_max - c.u_min).max(c.v_max - c.v_min),
                c.u_min,
                c.final_state,
            ),
            None => (0.0, f64::INFINITY, [0.5, 1.0]),
        };
        self.cache.push((delta, amp, u_min, state));
        Ok((amp, u_min))
    }
}

/// Locate the canard-explosion window at the ε of `p` (its δ field is
/// ignored).
pub fn locate_explosion_window(
    p: &ModelParams,
    search: &ExplosionSearch,
) -> Result<ExplosionWindow> {
    let nf = normal_form(p)?;
    let mk = melnikov(&nf)?;
    let delta_c = maximal_canard_delta(&nf, &mk, p.epsilon)?;
    let delta_h = singular_hopf_delta(&nf, p.epsilon);

    let start = (delta_c + 5e-4).min(0.5 * (delta_c + delta_h));
    let floor = (delta_c - 0.02).max(0.01);
    if !(floor < start) {
        return Err(Error::ExplosionNotDetected(format!(
            "degenerate search interval [{floor}, {start}]"
        )));
    }

    let mut probe = AmpProbe { p, cache: Vec::new() };
    let (amp_start, _) = probe.eval(start)?;
    if amp_start >= search.amp_small {
        return Err(Error::ExplosionNotDetected(format!(
            "cycle amplitude is already {amp_start:.3} just above the maximal \
             canard; no small-cycle side to bracket"
        )));
    }
    let (amp_floor, _) = probe.eval(floor)?;
    if amp_floor <= search.amp_large {
        return Err(Error::ExplosionNotDetected(format!(
            "cycle amplitude is only {amp_floor:.3} at delta = {floor:.4}; no \
             large-cycle side to bracket"
        )));
    }

    // Smallest δ with amplitude below amp_small.
    let (mut lo, mut hi) = (floor, start);
    while hi - lo > search.resolution {
        let mid = 0.5 * (lo + hi);
        if probe.eval(mid)?.0 < search.amp_small {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let delta_hi = hi;

    // Largest δ with amplitude above amp_large.
    let (mut lo, mut hi) = (floor, delta_hi);
    while hi - lo > search.resolution {
        let mid = 0.5 * (lo + hi);
        if probe.eval(mid)?.0 > search.amp_large {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta_lo = lo;

    let width = delta_hi - delta_lo;
    if width > search.max_width {
        return Err(Error::ExplosionNotDetected(format!(
            "amplitude transition spans {width:.4} in delta, wider than the \
             explosion criterion {}",
            search.max_width
        )));
    }

    // Largest δ whose cycle touches the extinction axis.
    let (mut lo, mut hi) = (delta_lo, delta_hi);
    if !(probe.eval(lo)?.1 < AXIS_PROXIMITY) {
        return Err(Error::ExplosionNotDetected(format!(
            "large-amplitude cycle at delta = {lo} stays away from the \
             extinction axis"
        )));
    }
    while hi - lo > search.resolution {
        let mid = 0.5 * (lo + hi);
        if probe.eval(mid)?.1 < AXIS_PROXIMITY {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta_ro = lo;

    Ok(ExplosionWindow {
        delta_lo,
        delta_hi,
        width,
        delta_ro,
    })
}
