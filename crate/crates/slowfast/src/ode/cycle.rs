//! Limit-cycle detection on a Poincaré section and morphological
//! classification of the detected cycle.
//!
//! The section is the vertical line u = u* (the predator nullcline). The
//! flow crosses it upward — u increasing — exactly once per period, at the
//! bottom of the cycle, which makes the return map one-dimensional in the
//! crossing height v. Crossings are refined inside a step with the cubic
//! Hermite interpolant; the cycle counts as found when two consecutive
//! crossing heights agree to a relative tolerance, after which one more
//! period is integrated densely to measure extrema and shape.
//!
//! Classification looks at three things: overall amplitude, how far the
//! orbit tracks the repelling branch of the critical manifold (the canard
//! segment), and which way it leaves that segment. Small cycles are
//! Hopf-type; substantial tracking that ends in a jump back to the right
//! is a canard without head; tracking that ends in a jump left onto the
//! extinction axis is a canard with head; axis-hugging orbits without a
//! long canard segment are relaxation oscillations.

use crate::error::Result;
use crate::kinetics::{coexistence_equilibrium, critical_manifold_q0, fold_point};
use crate::ode::integrator::{hermite, integrate, IntegratorOptions, StepRecord, Stepper};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleKind {
    HopfSmall,
    CanardHeadless,
    CanardWithHead,
    Relaxation,
}

impl CycleKind {
    pub fn label(self) -> &'static str {
        match self {
            CycleKind::HopfSmall => "hopf_small",
            CycleKind::CanardHeadless => "canard_headless",
            CycleKind::CanardWithHead => "canard_with_head",
            CycleKind::Relaxation => "relaxation",
        }
    }
}

/// Which way the orbit leaves the repelling-branch segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpSide {
    Left,
    Right,
}

#[derive(Debug, Clone)]
pub struct DetectedCycle {
    pub kind: CycleKind,
    pub period: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    /// u-extent of the longest contiguous repelling-branch segment.
    pub tracking_extent: f64,
    pub jump: Option<JumpSide>,
    /// Set when the morphology matched more than one incompatible
    /// category, or none at all.
    pub warning: Option<String>,
    /// State at the end of the recording period; a good seed for
    /// continuation to a nearby parameter value.
    pub final_state: [f64; 2],
    /// Densely sampled orbit over one recorded period: (time since the
    /// section crossing, state), from 0 to `period`.
    pub orbit: Vec<(f64, [f64; 2])>,
}

#[derive(Debug, Clone, Copy)]
pub struct CycleOptions {
    /// Settling time before crossings are monitored; default max(200, 20/ε).
    pub transient: Option<f64>,
    /// Total time budget; crossing convergence must happen before it runs
    /// out, otherwise no cycle is reported. Default max(5000, 80/ε).
    pub max_time: Option<f64>,
    /// Integrator tolerance.
    pub tol: f64,
    /// Relative agreement of consecutive crossing heights that counts as
    /// convergence.
    pub match_tol: f64,
    /// Initial state; default (0.5, 1.0).
    pub seed: Option<[f64; 2]>,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions {
            transient: None,
            max_time: None,
            tol: 1e-10,
            match_tol: 1e-6,
            seed: None,
        }
    }
}

/// Cycles smaller than this in both coordinates are the focus itself seen
/// through interpolation noise, not an oscillation.
const AMPLITUDE_FLOOR: f64 = 1e-3;
/// Distance from the critical manifold that still counts as tracking it.
const TUBE_WIDTH: f64 = 0.02;
/// Distance from the manifold that counts as having clearly left it.
const DEPARTURE_WIDTH: f64 = 0.05;
/// Thresholds of the morphology predicates.
const SMALL_AMPLITUDE: f64 = 0.1;
const HEAD_EXTENT: f64 = 0.1;
const HEADLESS_EXTENT: f64 = 0.02;
const AXIS_PROXIMITY: f64 = 0.05;

/// Locate the upward crossing of u = level inside a step, returning
/// (t, v) at the crossing.
fn refine_crossing(rec: &StepRecord, level: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if hermite(rec, mid)[0] < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    let y = hermite(rec, theta);
    (rec.t0 + theta * (rec.t1 - rec.t0), y[1])
}

struct Polyline {
    pts: Vec<[f64; 2]>,
    times: Vec<f64>,
    dt_max: f64,
}

impl Polyline {
    /// Append points of `rec` over the θ-range (from, to], spaced at most
    /// dt_max apart in time.
    fn push_span(&mut self, rec: &StepRecord, from: f64, to: f64) {
        let h = rec.t1 - rec.t0;
        let n = ((to - from) * h / self.dt_max).ceil().max(1.0) as usize;
        for k in 1..=n {
            let theta = from + (to - from) * k as f64 / n as f64;
            let y = hermite(rec, theta);
            self.pts.push([y[0].max(0.0), y[1].max(0.0)]);
            self.times.push(rec.t0 + theta * h);
        }
    }
}

/// Detect the attracting limit cycle of `p`, if any.
///
/// `Ok(None)` means no oscillation: the coexistence state is infeasible,
/// the trajectory settled into a focus, or no converged cycle appeared
/// within the time budget.
pub fn detect_cycle(p: &ModelParams, opts: &CycleOptions) -> Result<Option<DetectedCycle>> {
    let Some((u_star, _)) = coexistence_equilibrium(p) else {
        return Ok(None);
    };
    let transient = opts
        .transient
        .unwrap_or_else(|| (20.0 / p.epsilon).max(200.0));
    let max_time = opts
        .max_time
        .unwrap_or_else(|| (80.0 / p.epsilon).max(5000.0));
    let seed = opts.seed.unwrap_or([0.5, 1.0]);
    // The step cap keeps the u-equation inside the explicit stability
    // region during entry–exit passages, where u decays far below the
    // absolute tolerance; without it the exit height (and so the period)
    // comes out wrong.
    let int_opts = IntegratorOptions {
        tol: opts.tol,
        max_h: 0.5,
        ..Default::default()
    };

    let settled = integrate(p, seed, 0.0, transient, &int_opts)?;
    let mut stepper = Stepper::new(p, settled, transient, &int_opts)?;

    // Phase 1: iterate the return map until two consecutive crossing
    // heights agree.
    let mut prev: Option<(f64, f64)> = None;
    let mut converged: Option<(f64, f64, f64, StepRecord)> = None;
    while stepper.t < max_time {
        let rec = stepper.advance(max_time)?;
        if rec.y0[0] < u_star && rec.y1[0] >= u_star {
            let (tc, vc) = refine_crossing(&rec, u_star);
            if let Some((tp, vp)) = prev {
                if (vc - vp).abs() <= opts.match_tol * vc.abs().max(1.0) {
                    converged = Some((tc, vc, tc - tp, rec));
                    break;
                }
            }
            prev = Some((tc, vc));
        }
    }
    let Some((t_start, v_start, period, start_rec)) = converged else {
        return Ok(None);
    };
    if !(period > 0.0) {
        return Ok(None);
    }

    // Phase 2: record one full period densely, starting at the crossing.
    let mut poly = Polyline {
        pts: vec![[u_star, v_start.max(0.0)]],
        times: vec![t_start],
        dt_max: (period / 400.0).min(0.2),
    };
    let theta_start = (t_start - start_rec.t0) / (start_rec.t1 - start_rec.t0);
    poly.push_span(&start_rec, theta_start, 1.0);
    let limit = t_start + 2.5 * period + 50.0;
    let mut measured_period = period;
    let mut closed = false;
    while stepper.t < limit {
        let rec = stepper.advance(limit)?;
        if rec.y0[0] < u_star && rec.y1[0] >= u_star {
            let (tc, _vc) = refine_crossing(&rec, u_star);
            let theta_c = (tc - rec.t0) / (rec.t1 - rec.t0);
            poly.push_span(&rec, 0.0, theta_c);
            measured_period = tc - t_start;
            closed = true;
            break;
        }
        poly.push_span(&rec, 0.0, 1.0);
    }
    if !closed {
        return Ok(None);
    }
    let final_state = stepper.y;

    let (mut u_min, mut u_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut v_min, mut v_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for q in &poly.pts {
        u_min = u_min.min(q[0]);
        u_max = u_max.max(q[0]);
        v_min = v_min.min(q[1]);
        v_max = v_max.max(q[1]);
    }
    let amp = (u_max - u_min).max(v_max - v_min);
    if amp < AMPLITUDE_FLOOR {
        return Ok(None);
    }

    let (extent, jump) = canard_segment(p, &poly.pts)?;
    let (kind, warning) = classify(amp, u_min, extent, jump);
    let orbit = poly
        .times
        .iter()
        .zip(&poly.pts)
        .map(|(t, q)| (t - t_start, *q))
        .collect();

    Ok(Some(DetectedCycle {
        kind,
        period: measured_period,
        u_min,
        u_max,
        v_min,
        v_max,
        tracking_extent: extent,
        jump,
        warning,
        final_state,
        orbit,
    }))
}

/// Longest contiguous repelling-branch segment of the orbit and the side
/// on which the orbit leaves it.
fn canard_segment(p: &ModelParams, pts: &[[f64; 2]]) -> Result<(f64, Option<JumpSide>)> {
    let fold_u = fold_point(p)?.fold_u;
    let in_tube = |q: &[f64; 2]| {
        q[0] < fold_u && (q[1] - critical_manifold_q0(p, q[0])).abs() < TUBE_WIDTH
    };

    let mut best: Option<(f64, usize, usize)> = None; // (extent, start, end)
    let mut run_start: Option<usize> = None;
    for (i, q) in pts.iter().enumerate() {
        if in_tube(q) {
            run_start.get_or_insert(i);
        } else if let Some(s) = run_start.take() {
            close_run(pts, s, i, &mut best);
        }
    }
    if let Some(s) = run_start {
        close_run(pts, s, pts.len(), &mut best);
    }

    let Some((extent, _s, e)) = best else {
        return Ok((0.0, None));
    };
    // The departure point: the first clearly off-manifold point after the
    // segment, or failing that a point a few samples beyond its end.
    let mut j = (e + 5).min(pts.len() - 1);
    for (k, q) in pts.iter().enumerate().skip(e) {
        if (q[1] - critical_manifold_q0(p, q[0])).abs() > DEPARTURE_WIDTH {
            j = k;
            break;
        }
    }
    let side = if pts[j][0] < pts[e - 1][0] {
        JumpSide::Left
    } else {
        JumpSide::Right
    };
    Ok((extent, Some(side)))
}

fn close_run(pts: &[[f64; 2]], s: usize, e: usize, best: &mut Option<(f64, usize, usize)>) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for q in &pts[s..e] {
        lo = lo.min(q[0]);
        hi = hi.max(q[0]);
    }
    let extent = hi - lo;
    if best.map_or(true, |(b, _, _)| extent > b) {
        *best = Some((extent, s, e));
    }
}

fn classify(
    amp: f64,
    u_min: f64,
    extent: f64,
    jump: Option<JumpSide>,
) -> (CycleKind, Option<String>) {
    let small = amp < SMALL_AMPLITUDE;
    let with_head = extent >= HEAD_EXTENT && jump == Some(JumpSide::Left);
    let headless = extent >= HEADLESS_EXTENT && jump == Some(JumpSide::Right);
    let axis = u_min < AXIS_PROXIMITY;

    if small {
        // A small cycle can also satisfy the headless predicate (it *is* a
        // small canard); that is refinement, not conflict. Axis proximity
        // genuinely conflicts with smallness.
        let warn = axis.then(|| "ambiguous morphology: hopf_small|relaxation".to_string());
        (CycleKind::HopfSmall, warn)
    } else if with_head {
        // A cycle with head always hugs the axis; the containment is
        // expected and not ambiguous.
        (CycleKind::CanardWithHead, None)
    } else if headless {
        let warn = axis.then(|| "ambiguous morphology: canard_headless|relaxation".to_string());
        (CycleKind::CanardHeadless, warn)
    } else if axis {
        (CycleKind::Relaxation, None)
    } else {
        // Nothing matched cleanly; pick the category whose threshold is
        // nearest in relative terms and say so.
        let axis_margin = u_min / AXIS_PROXIMITY;
        let amp_margin = amp / SMALL_AMPLITUDE;
        let kind = if axis_margin <= amp_margin {
            CycleKind::Relaxation
        } else {
            CycleKind::HopfSmall
        };
        let warn = format!(
            "no morphology category matched; nearest is {}",
            kind.label()
        );
        (kind, Some(warn))
    }
}
