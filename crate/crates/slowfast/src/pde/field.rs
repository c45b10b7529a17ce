//! Spatial fields on uniform cell-centered grids, and the initial
//! conditions used by the 1D invasion and 2D pattern experiments.
//!
//! Cells are centered: cell `i` spans `[i·dx, (i+1)·dx)` and its nominal
//! coordinate is `(i + 0.5)·dx`.  2D data is stored row-major with the
//! x-index fastest: `idx = j·nx + i`.

use crate::error::{Error, Result};
use crate::kinetics::coexistence_equilibrium;
use crate::params::ModelParams;

/// Grid geometry for a new field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub dims: u8,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
}

impl GridSpec {
    /// A 1D interval `[0, nx·dx]` split into `nx` cells.
    pub fn one_d(nx: usize, dx: f64) -> Result<Self> {
        let g = GridSpec {
            dims: 1,
            nx,
            ny: 1,
            dx,
        };
        g.validate()?;
        Ok(g)
    }

    /// A 2D rectangle `[0, nx·dx] × [0, ny·dx]`.
    pub fn two_d(nx: usize, ny: usize, dx: f64) -> Result<Self> {
        let g = GridSpec {
            dims: 2,
            nx,
            ny,
            dx,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if self.dims != 1 && self.dims != 2 {
            return Err(Error::InvalidInput(format!(
                "grid dims must be 1 or 2, got {}",
                self.dims
            )));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidInput(format!(
                "grid must contain at least one cell per axis, got {}x{}",
                self.nx, self.ny
            )));
        }
        if self.dims == 1 && self.ny != 1 {
            return Err(Error::InvalidInput(
                "1D grid must have ny = 1".to_string(),
            ));
        }
        if !(self.dx.is_finite() && self.dx > 0.0) {
            return Err(Error::InvalidInput(format!(
                "grid spacing must be positive and finite, got {}",
                self.dx
            )));
        }
        Ok(())
    }

    /// Domain length along x.
    pub fn length_x(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    /// Domain length along y (equals `dx` for a 1D grid).
    pub fn length_y(&self) -> f64 {
        self.ny as f64 * self.dx
    }
}

/// Prey and predator densities on a uniform grid with no-flux boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub dims: u8,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    /// Current simulation time.
    pub t: f64,
    /// Prey density, row-major.
    pub u: Vec<f64>,
    /// Predator density, row-major.
    pub v: Vec<f64>,
}

impl Field {
    /// A zero-filled field on the given grid.
    pub fn zeros(grid: &GridSpec) -> Result<Self> {
        grid.validate()?;
        let n = grid.nx * grid.ny;
        Ok(Field {
            dims: grid.dims,
            nx: grid.nx,
            ny: grid.ny,
            dx: grid.dx,
            t: 0.0,
            u: vec![0.0; n],
            v: vec![0.0; n],
        })
    }

    /// A spatially uniform field.
    pub fn homogeneous(grid: &GridSpec, u0: f64, v0: f64) -> Result<Self> {
        if !(u0.is_finite() && v0.is_finite() && u0 >= 0.0 && v0 >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "homogeneous densities must be finite and nonnegative, got ({u0}, {v0})"
            )));
        }
        let mut f = Field::zeros(grid)?;
        f.u.fill(u0);
        f.v.fill(v0);
        Ok(f)
    }

    /// Flat index of cell `(i, j)`.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// x-coordinate of the center of column `i`.
    #[inline]
    pub fn cell_x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }

    /// y-coordinate of the center of row `j`.
    #[inline]
    pub fn cell_y(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dx
    }

    /// Spatial means `(⟨u⟩, ⟨v⟩)`, computed with a fixed-order pairwise
    /// reduction so the result is bitwise reproducible.
    pub fn means(&self) -> (f64, f64) {
        let n = (self.nx * self.ny) as f64;
        (pairwise_sum(&self.u) / n, pairwise_sum(&self.v) / n)
    }

    /// Total integrals `(∫u, ∫v)` over the domain (cell sum times cell
    /// volume).
    pub fn total_mass(&self) -> (f64, f64) {
        let vol = self.dx.powi(self.dims as i32);
        (pairwise_sum(&self.u) * vol, pairwise_sum(&self.v) * vol)
    }

    /// True if every density is finite and nonnegative.
    pub fn is_valid(&self) -> bool {
        self.u
            .iter()
            .chain(self.v.iter())
            .all(|x| x.is_finite() && *x >= 0.0)
    }
}

/// Deterministic pairwise (cascade) summation: error grows like
/// O(log n · ulp) instead of O(n · ulp), and the grouping is a pure
/// function of the slice length, independent of thread count.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Piecewise-constant 1D inoculum: `(u_core, v_core)` on the left end of
/// the domain, `(u_out, 0)` beyond it.  The prey and predator cores may
/// have different widths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInit {
    pub u_core: f64,
    pub v_core: f64,
    /// Prey core: `u = u_core` for `x ≤ x_split`.
    pub x_split: f64,
    /// Prey level beyond the core (default 1, the prey-only state).
    pub u_out: f64,
    /// Predator core: `v = v_core` for `x ≤ v_split` (defaults to
    /// `x_split`), zero beyond.
    pub v_split: f64,
}

impl StepInit {
    /// The common form: `(u_core, v_core)` on `[0, x_split]` and `(1, 0)`
    /// outside.
    pub fn new(u_core: f64, v_core: f64, x_split: f64) -> Self {
        StepInit {
            u_core,
            v_core,
            x_split,
            u_out: 1.0,
            v_split: x_split,
        }
    }

    /// Core at the coexistence equilibrium `(u*, v*)`.
    pub fn equilibrium_core(p: &ModelParams, x_split: f64) -> Result<Self> {
        let (us, vs) = coexistence_equilibrium(p).ok_or_else(|| {
            Error::InvalidInput(
                "equilibrium-core initial condition requires a coexistence \
                 equilibrium (needs δ(1+α) < 1)"
                    .to_string(),
            )
        })?;
        Ok(StepInit::new(us, vs, x_split))
    }
}

/// Localized 2D inoculum: `u = u0` inside one ellipse, `v = v0` inside
/// another, zero elsewhere.  An ellipse with a nonpositive axis parameter
/// is empty.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticInit {
    pub u0: f64,
    pub v0: f64,
    /// Prey ellipse center.
    pub x1: f64,
    pub y1: f64,
    /// Predator ellipse center.
    pub x2: f64,
    pub y2: f64,
    /// Prey ellipse axis parameters: inside iff
    /// `(x−x1)²/d11 + (y−y1)²/d12 ≤ 1`.
    pub d11: f64,
    pub d12: f64,
    /// Predator ellipse axis parameters.
    pub d21: f64,
    pub d22: f64,
}

impl Default for EllipticInit {
    /// The reference inoculum for a 300×300 domain: a prey disc of
    /// radius √12.5 near the center and a smaller predator ellipse
    /// offset from it.
    fn default() -> Self {
        EllipticInit {
            u0: 1.0,
            v0: 0.2,
            x1: 153.5,
            y1: 145.0,
            x2: 150.0,
            y2: 150.0,
            d11: 12.5,
            d12: 12.5,
            d21: 5.0,
            d22: 10.0,
        }
    }
}

/// Small heterogeneous perturbation of the coexistence state over the
/// whole 2D domain:
///
/// ```text
/// u(x, y) = u* − e1·(s − L/4)(s − 3L/4),   s = x − 0.1·y
/// v(x, y) = v* − e2·(x − L/2) − e3·(y − L/2)
/// ```
///
/// The reference constants (225, 675, 450) belong to a 900-long domain;
/// expressing them as fractions of L preserves the perturbation geometry
/// on any domain size.  Negative densities produced by exaggerated
/// amplitudes are clamped to zero and counted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbedInit {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

impl Default for PerturbedInit {
    fn default() -> Self {
        PerturbedInit {
            e1: 2e-7,
            e2: 3e-5,
            e3: 2e-4,
        }
    }
}

/// Initial-condition families for the spatial experiments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialCondition {
    Step(StepInit),
    Elliptic(EllipticInit),
    Perturbed(PerturbedInit),
}

/// Evaluate an initial condition exactly at every cell center.
///
/// Returns the field together with the number of cells whose density had
/// to be clamped up to zero (possible only for [`InitialCondition::
/// Perturbed`] with exaggerated amplitudes).
pub fn make_initial_condition(
    p: &ModelParams,
    ic: &InitialCondition,
    grid: &GridSpec,
) -> Result<(Field, usize)> {
    match ic {
        InitialCondition::Step(s) => step_field(s, grid).map(|f| (f, 0)),
        InitialCondition::Elliptic(e) => elliptic_field(e, grid).map(|f| (f, 0)),
        InitialCondition::Perturbed(q) => perturbed_field(p, q, grid),
    }
}

fn step_field(s: &StepInit, grid: &GridSpec) -> Result<Field> {
    if grid.dims != 1 {
        return Err(Error::InvalidInput(
            "step initial condition is 1D only".to_string(),
        ));
    }
    for (name, val) in [
        ("u_core", s.u_core),
        ("v_core", s.v_core),
        ("u_out", s.u_out),
    ] {
        if !(val.is_finite() && val >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "{name} must be finite and nonnegative, got {val}"
            )));
        }
    }
    let l = grid.length_x();
    for (name, val) in [("x_split", s.x_split), ("v_split", s.v_split)] {
        if !(val.is_finite() && (0.0..=l).contains(&val)) {
            return Err(Error::InvalidInput(format!(
                "{name} must lie within the domain [0, {l}], got {val}"
            )));
        }
    }
    let mut f = Field::zeros(grid)?;
    for i in 0..f.nx {
        let x = f.cell_x(i);
        f.u[i] = if x <= s.x_split { s.u_core } else { s.u_out };
        f.v[i] = if x <= s.v_split { s.v_core } else { 0.0 };
    }
    Ok(f)
}

fn elliptic_field(e: &EllipticInit, grid: &GridSpec) -> Result<Field> {
    if grid.dims != 2 {
        return Err(Error::InvalidInput(
            "elliptic initial condition is 2D only".to_string(),
        ));
    }
    for (name, val) in [("u0", e.u0), ("v0", e.v0)] {
        if !(val.is_finite() && val >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "{name} must be finite and nonnegative, got {val}"
            )));
        }
    }
    for (name, val) in [
        ("d11", e.d11),
        ("d12", e.d12),
        ("d21", e.d21),
        ("d22", e.d22),
    ] {
        if !val.is_finite() || val < 0.0 {
            return Err(Error::InvalidInput(format!(
                "ellipse axis parameter {name} must be finite and nonnegative, got {val}"
            )));
        }
    }
    let (lx, ly) = (grid.length_x(), grid.length_y());
    for (name, val, hi) in [
        ("x1", e.x1, lx),
        ("x2", e.x2, lx),
        ("y1", e.y1, ly),
        ("y2", e.y2, ly),
    ] {
        if !(val.is_finite() && (0.0..=hi).contains(&val)) {
            return Err(Error::InvalidInput(format!(
                "ellipse center {name} must lie within the domain [0, {hi}], got {val}"
            )));
        }
    }
    let inside = |x: f64, y: f64, cx: f64, cy: f64, dx2: f64, dy2: f64| {
        dx2 > 0.0 && dy2 > 0.0 && (x - cx).powi(2) / dx2 + (y - cy).powi(2) / dy2 <= 1.0
    };
    let mut f = Field::zeros(grid)?;
    for j in 0..f.ny {
        let y = f.cell_y(j);
        for i in 0..f.nx {
            let x = f.cell_x(i);
            let k = f.idx(i, j);
            if inside(x, y, e.x1, e.y1, e.d11, e.d12) {
                f.u[k] = e.u0;
            }
            if inside(x, y, e.x2, e.y2, e.d21, e.d22) {
                f.v[k] = e.v0;
            }
        }
    }
    Ok(f)
}

fn perturbed_field(
    p: &ModelParams,
    q: &PerturbedInit,
    grid: &GridSpec,
) -> Result<(Field, usize)> {
    if grid.dims != 2 {
        return Err(Error::InvalidInput(
            "perturbed initial condition is 2D only".to_string(),
        ));
    }
    for (name, val) in [("e1", q.e1), ("e2", q.e2), ("e3", q.e3)] {
        if !val.is_finite() {
            return Err(Error::InvalidInput(format!(
                "perturbation amplitude {name} must be finite, got {val}"
            )));
        }
    }
    let (us, vs) = coexistence_equilibrium(p).ok_or_else(|| {
        Error::InvalidInput(
            "perturbed initial condition requires a coexistence equilibrium \
             (needs δ(1+α) < 1)"
                .to_string(),
        )
    })?;
    let (lx, ly) = (grid.length_x(), grid.length_y());
    // Reference geometry on a 900-long domain: roots at 225 and 675,
    // centers at 450.
    let (xa, xb) = (0.25 * lx, 0.75 * lx);
    let (xm, ym) = (0.5 * lx, 0.5 * ly);
    let mut f = Field::zeros(grid)?;
    let mut clamped = 0usize;
    for j in 0..f.ny {
        let y = f.cell_y(j);
        for i in 0..f.nx {
            let x = f.cell_x(i);
            let s = x - 0.1 * y;
            let mut u = us - q.e1 * (s - xa) * (s - xb);
            let mut v = vs - q.e2 * (x - xm) - q.e3 * (y - ym);
            if u < 0.0 {
                u = 0.0;
                clamped += 1;
            }
            if v < 0.0 {
                v = 0.0;
                clamped += 1;
            }
            let k = f.idx(i, j);
            f.u[k] = u;
            f.v[k] = v;
        }
    }
    Ok((f, clamped))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(delta: f64) -> ModelParams {
        ModelParams::new(0.5, 0.22, 3.0, delta, 1.0, 1.0).unwrap()
    }

    #[test]
    fn step_profile_splits_at_the_requested_positions() {
        let p = params(0.3);
        let grid = GridSpec::one_d(600, 0.5).unwrap();
        let ic = InitialCondition::Step(StepInit::equilibrium_core(&p, 3.0).unwrap());
        let (f, clamped) = make_initial_condition(&p, &ic, &grid).unwrap();
        assert_eq!(clamped, 0);
        let us = 0.3 / (1.0 - 0.5 * 0.3);
        // Cell centers 0.25, 0.75, …, 2.75 lie in the core; 3.25 does not.
        for i in 0..6 {
            assert!((f.u[i] - us).abs() < 1e-12);
            assert!(f.v[i] > 0.0);
        }
        assert_eq!(f.u[6], 1.0);
        assert_eq!(f.v[6], 0.0);
        assert_eq!(f.u[599], 1.0);
    }

    #[test]
    fn step_cores_for_prey_and_predator_may_differ() {
        let p = params(0.3);
        let grid = GridSpec::one_d(600, 0.5).unwrap();
        let ic = InitialCondition::Step(StepInit {
            u_core: 1.0,
            v_core: 0.2,
            x_split: 3.0,
            u_out: 0.0,
            v_split: 2.0,
        });
        let (f, _) = make_initial_condition(&p, &ic, &grid).unwrap();
        // x = 2.25: inside the prey core but past the predator core.
        assert_eq!(f.u[4], 1.0);
        assert_eq!(f.v[4], 0.0);
        // x = 1.75: inside both.
        assert_eq!(f.u[3], 1.0);
        assert_eq!(f.v[3], 0.2);
        // x = 3.25: outside both; the prey outside level is 0 here.
        assert_eq!(f.u[6], 0.0);
        assert_eq!(f.v[6], 0.0);
    }

    #[test]
    fn elliptic_inoculum_fills_the_expected_cells() {
        let p = params(0.3);
        let grid = GridSpec::two_d(300, 300, 1.0).unwrap();
        let ic = InitialCondition::Elliptic(EllipticInit::default());
        let (f, _) = make_initial_condition(&p, &ic, &grid).unwrap();
        // (153.5, 145) is a cell center (i = 153, j = 144) at the heart of
        // the prey disc.
        let k = f.idx(153, 144);
        assert_eq!(f.u[k], 1.0);
        // The predator ellipse is centered at (150, 150); its center cell
        // carries v0 but lies outside the prey disc.
        let k2 = f.idx(149, 149);
        assert_eq!(f.v[k2], 0.2);
        assert_eq!(f.u[k2], 0.0);
        // Far corner stays empty.
        assert_eq!(f.u[f.idx(10, 10)], 0.0);
        assert_eq!(f.v[f.idx(10, 10)], 0.0);
        // Occupied cell counts are close to the ellipse areas
        // (π·12.5 ≈ 39.3 and π·√50 ≈ 22.2).
        let nu = f.u.iter().filter(|x| **x > 0.0).count();
        let nv = f.v.iter().filter(|x| **x > 0.0).count();
        assert!((30..=50).contains(&nu), "prey cells {nu}");
        assert!((15..=30).contains(&nv), "predator cells {nv}");
    }

    #[test]
    fn degenerate_ellipses_yield_an_empty_field() {
        let p = params(0.3);
        let grid = GridSpec::two_d(64, 64, 1.0).unwrap();
        let ic = InitialCondition::Elliptic(EllipticInit {
            x1: 32.0,
            y1: 32.0,
            x2: 32.0,
            y2: 32.0,
            d11: 0.0,
            d12: 0.0,
            d21: 0.0,
            d22: 0.0,
            ..EllipticInit::default()
        });
        let (f, _) = make_initial_condition(&p, &ic, &grid).unwrap();
        assert!(f.u.iter().all(|x| *x == 0.0));
        assert!(f.v.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn zero_perturbation_reduces_to_the_homogeneous_equilibrium() {
        let p = params(0.3);
        let grid = GridSpec::two_d(90, 90, 10.0).unwrap();
        let ic = InitialCondition::Perturbed(PerturbedInit {
            e1: 0.0,
            e2: 0.0,
            e3: 0.0,
        });
        let (f, clamped) = make_initial_condition(&p, &ic, &grid).unwrap();
        assert_eq!(clamped, 0);
        let us = 0.3 / (1.0 - 0.5 * 0.3);
        let vs = crate::kinetics::critical_manifold_q0(&p, us);
        assert!(f.u.iter().all(|x| (x - us).abs() < 1e-15));
        assert!(f.v.iter().all(|x| (x - vs).abs() < 1e-15));
    }

    #[test]
    fn perturbed_field_matches_the_reference_formula_on_a_900_domain() {
        let p = params(0.3);
        let grid = GridSpec::two_d(90, 90, 10.0).unwrap();
        let ic = InitialCondition::Perturbed(PerturbedInit::default());
        let (f, clamped) = make_initial_condition(&p, &ic, &grid).unwrap();
        assert_eq!(clamped, 0);
        let us = 0.3 / (1.0 - 0.5 * 0.3);
        let vs = crate::kinetics::critical_manifold_q0(&p, us);
        // Cell (0, 0) has center (5, 5), so s = 5 − 0.5 = 4.5.
        let s = 4.5;
        let want_u = us - 2e-7 * (s - 225.0) * (s - 675.0);
        let want_v = vs - 3e-5 * (5.0 - 450.0) - 2e-4 * (5.0 - 450.0);
        assert!((f.u[0] - want_u).abs() < 1e-14);
        assert!((f.v[0] - want_v).abs() < 1e-14);
        assert!(f.is_valid());
    }

    #[test]
    fn perturbation_geometry_scales_with_the_domain_length() {
        let p = params(0.3);
        let grid = GridSpec::two_d(45, 45, 10.0).unwrap();
        let ic = InitialCondition::Perturbed(PerturbedInit::default());
        let (f, _) = make_initial_condition(&p, &ic, &grid).unwrap();
        let us = 0.3 / (1.0 - 0.5 * 0.3);
        // On a 450-long domain the prey perturbation roots sit at 112.5
        // and 337.5; the cell centered at x = 115, y = 25 gives
        // s = 112.5, exactly on the first root.
        let k = f.idx(11, 2);
        assert!((f.u[k] - us).abs() < 1e-14);
    }

    #[test]
    fn exaggerated_perturbation_amplitudes_are_clamped() {
        let p = params(0.3);
        let grid = GridSpec::two_d(90, 90, 10.0).unwrap();
        let ic = InitialCondition::Perturbed(PerturbedInit {
            e2: 3e-2,
            ..PerturbedInit::default()
        });
        let (f, clamped) = make_initial_condition(&p, &ic, &grid).unwrap();
        assert!(clamped > 0, "expected clamping, got none");
        assert!(f.is_valid());
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let p = params(0.3);
        let g1 = GridSpec::one_d(100, 1.0).unwrap();
        let g2 = GridSpec::two_d(32, 32, 1.0).unwrap();
        assert!(make_initial_condition(
            &p,
            &InitialCondition::Step(StepInit::new(1.0, 0.2, 3.0)),
            &g2
        )
        .is_err());
        assert!(make_initial_condition(
            &p,
            &InitialCondition::Elliptic(EllipticInit::default()),
            &g1
        )
        .is_err());
        assert!(make_initial_condition(
            &p,
            &InitialCondition::Perturbed(PerturbedInit::default()),
            &g1
        )
        .is_err());
        // Split position outside the domain.
        assert!(make_initial_condition(
            &p,
            &InitialCondition::Step(StepInit::new(1.0, 0.2, 500.0)),
            &g1
        )
        .is_err());
        // No coexistence equilibrium at δ(1+α) ≥ 1.
        let p_bad = ModelParams::new(0.5, 0.22, 3.0, 0.7, 1.0, 1.0).unwrap();
        assert!(StepInit::equilibrium_core(&p_bad, 3.0).is_err());
        assert!(make_initial_condition(
            &p_bad,
            &InitialCondition::Perturbed(PerturbedInit::default()),
            &g2
        )
        .is_err());
    }

    #[test]
    fn grid_validation_rejects_empty_and_malformed_grids() {
        assert!(GridSpec::one_d(0, 1.0).is_err());
        assert!(GridSpec::two_d(0, 10, 1.0).is_err());
        assert!(GridSpec::two_d(10, 0, 1.0).is_err());
        assert!(GridSpec::one_d(10, 0.0).is_err());
        assert!(GridSpec::one_d(10, f64::NAN).is_err());
    }

    #[test]
    fn pairwise_sum_matches_direct_summation() {
        let xs: Vec<f64> = (0..1000).map(|k| (k as f64).sin()).collect();
        let direct: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - direct).abs() < 1e-10);
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[2.5]), 2.5);
    }

    #[test]
    fn mass_uses_cell_volume() {
        let grid = GridSpec::one_d(10, 0.5).unwrap();
        let f = Field::homogeneous(&grid, 2.0, 1.0).unwrap();
        let (mu, mv) = f.total_mass();
        assert!((mu - 10.0).abs() < 1e-12);
        assert!((mv - 5.0).abs() < 1e-12);
        let (au, av) = f.means();
        assert!((au - 2.0).abs() < 1e-15);
        assert!((av - 1.0).abs() < 1e-15);
    }
}
