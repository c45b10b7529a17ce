//! Explicit reaction-diffusion stepping: forward Euler in time, the
//! standard 3-point (1D) / 5-point (2D) Laplacian in space, no-flux
//! boundaries via mirror ghost cells.
//!
//! The update is a pure function of the previous state, so rows can be
//! processed by several worker threads; every cell is computed by the
//! identical expression regardless of the tiling, which makes the output
//! bitwise independent of the thread count.

use std::thread;

use crate::error::{Error, Result};
use crate::kinetics::{predator_kinetics, prey_kinetics};
use crate::params::ModelParams;
use crate::pde::field::Field;

/// Safety factor applied to the diffusive stability bound.
pub const CFL_SAFETY: f64 = 0.9;

/// The per-step reaction growth `dt·max|∂f/∂u|` must stay below this.
/// Diffusion alone does not bound the time step: for ε ≪ 1 the prey
/// kinetics remain fast and can destabilize forward Euler on their own.
pub const REACTION_STABILITY_LIMIT: f64 = 0.5;

/// Largest stable time step for the diffusion operator,
/// `0.9·dx²/(2·max(1,d)·dims)`.
pub fn cfl_limit(dims: u8, dx: f64, d: f64) -> f64 {
    CFL_SAFETY * dx * dx / (2.0 * d.max(1.0) * dims as f64)
}

#[derive(Clone, Copy)]
struct BandStats {
    clamped: u64,
    deepest_negative: f64,
    max_abs_fu: f64,
}

impl BandStats {
    fn new() -> Self {
        BandStats {
            clamped: 0,
            deepest_negative: 0.0,
            max_abs_fu: 0.0,
        }
    }

    fn merge(self, other: Self) -> Self {
        BandStats {
            clamped: self.clamped + other.clamped,
            deepest_negative: self.deepest_negative.min(other.deepest_negative),
            max_abs_fu: self.max_abs_fu.max(other.max_abs_fu),
        }
    }
}

/// Largest |∂f/∂u| over the field, used for the reaction stability check.
fn max_abs_fu(p: &ModelParams, u: &[f64], v: &[f64]) -> f64 {
    let (a, b, g) = (p.alpha, p.beta, p.gamma);
    let mut m = 0.0f64;
    for (cu, cv) in u.iter().zip(v) {
        let s = 1.0 + a * cu;
        let fu = g * (cu * (2.0 - 3.0 * cu - 2.0 * b) + b) - cv / (s * s);
        m = m.max(fu.abs());
    }
    m
}

/// One forward-Euler update of the rows starting at `j0`, written into
/// `out_u`/`out_v` (whose length fixes the band height).  `REACT = false`
/// disables the kinetic terms (pure diffusion).
fn update_rows<const REACT: bool>(
    p: &ModelParams,
    nx: usize,
    ny: usize,
    inv_dx2: f64,
    dt: f64,
    u: &[f64],
    v: &[f64],
    j0: usize,
    out_u: &mut [f64],
    out_v: &mut [f64],
) -> BandStats {
    let (a, b, g) = (p.alpha, p.beta, p.gamma);
    let (e, d) = (p.epsilon, p.d);
    let mut st = BandStats::new();
    let rows = out_u.len() / nx;
    for r in 0..rows {
        let j = j0 + r;
        let jm = j.saturating_sub(1) * nx;
        let jp = (j + 1).min(ny - 1) * nx;
        let jc = j * nx;
        for i in 0..nx {
            let im = i.saturating_sub(1);
            let ip = (i + 1).min(nx - 1);
            let cu = u[jc + i];
            let cv = v[jc + i];
            // Grouped as (x-part) + (y-part) so the y-part vanishes
            // exactly on 1D grids (where jm = jp = jc) and mirror
            // symmetry is preserved bitwise.
            let lap_u =
                ((u[jc + im] + u[jc + ip] - 2.0 * cu) + (u[jm + i] + u[jp + i] - 2.0 * cu))
                    * inv_dx2;
            let lap_v =
                ((v[jc + im] + v[jc + ip] - 2.0 * cv) + (v[jm + i] + v[jp + i] - 2.0 * cv))
                    * inv_dx2;
            let (mut nu, mut nv);
            if REACT {
                let f = prey_kinetics(p, cu, cv);
                let gg = predator_kinetics(p, cu, cv);
                nu = cu + dt * (f + lap_u);
                nv = cv + dt * (e * gg + d * lap_v);
                let s = 1.0 + a * cu;
                let fu = g * (cu * (2.0 - 3.0 * cu - 2.0 * b) + b) - cv / (s * s);
                st.max_abs_fu = st.max_abs_fu.max(fu.abs());
            } else {
                nu = cu + dt * lap_u;
                nv = cv + dt * (d * lap_v);
            }
            if nu < 0.0 {
                st.deepest_negative = st.deepest_negative.min(nu);
                if nu.is_finite() {
                    nu = 0.0;
                    st.clamped += 1;
                }
            }
            if nv < 0.0 {
                st.deepest_negative = st.deepest_negative.min(nv);
                if nv.is_finite() {
                    nv = 0.0;
                    st.clamped += 1;
                }
            }
            out_u[i + r * nx] = nu;
            out_v[i + r * nx] = nv;
        }
    }
    st
}

/// Forward-Euler reaction-diffusion simulation owning its field.
pub struct Simulation {
    p: ModelParams,
    field: Field,
    dt: f64,
    tiles: usize,
    scratch_u: Vec<f64>,
    scratch_v: Vec<f64>,
    base_t: f64,
    steps: u64,
    clamped: u64,
    deepest_negative: f64,
    last_means: (f64, f64),
}

impl Simulation {
    /// Validates the field, the diffusive CFL bound and the reaction
    /// stability bound on the initial state.
    pub fn new(field: Field, p: &ModelParams, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidInput(format!(
                "time step must be positive and finite, got {dt}"
            )));
        }
        if !field.is_valid() {
            return Err(Error::InvalidInput(
                "initial field contains non-finite or negative densities".to_string(),
            ));
        }
        let limit = cfl_limit(field.dims, field.dx, p.d);
        if dt > limit {
            return Err(Error::CflViolation { dt, limit });
        }
        let mfu = max_abs_fu(p, &field.u, &field.v);
        if dt * mfu >= REACTION_STABILITY_LIMIT {
            return Err(Error::CflViolation {
                dt,
                limit: REACTION_STABILITY_LIMIT / mfu,
            });
        }
        let n = field.u.len();
        let last_means = field.means();
        let base_t = field.t;
        Ok(Simulation {
            p: *p,
            field,
            dt,
            tiles: 1,
            scratch_u: vec![0.0; n],
            scratch_v: vec![0.0; n],
            base_t,
            steps: 0,
            clamped: 0,
            deepest_negative: 0.0,
            last_means,
        })
    }

    /// Sets the number of row bands updated in parallel.  The output is
    /// bitwise identical for any tile count; this only affects wall time.
    /// 1D grids always run single-threaded.
    pub fn with_tiles(mut self, tiles: usize) -> Self {
        self.tiles = tiles.max(1);
        self
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Number of cell updates clamped up to zero so far.
    pub fn clamped_cells(&self) -> u64 {
        self.clamped
    }

    /// Most negative density seen before clamping (0 if none).
    pub fn deepest_negative(&self) -> f64 {
        self.deepest_negative
    }

    /// Spatial means of the current state.
    pub fn means(&self) -> (f64, f64) {
        self.last_means
    }

    /// One reaction-diffusion step.
    pub fn step(&mut self) -> Result<()> {
        self.step_inner::<true>()
    }

    /// One pure-diffusion step (reaction terms switched off).  A test
    /// hook: with no-flux boundaries the diffusion operator conserves
    /// total mass, which can be verified independently of the kinetics.
    pub fn diffuse_step(&mut self) -> Result<()> {
        self.step_inner::<false>()
    }

    fn step_inner<const REACT: bool>(&mut self) -> Result<()> {
        let Simulation {
            p,
            field,
            dt,
            tiles,
            scratch_u,
            scratch_v,
            ..
        } = self;
        let dt = *dt;
        let (nx, ny) = (field.nx, field.ny);
        let inv_dx2 = 1.0 / (field.dx * field.dx);
        let tiles = if field.dims == 1 { 1 } else { (*tiles).min(ny) };

        let stats = if tiles <= 1 {
            update_rows::<REACT>(
                p, nx, ny, inv_dx2, dt, &field.u, &field.v, 0, scratch_u, scratch_v,
            )
        } else {
            // Split rows into near-equal bands; the first `extra` bands
            // take one extra row.
            let base = ny / tiles;
            let extra = ny % tiles;
            let mut bands = Vec::with_capacity(tiles);
            let (mut rest_u, mut rest_v): (&mut [f64], &mut [f64]) =
                (scratch_u.as_mut_slice(), scratch_v.as_mut_slice());
            let mut j0 = 0usize;
            for b in 0..tiles {
                let rows = base + usize::from(b < extra);
                let (bu, ru) = rest_u.split_at_mut(rows * nx);
                let (bv, rv) = rest_v.split_at_mut(rows * nx);
                bands.push((j0, bu, bv));
                rest_u = ru;
                rest_v = rv;
                j0 += rows;
            }
            let (u, v) = (&field.u, &field.v);
            let p = &*p;
            thread::scope(|s| {
                let handles: Vec<_> = bands
                    .into_iter()
                    .map(|(j0, bu, bv)| {
                        s.spawn(move || {
                            update_rows::<REACT>(p, nx, ny, inv_dx2, dt, u, v, j0, bu, bv)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("stencil worker panicked"))
                    .fold(BandStats::new(), BandStats::merge)
            })
        };

        std::mem::swap(&mut field.u, scratch_u);
        std::mem::swap(&mut field.v, scratch_v);
        self.steps += 1;
        self.field.t = self.base_t + self.steps as f64 * dt;
        self.clamped += stats.clamped;
        self.deepest_negative = self.deepest_negative.min(stats.deepest_negative);

        // A finite mean certifies that every entry is finite (any NaN or
        // ±∞ poisons the sum), so this doubles as the blow-up detector.
        self.last_means = self.field.means();
        if !(self.last_means.0.is_finite() && self.last_means.1.is_finite()) {
            return Err(Error::BlowUp {
                step: self.steps as usize,
                t: self.field.t,
            });
        }
        if REACT && dt * stats.max_abs_fu >= REACTION_STABILITY_LIMIT {
            return Err(Error::CflViolation {
                dt,
                limit: REACTION_STABILITY_LIMIT / stats.max_abs_fu,
            });
        }
        Ok(())
    }

    /// Advances to `t_end` (rounded to a whole number of steps), calling
    /// `on_snapshot` on the initial state, every `snapshot_every` time
    /// units, and the final state.  Returns the per-step spatial-mean
    /// series `(t, ⟨u⟩, ⟨v⟩)` including the initial row.
    pub fn run(
        &mut self,
        t_end: f64,
        snapshot_every: f64,
        mut on_snapshot: impl FnMut(&Field) -> Result<()>,
    ) -> Result<Vec<(f64, f64, f64)>> {
        let span = t_end - self.field.t;
        if !(span.is_finite() && span > 0.0) {
            return Err(Error::InvalidInput(format!(
                "t_end = {t_end} does not lie ahead of the current time {}",
                self.field.t
            )));
        }
        if !(snapshot_every > 0.0) {
            return Err(Error::InvalidInput(format!(
                "snapshot interval must be positive, got {snapshot_every}"
            )));
        }
        let n_steps = ((span / self.dt).round() as u64).max(1);
        let stride = ((snapshot_every / self.dt).round() as u64).max(1);
        let mut means = Vec::with_capacity(n_steps as usize + 1);
        means.push((self.field.t, self.last_means.0, self.last_means.1));
        on_snapshot(&self.field)?;
        for k in 1..=n_steps {
            self.step()?;
            means.push((self.field.t, self.last_means.0, self.last_means.1));
            if k % stride == 0 || k == n_steps {
                on_snapshot(&self.field)?;
            }
        }
        Ok(means)
    }

    #[cfg(test)]
    fn poison(&mut self, k: usize) {
        self.field.u[k] = f64::NAN;
    }
}

/// Result of [`simulate`]: retained snapshots plus the spatial-mean
/// series.
pub struct SimulationOutput {
    pub snapshots: Vec<Field>,
    pub means: Vec<(f64, f64, f64)>,
    pub clamped_cells: u64,
}

/// Convenience driver that clones every snapshot into memory.
pub fn simulate(
    field0: Field,
    p: &ModelParams,
    dt: f64,
    t_end: f64,
    snapshot_every: f64,
) -> Result<SimulationOutput> {
    let mut sim = Simulation::new(field0, p, dt)?;
    let mut snapshots = Vec::new();
    let means = sim.run(t_end, snapshot_every, |f| {
        snapshots.push(f.clone());
        Ok(())
    })?;
    Ok(SimulationOutput {
        snapshots,
        means,
        clamped_cells: sim.clamped_cells(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::{coexistence_equilibrium, critical_manifold_q0};
    use crate::pde::field::{
        make_initial_condition, EllipticInit, GridSpec, InitialCondition, StepInit,
    };

    fn params(delta: f64) -> ModelParams {
        ModelParams::new(0.5, 0.22, 3.0, delta, 1.0, 1.0).unwrap()
    }

    #[test]
    fn cfl_bound_is_enforced() {
        let p = params(0.3);
        let grid = GridSpec::two_d(16, 16, 1.0).unwrap();
        let f = Field::homogeneous(&grid, 0.5, 0.5).unwrap();
        // 2D, dx = 1, d = 1: limit = 0.9/4 = 0.225.
        match Simulation::new(f.clone(), &p, 0.3) {
            Err(Error::CflViolation { dt, limit }) => {
                assert_eq!(dt, 0.3);
                assert!((limit - 0.225).abs() < 1e-12);
            }
            other => panic!("expected CFL violation, got {:?}", other.map(|_| ())),
        }
        assert!(Simulation::new(f, &p, 0.01).is_ok());
    }

    #[test]
    fn fast_reaction_rates_bound_the_time_step_too() {
        let p = ModelParams::new(0.5, 0.22, 300.0, 0.3, 1.0, 1.0).unwrap();
        let grid = GridSpec::one_d(32, 1.0).unwrap();
        let f = Field::homogeneous(&grid, 1.0, 0.2).unwrap();
        // CFL alone would allow dt = 0.45, but |∂f/∂u| ≈ 366 forbids
        // dt = 0.01.
        match Simulation::new(f, &p, 0.01) {
            Err(Error::CflViolation { limit, .. }) => assert!(limit < 0.01),
            other => panic!("expected reaction-rate violation, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn homogeneous_equilibrium_does_not_drift() {
        let p = params(0.3);
        let (us, vs) = coexistence_equilibrium(&p).unwrap();
        let grid = GridSpec::two_d(16, 16, 1.0).unwrap();
        let f = Field::homogeneous(&grid, us, vs).unwrap();
        let mut sim = Simulation::new(f, &p, 0.01).unwrap();
        for _ in 0..10_000 {
            sim.step().unwrap();
        }
        for (cu, cv) in sim.field().u.iter().zip(&sim.field().v) {
            assert!((cu - us).abs() < 1e-8, "u drifted to {cu}");
            assert!((cv - vs).abs() < 1e-8, "v drifted to {cv}");
        }
    }

    #[test]
    fn homogeneous_step_equals_the_forward_euler_ode_update() {
        let p = params(0.35);
        let grid = GridSpec::two_d(8, 8, 1.0).unwrap();
        let f = Field::homogeneous(&grid, 0.4, 0.9).unwrap();
        let dt = 0.01;
        let mut sim = Simulation::new(f, &p, dt).unwrap();
        sim.step().unwrap();
        // The Laplacian of a constant field is exactly zero, so each cell
        // must reproduce the scalar update bit for bit.
        let want_u = 0.4 + dt * (prey_kinetics(&p, 0.4, 0.9) + 0.0);
        let want_v = 0.9 + dt * (p.epsilon * predator_kinetics(&p, 0.4, 0.9) + 0.0);
        for (cu, cv) in sim.field().u.iter().zip(&sim.field().v) {
            assert_eq!(*cu, want_u);
            assert_eq!(*cv, want_v);
        }
    }

    #[test]
    fn pure_diffusion_conserves_mass() {
        let p = params(0.3);
        let grid = GridSpec::one_d(600, 0.5).unwrap();
        let mut f = Field::zeros(&grid).unwrap();
        for i in 0..f.nx {
            let x = f.cell_x(i);
            f.u[i] = 1.0 + 0.5 * (0.1 * x).sin();
            f.v[i] = 0.3 + 0.2 * (0.07 * x).cos();
        }
        let mut sim = Simulation::new(f, &p, 0.02).unwrap();
        let (mut mu, mut mv) = sim.field().total_mass();
        for _ in 0..200 {
            sim.diffuse_step().unwrap();
            let (nu, nv) = sim.field().total_mass();
            assert!((nu - mu).abs() <= 1e-12 * (1.0 + nu.abs()));
            assert!((nv - mv).abs() <= 1e-12 * (1.0 + nv.abs()));
            mu = nu;
            mv = nv;
        }
        assert_eq!(sim.clamped_cells(), 0);
    }

    #[test]
    fn centrally_symmetric_data_stays_symmetric() {
        let p = params(0.3);
        let grid = GridSpec::two_d(64, 64, 1.0).unwrap();
        let ic = InitialCondition::Elliptic(EllipticInit {
            x1: 32.0,
            y1: 32.0,
            x2: 32.0,
            y2: 32.0,
            ..EllipticInit::default()
        });
        let (f, _) = make_initial_condition(&p, &ic, &grid).unwrap();
        let mut sim = Simulation::new(f, &p, 0.05).unwrap();
        for _ in 0..200 {
            sim.step().unwrap();
        }
        let f = sim.field();
        let n = f.u.len();
        let mut worst = 0.0f64;
        for k in 0..n {
            worst = worst.max((f.u[k] - f.u[n - 1 - k]).abs());
            worst = worst.max((f.v[k] - f.v[n - 1 - k]).abs());
        }
        assert!(worst < 1e-10, "symmetry broken by {worst}");
    }

    #[test]
    fn densities_stay_nonnegative_across_a_sharp_invasion() {
        let p = params(0.3);
        let grid = GridSpec::one_d(300, 1.0).unwrap();
        let ic = InitialCondition::Step(StepInit::equilibrium_core(&p, 3.0).unwrap());
        let (f, _) = make_initial_condition(&p, &ic, &grid).unwrap();
        let mut sim = Simulation::new(f, &p, 0.01).unwrap();
        for _ in 0..20_000 {
            sim.step().unwrap();
        }
        assert!(sim.field().is_valid());
        assert!(
            sim.deepest_negative() >= -1e-12,
            "overshoot {}",
            sim.deepest_negative()
        );
    }

    #[test]
    fn tiling_does_not_change_a_single_bit() {
        let p = params(0.3);
        let grid = GridSpec::two_d(40, 40, 1.0).unwrap();
        let ic = InitialCondition::Elliptic(EllipticInit {
            x1: 20.5,
            y1: 19.0,
            x2: 20.0,
            y2: 20.0,
            ..EllipticInit::default()
        });
        let (f, _) = make_initial_condition(&p, &ic, &grid).unwrap();
        let run = |tiles: usize| {
            let mut sim = Simulation::new(f.clone(), &p, 0.05).unwrap().with_tiles(tiles);
            for _ in 0..60 {
                sim.step().unwrap();
            }
            (sim.field().u.clone(), sim.field().v.clone())
        };
        let reference = run(1);
        assert_eq!(run(2), reference);
        assert_eq!(run(7), reference);
    }

    #[test]
    fn non_finite_values_are_reported_as_blow_up() {
        let p = params(0.3);
        let grid = GridSpec::two_d(8, 8, 1.0).unwrap();
        let f = Field::homogeneous(&grid, 0.5, 0.5).unwrap();
        let mut sim = Simulation::new(f, &p, 0.01).unwrap();
        sim.poison(10);
        match sim.step() {
            Err(Error::BlowUp { step, .. }) => assert_eq!(step, 1),
            other => panic!("expected blow-up, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn run_emits_snapshots_and_means_at_the_requested_cadence() {
        let p = params(0.3);
        let grid = GridSpec::one_d(50, 1.0).unwrap();
        let f = Field::homogeneous(&grid, 0.4, 0.3).unwrap();
        let out = simulate(f, &p, 0.1, 1.0, 0.3).unwrap();
        // Steps 0 (initial), 3, 6, 9 (cadence) and 10 (final).
        assert_eq!(out.snapshots.len(), 5);
        assert_eq!(out.means.len(), 11);
        assert!((out.snapshots[1].t - 0.3).abs() < 1e-12);
        assert!((out.means.last().unwrap().0 - 1.0).abs() < 1e-12);
        // Means of a homogeneous field equal the cell value.
        assert!((out.means[0].1 - 0.4).abs() < 1e-15);
    }

    #[test]
    fn invalid_initial_fields_are_rejected() {
        let p = params(0.3);
        let grid = GridSpec::one_d(10, 1.0).unwrap();
        let mut f = Field::homogeneous(&grid, 0.5, 0.5).unwrap();
        f.u[3] = -0.2;
        assert!(Simulation::new(f, &p, 0.01).is_err());
    }
}
