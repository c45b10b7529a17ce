//! Run configuration: the TOML schema, its validation, and the resolution
//! pass that fills every optional knob with its concrete default.
//!
//! Resolution happens before anything is computed, and the resolved
//! configuration is what `manifest.toml` records. Because resolution is
//! idempotent — a fully resolved config resolves to itself — feeding a
//! manifest back in as `--config` reproduces the run exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};
use slowfast::kinetics::{coexistence_equilibrium, fold_point};
use slowfast::params::ModelParams;
use slowfast::pde::{tw_min_speed, EllipticInit, InitialCondition, PerturbedInit, StepInit};

use crate::failure::{CmdResult, Failure};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Which subcommand this config is for. Filled in on resolution; if
    /// already present it must match the subcommand actually invoked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    pub params: ParamsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyze: Option<AnalyzeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry_exit: Option<EntryExitConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    #[serde(default = "default_diffusion_ratio")]
    pub d: f64,
}

fn default_diffusion_ratio() -> f64 {
    1.0
}

impl ParamsConfig {
    pub fn model(&self) -> CmdResult<ModelParams> {
        ModelParams::new(
            self.alpha,
            self.beta,
            self.gamma,
            self.delta,
            self.epsilon,
            self.d,
        )
        .map_err(Failure::from)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    /// Pin down the relaxation-onset boundary by simulation so the regime
    /// label can distinguish III from IV. Off by default: the locator
    /// costs many cycle detections.
    #[serde(default)]
    pub regime_simulation: bool,
    /// Wave speed for the traveling-wave eigenvalue report. Defaults to
    /// the minimum invasion speed when that is defined.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wave_speed: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Explicit mortality values, visited in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deltas: Vec<f64>,
    /// Evenly spaced values appended to `deltas`; replaced by the
    /// expanded list on resolution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<DeltaRange>,
    /// Also bisect for the canard-explosion window and write
    /// `explosion.csv`.
    #[serde(default)]
    pub explosion: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub kind: SimKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode: Option<OdeSimConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pde: Option<PdeSimConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimKind {
    Ode,
    Pde1d,
    Pde2d,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeSimConfig {
    /// Cycle mode: detect the attracting cycle at each of these mortality
    /// values and write one orbit file per value. Mutually exclusive with
    /// `t_end`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    /// Trajectory mode: integrate the kinetics from `(u0, v0)` to this
    /// time and write the sampled path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    /// Trajectory sampling cadence; defaults to `t_end / 1000`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_every: Option<f64>,
    /// Integrator tolerance (default 1e-10).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeSimConfig {
    pub nx: usize,
    /// Grid height; 2D only, defaults to `nx`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    pub dx: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Time between snapshot emissions (rounded to a whole number of
    /// steps, minimum one).
    pub snapshot_every: f64,
    #[serde(default)]
    pub format: SnapshotFormat,
    /// Row bands updated concurrently. Purely a speed knob: the output is
    /// bitwise identical for every tile count.
    #[serde(default = "default_tiles")]
    pub tiles: usize,
    pub ic: IcConfig,
    /// Front tracking (1D only): measure the rightmost level crossing in
    /// every snapshot and fit a speed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub front: Option<FrontConfig>,
}

fn default_tiles() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotFormat {
    #[default]
    Csv,
    Pgm,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontConfig {
    #[serde(default)]
    pub species: SpeciesChoice,
    /// Density level whose rightmost crossing is tracked; defaults to
    /// half the coexistence value of the tracked species.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeciesChoice {
    U,
    #[default]
    V,
}

/// Initial condition, kept flat so unknown keys are still rejected: the
/// `type` field selects the family and only that family's knobs may be
/// set. Resolution fills the rest with the family defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcConfig {
    #[serde(rename = "type")]
    pub kind: IcKind,
    // Step profile (1D): (u_core, v_core) out to x_split, (u_out, 0)
    // beyond; the predator core may end earlier at v_split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_core: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_core: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_split: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_out: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_split: Option<f64>,
    // Elliptic inoculum (2D).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d11: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d12: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d21: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d22: Option<f64>,
    // Tilted-plane perturbation of the coexistence state (2D).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e3: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IcKind {
    Step,
    Elliptic,
    Perturbed,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryExitConfig {
    /// Entry height on the extinction axis; defaults to the fold height,
    /// which is where the singular relaxation orbit arrives.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v1: Option<f64>,
}

/// Read and parse a config file. Parse errors keep the line/column
/// information from the TOML parser.
pub fn load(path: &Path) -> CmdResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

fn require_finite(name: &str, x: f64) -> CmdResult<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::config(format!("{name} must be finite, got {x}")))
    }
}

fn require_positive(name: &str, x: f64) -> CmdResult<f64> {
    require_finite(name, x)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Failure::config(format!("{name} must be positive, got {x}")))
    }
}

impl RunConfig {
    /// Validate the config for `command`, fill in every default, and
    /// return the model parameters. After this the config is fully
    /// explicit and serializing it yields the run manifest.
    pub fn finalize(&mut self, command: &str) -> CmdResult<ModelParams> {
        let p = self.params.model()?;

        match &self.command {
            Some(c) if c != command => {
                return Err(Failure::config(format!(
                    "config is for command '{c}' but '{command}' was invoked"
                )));
            }
            _ => self.command = Some(command.to_string()),
        }

        match command {
            "analyze" => {
                let a = self.analyze.get_or_insert_with(AnalyzeConfig::default);
                if a.wave_speed.is_none() {
                    // The minimum invasion speed; left unset when invasion
                    // is infeasible (the report says so instead).
                    a.wave_speed = tw_min_speed(&p).ok();
                }
                if let Some(c) = a.wave_speed {
                    require_positive("analyze.wave_speed", c).or_else(|e| {
                        // c_min = 0 (d = 0) is valid to report, just not
                        // to analyze further; keep it.
                        if c == 0.0 {
                            Ok(0.0)
                        } else {
                            Err(e)
                        }
                    })?;
                }
            }
            "sweep" => {
                let s = self
                    .sweep
                    .as_mut()
                    .ok_or_else(|| Failure::config("the sweep command needs a [sweep] section"))?;
                if let Some(r) = s.range.take() {
                    s.deltas.extend(expand_range(&r)?);
                }
                if s.deltas.is_empty() {
                    return Err(Failure::config(
                        "sweep needs at least one mortality value (sweep.deltas or sweep.range)",
                    ));
                }
                for &d in &s.deltas {
                    require_positive("sweep delta", d)?;
                }
            }
            "simulate" => {
                let s = self.simulate.as_mut().ok_or_else(|| {
                    Failure::config("the simulate command needs a [simulate] section")
                })?;
                s.finalize(&p)?;
            }
            "entry-exit" => {
                let e = self.entry_exit.get_or_insert_with(EntryExitConfig::default);
                if e.v1.is_none() {
                    let geom = fold_point(&p).map_err(|err| {
                        Failure::config(format!(
                            "entry_exit.v1 has no default here ({err}); set it explicitly"
                        ))
                    })?;
                    e.v1 = Some(geom.fold_v);
                }
                require_positive("entry_exit.v1", e.v1.unwrap())?;
            }
            other => {
                return Err(Failure::config(format!("unknown command '{other}'")));
            }
        }
        Ok(p)
    }
}

fn expand_range(r: &DeltaRange) -> CmdResult<Vec<f64>> {
    require_finite("sweep.range.start", r.start)?;
    require_finite("sweep.range.stop", r.stop)?;
    if r.count == 0 {
        return Err(Failure::config("sweep.range.count must be at least 1"));
    }
    if r.count == 1 {
        return Ok(vec![r.start]);
    }
    let n = (r.count - 1) as f64;
    Ok((0..r.count)
        .map(|k| r.start + (r.stop - r.start) * k as f64 / n)
        .collect())
}

impl SimulateConfig {
    fn finalize(&mut self, p: &ModelParams) -> CmdResult<()> {
        match self.kind {
            SimKind::Ode => {
                if self.pde.is_some() {
                    return Err(Failure::config(
                        "simulate.pde does not apply to kind = \"ode\"",
                    ));
                }
                let o = self.ode.as_mut().ok_or_else(|| {
                    Failure::config("kind = \"ode\" needs a [simulate.ode] section")
                })?;
                o.finalize()
            }
            SimKind::Pde1d | SimKind::Pde2d => {
                if self.ode.is_some() {
                    return Err(Failure::config(
                        "simulate.ode does not apply to spatial kinds",
                    ));
                }
                let two_d = self.kind == SimKind::Pde2d;
                let s = self.pde.as_mut().ok_or_else(|| {
                    Failure::config("spatial kinds need a [simulate.pde] section")
                })?;
                s.finalize(p, two_d)
            }
        }
    }
}

impl OdeSimConfig {
    fn finalize(&mut self) -> CmdResult<()> {
        match (&self.deltas, self.t_end) {
            (Some(_), Some(_)) => {
                return Err(Failure::config(
                    "simulate.ode.deltas (cycle mode) and simulate.ode.t_end (trajectory \
                     mode) are mutually exclusive",
                ));
            }
            (None, None) => {
                return Err(Failure::config(
                    "simulate.ode needs either deltas (cycle mode) or t_end (trajectory mode)",
                ));
            }
            (Some(ds), None) => {
                if ds.is_empty() {
                    return Err(Failure::config("simulate.ode.deltas must not be empty"));
                }
                for &d in ds {
                    require_positive("simulate.ode delta", d)?;
                }
                if self.sample_every.is_some() {
                    return Err(Failure::config(
                        "simulate.ode.sample_every applies to trajectory mode only",
                    ));
                }
            }
            (None, Some(t)) => {
                require_positive("simulate.ode.t_end", t)?;
                let cadence = *self.sample_every.get_or_insert(t / 1000.0);
                require_positive("simulate.ode.sample_every", cadence)?;
                if cadence > t {
                    return Err(Failure::config(
                        "simulate.ode.sample_every must not exceed t_end",
                    ));
                }
            }
        }
        self.u0.get_or_insert(0.5);
        self.v0.get_or_insert(1.0);
        require_finite("simulate.ode.u0", self.u0.unwrap())?;
        require_finite("simulate.ode.v0", self.v0.unwrap())?;
        let tol = *self.tol.get_or_insert(1e-10);
        require_positive("simulate.ode.tol", tol)?;
        Ok(())
    }
}

impl PdeSimConfig {
    fn finalize(&mut self, p: &ModelParams, two_d: bool) -> CmdResult<()> {
        if two_d {
            self.ny = Some(self.ny.unwrap_or(self.nx));
        } else if self.ny.is_some() {
            return Err(Failure::config("simulate.pde.ny applies to pde2d only"));
        }
        require_positive("simulate.pde.dx", self.dx)?;
        require_positive("simulate.pde.dt", self.dt)?;
        require_positive("simulate.pde.t_end", self.t_end)?;
        require_positive("simulate.pde.snapshot_every", self.snapshot_every)?;
        if self.tiles == 0 {
            return Err(Failure::config("simulate.pde.tiles must be at least 1"));
        }
        self.ic.finalize(p)?;
        match &mut self.front {
            Some(_) if two_d => {
                return Err(Failure::config(
                    "simulate.pde.front applies to pde1d only",
                ));
            }
            Some(f) => {
                if f.level.is_none() {
                    let (u_star, v_star) = coexistence_equilibrium(p).ok_or_else(|| {
                        Failure::config(
                            "front.level has no default without a coexistence equilibrium; \
                             set it explicitly",
                        )
                    })?;
                    f.level = Some(match f.species {
                        SpeciesChoice::U => 0.5 * u_star,
                        SpeciesChoice::V => 0.5 * v_star,
                    });
                }
                require_positive("simulate.pde.front.level", f.level.unwrap())?;
            }
            None => {}
        }
        Ok(())
    }
}

impl IcConfig {
    /// The fields each family accepts; everything else must stay unset.
    fn family_fields(&self) -> [(&'static str, bool, bool); 18] {
        let step = self.kind == IcKind::Step;
        let ell = self.kind == IcKind::Elliptic;
        let pert = self.kind == IcKind::Perturbed;
        [
            ("u_core", self.u_core.is_some(), step),
            ("v_core", self.v_core.is_some(), step),
            ("x_split", self.x_split.is_some(), step),
            ("u_out", self.u_out.is_some(), step),
            ("v_split", self.v_split.is_some(), step),
            ("u0", self.u0.is_some(), ell),
            ("v0", self.v0.is_some(), ell),
            ("x1", self.x1.is_some(), ell),
            ("y1", self.y1.is_some(), ell),
            ("x2", self.x2.is_some(), ell),
            ("y2", self.y2.is_some(), ell),
            ("d11", self.d11.is_some(), ell),
            ("d12", self.d12.is_some(), ell),
            ("d21", self.d21.is_some(), ell),
            ("d22", self.d22.is_some(), ell),
            ("e1", self.e1.is_some(), pert),
            ("e2", self.e2.is_some(), pert),
            ("e3", self.e3.is_some(), pert),
        ]
    }

    fn finalize(&mut self, p: &ModelParams) -> CmdResult<()> {
        let kind_name = match self.kind {
            IcKind::Step => "step",
            IcKind::Elliptic => "elliptic",
            IcKind::Perturbed => "perturbed",
        };
        for (name, set, allowed) in self.family_fields() {
            if set && !allowed {
                return Err(Failure::config(format!(
                    "ic field '{name}' does not apply to type = \"{kind_name}\""
                )));
            }
        }
        match self.kind {
            IcKind::Step => {
                if self.u_core.is_none() || self.v_core.is_none() {
                    let (u_star, v_star) = coexistence_equilibrium(p).ok_or_else(|| {
                        Failure::config(
                            "step ic defaults to the coexistence state, which does not \
                             exist here; set u_core and v_core explicitly",
                        )
                    })?;
                    self.u_core.get_or_insert(u_star);
                    self.v_core.get_or_insert(v_star);
                }
                let x_split = *self.x_split.get_or_insert(3.0);
                self.u_out.get_or_insert(1.0);
                self.v_split.get_or_insert(x_split);
            }
            IcKind::Elliptic => {
                let d = EllipticInit::default();
                self.u0.get_or_insert(d.u0);
                self.v0.get_or_insert(d.v0);
                self.x1.get_or_insert(d.x1);
                self.y1.get_or_insert(d.y1);
                self.x2.get_or_insert(d.x2);
                self.y2.get_or_insert(d.y2);
                self.d11.get_or_insert(d.d11);
                self.d12.get_or_insert(d.d12);
                self.d21.get_or_insert(d.d21);
                self.d22.get_or_insert(d.d22);
            }
            IcKind::Perturbed => {
                let d = PerturbedInit::default();
                self.e1.get_or_insert(d.e1);
                self.e2.get_or_insert(d.e2);
                self.e3.get_or_insert(d.e3);
            }
        }
        Ok(())
    }

    /// Build the library-side initial condition. Call after `finalize`.
    pub fn build(&self) -> CmdResult<InitialCondition> {
        Ok(match self.kind {
            IcKind::Step => InitialCondition::Step(StepInit {
                u_core: self.expect("u_core", self.u_core)?,
                v_core: self.expect("v_core", self.v_core)?,
                x_split: self.expect("x_split", self.x_split)?,
                u_out: self.expect("u_out", self.u_out)?,
                v_split: self.expect("v_split", self.v_split)?,
            }),
            IcKind::Elliptic => InitialCondition::Elliptic(EllipticInit {
                u0: self.expect("u0", self.u0)?,
                v0: self.expect("v0", self.v0)?,
                x1: self.expect("x1", self.x1)?,
                y1: self.expect("y1", self.y1)?,
                x2: self.expect("x2", self.x2)?,
                y2: self.expect("y2", self.y2)?,
                d11: self.expect("d11", self.d11)?,
                d12: self.expect("d12", self.d12)?,
                d21: self.expect("d21", self.d21)?,
                d22: self.expect("d22", self.d22)?,
            }),
            IcKind::Perturbed => InitialCondition::Perturbed(PerturbedInit {
                e1: self.expect("e1", self.e1)?,
                e2: self.expect("e2", self.e2)?,
                e3: self.expect("e3", self.e3)?,
            }),
        })
    }

    fn expect(&self, name: &str, v: Option<f64>) -> CmdResult<f64> {
        v.ok_or_else(|| Failure::config(format!("ic.{name} missing after resolution")))
    }
}
