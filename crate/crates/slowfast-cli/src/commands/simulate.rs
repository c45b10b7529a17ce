//! `simulate`: time integration, from a single kinetics trajectory up to
//! tiled 2D reaction-diffusion runs.
//!
//! ODE trajectory mode writes `trajectory.csv`; ODE cycle mode writes one
//! `cycle_NN.csv` orbit per requested mortality plus a `cycles.csv`
//! summary; the spatial modes write numbered snapshot files with a
//! `snapshots.csv` index, per-step means in `means.csv`, and optionally a
//! `front.csv` level-crossing trace.

use std::path::Path;

use slowfast::ode::{detect_cycle, hermite, integrate_observed, CycleOptions, IntegratorOptions};
use slowfast::params::ModelParams;
use slowfast::pde::{
    make_initial_condition, measure_front_speed, Field, GridSpec, Simulation, Species,
};

use crate::config::{
    OdeSimConfig, PdeSimConfig, RunConfig, SimKind, SnapshotFormat, SpeciesChoice,
};
use crate::failure::{CmdResult, Failure};
use crate::output::{pgm_bytes, sanitize, sig, write_atomic};

pub fn run(cfg: &RunConfig, p: &ModelParams, out: &Path) -> CmdResult<()> {
    let s = cfg.simulate.as_ref().expect("finalize checked the section");
    match s.kind {
        SimKind::Ode => {
            let o = s.ode.as_ref().expect("finalize checked the mode");
            match &o.deltas {
                Some(deltas) => cycles(o, deltas, p, out),
                None => trajectory(o, p, out),
            }
        }
        SimKind::Pde1d => spatial(s.pde.as_ref().unwrap(), p, out, false),
        SimKind::Pde2d => spatial(s.pde.as_ref().unwrap(), p, out, true),
    }
}

/// Integrate the kinetics and write the path sampled at a fixed cadence.
fn trajectory(o: &OdeSimConfig, p: &ModelParams, out: &Path) -> CmdResult<()> {
    let t_end = o.t_end.expect("trajectory mode");
    let cadence = o.sample_every.expect("resolved");
    let y0 = [o.u0.unwrap(), o.v0.unwrap()];
    let opts = IntegratorOptions {
        tol: o.tol.unwrap(),
        // Same cap as cycle detection: keeps the prey equation inside the
        // explicit stability region while it sits far below tolerance
        // near the extinction axis.
        max_h: 0.5,
        ..IntegratorOptions::default()
    };

    let mut text = String::from("t,u,v\n");
    let mut push_row = |t: f64, y: [f64; 2]| {
        text.push_str(&format!("{},{},{}\n", sig(t), sig(y[0]), sig(y[1])));
    };
    push_row(0.0, y0);
    let mut k: u64 = 1;
    let mut next = cadence;
    let y_end = integrate_observed(p, y0, 0.0, t_end, &opts, |rec| {
        while next <= rec.t1 && next < t_end {
            let theta = (next - rec.t0) / (rec.t1 - rec.t0);
            push_row(next, hermite(rec, theta));
            k += 1;
            next = k as f64 * cadence;
        }
    })?;
    push_row(t_end, y_end);
    write_atomic(&out.join("trajectory.csv"), text.as_bytes())
}

/// Detect the attracting cycle at each mortality; write each orbit and a
/// summary table.
fn cycles(o: &OdeSimConfig, deltas: &[f64], p: &ModelParams, out: &Path) -> CmdResult<()> {
    let mut summary = String::from(
        "delta,epsilon,type,period,u_min,u_max,v_min,v_max,tracking_extent,jump,warning\n",
    );
    for (i, &delta) in deltas.iter().enumerate() {
        let m = p.with_delta(delta)?;
        let opts = CycleOptions {
            tol: o.tol.unwrap(),
            seed: Some([o.u0.unwrap(), o.v0.unwrap()]),
            ..CycleOptions::default()
        };
        let head = format!("{},{}", sig(delta), sig(m.epsilon));
        match detect_cycle(&m, &opts)? {
            Some(c) => {
                let mut orbit = String::from("t,u,v\n");
                for (t, y) in &c.orbit {
                    orbit.push_str(&format!("{},{},{}\n", sig(*t), sig(y[0]), sig(y[1])));
                }
                write_atomic(&out.join(format!("cycle_{i:02}.csv")), orbit.as_bytes())?;
                let jump = match c.jump {
                    Some(slowfast::ode::JumpSide::Left) => "left",
                    Some(slowfast::ode::JumpSide::Right) => "right",
                    None => "",
                };
                summary.push_str(&format!(
                    "{head},{},{},{},{},{},{},{},{jump},{}\n",
                    c.kind.label(),
                    sig(c.period),
                    sig(c.u_min),
                    sig(c.u_max),
                    sig(c.v_min),
                    sig(c.v_max),
                    sig(c.tracking_extent),
                    c.warning.as_deref().map(sanitize).unwrap_or_default(),
                ));
            }
            None => summary.push_str(&format!("{head},none,,,,,,,,\n")),
        }
    }
    write_atomic(&out.join("cycles.csv"), summary.as_bytes())
}

fn species_of(choice: SpeciesChoice) -> Species {
    match choice {
        SpeciesChoice::U => Species::U,
        SpeciesChoice::V => Species::V,
    }
}

/// How many row bands may update concurrently: the configured tile count,
/// capped by the SLOWFAST_THREADS environment variable when set.
fn effective_tiles(requested: usize) -> CmdResult<usize> {
    match std::env::var("SLOWFAST_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(requested),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(Failure::config("SLOWFAST_THREADS is not valid UTF-8"))
        }
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(requested.min(n)),
            _ => Err(Failure::config(format!(
                "SLOWFAST_THREADS must be a positive integer, got '{s}'"
            ))),
        },
    }
}

/// One snapshot file per species. CSV holds one grid row per line; PGM is
/// 8-bit min-max scaled with the scaling recorded in a text sidecar.
fn write_snapshot(
    out: &Path,
    index: usize,
    format: SnapshotFormat,
    field: &Field,
) -> CmdResult<(String, String)> {
    let ext = match format {
        SnapshotFormat::Csv => "csv",
        SnapshotFormat::Pgm => "pgm",
    };
    let names = (
        format!("u_{index:06}.{ext}"),
        format!("v_{index:06}.{ext}"),
    );
    for (name, data) in [(&names.0, &field.u), (&names.1, &field.v)] {
        match format {
            SnapshotFormat::Csv => {
                let mut text = String::new();
                for row in data.chunks(field.nx) {
                    let cells: Vec<String> = row.iter().map(|&x| sig(x)).collect();
                    text.push_str(&cells.join(","));
                    text.push('\n');
                }
                write_atomic(&out.join(name), text.as_bytes())?;
            }
            SnapshotFormat::Pgm => {
                write_atomic(
                    &out.join(name),
                    &pgm_bytes(field.nx, field.ny, data),
                )?;
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for &x in data.iter() {
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
                let sidecar = format!("t,{}\nmin,{}\nmax,{}\n", sig(field.t), sig(lo), sig(hi));
                let txt_name = name.replace(".pgm", ".txt");
                write_atomic(&out.join(txt_name), sidecar.as_bytes())?;
            }
        }
    }
    Ok(names)
}

fn spatial(c: &PdeSimConfig, p: &ModelParams, out: &Path, two_d: bool) -> CmdResult<()> {
    let grid = if two_d {
        GridSpec::two_d(c.nx, c.ny.unwrap(), c.dx)
    } else {
        GridSpec::one_d(c.nx, c.dx)
    }?;
    let ic = c.ic.build()?;
    let (field, clamped) = make_initial_condition(p, &ic, &grid)?;
    if clamped > 0 {
        eprintln!("warning: initial condition clamped {clamped} negative cells up to zero");
    }

    let tiles = effective_tiles(c.tiles)?;
    let mut sim = Simulation::new(field, p, c.dt)?.with_tiles(tiles);

    let keep_fields = c.front.is_some();
    let mut kept: Vec<Field> = Vec::new();
    let mut index_rows = String::from("index,t,file_u,file_v\n");
    let mut index = 0usize;
    // A snapshot-write failure has to cross the library boundary and back;
    // park it here so its exit code survives the round trip.
    let mut write_failure: Option<Failure> = None;
    let means = sim.run(c.t_end, c.snapshot_every, |f| {
        match write_snapshot(out, index, c.format, f) {
            Ok((file_u, file_v)) => {
                index_rows.push_str(&format!("{index},{},{file_u},{file_v}\n", sig(f.t)));
                index += 1;
                if keep_fields {
                    kept.push(f.clone());
                }
                Ok(())
            }
            Err(e) => {
                let msg = e.message.clone();
                write_failure = Some(e);
                Err(slowfast::Error::InvalidInput(msg))
            }
        }
    });
    let means = match means {
        Ok(m) => m,
        Err(e) => {
            return Err(write_failure.unwrap_or_else(|| Failure::from(e)));
        }
    };
    write_atomic(&out.join("snapshots.csv"), index_rows.as_bytes())?;

    let mut means_text = String::from("t,mean_u,mean_v\n");
    for (t, mu, mv) in &means {
        means_text.push_str(&format!("{},{},{}\n", sig(*t), sig(*mu), sig(*mv)));
    }
    write_atomic(&out.join("means.csv"), means_text.as_bytes())?;

    if sim.clamped_cells() > 0 {
        eprintln!(
            "warning: clamped {} negative cell updates up to zero (deepest {})",
            sim.clamped_cells(),
            sim.deepest_negative(),
        );
    }

    if let Some(fc) = &c.front {
        let record = measure_front_speed(&kept, species_of(fc.species), fc.level.unwrap())?;
        let mut text = String::from("t,x_front\n");
        for (t, x) in &record.samples {
            text.push_str(&format!("{},{}\n", sig(*t), sig(*x)));
        }
        text.push_str(&format!("speed,{}\n", sig(record.speed)));
        text.push_str(&format!("residual,{}\n", sig(record.residual)));
        write_atomic(&out.join("front.csv"), text.as_bytes())?;
    }
    Ok(())
}
