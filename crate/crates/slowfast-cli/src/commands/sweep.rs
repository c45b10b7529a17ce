//! `sweep`: cycle detection across a list of mortality values, with an
//! optional canard-explosion bisection.
//!
//! Writes `sweep.csv` with one row per mortality. The `type` column is
//! one of the cycle labels, `none` (no cycle found), or `error`; the
//! numeric columns are left empty for the last two. With
//! `explosion = true` the window bisection runs afterwards and writes
//! `explosion.csv`; `sweep.csv` is already on disk if that search fails.

use std::path::Path;

use slowfast::ode::{bifurcation_sweep, locate_explosion_window, CycleOptions, ExplosionSearch};
use slowfast::params::ModelParams;

use crate::config::RunConfig;
use crate::failure::CmdResult;
use crate::output::{sig, write_atomic};

pub fn run(cfg: &RunConfig, p: &ModelParams, out: &Path) -> CmdResult<()> {
    let s = cfg.sweep.as_ref().expect("finalize checked the section");

    let rows = bifurcation_sweep(p, &s.deltas, &CycleOptions::default());
    let mut text = String::from("delta,epsilon,type,period,u_min,u_max,v_min,v_max\n");
    for row in &rows {
        let head = format!("{},{}", sig(row.delta), sig(row.epsilon));
        match &row.outcome {
            Ok(Some(c)) => {
                text.push_str(&format!(
                    "{head},{},{},{},{},{},{}\n",
                    c.kind.label(),
                    sig(c.period),
                    sig(c.u_min),
                    sig(c.u_max),
                    sig(c.v_min),
                    sig(c.v_max),
                ));
            }
            Ok(None) => text.push_str(&format!("{head},none,,,,,\n")),
            Err(e) => {
                eprintln!("warning: delta = {}: {e}", row.delta);
                text.push_str(&format!("{head},error,,,,,\n"));
            }
        }
    }
    write_atomic(&out.join("sweep.csv"), text.as_bytes())?;

    if s.explosion {
        let w = locate_explosion_window(p, &ExplosionSearch::default())?;
        let text = format!(
            "delta_lo,delta_hi,width,delta_ro\n{},{},{},{}\n",
            sig(w.delta_lo),
            sig(w.delta_hi),
            sig(w.width),
            sig(w.delta_ro),
        );
        write_atomic(&out.join("explosion.csv"), text.as_bytes())?;
    }
    Ok(())
}
