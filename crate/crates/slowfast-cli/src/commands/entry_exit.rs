//! `entry-exit`: the singular relaxation orbit and its exit height.
//!
//! Writes `report.csv` with the orbit's corner coordinates: the fold the
//! slow flow falls off, the entry height on the extinction axis, the
//! exit height the delay integral balances at, and where the fast fiber
//! from the exit lands back on the attracting branch.

use std::path::Path;

use slowfast::gspt::singular_orbit;
use slowfast::params::ModelParams;

use crate::config::RunConfig;
use crate::failure::CmdResult;
use crate::output::{sig, write_atomic};

pub fn run(cfg: &RunConfig, p: &ModelParams, out: &Path) -> CmdResult<()> {
    let e = cfg.entry_exit.as_ref().expect("finalize filled the section");
    let orbit = singular_orbit(p, e.v1)?;
    let text = format!(
        "key,value\nu_max,{}\nfold_v,{}\nv1,{}\nv0,{}\nlanding_u,{}\n",
        sig(orbit.fold_u),
        sig(orbit.fold_v),
        sig(orbit.v1),
        sig(orbit.v0),
        sig(orbit.landing_u),
    );
    write_atomic(&out.join("report.csv"), text.as_bytes())
}
