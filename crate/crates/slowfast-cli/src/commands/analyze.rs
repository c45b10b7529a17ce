//! `analyze`: the closed-form bifurcation report for one parameter set.
//!
//! Writes `report.csv` as `key,value` rows. Quantities that do not exist
//! at these parameters (no coexistence state, infeasible invasion, …)
//! become explanatory rows rather than failures, so the report is always
//! written; only a broken computation aborts the run.

use std::path::Path;

use num_complex::Complex64;
use slowfast::gspt::{classify_regime, relaxation_feasible};
use slowfast::kinetics::{equilibria, fold_point, stability_thresholds, EquilibriumKind};
use slowfast::ode::{locate_explosion_window, ExplosionSearch};
use slowfast::params::{AlleeRegime, ModelParams};
use slowfast::pde::{tw_eigen_analysis, tw_min_speed};
use slowfast::Error;

use crate::config::RunConfig;
use crate::failure::CmdResult;
use crate::output::{sanitize, sig, write_atomic};

type Rows = Vec<(String, String)>;

fn push(rows: &mut Rows, key: &str, value: String) {
    rows.push((key.to_string(), value));
}

fn push_complex(rows: &mut Rows, key: &str, z: Complex64) {
    push(rows, &format!("{key}_re"), sig(z.re));
    push(rows, &format!("{key}_im"), sig(z.im));
}

pub fn run(cfg: &RunConfig, p: &ModelParams, out: &Path) -> CmdResult<()> {
    let a = cfg.analyze.as_ref().expect("finalize filled the section");
    let mut rows: Rows = Vec::new();

    let allee = match p.allee_regime() {
        AlleeRegime::Weak => "weak",
        AlleeRegime::Strong => "strong",
        AlleeRegime::Absent => "absent",
    };
    push(&mut rows, "allee_regime", allee.to_string());

    let mut has_coexistence = false;
    for r in equilibria(p) {
        let prefix = match r.kind {
            EquilibriumKind::Origin => "e0",
            EquilibriumKind::PreyOnly => "e1",
            EquilibriumKind::Coexistence => {
                has_coexistence = true;
                "estar"
            }
        };
        push(&mut rows, &format!("{prefix}_u"), sig(r.u));
        push(&mut rows, &format!("{prefix}_v"), sig(r.v));
        push(
            &mut rows,
            &format!("{prefix}_stability"),
            r.stability.label().to_string(),
        );
        push_complex(&mut rows, &format!("{prefix}_eig1"), r.eigenvalues[0]);
        push_complex(&mut rows, &format!("{prefix}_eig2"), r.eigenvalues[1]);
    }
    if !has_coexistence {
        push(
            &mut rows,
            "note",
            "no coexistence equilibrium at this mortality".into(),
        );
    }

    match stability_thresholds(p) {
        Ok(t) => {
            push(&mut rows, "delta_t", sig(t.delta_t));
            push(&mut rows, "delta_h", sig(t.delta_h));
        }
        Err(e) => push(&mut rows, "thresholds_error", sanitize(&e.to_string())),
    }

    match fold_point(p) {
        Ok(g) => {
            push(&mut rows, "fold_u", sig(g.fold_u));
            push(&mut rows, "fold_v", sig(g.fold_v));
            push(&mut rows, "transcritical_v", sig(g.transcritical_v));
        }
        Err(e) => push(&mut rows, "fold_error", sanitize(&e.to_string())),
    }

    // Regime band. The relaxation-onset boundary has no closed form; it
    // is pinned by simulation only when asked, otherwise the III and IV
    // bands stay merged.
    let delta_ro = if a.regime_simulation && has_coexistence {
        match locate_explosion_window(p, &ExplosionSearch::default()) {
            Ok(w) => Some(w.delta_ro),
            Err(Error::ExplosionNotDetected(_)) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    match classify_regime(p, delta_ro) {
        Ok(r) => {
            push(&mut rows, "regime", r.regime.label().to_string());
            push(&mut rows, "delta_c", sig(r.delta_c));
            let ro = r.delta_ro.map(sig).unwrap_or_else(|| "none".into());
            push(&mut rows, "delta_ro", ro);
        }
        Err(Error::NotApplicable(_)) => push(&mut rows, "regime", "none".into()),
        Err(e) => push(&mut rows, "regime_error", sanitize(&e.to_string())),
    }

    match relaxation_feasible(p) {
        Ok(b) => push(&mut rows, "relaxation_feasible", b.to_string()),
        Err(_) => push(&mut rows, "relaxation_feasible", "none".into()),
    }

    let product = p.delta * (1.0 + p.alpha);
    push(&mut rows, "invasion_feasible", (product < 1.0).to_string());
    match tw_min_speed(p) {
        Ok(c) => push(&mut rows, "c_min", sig(c)),
        Err(Error::InvasionInfeasible { .. }) => push(&mut rows, "c_min", "none".into()),
        Err(e) => push(&mut rows, "tw_error", sanitize(&e.to_string())),
    }

    if let Some(c) = a.wave_speed {
        if p.d > 0.0 && c > 0.0 {
            match tw_eigen_analysis(p, c) {
                Ok(tw) => {
                    push(&mut rows, "tw_speed", sig(tw.c));
                    for (k, ev) in tw.q1_eigenvalues.iter().enumerate() {
                        push_complex(&mut rows, &format!("tw_q1_eig{}", k + 1), *ev);
                    }
                    if let Some(evs) = tw.qstar_eigenvalues {
                        for (k, ev) in evs.iter().enumerate() {
                            push_complex(&mut rows, &format!("tw_qstar_eig{}", k + 1), *ev);
                        }
                    }
                    let wave = tw
                        .wave_type
                        .map(|w| w.label().to_string())
                        .unwrap_or_else(|| "none".into());
                    push(&mut rows, "wave_type", wave);
                }
                Err(e) => push(&mut rows, "tw_error", sanitize(&e.to_string())),
            }
        }
    }

    let mut text = String::from("key,value\n");
    for (k, v) in &rows {
        text.push_str(k);
        text.push(',');
        text.push_str(v);
        text.push('\n');
    }
    write_atomic(&out.join("report.csv"), text.as_bytes())
}
