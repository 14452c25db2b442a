//! `converge`: the Boussinesq-vs-reduced-model convergence study, written as
//! an error-table CSV, fitted slopes, and a gnuplot-compatible data file.

use crate::commands::solve::parse_model;
use crate::config::Config;
use crate::out::{g17, OutputDir};
use fracwave::experiments::report::{error_table_csv, gnuplot_dat};
use fracwave::experiments::{run_unidirectional_comparison, ConvergenceStudy, GaussianSpec};
use fracwave::{ModelId, Result};
use serde_json::{Map, Value};
use std::path::Path;

const KEYS: &[&str] = &[
    "grid.n",
    "grid.length",
    "targets",
    "p",
    "nu",
    "epsilons",
    "deltas",
    "sweep.eps_fixed",
    "sweep.delta_fixed",
    "matched.eps",
    "matched.delta",
    "profile.center",
    "profile.sigma",
    "profile.amplitude",
    "s_end",
    "stepper.dt_factor",
    "report.wall_clock",
    "output.dir",
];

pub fn run(cfg: &mut Config, out_dir: &Path, seed: u64) -> Result<i32> {
    cfg.allow(KEYS);
    cfg.finish()?;

    let n = cfg.require_usize("grid.n")?;
    let length = cfg.require_f64("grid.length")?;
    let targets: Vec<ModelId> = cfg
        .str_or("targets", "GfCH,GfKdV")
        .split(',')
        .map(|s| parse_model(s.trim()))
        .collect::<Result<_>>()?;
    let matched = match (cfg.get_f64("matched.eps")?, cfg.get_f64("matched.delta")?) {
        (Some(e), Some(d)) => Some((e, d)),
        (None, None) => None,
        _ => {
            return Err(fracwave::Error::Config(
                "matched.eps and matched.delta must be given together".into(),
            ))
        }
    };
    let study = ConvergenceStudy {
        targets,
        p: cfg.usize_or("p", 1)? as u32,
        nu: cfg.f64_or("nu", 1.0)?,
        epsilons: cfg.require_f64_list("epsilons")?,
        deltas: cfg.require_f64_list("deltas")?,
        eps_fixed: cfg.require_f64("sweep.eps_fixed")?,
        delta_fixed: cfg.require_f64("sweep.delta_fixed")?,
        matched,
        n,
        slow_length: length,
        profile: GaussianSpec {
            center: cfg.f64_or("profile.center", length / 2.0)?,
            sigma: cfg.f64_or("profile.sigma", length / 26.0)?,
            amplitude: cfg.f64_or("profile.amplitude", 1.0)?,
        },
        s_end: cfg.f64_or("s_end", 1.0)?,
        dt_factor: cfg.f64_or("stepper.dt_factor", 0.1)?,
        wall_clock: cfg.bool_or("report.wall_clock", false)?,
    };

    let report = run_unidirectional_comparison(&study)?;

    let mut out = OutputDir::create(out_dir)?;
    out.write("errors.csv", &error_table_csv(&report))?;
    out.write("sweeps.dat", &gnuplot_dat(&report))?;

    let mut slopes = Map::new();
    for s in &report.slopes {
        let mut entry = Map::new();
        if let Some(v) = s.slope_eps {
            entry.insert("eps".into(), Value::String(g17(v)));
        }
        if let Some(v) = s.slope_delta {
            entry.insert("delta".into(), Value::String(g17(v)));
        }
        slopes.insert(s.model.name().to_string(), Value::Object(entry));
    }
    let mut extra = Map::new();
    extra.insert("slopes".into(), Value::Object(slopes));
    extra.insert("rows".into(), report.rows.len().into());
    extra.insert("study_digest".into(), report.config_digest.clone().into());
    out.write_manifest("converge", cfg, seed, &report.warnings, extra)?;

    for s in &report.slopes {
        println!(
            "{}: eps-slope {}, delta-slope {}",
            s.model.name(),
            s.slope_eps.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into()),
            s.slope_delta.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into()),
        );
    }
    for w in &report.warnings {
        log::warn!("{w}");
    }
    println!("converge: {} rows -> {}", report.rows.len(), out.path().display());
    Ok(0)
}
