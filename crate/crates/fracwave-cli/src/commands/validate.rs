//! `validate`: the hierarchy / reduction-chain / conservation battery.
//! Exit code 0 iff every check lands under its module tolerance.

use crate::config::Config;
use crate::out::{g17, OutputDir};
use fracwave::experiments::{run_conservation_audit, GaussianSpec};
use fracwave::hierarchy::{hierarchy_residuals, HierarchyBundle, U3sCoeffs};
use fracwave::models::{classical_ch_rhs, gch_rhs, gfch_rhs, mch_rhs};
use fracwave::profiles::{band_limited, periodic_gaussian};
use fracwave::{Error, Grid, ModelId, ModelParams, RealField, Result};
use serde_json::Map;
use std::path::Path;

const KEYS: &[&str] = &[
    "grid.n",
    "grid.length",
    "profile.center",
    "profile.sigma",
    "profile.amplitude",
    "reduction.fields",
    "conservation.horizon",
    "conservation.dt_factor",
    "output.dir",
];

const HIERARCHY_TOL: f64 = 1e-10;
const REDUCTION_TOL: f64 = 1e-12;
const DRIFT_TOL: f64 = 1e-8;
const MOMENTUM_TOL: f64 = 1e-9;

struct CheckRow {
    check: String,
    p: u32,
    nu: f64,
    value: f64,
    tolerance: f64,
}

impl CheckRow {
    fn pass(&self) -> bool {
        self.value < self.tolerance
    }
}

fn rel_diff(a: &RealField, b: &RealField) -> f64 {
    a.max_diff(b) / a.max_norm().max(b.max_norm()).max(1e-300)
}

pub fn run(cfg: &mut Config, out_dir: &Path, seed: u64, mutate: Option<&str>) -> Result<i32> {
    cfg.allow(KEYS);
    cfg.finish()?;

    let coeffs = match mutate {
        None => U3sCoeffs::default(),
        Some(name) => U3sCoeffs::mutated(name).ok_or_else(|| {
            Error::Config(format!(
                "unknown mutation '{name}' (valid: {})",
                U3sCoeffs::MUTATIONS.join(", ")
            ))
        })?,
    };

    let n = cfg.usize_or("grid.n", 256)?;
    let length = cfg.f64_or("grid.length", 160.0)?;
    let center = cfg.f64_or("profile.center", length / 2.0)?;
    let sigma = cfg.f64_or("profile.sigma", length / 26.0)?;
    let amplitude = cfg.f64_or("profile.amplitude", 1.0)?;
    let fields = cfg.usize_or("reduction.fields", 50)?;
    let horizon = cfg.f64_or("conservation.horizon", 10.0)?;
    let dt_factor = cfg.f64_or("conservation.dt_factor", 0.1)?;

    let grid = Grid::new(n, length)?;
    let u0 = periodic_gaussian(&grid, center, sigma).scale(amplitude);
    let mut rows: Vec<CheckRow> = Vec::new();

    // hierarchy residuals per asymptotic order
    for p in [1u32, 2, 3] {
        for nu in [1.0, 1.5, 2.0] {
            let params = ModelParams::new(p, nu, 0.1, 0.1)?;
            let bundle = HierarchyBundle::build_with(u0.clone(), params, 1.0, coeffs)?;
            let r = hierarchy_residuals(&bundle)?;
            for (name, value) in r.as_named() {
                rows.push(CheckRow {
                    check: format!("hierarchy-{name}"),
                    p,
                    nu,
                    value,
                    tolerance: HIERARCHY_TOL,
                });
            }
        }
    }

    // reduction chain on seeded band-limited fields
    let red_grid = Grid::new(64, 21.0)?;
    let mut worst_frac = 0.0f64;
    let mut worst_cubic = 0.0f64;
    let mut worst_classical = 0.0f64;
    for k in 0..fields as u64 {
        let v = band_limited(&red_grid, 1, 9, seed.wrapping_add(k), 0.5);
        for p in [1u32, 2, 3] {
            let params = ModelParams::new(p, 1.0, 0.5, 0.5)?;
            worst_frac = worst_frac.max(rel_diff(&gfch_rhs(&v, &params)?, &gch_rhs(&v, p)?));
        }
        worst_cubic = worst_cubic.max(rel_diff(&gch_rhs(&v, 2)?, &mch_rhs(&v)?));
        worst_classical = worst_classical
            .max(rel_diff(&gch_rhs(&v, 1)?, &classical_ch_rhs(&v, 6.0 / 5.0, 9.0 / 5.0)?));
    }
    rows.push(CheckRow {
        check: "reduction-gfch-vs-gch".into(),
        p: 0,
        nu: 1.0,
        value: worst_frac,
        tolerance: REDUCTION_TOL,
    });
    rows.push(CheckRow {
        check: "reduction-gch-vs-mch".into(),
        p: 2,
        nu: 1.0,
        value: worst_cubic,
        tolerance: REDUCTION_TOL,
    });
    rows.push(CheckRow {
        check: "reduction-gch-vs-classical".into(),
        p: 1,
        nu: 1.0,
        value: worst_classical,
        tolerance: REDUCTION_TOL,
    });

    // conservation drifts (asserted functionals only; the others are
    // reported in the CSV with an infinite tolerance)
    let audit_grid_n = 256;
    let audit_len = 40.0;
    let profile = GaussianSpec { center: 20.0, sigma: 2.0, amplitude: 0.4 };
    let audits: [(ModelId, ModelParams); 4] = [
        (ModelId::GfKdv, ModelParams::new(2, 1.5, 0.5, 0.5)?),
        (ModelId::GfBbm, ModelParams::new(2, 1.5, 0.5, 0.5)?),
        (ModelId::GfCh, ModelParams::new(1, 1.25, 0.5, 0.5)?),
        (ModelId::Boussinesq, ModelParams::new(1, 1.0, 0.25, 0.25)?),
    ];
    for (model, params) in audits {
        let drifts = run_conservation_audit(
            model,
            &params,
            audit_grid_n,
            audit_len,
            &profile,
            horizon,
            dt_factor,
        )?;
        for d in drifts {
            let tol = if !d.asserted {
                f64::INFINITY
            } else if d.functional == "momentum" {
                MOMENTUM_TOL
            } else {
                DRIFT_TOL
            };
            rows.push(CheckRow {
                check: format!("conservation-{}-{}", model.name(), d.functional),
                p: params.p,
                nu: params.nu,
                value: d.max_rel_drift,
                tolerance: tol,
            });
        }
    }

    // serialize and summarize
    let mut csv = String::from("check,p,nu,value,tolerance,pass\n");
    let mut failures = 0usize;
    for r in &rows {
        if !r.pass() {
            failures += 1;
        }
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.check,
            r.p,
            g17(r.nu),
            g17(r.value),
            if r.tolerance.is_finite() { g17(r.tolerance) } else { "measured-only".into() },
            r.pass()
        ));
    }
    let mut out = OutputDir::create(out_dir)?;
    out.write("validate.csv", &csv)?;
    let mut extra = Map::new();
    extra.insert("checks".into(), rows.len().into());
    extra.insert("failures".into(), failures.into());
    if let Some(name) = mutate {
        extra.insert("mutation".into(), name.into());
    }
    out.write_manifest("validate", cfg, seed, &[], extra)?;

    for r in &rows {
        let status = if r.pass() { "ok  " } else { "FAIL" };
        println!(
            "{status} {:<42} p={} nu={:<4} value={:.3e} tol={:.0e}",
            r.check, r.p, r.nu, r.value, r.tolerance
        );
    }
    println!(
        "validate: {} checks, {} failure(s){}",
        rows.len(),
        failures,
        mutate.map(|m| format!(" [mutation: {m}]")).unwrap_or_default()
    );
    Ok(if failures == 0 { 0 } else { 1 })
}
