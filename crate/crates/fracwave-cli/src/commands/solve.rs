//! `solve`: integrate one model from a configured initial profile and write
//! snapshot CSVs plus the manifest.

use crate::config::Config;
use crate::out::{g17, OutputDir};
use fracwave::experiments::right_going_state;
use fracwave::frames::slow_grid;
use fracwave::models::{BoussinesqState, Flow};
use fracwave::profiles;
use fracwave::stepper::{integrate_boussinesq, integrate_flow, Scheme, StepperConfig};
use fracwave::{Error, Grid, ModelId, ModelParams, RealField, Result};
use serde_json::Map;
use std::path::Path;

const KEYS: &[&str] = &[
    "grid.n",
    "grid.length",
    "model",
    "p",
    "nu",
    "eps",
    "delta",
    "kappa1",
    "kappa2",
    "profile.kind",
    "profile.center",
    "profile.sigma",
    "profile.amplitude",
    "profile.width",
    "profile.kmin",
    "profile.kmax",
    "stepper.scheme",
    "stepper.dt",
    "stepper.dt_factor",
    "stepper.t_end",
    "stepper.snapshot_every",
    "output.dir",
];

pub fn parse_model(name: &str) -> Result<ModelId> {
    name.parse::<ModelId>().map_err(|_| {
        Error::Config(format!(
            "unknown model '{name}'; valid models: {}",
            ModelId::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
        ))
    })
}

fn build_profile(cfg: &Config, grid: &Grid, p: u32, seed: u64) -> Result<RealField> {
    let center = cfg.f64_or("profile.center", grid.length() / 2.0)?;
    let amplitude = cfg.f64_or("profile.amplitude", 1.0)?;
    match cfg.str_or("profile.kind", "gaussian") {
        "gaussian" => {
            let sigma = cfg.f64_or("profile.sigma", grid.length() / 26.0)?;
            Ok(profiles::periodic_gaussian(grid, center, sigma).scale(amplitude))
        }
        "sech" => {
            let width = cfg.f64_or("profile.width", 0.5)?;
            Ok(profiles::sech_pow(grid, amplitude, width, center, 2.0 / p as f64))
        }
        "band" => {
            let kmin = cfg.usize_or("profile.kmin", 1)?;
            let kmax = cfg.usize_or("profile.kmax", grid.n() / 6)?;
            Ok(profiles::band_limited(grid, kmin, kmax, seed, amplitude))
        }
        other => Err(Error::Config(format!(
            "profile.kind '{other}' is not one of gaussian, sech, band"
        ))),
    }
}

/// Fraction of max amplitude below which a sample counts as unsupported.
const SUPPORT_THRESHOLD: f64 = 1e-10;

fn support_reaches_edge(f: &RealField) -> bool {
    let n = f.grid().n();
    let thr = SUPPORT_THRESHOLD * f.max_norm();
    if thr == 0.0 {
        return false;
    }
    (0..10.min(n)).any(|j| f.values()[j].abs() > thr || f.values()[n - 1 - j].abs() > thr)
}

struct SnapshotSink<'a> {
    out: &'a mut OutputDir,
    every: usize,
    last_step: usize,
    count: usize,
    times: Vec<f64>,
    edge_warned: bool,
}

impl SnapshotSink<'_> {
    fn record(&mut self, step: usize, t: f64, f: &RealField) -> Result<()> {
        if !(step % self.every == 0 || step == self.last_step) {
            return Ok(());
        }
        if !self.edge_warned && support_reaches_edge(f) {
            self.edge_warned = true;
        }
        let mut csv = String::from("x,value\n");
        for (j, v) in f.values().iter().enumerate() {
            csv.push_str(&g17(f.grid().node(j)));
            csv.push(',');
            csv.push_str(&g17(*v));
            csv.push('\n');
        }
        self.out.write(&format!("snapshot_{:06}.csv", self.count), &csv)?;
        self.times.push(t);
        self.count += 1;
        Ok(())
    }
}

pub fn run(cfg: &mut Config, out_dir: &Path, seed: u64) -> Result<i32> {
    cfg.allow(KEYS);
    cfg.finish()?;

    let n = cfg.require_usize("grid.n")?;
    let length = cfg.require_f64("grid.length")?;
    let grid = Grid::new(n, length)?;
    let model = parse_model(cfg.require("model")?)?;
    let p = cfg.usize_or("p", 1)? as u32;
    let nu = cfg.f64_or("nu", 1.0)?;
    let eps = cfg.f64_or("eps", 1.0)?;
    let delta = cfg.f64_or("delta", 1.0)?;
    let params = ModelParams::new(p, nu, eps, delta)?;
    let t_end = cfg.require_f64("stepper.t_end")?;
    let every = cfg.usize_or("stepper.snapshot_every", usize::MAX)?;

    let mut out = OutputDir::create(out_dir)?;
    let mut warnings: Vec<String> = Vec::new();
    let profile = build_profile(cfg, &grid, p, seed)?;

    let (dt, steps, scheme) = {
        let is_boussinesq = model == ModelId::Boussinesq;
        let flow_stiff = !is_boussinesq && Flow::from_id(model, params)?.is_stiff();
        let default_scheme = if flow_stiff { Scheme::Rk4IntegratingFactor } else { Scheme::Rk4 };
        let scheme = match cfg.raw("stepper.scheme") {
            Some(s) => s.parse::<Scheme>()?,
            None => default_scheme,
        };
        // default step 0.2 dx, shrunk to divide the horizon exactly;
        // for Boussinesq the physical grid is length/delta wide
        let dx = if is_boussinesq { Grid::new(n, length / delta)?.dx() } else { grid.dx() };
        let dt_req = match cfg.get_f64("stepper.dt")? {
            Some(dt) => dt,
            None => cfg.f64_or("stepper.dt_factor", 0.2)? * dx,
        };
        let steps = (t_end / dt_req).ceil().max(1.0) as usize;
        (t_end / steps as f64, steps, scheme)
    };
    let stepper = StepperConfig::new(scheme, dt, t_end)?;

    let mut sink = SnapshotSink {
        out: &mut out,
        every: every.max(1),
        last_step: steps,
        count: 0,
        times: Vec::new(),
        edge_warned: false,
    };

    if model == ModelId::Boussinesq {
        // the profile describes the slow-frame leading field; initial data
        // follows the right-going closure
        let x_grid = Grid::new(n, length / delta)?;
        let u0_slow = fracwave::frames::relabel_onto(&profile, &slow_grid(&x_grid, delta)?, "solve profile")?;
        let state0 = right_going_state(&u0_slow, &params, &x_grid)?;
        let mut err: Option<Error> = None;
        integrate_boussinesq(&params, &state0, &stepper, |step, t, st: &BoussinesqState| {
            if err.is_none() {
                if let Err(e) = sink.record(step, t, &st.u) {
                    err = Some(e);
                }
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
    } else {
        let flow = Flow::from_id(model, params)?;
        let mut err: Option<Error> = None;
        integrate_flow(&flow, &profile, &stepper, |step, t, f| {
            if err.is_none() {
                if let Err(e) = sink.record(step, t, f) {
                    err = Some(e);
                }
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
    }

    let times = std::mem::take(&mut sink.times);
    let snapshots = sink.count;
    let edge_warned = sink.edge_warned;
    drop(sink);
    if edge_warned {
        warnings.push("solution support reached the box edge (threshold 1e-10 of max amplitude)".into());
    }

    let mut extra = Map::new();
    extra.insert("model".into(), model.name().into());
    extra.insert("scheme".into(), scheme.name().into());
    extra.insert("dt".into(), g17(dt).into());
    extra.insert("steps".into(), steps.into());
    extra.insert("snapshots".into(), snapshots.into());
    extra.insert(
        "snapshot_times".into(),
        times.iter().map(|t| serde_json::Value::String(g17(*t))).collect(),
    );
    out.write_manifest("solve", cfg, seed, &warnings, extra)?;
    log::info!("solve finished: {snapshots} snapshots in {}", out_dir.display());
    Ok(0)
}
