//! Boussinesq-vs-reduced-model convergence sweeps over the two small
//! parameters.

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::frames;
use crate::grid::Grid;
use crate::hierarchy;
use crate::models::{h_nu_energy, l2_integral, mass, BoussinesqState, Flow};
use crate::oracles::fit_loglog_slope;
use crate::params::{ModelId, ModelParams};
use crate::profiles;
use crate::stepper::{integrate_boussinesq, integrate_flow, Scheme, StepperConfig};
use rayon::prelude::*;
use std::time::Instant;

/// Gaussian test profile for the leading-order field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub center: f64,
    pub sigma: f64,
    pub amplitude: f64,
}

impl GaussianSpec {
    pub fn build(&self, grid: &Grid) -> RealField {
        profiles::periodic_gaussian(grid, self.center, self.sigma).scale(self.amplitude)
    }
}

/// One convergence study: sweeps in eps (delta held) and delta (eps held),
/// plus one matched cell evaluated for every target model.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    /// Reduced models to compare against the parent (GfCH and/or GfKdV).
    pub targets: Vec<ModelId>,
    pub p: u32,
    pub nu: f64,
    pub epsilons: Vec<f64>,
    pub deltas: Vec<f64>,
    pub eps_fixed: f64,
    pub delta_fixed: f64,
    pub matched: Option<(f64, f64)>,
    pub n: usize,
    /// Period of the slow-frame (Y) box; the physical box is `length / delta`.
    pub slow_length: f64,
    pub profile: GaussianSpec,
    pub s_end: f64,
    /// Time step as a fraction of the grid spacing.
    pub dt_factor: f64,
    /// Record wall-clock seconds in rows (defeats byte determinism).
    pub wall_clock: bool,
}

impl ConvergenceStudy {
    pub fn canonical_description(&self) -> String {
        format!(
            "targets={:?};p={};nu={:.17e};eps={:?};deltas={:?};fixed=({:.17e},{:.17e});matched={:?};n={};L={:.17e};profile=({:.17e},{:.17e},{:.17e});s_end={:.17e};dtf={:.17e}",
            self.targets.iter().map(|t| t.name()).collect::<Vec<_>>(),
            self.p,
            self.nu,
            self.epsilons,
            self.deltas,
            self.eps_fixed,
            self.delta_fixed,
            self.matched,
            self.n,
            self.slow_length,
            self.profile.center,
            self.profile.sigma,
            self.profile.amplitude,
            self.s_end,
            self.dt_factor,
        )
    }
}

/// Which sweep a cell belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellTag {
    EpsSweep,
    DeltaSweep,
    Matched,
}

/// One CSV row: a reduced-model run compared against the mapped parent.
#[derive(Debug, Clone)]
pub struct ErrorRow {
    pub model: ModelId,
    pub tag: CellTag,
    pub p: u32,
    pub nu: f64,
    pub eps: f64,
    pub delta: f64,
    pub n: usize,
    pub dt: f64,
    pub s_end: f64,
    pub err_max: f64,
    pub err_l2: f64,
    pub slope_eps: Option<f64>,
    pub slope_delta: Option<f64>,
    pub drift_mass: f64,
    pub drift_energy: f64,
    pub wall_s: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub model: ModelId,
    pub slope_eps: Option<f64>,
    pub slope_delta: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<ErrorRow>,
    pub slopes: Vec<SlopeFit>,
    pub warnings: Vec<String>,
    pub config_digest: String,
}

/// Right-going parent initial data from a slow-frame leading profile:
/// `u = eps U0(delta x)` and `u_t = -u_x + eps delta (assembled U_S at S = 0)`,
/// so the left-going component enters only at the neglected orders.
pub fn right_going_state(
    u0_slow: &RealField,
    params: &ModelParams,
    x_grid: &Grid,
) -> Result<BoussinesqState> {
    let want_len = params.delta * x_grid.length();
    if (u0_slow.grid().length() - want_len).abs() > 1e-9 * want_len {
        return Err(Error::GridMismatch {
            context: "slow profile period vs delta * physical period",
            left_n: u0_slow.grid().n(),
            left_len: u0_slow.grid().length(),
            right_n: x_grid.n(),
            right_len: want_len,
        });
    }
    let u = frames::relabel_onto(&u0_slow.scale(params.eps), x_grid, "right-going u")?;
    let us0 = hierarchy::assembled_us(u0_slow, params, 0.0)?;
    let mut u_t = crate::ops::derivative(&u, 1)?.scale(-1.0);
    u_t.axpy(
        params.eps * params.delta,
        &frames::relabel_onto(&us0, x_grid, "right-going correction")?,
    );
    BoussinesqState::new(u, u_t)
}

fn fitted_dt(horizon: f64, dx: f64, factor: f64) -> (f64, usize) {
    let steps = (horizon / (factor * dx)).ceil().max(1.0) as usize;
    (horizon / steps as f64, steps)
}

struct CellOutput {
    rows: Vec<ErrorRow>,
    warnings: Vec<String>,
}

/// Fraction of max amplitude below which a sample counts as "no support".
const SUPPORT_THRESHOLD: f64 = 1e-10;
/// Cells from each box edge that must stay support-free.
const EDGE_CELLS: usize = 10;

fn support_reaches_edge(f: &RealField) -> bool {
    let n = f.grid().n();
    let thr = SUPPORT_THRESHOLD * f.max_norm();
    if thr == 0.0 {
        return false;
    }
    let vals = f.values();
    (0..EDGE_CELLS.min(n))
        .any(|j| vals[j].abs() > thr || vals[n - 1 - j].abs() > thr)
}

fn run_cell(study: &ConvergenceStudy, eps: f64, delta: f64, tag: CellTag) -> Result<CellOutput> {
    let params = ModelParams::new(study.p, study.nu, eps, delta)?;
    let y_grid = Grid::new(study.n, study.slow_length)?;
    let u0_slow = study.profile.build(&y_grid);
    let x_grid = Grid::new(study.n, study.slow_length / delta)?;
    let state0 = right_going_state(&u0_slow, &params, &x_grid)?;

    let t_end = study.s_end / delta;
    let (dt, _) = fitted_dt(t_end, x_grid.dx(), study.dt_factor);
    let cfg = StepperConfig::new(Scheme::Rk4, dt, t_end)?;

    let mut warnings = Vec::new();
    let mut edge_hit = false;
    let final_state = integrate_boussinesq(&params, &state0, &cfg, |step, _, st| {
        if step % 16 == 0 && !edge_hit && support_reaches_edge(&st.u) {
            edge_hit = true;
        }
    })?;
    if edge_hit {
        warnings.push(format!(
            "support reached the box edge during the parent run (eps = {eps}, delta = {delta})"
        ));
    }

    let mut rows = Vec::new();
    for &target in &study.targets {
        let started = Instant::now();
        let row = match target {
            ModelId::GfCh => {
                compare_gfch(study, &params, &u0_slow, &x_grid, &final_state, t_end, tag)?
            }
            ModelId::GfKdv => {
                compare_gfkdv(study, &params, &u0_slow, &final_state, t_end, tag)?
            }
            other => {
                return Err(Error::Config(format!(
                    "convergence target must be GfCH or GfKdV, got {}",
                    other.name()
                )))
            }
        };
        let mut row = row;
        row.wall_s = if study.wall_clock { started.elapsed().as_secs_f64() } else { 0.0 };
        rows.push(row);
    }
    Ok(CellOutput { rows, warnings })
}

fn relative_errors(computed: &RealField, reference: &RealField) -> (f64, f64) {
    let scale_max = reference.max_norm().max(f64::MIN_POSITIVE);
    let scale_l2 = reference.l2_norm().max(f64::MIN_POSITIVE);
    let mut diff = computed.clone();
    diff.axpy(-1.0, reference);
    (diff.max_norm() / scale_max, diff.l2_norm() / scale_l2)
}

fn compare_gfch(
    study: &ConvergenceStudy,
    params: &ModelParams,
    u0_slow: &RealField,
    x_grid: &Grid,
    final_state: &BoussinesqState,
    t_end: f64,
    tag: CellTag,
) -> Result<ErrorRow> {
    // v(zeta, 0) = u(x, 0) via the composite map at t = 0 (pure dilation)
    let u_init = frames::relabel_onto(&u0_slow.scale(params.eps), x_grid, "gfCH initial")?;
    let v0 = frames::physical_to_ch_frame(&u_init, 0.0, params.nu)?;
    let tau_end = frames::unidirectional_time(t_end, params.nu)?;
    let (dt, _) = fitted_dt(tau_end, v0.grid().dx(), study.dt_factor);
    let cfg = StepperConfig::new(Scheme::Rk4, dt, tau_end)?;
    let flow = Flow::GfCh { params: *params };

    let mut mass0 = 0.0;
    let mut energy0 = 0.0;
    let mut drift_mass = 0.0f64;
    let mut drift_energy = 0.0f64;
    let nu = params.nu;
    let v_final = integrate_flow(&flow, &v0, &cfg, |step, _, v| {
        if step == 0 {
            mass0 = mass(v);
            energy0 = h_nu_energy(v, nu).unwrap_or(f64::NAN);
        } else if step % 8 == 0 {
            drift_mass = drift_mass.max((mass(v) - mass0).abs() / mass0.abs().max(1e-300));
            let e = h_nu_energy(v, nu).unwrap_or(f64::NAN);
            drift_energy = drift_energy.max((e - energy0).abs() / energy0.abs().max(1e-300));
        }
    })?;

    let v_ref = frames::physical_to_ch_frame(&final_state.u, t_end, params.nu)?;
    let (err_max, err_l2) = relative_errors(&v_final, &v_ref);
    Ok(ErrorRow {
        model: ModelId::GfCh,
        tag,
        p: params.p,
        nu: params.nu,
        eps: params.eps,
        delta: params.delta,
        n: study.n,
        dt,
        s_end: study.s_end,
        err_max,
        err_l2,
        slope_eps: None,
        slope_delta: None,
        drift_mass,
        drift_energy,
        wall_s: 0.0,
    })
}

fn compare_gfkdv(
    study: &ConvergenceStudy,
    params: &ModelParams,
    u0_slow: &RealField,
    final_state: &BoussinesqState,
    t_end: f64,
    tag: CellTag,
) -> Result<ErrorRow> {
    let s_end = frames::slow_time(t_end, params.delta);
    let (dt, _) = fitted_dt(s_end, u0_slow.grid().dx(), study.dt_factor);
    let cfg = StepperConfig::new(Scheme::Rk4IntegratingFactor, dt, s_end)?;
    let flow = Flow::GfKdv { params: *params };

    let mut mass0 = 0.0;
    let mut l2_0 = 0.0;
    let mut drift_mass = 0.0f64;
    let mut drift_energy = 0.0f64;
    let u_final = integrate_flow(&flow, u0_slow, &cfg, |step, _, u| {
        if step == 0 {
            mass0 = mass(u);
            l2_0 = l2_integral(u);
        } else if step % 8 == 0 {
            drift_mass = drift_mass.max((mass(u) - mass0).abs() / mass0.abs().max(1e-300));
            drift_energy =
                drift_energy.max((l2_integral(u) - l2_0).abs() / l2_0.abs().max(1e-300));
        }
    })?;

    let u_ref = frames::boussinesq_to_slow(&final_state.u, t_end, params.eps, params.delta)?;
    let (err_max, err_l2) = relative_errors(&u_final, &u_ref);
    Ok(ErrorRow {
        model: ModelId::GfKdv,
        tag,
        p: params.p,
        nu: params.nu,
        eps: params.eps,
        delta: params.delta,
        n: study.n,
        dt,
        s_end: study.s_end,
        err_max,
        err_l2,
        slope_eps: None,
        slope_delta: None,
        drift_mass,
        drift_energy,
        wall_s: 0.0,
    })
}

/// Run the full study: every sweep cell for every target, slopes fitted per
/// target over the sweep rows, deterministic row order.
pub fn run_unidirectional_comparison(study: &ConvergenceStudy) -> Result<ExperimentReport> {
    if study.targets.is_empty() {
        return Err(Error::Config("at least one target model is required".into()));
    }
    for list in [&study.epsilons, &study.deltas] {
        if list.len() < 3 {
            return Err(Error::Config(
                "epsilons and deltas need at least 3 values for slope fitting".into(),
            ));
        }
        if !list.windows(2).all(|w| w[0] > w[1]) {
            return Err(Error::Config("epsilons and deltas must be strictly decreasing".into()));
        }
    }

    let mut cells: Vec<(f64, f64, CellTag)> = Vec::new();
    for &eps in &study.epsilons {
        cells.push((eps, study.delta_fixed, CellTag::EpsSweep));
    }
    for &delta in &study.deltas {
        cells.push((study.eps_fixed, delta, CellTag::DeltaSweep));
    }
    if let Some((me, md)) = study.matched {
        cells.push((me, md, CellTag::Matched));
    }

    let outputs: Vec<Result<CellOutput>> = cells
        .par_iter()
        .map(|&(eps, delta, tag)| run_cell(study, eps, delta, tag))
        .collect();

    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for out in outputs {
        let out = out?;
        rows.extend(out.rows);
        warnings.extend(out.warnings);
    }

    // slope fits per target over the sweep rows
    let mut slopes = Vec::new();
    for &target in &study.targets {
        let eps_rows: Vec<&ErrorRow> = rows
            .iter()
            .filter(|r| r.model == target && r.tag == CellTag::EpsSweep)
            .collect();
        let slope_eps = fit_slope(&eps_rows, |r| r.eps, &mut warnings, target, "eps");
        let delta_rows: Vec<&ErrorRow> = rows
            .iter()
            .filter(|r| r.model == target && r.tag == CellTag::DeltaSweep)
            .collect();
        let slope_delta = fit_slope(&delta_rows, |r| r.delta, &mut warnings, target, "delta");
        slopes.push(SlopeFit { model: target, slope_eps, slope_delta });
    }
    for row in rows.iter_mut() {
        let fit = slopes.iter().find(|s| s.model == row.model).unwrap();
        match row.tag {
            CellTag::EpsSweep => row.slope_eps = fit.slope_eps,
            CellTag::DeltaSweep => row.slope_delta = fit.slope_delta,
            CellTag::Matched => {}
        }
    }

    Ok(ExperimentReport {
        rows,
        slopes,
        warnings,
        config_digest: super::fnv1a_hex(&study.canonical_description()),
    })
}

fn fit_slope(
    rows: &[&ErrorRow],
    param: impl Fn(&ErrorRow) -> f64,
    warnings: &mut Vec<String>,
    target: ModelId,
    name: &str,
) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = rows.iter().map(|r| param(r)).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.err_max).collect();
    // parameters are strictly decreasing, so errors should be too
    if !ys.windows(2).all(|w| w[0] > w[1]) {
        warnings.push(format!("non-monotone {name} error table for {}", target.name()));
    }
    Some(fit_loglog_slope(&xs, &ys))
}
