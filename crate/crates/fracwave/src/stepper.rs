//! Fixed-step RK4 time integration, plain or with the exact linear propagator
//! (integrating factor) for stiff KdV-type symbols.

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::models::{boussinesq_rhs, BoussinesqState, Flow};
use crate::params::ModelParams;
use num_complex::Complex64;

/// Imaginary-axis stability limit of classical RK4, `2 sqrt 2`.
pub const RK4_IMAG_LIMIT: f64 = 2.8284271247461903;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Rk4,
    Rk4IntegratingFactor,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "RK4" => Ok(Scheme::Rk4),
            "RK4-IntegratingFactor" => Ok(Scheme::Rk4IntegratingFactor),
            other => Err(Error::Config(format!(
                "unknown scheme '{other}' (valid: RK4, RK4-IntegratingFactor)"
            ))),
        }
    }
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Rk4 => "RK4",
            Scheme::Rk4IntegratingFactor => "RK4-IntegratingFactor",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    pub cfl_guard: f64,
}

impl StepperConfig {
    pub fn new(scheme: Scheme, dt: f64, t_end: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParam { name: "dt", value: dt, reason: "time step must be positive" });
        }
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::InvalidParam {
                name: "t_end",
                value: t_end,
                reason: "horizon must be positive",
            });
        }
        Ok(Self { scheme, dt, t_end, cfl_guard: 0.5 })
    }

    pub fn with_cfl_guard(mut self, guard: f64) -> Self {
        self.cfl_guard = guard;
        self
    }

    /// Number of fixed steps; `dt` must divide `t_end`.
    pub fn steps(&self) -> Result<usize> {
        let k = (self.t_end / self.dt).round();
        if (k * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(1.0) || k < 1.0 {
            return Err(Error::InvalidParam {
                name: "dt",
                value: self.dt,
                reason: "dt must divide t_end (fixed-step integration)",
            });
        }
        Ok(k as usize)
    }
}

/// Largest `dt` the RK4 imaginary-axis stability region admits for a symbol
/// of the given magnitude.
pub fn max_stable_dt(max_symbol: f64) -> f64 {
    if max_symbol <= 0.0 {
        f64::INFINITY
    } else {
        RK4_IMAG_LIMIT / max_symbol
    }
}

fn check_guard(cfg: &StepperConfig, max_symbol: f64) -> Result<()> {
    let bound = cfg.cfl_guard * max_stable_dt(max_symbol);
    if cfg.dt > bound {
        return Err(Error::StabilityGuard { dt: cfg.dt, bound });
    }
    Ok(())
}

/// Promote a mid-stage non-finite detection to a blow-up diagnostic with the
/// step context attached.
fn as_blowup(err: Error, step: usize, time: f64) -> Error {
    match err {
        Error::NonFinite { what } => Error::Blowup {
            step,
            time,
            detail: format!("non-finite values appeared in {what}"),
        },
        Error::RealityLoss { residue, .. } => Error::Blowup {
            step,
            time,
            detail: format!("state corrupted: imaginary residue {residue:.3e} after transform"),
        },
        other => other,
    }
}

fn scan_finite_field(f: &RealField, step: usize, time: f64) -> Result<()> {
    if let Some(j) = f.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::Blowup {
            step,
            time,
            detail: format!("first offending sample at node {} (x = {:.6e})", j, f.grid().node(j)),
        });
    }
    Ok(())
}

fn scan_finite_spectrum(coeffs: &[Complex64], grid: &crate::grid::Grid, step: usize, time: f64) -> Result<()> {
    if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Blowup {
            step,
            time,
            detail: format!(
                "first offending mode at bin {} (k = {}, xi = {:.6e})",
                i,
                grid.mode(i),
                grid.wavenumber(i)
            ),
        });
    }
    Ok(())
}

/// Advance a scalar flow to `t_end`. The observer sees every accepted state
/// including the initial one: `(step, time, state)`.
pub fn integrate_flow(
    flow: &Flow,
    v0: &RealField,
    cfg: &StepperConfig,
    mut observer: impl FnMut(usize, f64, &RealField),
) -> Result<RealField> {
    let steps = cfg.steps()?;
    let grid = v0.grid().clone();
    let symbol = flow.linear_symbol(&grid);
    let max_symbol = symbol.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    match cfg.scheme {
        Scheme::Rk4 => {
            check_guard(cfg, max_symbol)?;
            let mut v = v0.clone();
            observer(0, 0.0, &v);
            for step in 1..=steps {
                let t = (step - 1) as f64 * cfg.dt;
                v = rk4_step(flow, &v, cfg.dt, step, t).map_err(|e| as_blowup(e, step, t))?;
                scan_finite_field(&v, step, t + cfg.dt)?;
                observer(step, step as f64 * cfg.dt, &v);
            }
            Ok(v)
        }
        Scheme::Rk4IntegratingFactor => {
            // the linear symbol is integrated exactly; guard against the
            // remaining advective scale instead
            check_guard(cfg, grid.max_wavenumber())?;
            let e_half: Vec<Complex64> = symbol.iter().map(|l| (l * 0.5 * cfg.dt).exp()).collect();
            let e_full: Vec<Complex64> = symbol.iter().map(|l| (l * cfg.dt).exp()).collect();
            let mut spec = v0.to_spectrum()?;
            observer(0, 0.0, v0);
            let mut latest = v0.clone();
            for step in 1..=steps {
                let t = (step - 1) as f64 * cfg.dt;
                ifrk4_step(flow, &mut spec, &e_half, &e_full, cfg.dt, step, t)
                    .map_err(|e| as_blowup(e, step, t))?;
                scan_finite_spectrum(spec.coeffs(), &grid, step, step as f64 * cfg.dt)?;
                latest = spec.to_real()?;
                observer(step, step as f64 * cfg.dt, &latest);
            }
            Ok(latest)
        }
    }
}

fn rk4_step(flow: &Flow, v: &RealField, dt: f64, step: usize, t: f64) -> Result<RealField> {
    let eval = |s: &RealField| -> Result<RealField> {
        scan_finite_field(s, step, t)?;
        flow.rhs(s)
    };
    let k1 = eval(v)?;
    let mut s = v.clone();
    s.axpy(0.5 * dt, &k1);
    let k2 = eval(&s)?;
    let mut s = v.clone();
    s.axpy(0.5 * dt, &k2);
    let k3 = eval(&s)?;
    let mut s = v.clone();
    s.axpy(dt, &k3);
    let k4 = eval(&s)?;
    let mut out = v.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    Ok(out)
}

/// One integrating-factor RK4 step in spectral space: the linear symbol is
/// advanced by its exact propagator, the remaining terms by classical RK4 in
/// the transformed variable.
fn ifrk4_step(
    flow: &Flow,
    spec: &mut crate::field::Spectrum,
    e_half: &[Complex64],
    e_full: &[Complex64],
    dt: f64,
    step: usize,
    t: f64,
) -> Result<()> {
    let grid = spec.grid().clone();
    let eval = |coeffs: &[Complex64]| -> Result<Vec<Complex64>> {
        scan_finite_spectrum(coeffs, &grid, step, t)?;
        let s = crate::field::Spectrum::new(grid.clone(), coeffs.to_vec())?;
        let v = s.to_real()?;
        let n = flow.nonstiff_rhs(&v)?;
        Ok(n.to_spectrum()?.coeffs().to_vec())
    };
    let v = spec.coeffs().to_vec();
    let a = eval(&v)?;
    let stage_b: Vec<Complex64> = v
        .iter()
        .zip(a.iter())
        .zip(e_half.iter())
        .map(|((vi, ai), e)| (vi + 0.5 * dt * ai) * e)
        .collect();
    let b = eval(&stage_b)?;
    let stage_c: Vec<Complex64> = v
        .iter()
        .zip(b.iter())
        .zip(e_half.iter())
        .map(|((vi, bi), e)| vi * e + 0.5 * dt * bi)
        .collect();
    let c = eval(&stage_c)?;
    let stage_d: Vec<Complex64> = v
        .iter()
        .zip(c.iter())
        .zip(e_half.iter().zip(e_full.iter()))
        .map(|((vi, ci), (eh, ef))| vi * ef + dt * ci * eh)
        .collect();
    let d = eval(&stage_d)?;
    for (i, out) in spec.coeffs_mut().iter_mut().enumerate() {
        *out = v[i] * e_full[i]
            + dt / 6.0 * (a[i] * e_full[i] + 2.0 * (b[i] + c[i]) * e_half[i] + d[i]);
    }
    Ok(())
}

/// Advance the parent state pair with classical RK4 (its symbol is bounded
/// by the advective scale for nu >= 1, so no integrating factor is needed).
pub fn integrate_boussinesq(
    params: &ModelParams,
    state0: &BoussinesqState,
    cfg: &StepperConfig,
    mut observer: impl FnMut(usize, f64, &BoussinesqState),
) -> Result<BoussinesqState> {
    let steps = cfg.steps()?;
    let grid = state0.u.grid();
    let max_omega = (0..grid.n())
        .map(|i| crate::models::dispersion_omega(grid.wavenumber(i), params.nu).abs())
        .fold(0.0f64, f64::max);
    check_guard(cfg, max_omega)?;
    let mut state = state0.clone();
    observer(0, 0.0, &state);
    let dt = cfg.dt;
    for step in 1..=steps {
        let t0 = (step - 1) as f64 * dt;
        let stages = || -> Result<[BoussinesqState; 4]> {
            let k1 = boussinesq_rhs(&state, params)?;
            let k2 = boussinesq_rhs(&state_axpy(&state, 0.5 * dt, &k1)?, params)?;
            let k3 = boussinesq_rhs(&state_axpy(&state, 0.5 * dt, &k2)?, params)?;
            let k4 = boussinesq_rhs(&state_axpy(&state, dt, &k3)?, params)?;
            Ok([k1, k2, k3, k4])
        };
        let [k1, k2, k3, k4] = stages().map_err(|e| as_blowup(e, step, t0))?;
        let mut u = state.u.clone();
        let mut u_t = state.u_t.clone();
        for (w, k) in [(dt / 6.0, &k1), (dt / 3.0, &k2), (dt / 3.0, &k3), (dt / 6.0, &k4)] {
            u.axpy(w, &k.u);
            u_t.axpy(w, &k.u_t);
        }
        state = BoussinesqState::new(u, u_t)?;
        let t = step as f64 * dt;
        scan_finite_field(&state.u, step, t)?;
        scan_finite_field(&state.u_t, step, t)?;
        observer(step, t, &state);
    }
    Ok(state)
}

fn state_axpy(s: &BoussinesqState, a: f64, d: &BoussinesqState) -> Result<BoussinesqState> {
    let mut u = s.u.clone();
    u.axpy(a, &d.u);
    let mut u_t = s.u_t.clone();
    u_t.axpy(a, &d.u_t);
    BoussinesqState::new(u, u_t)
}
