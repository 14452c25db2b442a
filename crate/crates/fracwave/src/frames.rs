//! Exact coordinate and amplitude maps between the four frames of the model
//! family, with trigonometric interpolation for off-grid sampling.

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::grid::Grid;
use crate::ops::check_nu;
use crate::params::FrameConstants;
use num_complex::Complex64;

/// Canonical moving-frame constants: `a = (2/sqrt(5))^(1/nu)`, `b = (2/5) a`,
/// `c = (1/3) a`.
pub fn frame_parameters(nu: f64) -> Result<FrameConstants> {
    check_nu(nu)?;
    let a = (2.0 / 5.0f64.sqrt()).powf(1.0 / nu);
    FrameConstants::new(a, 2.0 / 5.0 * a, a / 3.0)
}

/// Slow time `S = delta t`.
pub fn slow_time(t: f64, delta: f64) -> f64 {
    delta * t
}

/// Unidirectional-frame time `tau = (1/3)(2/sqrt(5))^(1/nu) t`.
pub fn unidirectional_time(t: f64, nu: f64) -> Result<f64> {
    Ok(frame_parameters(nu)?.c * t)
}

/// Y-grid induced by pushing the physical period through the scaling map.
pub fn slow_grid(physical: &Grid, delta: f64) -> Result<Grid> {
    physical.with_length(delta * physical.length())
}

/// zeta-grid induced by the composite map (pure spatial dilation by `a`).
pub fn unidirectional_grid(physical: &Grid, nu: f64) -> Result<Grid> {
    physical.with_length(frame_parameters(nu)?.a * physical.length())
}

/// Sample `f` at `x + shift` for every node, by spectral phase shift (exact
/// trigonometric interpolation for band-limited data). The Nyquist mode
/// shifts through its cosine representative to keep the result real.
pub fn translate(f: &RealField, shift: f64) -> Result<RealField> {
    if shift == 0.0 {
        return Ok(f.clone());
    }
    let mut s = f.to_spectrum()?;
    let grid = s.grid().clone();
    let ny = grid.nyquist_bin();
    for (i, c) in s.coeffs_mut().iter_mut().enumerate() {
        let xi = grid.wavenumber(i);
        if i == ny {
            *c *= (xi * shift).cos();
        } else {
            *c *= Complex64::from_polar(1.0, xi * shift);
        }
    }
    s.hermitize();
    s.to_real()
}

/// Map a physical snapshot `u(., t)` to the slow frame: `U(Y) = u(Y/delta + t) / eps`
/// on the Y-grid of period `delta L`, at slow time `S = delta t`.
pub fn boussinesq_to_slow(u: &RealField, t: f64, eps: f64, delta: f64) -> Result<RealField> {
    let shifted = translate(u, t)?;
    shifted.scale(1.0 / eps).with_period(delta * u.grid().length())
}

/// Inverse of [`boussinesq_to_slow`]: `u(x) = eps U(delta(x - t))` at
/// `t = S / delta`.
pub fn slow_to_boussinesq(u_slow: &RealField, s: f64, eps: f64, delta: f64) -> Result<RealField> {
    let shifted = translate(u_slow, -s)?;
    shifted.scale(eps).with_period(u_slow.grid().length() / delta)
}

/// Map a physical snapshot `w(., t)` to the unidirectional frame:
/// `v(zeta) = w(zeta/a + (3/5) t)` on the zeta-grid of period `a L`, at
/// `tau = (a/3) t`. No amplitude factor: the scale-out absorbed it upstream.
pub fn physical_to_ch_frame(w: &RealField, t: f64, nu: f64) -> Result<RealField> {
    let shifted = translate(w, 0.6 * t)?;
    shifted.with_period(frame_parameters(nu)?.a * w.grid().length())
}

/// Inverse of [`physical_to_ch_frame`] at `t = 3 tau / a`.
pub fn ch_frame_to_physical(v: &RealField, tau: f64, nu: f64) -> Result<RealField> {
    let a = frame_parameters(nu)?.a;
    let t = tau / frame_parameters(nu)?.c;
    let shifted = translate(v, -0.6 * a * t)?;
    shifted.with_period(v.grid().length() / a)
}

/// Slow-frame snapshot to the generic moving frame at matched slow time `s`:
/// `V(X) = U((X - b s)/a)` on the X-grid of period `a L_Y`, at `T = c s`.
pub fn slow_to_moving(u_slow: &RealField, s: f64, fc: &FrameConstants) -> Result<RealField> {
    let shifted = translate(u_slow, -fc.b / fc.a * s)?;
    shifted.with_period(fc.a * u_slow.grid().length())
}

/// Scale-out map: `v(zeta) = eps V(delta zeta)` on the zeta-grid of period
/// `L_X / delta` (`tau = T / delta`).
pub fn moving_to_unidirectional(v_moving: &RealField, eps: f64, delta: f64) -> Result<RealField> {
    v_moving.scale(eps).with_period(v_moving.grid().length() / delta)
}

/// Inverse of [`moving_to_unidirectional`].
pub fn unidirectional_to_moving(v: &RealField, eps: f64, delta: f64) -> Result<RealField> {
    v.scale(1.0 / eps).with_period(v.grid().length() * delta)
}

/// Which coordinate map a [`FrameMap`] realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameMapKind {
    /// (x, t) -> (Y, S) = (delta (x - t), delta t).
    Scaling,
    /// (Y, S) -> (X, T) = (a Y + b S, c S).
    Moving,
    /// (X, T) -> (zeta, tau) = (X / delta, T / delta).
    ScaleOut,
    /// (x, t) -> (zeta, tau) = (a (x - 3t/5), (a/3) t), the composition of
    /// the three maps above at the canonical constants.
    Composite,
}

/// Invertible affine coordinate map between two frames.
#[derive(Debug, Clone)]
pub enum FrameMap {
    Scaling { delta: f64 },
    Moving { constants: FrameConstants },
    ScaleOut { delta: f64 },
    Composite { constants: FrameConstants },
}

impl FrameMap {
    pub fn scaling(delta: f64) -> Self {
        FrameMap::Scaling { delta }
    }

    pub fn moving(constants: FrameConstants) -> Self {
        FrameMap::Moving { constants }
    }

    pub fn scale_out(delta: f64) -> Self {
        FrameMap::ScaleOut { delta }
    }

    pub fn composite(nu: f64) -> Result<Self> {
        Ok(FrameMap::Composite { constants: frame_parameters(nu)? })
    }

    pub fn kind(&self) -> FrameMapKind {
        match self {
            FrameMap::Scaling { .. } => FrameMapKind::Scaling,
            FrameMap::Moving { .. } => FrameMapKind::Moving,
            FrameMap::ScaleOut { .. } => FrameMapKind::ScaleOut,
            FrameMap::Composite { .. } => FrameMapKind::Composite,
        }
    }

    /// Forward coordinate image of `(space, time)`.
    pub fn forward(&self, space: f64, time: f64) -> (f64, f64) {
        match self {
            FrameMap::Scaling { delta } => (delta * (space - time), delta * time),
            FrameMap::Moving { constants } => {
                (constants.a * space + constants.b * time, constants.c * time)
            }
            FrameMap::ScaleOut { delta } => (space / delta, time / delta),
            FrameMap::Composite { constants } => {
                (constants.a * (space - 0.6 * time), constants.c * time)
            }
        }
    }

    /// Inverse coordinate image.
    pub fn inverse(&self, space: f64, time: f64) -> (f64, f64) {
        match self {
            FrameMap::Scaling { delta } => (space / delta + time / delta, time / delta),
            FrameMap::Moving { constants } => {
                let t = time / constants.c;
                ((space - constants.b * t) / constants.a, t)
            }
            FrameMap::ScaleOut { delta } => (space * delta, time * delta),
            FrameMap::Composite { constants } => {
                let t = time / constants.c;
                (space / constants.a + 0.6 * t, t)
            }
        }
    }
}

/// Relabel a field's samples onto a grid of the same size but (generally)
/// a different period: the node-by-node carry-over of a pure dilation map.
/// The caller owns the coordinate correspondence; period consistency between
/// frames is checked at the map entry points.
pub fn relabel_onto(f: &RealField, target: &Grid, context: &'static str) -> Result<RealField> {
    if f.grid().n() != target.n() {
        return Err(Error::GridMismatch {
            context,
            left_n: f.grid().n(),
            left_len: f.grid().length(),
            right_n: target.n(),
            right_len: target.length(),
        });
    }
    RealField::new(target.clone(), f.values().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn frame_constants_closed_forms() {
        let fc = frame_parameters(1.0).unwrap();
        assert!((fc.a - 2.0 / 5.0f64.sqrt()).abs() < 1e-15);
        assert!((fc.b - 0.4 * fc.a).abs() < 1e-15);
        assert!((fc.c - fc.a / 3.0).abs() < 1e-15);
        // frozen decimal expansions
        assert!((fc.a - 0.8944271910).abs() < 5e-11);
        assert!((fc.b - 0.3577708764).abs() < 5e-11);
        assert!((fc.c - 0.2981423970).abs() < 5e-11);
        // b/c = 6/5 for every nu
        for nu in [0.8, 1.0, 1.5, 2.0, 3.0] {
            let fc = frame_parameters(nu).unwrap();
            assert!((fc.b / fc.c - 1.2).abs() < 1e-14);
        }
        assert!(frame_parameters(0.0).is_err());
        assert!(frame_parameters(-1.0).is_err());
    }

    #[test]
    fn scaling_map_inverts_the_ansatz_cosine() {
        // u = eps cos(delta (x - t)) at t = 0 maps to U = cos(Y)
        let delta = 0.25;
        let eps = 0.1;
        let x_grid = Grid::new(64, 2.0 * PI / delta).unwrap();
        let u = RealField::from_fn(&x_grid, |x| eps * (delta * x).cos());
        let big_u = boussinesq_to_slow(&u, 0.0, eps, delta).unwrap();
        let y_grid = slow_grid(&x_grid, delta).unwrap();
        let expected = RealField::from_fn(&y_grid, |y| y.cos());
        assert_eq!(big_u.grid(), &y_grid);
        assert!(big_u.max_diff(&expected) < 1e-13);
    }

    #[test]
    fn slow_map_round_trip() {
        let delta = 0.2;
        let eps = 0.07;
        let x_grid = Grid::new(128, 50.0).unwrap();
        let u = profiles::band_limited(&x_grid, 1, 20, 31, 0.4);
        for t in [0.0, 1.7, 13.4] {
            let big_u = boussinesq_to_slow(&u, t, eps, delta).unwrap();
            let back = slow_to_boussinesq(&big_u, slow_time(t, delta), eps, delta).unwrap();
            assert!(u.max_diff(&back) < 1e-12, "round trip at t = {t}");
        }
    }

    #[test]
    fn translation_matches_closed_form_resampling() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        // a concrete band-limited combination with known shift law
        let f = RealField::from_fn(&g, |x| (2.0 * x).sin() + 0.4 * (5.0 * x).cos());
        let s = 0.321;
        let shifted = translate(&f, s).unwrap();
        let expected = RealField::from_fn(&g, |x| (2.0 * (x + s)).sin() + 0.4 * (5.0 * (x + s)).cos());
        assert!(shifted.max_diff(&expected) < 1e-11);
    }

    #[test]
    fn ch_map_is_pure_dilation_at_t0() {
        let g = Grid::new(64, 30.0).unwrap();
        let w = profiles::band_limited(&g, 1, 12, 37, 0.6);
        let v = physical_to_ch_frame(&w, 0.0, 1.0).unwrap();
        assert_eq!(v.values(), w.values(), "t = 0 map must relabel samples only");
        let a = frame_parameters(1.0).unwrap().a;
        assert!((v.grid().length() - a * 30.0).abs() < 1e-12);
        let back = ch_frame_to_physical(&v, 0.0, 1.0).unwrap();
        assert!(w.max_diff(&back) < 1e-12);
    }

    #[test]
    fn composite_equals_composition_of_three_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for nu in [1.0, 1.5] {
            let fc = frame_parameters(nu).unwrap();
            for _ in 0..100 {
                let x = rng.gen_range(-50.0..50.0);
                let t = rng.gen_range(-20.0..20.0);
                let delta = rng.gen_range(0.05..0.5);
                let composite = FrameMap::composite(nu).unwrap();
                let (zeta_c, tau_c) = composite.forward(x, t);
                let (y, s) = FrameMap::scaling(delta).forward(x, t);
                let (bx, bt) = FrameMap::moving(fc).forward(y, s);
                let (zeta, tau) = FrameMap::scale_out(delta).forward(bx, bt);
                assert!(
                    (zeta - zeta_c).abs() < 1e-12 * zeta.abs().max(1.0)
                        && (tau - tau_c).abs() < 1e-12 * tau.abs().max(1.0),
                    "composition mismatch at nu = {nu}"
                );
            }
        }
    }

    #[test]
    fn all_maps_invert_on_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let fc = frame_parameters(1.5).unwrap();
        let maps = [
            FrameMap::scaling(0.2),
            FrameMap::moving(fc),
            FrameMap::scale_out(0.2),
            FrameMap::composite(1.5).unwrap(),
        ];
        for m in &maps {
            for _ in 0..50 {
                let x = rng.gen_range(-30.0..30.0);
                let t = rng.gen_range(-10.0..10.0);
                let (a, b) = m.forward(x, t);
                let (xr, tr) = m.inverse(a, b);
                assert!(
                    (xr - x).abs() < 1e-13 * x.abs().max(1.0) && (tr - t).abs() < 1e-13 * t.abs().max(1.0),
                    "{:?} failed to invert",
                    m.kind()
                );
            }
        }
    }

    #[test]
    fn unidirectional_time_factor_in_extended_precision() {
        // tau = (1/3)(2/sqrt 5)^(1/nu) t; check the frozen high-precision
        // value of the factor at nu = 1: (2/sqrt 5)/3
        let factor = unidirectional_time(1.0, 1.0).unwrap();
        assert!((factor - 0.29814239699997195938).abs() < 1e-15);
        let t = 5.0 / 3.0;
        assert!((unidirectional_time(t, 1.0).unwrap() - factor * t).abs() < 1e-15);
    }

    #[test]
    fn frame_maps_commute_with_spatial_translation() {
        let g = Grid::new(64, 40.0).unwrap();
        let w = profiles::band_limited(&g, 1, 10, 41, 0.5);
        let shift = 3.7;
        // translate then map vs map then translate (shift scales by a)
        let a = frame_parameters(1.0).unwrap().a;
        let lhs = physical_to_ch_frame(&translate(&w, shift).unwrap(), 0.0, 1.0).unwrap();
        let rhs = translate(&physical_to_ch_frame(&w, 0.0, 1.0).unwrap(), a * shift).unwrap();
        assert!(lhs.max_diff(&rhs) < 1e-11);
    }
}
