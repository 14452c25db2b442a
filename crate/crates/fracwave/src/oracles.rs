//! Independent reference implementations used by the test and validation
//! suites. Everything here deliberately avoids the FFT-based production path:
//! direct O(n^2) DFT summation, finite differences, exact mode arithmetic.

use crate::field::RealField;
use crate::grid::Grid;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Direct-summation DFT of a real field, coefficients in FFT bin order with
/// the same `1/n` normalization as the production transform.
pub fn direct_dft(f: &RealField) -> Vec<Complex64> {
    let n = f.grid().n();
    let nf = n as f64;
    (0..n)
        .map(|bin| {
            let k = f.grid().mode(bin) as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &v) in f.values().iter().enumerate() {
                let phase = -2.0 * std::f64::consts::PI * k * j as f64 / nf;
                acc += v * Complex64::from_polar(1.0, phase);
            }
            acc / nf
        })
        .collect()
}

/// Evaluate a coefficient vector (FFT bin order) at an arbitrary point,
/// splitting the Nyquist bin symmetrically so the interpolant is real.
fn eval_trig(grid: &Grid, coeffs: &[Complex64], x: f64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (bin, &c) in coeffs.iter().enumerate() {
        let xi = grid.wavenumber(bin);
        if bin == grid.nyquist_bin() {
            acc += c * (xi * x).cos();
        } else {
            acc += c * Complex64::from_polar(1.0, xi * x);
        }
    }
    acc.re
}

/// Apply a wavenumber multiplier through a direct-summation DFT and inverse.
pub fn direct_multiplier(f: &RealField, m: impl Fn(f64) -> Complex64) -> RealField {
    let grid = f.grid().clone();
    let coeffs: Vec<Complex64> = direct_dft(f)
        .into_iter()
        .enumerate()
        .map(|(bin, c)| c * m(grid.wavenumber(bin)))
        .collect();
    RealField::from_fn(&grid, |x| eval_trig(&grid, &coeffs, x))
}

/// Exact pointwise product evaluated on an `oversample`-times finer grid and
/// restricted back to the coarse band (direct DFT throughout).
pub fn oversampled_product(factors: &[&RealField], oversample: usize) -> RealField {
    assert!(!factors.is_empty() && oversample >= 2);
    let grid = factors[0].grid().clone();
    let n = grid.n();
    let m = n * oversample;
    let fine = Grid::new(m, grid.length()).unwrap();
    let mut product = vec![1.0f64; m];
    for f in factors {
        let coeffs = direct_dft(f);
        for (j, p) in product.iter_mut().enumerate() {
            *p *= eval_trig(&grid, &coeffs, fine.node(j));
        }
    }
    let fine_field = RealField::new(fine.clone(), product).unwrap();
    let fine_coeffs = direct_dft(&fine_field);
    // restriction: keep |k| < n/2, fold both +-n/2 fine bins into the coarse
    // Nyquist bin
    let mut coarse = vec![Complex64::new(0.0, 0.0); n];
    coarse[0] = fine_coeffs[0];
    for k in 1..n / 2 {
        coarse[k] = fine_coeffs[k];
        coarse[n - k] = fine_coeffs[m - k];
    }
    coarse[n / 2] = fine_coeffs[n / 2] + fine_coeffs[m - n / 2];
    RealField::from_fn(&grid, |x| eval_trig(&grid, &coarse, x))
}

/// Centered 8th-order finite-difference derivative on periodic samples.
/// Supported orders: 1 and 2.
pub fn fd8_periodic(values: &[f64], dx: f64, order: u32) -> Vec<f64> {
    let n = values.len();
    let at = |j: i64| values[j.rem_euclid(n as i64) as usize];
    match order {
        1 => {
            let c = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
            (0..n as i64)
                .map(|j| {
                    let mut acc = 0.0;
                    for (s, &ck) in c.iter().enumerate() {
                        let k = s as i64 + 1;
                        acc += ck * (at(j + k) - at(j - k));
                    }
                    acc / dx
                })
                .collect()
        }
        2 => {
            let c0 = -205.0 / 72.0;
            let c = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
            (0..n as i64)
                .map(|j| {
                    let mut acc = c0 * at(j);
                    for (s, &ck) in c.iter().enumerate() {
                        let k = s as i64 + 1;
                        acc += ck * (at(j + k) + at(j - k));
                    }
                    acc / (dx * dx)
                })
                .collect()
        }
        _ => panic!("fd8_periodic supports orders 1 and 2"),
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(ly.iter()) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Exact arithmetic on finite trigonometric sums over an integer-mode box
/// (period 2 pi): maps `k -> c_k` with `f = sum c_k exp(i k x)`.
pub type ModeMap = BTreeMap<i64, Complex64>;

pub fn modes_cos(k: i64) -> ModeMap {
    let mut m = ModeMap::new();
    m.insert(k, Complex64::new(0.5, 0.0));
    m.insert(-k, Complex64::new(0.5, 0.0));
    m
}

pub fn modes_sin(k: i64) -> ModeMap {
    let mut m = ModeMap::new();
    m.insert(k, Complex64::new(0.0, -0.5));
    m.insert(-k, Complex64::new(0.0, 0.5));
    m
}

pub fn modes_mul(a: &ModeMap, b: &ModeMap) -> ModeMap {
    let mut out = ModeMap::new();
    for (ka, ca) in a {
        for (kb, cb) in b {
            *out.entry(ka + kb).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
        }
    }
    out
}

pub fn modes_derivative(a: &ModeMap) -> ModeMap {
    a.iter().map(|(&k, &c)| (k, c * Complex64::new(0.0, k as f64))).collect()
}

pub fn modes_frac_lap(a: &ModeMap, nu: f64) -> ModeMap {
    a.iter().map(|(&k, &c)| (k, c * (k as f64).abs().powf(2.0 * nu))).collect()
}

pub fn modes_scale(a: &ModeMap, s: f64) -> ModeMap {
    a.iter().map(|(&k, &c)| (k, c * s)).collect()
}

pub fn modes_add(a: &ModeMap, b: &ModeMap) -> ModeMap {
    let mut out = a.clone();
    for (k, c) in b {
        *out.entry(*k).or_insert(Complex64::new(0.0, 0.0)) += c;
    }
    out
}

/// Sample a mode map on a grid (grid period must be 2 pi for integer modes).
pub fn modes_eval(a: &ModeMap, grid: &Grid) -> RealField {
    RealField::from_fn(grid, |x| {
        a.iter()
            .map(|(&k, &c)| (c * Complex64::from_polar(1.0, k as f64 * x)).re)
            .sum()
    })
}

/// A gfKdV solitary-wave candidate: `amplitude * sech(width (Y - speed S))^(2/p)`.
#[derive(Debug, Clone, Copy)]
pub struct SolitaryFit {
    pub amplitude: f64,
    pub speed: f64,
    pub width: f64,
    /// Relative residual of the traveling-wave ODE after the fit.
    pub residual: f64,
}

/// Fit `(amplitude, speed)` for a gfKdV (nu = 1) traveling wave of prescribed
/// width by substituting the sech ansatz into the once-integrated profile
/// equation and solving the 2x2 least-squares system. Derivatives come from
/// dense finite differences, so the fit is independent of the spectral path.
pub fn gfkdv_solitary_fit(p: u32, eps: f64, delta: f64, width: f64) -> SolitaryFit {
    let exponent = 2.0 / p as f64;
    let half_span = 12.0 / width;
    let n = 4001usize;
    let dz = 2.0 * half_span / (n - 1) as f64;
    let g: Vec<f64> = (0..n)
        .map(|i| {
            let z = -half_span + i as f64 * dz;
            (1.0 / (width * z).cosh()).powf(exponent)
        })
        .collect();
    // interior second derivative, 8th order
    let c0 = -205.0 / 72.0;
    let c = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let eps_pow = eps.powi(p as i32);
    let half_disp = 0.5 * delta * delta;
    // normal equations for x = (speed, amplitude^p):
    //   -speed * g + (eps^p/2) A^p g^{p+1} + (delta^2/2) g'' = 0
    let mut ata = [[0.0f64; 2]; 2];
    let mut atb = [0.0f64; 2];
    for i in 4..n - 4 {
        let mut gpp = c0 * g[i];
        for (s, &ck) in c.iter().enumerate() {
            let k = s + 1;
            gpp += ck * (g[i + k] + g[i - k]);
        }
        gpp /= dz * dz;
        let row = [-g[i], 0.5 * eps_pow * g[i].powi(p as i32 + 1)];
        let rhs = -half_disp * gpp;
        for a in 0..2 {
            for b in 0..2 {
                ata[a][b] += row[a] * row[b];
            }
            atb[a] += row[a] * rhs;
        }
    }
    let det = ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0];
    let speed = (atb[0] * ata[1][1] - atb[1] * ata[0][1]) / det;
    let apow = (ata[0][0] * atb[1] - ata[1][0] * atb[0]) / det;
    let amplitude = apow.powf(1.0 / p as f64);
    // residual of the fitted profile equation, relative to its largest term
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 4..n - 4 {
        let mut gpp = c0 * g[i];
        for (s, &ck) in c.iter().enumerate() {
            let k = s + 1;
            gpp += ck * (g[i + k] + g[i - k]);
        }
        gpp /= dz * dz;
        let terms = [-speed * g[i], 0.5 * eps_pow * apow * g[i].powi(p as i32 + 1), half_disp * gpp];
        let r = terms.iter().sum::<f64>();
        scale = scale.max(terms.iter().fold(0.0f64, |m, t| m.max(t.abs())));
        worst = worst.max(r.abs());
    }
    SolitaryFit { amplitude, speed, width, residual: worst / scale.max(f64::MIN_POSITIVE) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops;
    use crate::profiles;
    use std::f64::consts::PI;

    #[test]
    fn direct_dft_agrees_with_fft_transform() {
        let g = Grid::new(32, 6.0).unwrap();
        let f = profiles::band_limited(&g, 1, 12, 21, 1.0);
        let direct = direct_dft(&f);
        let fft = f.to_spectrum().unwrap();
        for (a, b) in direct.iter().zip(fft.coeffs().iter()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn fd8_matches_spectral_derivative_on_smooth_field() {
        let g = Grid::new(256, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&g, |x| (2.0 * x).sin() + 0.3 * (3.0 * x).cos());
        let fd = fd8_periodic(f.values(), g.dx(), 1);
        let sp = ops::derivative(&f, 1).unwrap();
        let err = fd
            .iter()
            .zip(sp.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-10, "fd8 first derivative error {err:.3e}");
        let fd2 = fd8_periodic(f.values(), g.dx(), 2);
        let sp2 = ops::derivative(&f, 2).unwrap();
        let err2 = fd2
            .iter()
            .zip(sp2.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err2 < 1e-9, "fd8 second derivative error {err2:.3e}");
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let xs = [0.2f64, 0.1, 0.05];
        let ys: Vec<f64> = xs.iter().map(|x| 3.7 * x.powf(2.5)).collect();
        let s = fit_loglog_slope(&xs, &ys);
        assert!((s - 2.5).abs() < 1e-12);
    }

    #[test]
    fn mode_arithmetic_reproduces_double_angle() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let cos_sq = modes_mul(&modes_cos(1), &modes_cos(1));
        let f = modes_eval(&cos_sq, &g);
        let expected = RealField::from_fn(&g, |x| 0.5 * (1.0 + (2.0 * x).cos()));
        assert!(f.max_diff(&expected) < 1e-14);
    }

    #[test]
    fn solitary_fit_recovers_known_kdv_soliton() {
        // With p = 1, eps = delta = 1 the classical closed form gives
        // A = 6 K^2, c = 2 K^2.
        let fit = gfkdv_solitary_fit(1, 1.0, 1.0, 0.5);
        assert!(fit.residual < 1e-8, "ansatz residual {:e}", fit.residual);
        assert!((fit.amplitude - 6.0 * 0.25).abs() < 1e-6, "amplitude {}", fit.amplitude);
        assert!((fit.speed - 2.0 * 0.25).abs() < 1e-6, "speed {}", fit.speed);
    }
}
