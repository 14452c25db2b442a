//! Test-profile families: periodized Gaussians, seeded band-limited noise,
//! sech-type pulses.

use crate::field::RealField;
use crate::grid::Grid;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gaussian bump `exp(-(x - center)^2 / sigma^2)` periodized by summation
/// over images until the increment is negligible.
pub fn periodic_gaussian(grid: &Grid, center: f64, sigma: f64) -> RealField {
    let length = grid.length();
    RealField::from_fn(grid, |x| {
        let mut sum = 0.0;
        let mut m = 0i64;
        loop {
            let mut inc = 0.0;
            for s in [m, -m] {
                let z = x - center + s as f64 * length;
                inc += (-(z * z) / (sigma * sigma)).exp();
                if m == 0 {
                    break;
                }
            }
            sum += inc;
            m += 1;
            if inc < 1e-18 && m > 2 {
                break;
            }
        }
        sum
    })
}

/// Analytic derivative of [`periodic_gaussian`], used by oracle tests.
pub fn periodic_gaussian_derivative(grid: &Grid, center: f64, sigma: f64) -> RealField {
    let length = grid.length();
    RealField::from_fn(grid, |x| {
        let mut sum = 0.0;
        let mut m = 0i64;
        loop {
            let mut inc = 0.0;
            let mut inc_mag = 0.0;
            for s in [m, -m] {
                let z = x - center + s as f64 * length;
                let term = -2.0 * z / (sigma * sigma) * (-(z * z) / (sigma * sigma)).exp();
                inc += term;
                inc_mag += term.abs();
                if m == 0 {
                    break;
                }
            }
            sum += inc;
            m += 1;
            if inc_mag < 1e-18 && m > 2 {
                break;
            }
        }
        sum
    })
}

/// Real field with random Fourier content on modes `kmin..=kmax`, Hermitian
/// by construction and rescaled to the requested max amplitude. Deterministic
/// for a fixed seed.
pub fn band_limited(grid: &Grid, kmin: usize, kmax: usize, seed: u64, amplitude: f64) -> RealField {
    let n = grid.n();
    assert!(kmax < n / 2, "band limit must stay below the Nyquist mode");
    assert!(kmin >= 1 && kmin <= kmax);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for k in kmin..=kmax {
        let re = rng.gen_range(-1.0..1.0);
        let im = rng.gen_range(-1.0..1.0);
        // mild spectral decay keeps the profile smooth-looking
        let w = 1.0 / (1.0 + (k - kmin) as f64);
        coeffs[k] = Complex64::new(re * w, im * w);
        coeffs[n - k] = coeffs[k].conj();
    }
    let mut values = vec![0.0; n];
    for (j, v) in values.iter_mut().enumerate() {
        let x = grid.node(j);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in kmin..=kmax {
            let phase = Complex64::from_polar(1.0, grid.wavenumber(k) * x);
            acc += coeffs[k] * phase + coeffs[n - k] * phase.conj();
        }
        *v = acc.re;
    }
    let field = RealField::new(grid.clone(), values).unwrap();
    let peak = field.max_norm();
    if peak > 0.0 {
        field.scale(amplitude / peak)
    } else {
        field
    }
}

/// Pulse `amplitude * sech(width_k (x - center))^exponent`.
pub fn sech_pow(grid: &Grid, amplitude: f64, width_k: f64, center: f64, exponent: f64) -> RealField {
    RealField::from_fn(grid, |x| {
        let z = width_k * (x - center);
        amplitude * (1.0 / z.cosh()).powf(exponent)
    })
}
