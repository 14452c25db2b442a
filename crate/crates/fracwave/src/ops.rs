//! Fourier-multiplier operators and dealiased polynomial nonlinearities.

use crate::error::{Error, Result};
use crate::field::{RealField, Spectrum};
use crate::grid::Grid;
use num_complex::Complex64;
use std::sync::Once;

static SUBCRITICAL_NU: Once = Once::new();

pub(crate) fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidParam {
            name: "nu",
            value: nu,
            reason: "dispersion exponent must be positive",
        });
    }
    if nu < 1.0 {
        SUBCRITICAL_NU.call_once(|| {
            log::warn!("nu = {nu} < 1 is outside the well-posed range; proceeding anyway");
        });
    }
    Ok(())
}

pub(crate) fn ensure_finite(f: &RealField, what: &'static str) -> Result<()> {
    if f.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

/// Apply a diagonal spectral multiplier `m(bin)` and return the real result.
pub fn apply_multiplier(f: &RealField, m: impl Fn(&Grid, usize) -> Complex64) -> Result<RealField> {
    let mut s = f.to_spectrum()?;
    let grid = s.grid().clone();
    for (i, c) in s.coeffs_mut().iter_mut().enumerate() {
        *c *= m(&grid, i);
    }
    s.hermitize();
    s.to_real()
}

/// Multiplier of the fractional Laplacian `|xi|^(2 nu)`; the zero mode is
/// annihilated, the Nyquist mode is kept (even symbol).
pub fn laplacian_symbol(grid: &Grid, bin: usize, nu: f64) -> f64 {
    let xi = grid.wavenumber(bin);
    if bin == 0 {
        0.0
    } else {
        xi.abs().powf(2.0 * nu)
    }
}

/// Multiplier of `d^order/dx^order`, i.e. `(i xi)^order`, with the Nyquist
/// mode zeroed for odd orders (no real-valued counterpart there).
pub fn derivative_symbol(grid: &Grid, bin: usize, order: u32) -> Complex64 {
    if order % 2 == 1 && bin == grid.nyquist_bin() {
        return Complex64::new(0.0, 0.0);
    }
    let ixi = Complex64::new(0.0, grid.wavenumber(bin));
    ixi.powi(order as i32)
}

/// Fractional Laplacian `(-d^2/dx^2)^nu` realized as the Fourier multiplier
/// `|xi|^(2 nu)`.
pub fn fractional_laplacian(f: &RealField, nu: f64) -> Result<RealField> {
    check_nu(nu)?;
    ensure_finite(f, "fractional_laplacian input")?;
    apply_multiplier(f, |g, i| Complex64::new(laplacian_symbol(g, i, nu), 0.0))
}

/// Spectral derivative of order 1, 2 or 3.
pub fn derivative(f: &RealField, order: u32) -> Result<RealField> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidParam {
            name: "order",
            value: order as f64,
            reason: "supported derivative orders are 1, 2, 3",
        });
    }
    ensure_finite(f, "derivative input")?;
    apply_multiplier(f, |g, i| derivative_symbol(g, i, order))
}

/// Solve `(1 + coeff * |xi|^(2 nu)) q = f` mode-by-mode. The factor is
/// bounded below by 1 for `coeff >= 0`, so the inversion is unconditionally
/// stable.
pub fn helmholtz_solve(f: &RealField, nu: f64, coeff: f64) -> Result<RealField> {
    check_nu(nu)?;
    let mut s = f.to_spectrum()?;
    let grid = s.grid().clone();
    for (i, c) in s.coeffs_mut().iter_mut().enumerate() {
        *c /= 1.0 + coeff * laplacian_symbol(&grid, i, nu);
    }
    s.hermitize();
    s.to_real()
}

/// Smallest even fine-grid size that renders a degree-`degree` product
/// alias-free: `m >= n (degree + 1) / 2`, never below the 3/2 rule.
pub fn dealias_size(n: usize, degree: u32) -> usize {
    let ratio_num = (degree as usize + 1).max(3);
    let mut m = (n * ratio_num).div_ceil(2);
    if m % 2 == 1 {
        m += 1;
    }
    m
}

/// Zero-padded spectral upsampling onto `m >= n` points. The coarse Nyquist
/// coefficient is split evenly between the `+n/2` and `-n/2` fine bins so the
/// interpolant stays real and symmetric.
fn upsample(spec: &Spectrum, m: usize) -> Result<Spectrum> {
    let n = spec.grid().n();
    assert!(m >= n && m % 2 == 0);
    let fine_grid = Grid::new(m, spec.grid().length())?;
    let mut fine = Spectrum::zeros(&fine_grid);
    let src = spec.coeffs();
    let dst = fine.coeffs_mut();
    for k in 0..n / 2 {
        dst[k] = src[k];
    }
    for k in 1..n / 2 {
        dst[m - k] = src[n - k];
    }
    let ny = src[n / 2];
    if m == n {
        dst[n / 2] = ny;
    } else {
        dst[n / 2] = 0.5 * ny;
        dst[m - n / 2] = 0.5 * ny;
    }
    Ok(fine)
}

/// Truncate a fine spectrum back to `n` bins, folding the `+n/2` content into
/// the coarse Nyquist bin (the exact inverse of [`upsample`]).
fn downsample(fine: &Spectrum, n: usize) -> Result<Spectrum> {
    let m = fine.grid().n();
    assert!(m >= n && n % 2 == 0);
    let coarse_grid = Grid::new(n, fine.grid().length())?;
    let mut coarse = Spectrum::zeros(&coarse_grid);
    let src = fine.coeffs();
    let dst = coarse.coeffs_mut();
    for k in 0..n / 2 {
        dst[k] = src[k];
    }
    for k in 1..n / 2 {
        dst[n - k] = src[m - k];
    }
    dst[n / 2] = if m == n { src[n / 2] } else { src[n / 2] + src[m - n / 2] };
    Ok(coarse)
}

/// Alias-free pointwise product of the given factors: zero-padded transform
/// sized for the total degree, product in physical space on the fine grid,
/// truncation back.
pub fn dealiased_product(factors: &[&RealField]) -> Result<RealField> {
    assert!(!factors.is_empty());
    let grid = factors[0].grid().clone();
    for f in factors {
        if f.grid() != &grid {
            return Err(Error::GridMismatch {
                context: "dealiased product factors",
                left_n: grid.n(),
                left_len: grid.length(),
                right_n: f.grid().n(),
                right_len: f.grid().length(),
            });
        }
        ensure_finite(f, "dealiased product factor")?;
    }
    if factors.len() == 1 {
        return Ok(factors[0].clone());
    }
    let n = grid.n();
    let m = dealias_size(n, factors.len() as u32);
    let mut product: Option<Vec<f64>> = None;
    for f in factors {
        let fine = upsample(&f.to_spectrum()?, m)?.to_real()?;
        product = Some(match product {
            None => fine.values().to_vec(),
            Some(mut acc) => {
                for (a, v) in acc.iter_mut().zip(fine.values()) {
                    *a *= v;
                }
                acc
            }
        });
    }
    let fine_grid = Grid::new(m, grid.length())?;
    let fine_field = RealField::new(fine_grid, product.unwrap())?;
    downsample(&fine_field.to_spectrum()?, n)?.to_real()
}

/// `f^(p+1)` computed alias-free.
pub fn power_nonlinearity(f: &RealField, p: u32) -> Result<RealField> {
    if p < 1 {
        return Err(Error::InvalidParam {
            name: "p",
            value: p as f64,
            reason: "nonlinearity power must be a positive integer",
        });
    }
    let factors: Vec<&RealField> = std::iter::repeat(f).take(p as usize + 1).collect();
    dealiased_product(&factors)
}

/// `base^p * other` computed alias-free (degree p + 1).
pub fn pow_mul(base: &RealField, p: u32, other: &RealField) -> Result<RealField> {
    let mut factors: Vec<&RealField> = std::iter::repeat(base).take(p as usize).collect();
    factors.push(other);
    dealiased_product(&factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles;
    use crate::profiles;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        Grid::new(n, 2.0 * PI).unwrap()
    }

    #[test]
    fn laplacian_on_sine_is_eigenvalue_times_sine() {
        let g = grid(64);
        let f = RealField::from_fn(&g, |x| (3.0 * x).sin());
        let lf = fractional_laplacian(&f, 1.5).unwrap();
        let expected = RealField::from_fn(&g, |x| 27.0 * (3.0 * x).sin());
        assert!(lf.max_diff(&expected) < 1e-12 * 27.0, "multiplier should be 3^3 = 27");
    }

    #[test]
    fn laplacian_annihilates_constants() {
        let g = grid(32);
        let f = RealField::constant(&g, 4.2);
        for nu in [0.75, 1.0, 1.6, 2.0] {
            let lf = fractional_laplacian(&f, nu).unwrap();
            assert!(lf.max_norm() < 1e-13);
        }
    }

    #[test]
    fn laplacian_matches_direct_dft_oracle_on_gaussian() {
        let g = Grid::new(48, 16.0).unwrap();
        let f = profiles::periodic_gaussian(&g, 8.0, 1.4);
        let nu = 1.25;
        let got = fractional_laplacian(&f, nu).unwrap();
        let want = oracles::direct_multiplier(&f, |xi| {
            if xi == 0.0 { Complex64::new(0.0, 0.0) } else { Complex64::new(xi.abs().powf(2.0 * nu), 0.0) }
        });
        let scale = want.max_norm();
        assert!(
            got.max_diff(&want) < 1e-12 * scale.max(1.0),
            "direct-summation DFT oracle disagrees: {:.3e} at scale {scale:.3e}",
            got.max_diff(&want)
        );
    }

    #[test]
    fn laplacian_eigenfunction_sweep() {
        // grid sized per nu: the sampled sine carries white round-off noise
        // (~1e-16) in every bin, and the top-of-ladder multiplier
        // (n/2)^(2 nu) lifts it; keep that product below the tolerance
        for (nu, n) in [(0.75, 256usize), (1.0, 128), (1.5, 40), (2.0, 16)] {
            let g = grid(n);
            for k in 1..n / 2 {
                let f = RealField::from_fn(&g, |x| (k as f64 * x).sin());
                let lf = fractional_laplacian(&f, nu).unwrap();
                let lam = (k as f64).powf(2.0 * nu);
                let expected = f.scale(lam);
                assert!(
                    lf.max_diff(&expected) <= 1e-12 * lam.max(1.0),
                    "eigenvalue failure at k = {k}, nu = {nu}: {:.3e}",
                    lf.max_diff(&expected) / lam.max(1.0)
                );
            }
        }
    }

    #[test]
    fn laplacian_dilation_scaling() {
        // q(x) = Q(delta x) on matched grids: Lap^nu q = delta^(2nu) (Lap^nu Q)(delta x)
        let n = 128;
        let coarse = Grid::new(n, 30.0).unwrap();
        let big_q = profiles::periodic_gaussian(&coarse, 15.0, 2.0);
        for delta in [0.5, 0.25] {
            let fine = Grid::new(n, 30.0 / delta).unwrap();
            // q sampled so that q_j = Q(delta x_j); nodes line up exactly
            let q = RealField::new(fine.clone(), big_q.values().to_vec()).unwrap();
            for nu in [1.0, 1.5] {
                let lap_q = fractional_laplacian(&q, nu).unwrap();
                let lap_big = fractional_laplacian(&big_q, nu).unwrap();
                let expected =
                    RealField::new(fine.clone(), lap_big.values().to_vec()).unwrap().scale(delta.powf(2.0 * nu));
                assert!(
                    lap_q.max_diff(&expected) < 1e-11,
                    "dilation identity broke at delta = {delta}, nu = {nu}"
                );
            }
        }
    }

    #[test]
    fn laplacian_is_self_adjoint() {
        let g = Grid::new(64, 11.0).unwrap();
        let f = profiles::band_limited(&g, 1, 20, 7, 1.0);
        let h = profiles::band_limited(&g, 1, 20, 8, 1.0);
        for nu in [0.8, 1.0, 1.7] {
            let lf = fractional_laplacian(&f, nu).unwrap();
            let lh = fractional_laplacian(&h, nu).unwrap();
            let a = lf.inner(&h);
            let b = f.inner(&lh);
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "self-adjointness failed at nu = {nu}");
        }
    }

    #[test]
    fn laplacian_commutes_with_derivative() {
        let g = Grid::new(64, 9.0).unwrap();
        let f = profiles::band_limited(&g, 1, 20, 9, 1.0);
        for nu in [0.75, 1.3, 2.0] {
            let a = derivative(&fractional_laplacian(&f, nu).unwrap(), 1).unwrap();
            let b = fractional_laplacian(&derivative(&f, 1).unwrap(), nu).unwrap();
            assert!(a.max_diff(&b) < 1e-12 * a.max_norm().max(1.0));
        }
    }

    #[test]
    fn laplacian_rejects_bad_input() {
        let g = grid(16);
        let f = RealField::from_fn(&g, |x| x.sin());
        assert!(fractional_laplacian(&f, 0.0).is_err());
        assert!(fractional_laplacian(&f, -1.0).is_err());
        let mut bad = f.clone();
        bad.values_mut()[3] = f64::NAN;
        assert!(matches!(fractional_laplacian(&bad, 1.0), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn derivative_of_sine_and_cosine() {
        let g = grid(32);
        let f = RealField::from_fn(&g, |x| (2.0 * x).sin());
        let d = derivative(&f, 1).unwrap();
        let expected = RealField::from_fn(&g, |x| 2.0 * (2.0 * x).cos());
        assert!(d.max_diff(&expected) < 1e-12);

        let c = RealField::from_fn(&g, |x| x.cos());
        let d3 = derivative(&c, 3).unwrap();
        let expected3 = RealField::from_fn(&g, |x| x.sin());
        assert!(d3.max_diff(&expected3) < 1e-12, "third derivative of cos is sin");
    }

    #[test]
    fn second_derivative_is_negated_laplacian() {
        let g = Grid::new(48, 13.0).unwrap();
        let f = profiles::band_limited(&g, 1, 15, 11, 1.0);
        let d2 = derivative(&f, 2).unwrap();
        let lap = fractional_laplacian(&f, 1.0).unwrap();
        assert!(d2.max_diff(&lap.scale(-1.0)) < 1e-12 * lap.max_norm().max(1.0));
    }

    #[test]
    fn derivative_rejects_unsupported_order() {
        let g = grid(16);
        let f = RealField::from_fn(&g, |x| x.sin());
        assert!(derivative(&f, 0).is_err());
        assert!(derivative(&f, 4).is_err());
    }

    #[test]
    fn power_of_constant_field() {
        let g = grid(16);
        let f = RealField::constant(&g, 2.0);
        let cube = power_nonlinearity(&f, 2).unwrap();
        let expected = RealField::constant(&g, 8.0);
        assert!(cube.max_diff(&expected) < 1e-13);
    }

    #[test]
    fn squared_cosine_matches_double_angle() {
        let g = grid(32);
        let f = RealField::from_fn(&g, |x| x.cos());
        let sq = power_nonlinearity(&f, 1).unwrap();
        let expected = RealField::from_fn(&g, |x| 0.5 * (1.0 + (2.0 * x).cos()));
        assert!(sq.max_diff(&expected) < 1e-13);
    }

    #[test]
    fn quartic_power_matches_oversampled_oracle() {
        let g = Grid::new(48, 2.0 * PI).unwrap();
        let f = profiles::band_limited(&g, 1, 10, 13, 1.0);
        let got = power_nonlinearity(&f, 3).unwrap();
        let want = oracles::oversampled_product(&[&f, &f, &f, &f], 4);
        assert!(got.max_diff(&want) < 1e-12, "4x-oversampled product oracle disagrees");
    }

    #[test]
    fn dealias_size_respects_degree_rule() {
        assert_eq!(dealias_size(64, 2), 96);
        assert_eq!(dealias_size(64, 3), 128);
        assert_eq!(dealias_size(64, 4), 160);
        // never below the 3/2 rule, and always even
        assert_eq!(dealias_size(10, 2), 16);
    }

    #[test]
    fn upsample_then_downsample_is_identity() {
        let g = grid(32);
        let f = profiles::band_limited(&g, 1, 14, 17, 1.0);
        let s = f.to_spectrum().unwrap();
        let up = upsample(&s, 48).unwrap();
        let back = downsample(&up, 32).unwrap().to_real().unwrap();
        assert!(f.max_diff(&back) < 1e-13);
    }
}
