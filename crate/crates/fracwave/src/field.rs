//! Real-valued fields on a periodic grid and their spectral companions.

use crate::error::{Error, Result};
use crate::grid::Grid;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

/// Relative round-trip tolerance enforced on every transform provider.
pub const ROUNDTRIP_TOL: f64 = 1e-13;
/// Relative imaginary residue tolerated when a Hermitian spectrum is
/// brought back to physical space.
pub const REALITY_TOL: f64 = 1e-13;

/// Physical samples of a real field on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

/// Fourier coefficients of a field, in FFT bin order.
///
/// Coefficients are of the trigonometric interpolant: `f(x) = sum_k c_k
/// exp(i xi_k x)`, so the forward transform carries the `1/n` factor.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

struct PlanCache {
    planner: FftPlanner<f64>,
    plans: HashMap<usize, (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
    healthy: HashMap<usize, bool>,
}

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new(PlanCache {
        planner: FftPlanner::new(),
        plans: HashMap::new(),
        healthy: HashMap::new(),
    });
}

fn with_plans<T>(n: usize, f: impl FnOnce(&Arc<dyn Fft<f64>>, &Arc<dyn Fft<f64>>) -> T) -> Result<T> {
    PLANS.with(|cell| {
        let mut cache = cell.borrow_mut();
        if !cache.plans.contains_key(&n) {
            let fwd = cache.planner.plan_fft_forward(n);
            let inv = cache.planner.plan_fft_inverse(n);
            cache.plans.insert(n, (fwd, inv));
        }
        if !cache.healthy.contains_key(&n) {
            let (fwd, inv) = cache.plans.get(&n).unwrap();
            let err = roundtrip_error(n, fwd, inv);
            if err > ROUNDTRIP_TOL {
                return Err(Error::TransformHealth { n, err, tol: ROUNDTRIP_TOL });
            }
            cache.healthy.insert(n, true);
        }
        let (fwd, inv) = cache.plans.get(&n).unwrap();
        Ok(f(fwd, inv))
    })
}

/// Round-trip a deterministic full-band test vector through the provider.
fn roundtrip_error(n: usize, fwd: &Arc<dyn Fft<f64>>, inv: &Arc<dyn Fft<f64>>) -> f64 {
    let mut state = 0x9e3779b97f4a7c15u64;
    let probe: Vec<f64> = (0..n)
        .map(|_| {
            // xorshift; amplitude O(1), fixed across runs
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    let mut buf: Vec<Complex64> = probe.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut buf);
    for c in buf.iter_mut() {
        *c /= n as f64;
    }
    inv.process(&mut buf);
    let scale = probe.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    probe
        .iter()
        .zip(buf.iter())
        .fold(0.0f64, |m, (v, c)| m.max((c.re - v).abs().max(c.im.abs())))
        / scale
}

impl RealField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch {
                context: "field length does not match grid",
                left_n: grid.n(),
                left_len: grid.length(),
                right_n: values.len(),
                right_len: grid.length(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: grid.clone(), values: vec![0.0; grid.n()] }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self { grid: grid.clone(), values: vec![c; grid.n()] }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n()).map(|j| f(grid.node(j))).collect();
        Self { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Trapezoid-rule integral over the period (exact for trig interpolants).
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    /// Trapezoid L2 norm `sqrt(int f^2)`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.dx()).sqrt()
    }

    /// Trapezoid inner product with `other` on the same grid.
    pub fn inner(&self, other: &RealField) -> f64 {
        assert_eq!(self.grid, other.grid, "inner product requires matching grids");
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.dx()
    }

    pub fn scale(&self, a: f64) -> RealField {
        RealField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }

    /// `self += a * other`, element-wise.
    pub fn axpy(&mut self, a: f64, other: &RealField) {
        assert_eq!(self.grid, other.grid, "axpy requires matching grids");
        for (s, o) in self.values.iter_mut().zip(other.values.iter()) {
            *s += a * o;
        }
    }

    /// Reinterpret the same samples on a grid of a different period.
    pub fn with_period(&self, length: f64) -> Result<RealField> {
        Ok(RealField { grid: self.grid.with_length(length)?, values: self.values.clone() })
    }

    pub fn to_spectrum(&self) -> Result<Spectrum> {
        let n = self.grid.n();
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        with_plans(n, |fwd, _| {
            fwd.process(&mut buf);
            for c in buf.iter_mut() {
                *c /= n as f64;
            }
        })?;
        Ok(Spectrum { grid: self.grid.clone(), coeffs: buf })
    }

    /// Maximum absolute difference against another field on the same grid.
    pub fn max_diff(&self, other: &RealField) -> f64 {
        assert_eq!(self.grid, other.grid, "max_diff requires matching grids");
        self.values
            .iter()
            .zip(other.values.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Linear combination of fields sharing one grid.
pub fn lin_comb(terms: &[(f64, &RealField)]) -> RealField {
    assert!(!terms.is_empty(), "lin_comb needs at least one term");
    let mut out = terms[0].1.scale(terms[0].0);
    for (a, f) in &terms[1..] {
        out.axpy(*a, f);
    }
    out
}

impl Spectrum {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::GridMismatch {
                context: "spectrum length does not match grid",
                left_n: grid.n(),
                left_len: grid.length(),
                right_n: coeffs.len(),
                right_len: grid.length(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: grid.clone(), coeffs: vec![Complex64::new(0.0, 0.0); grid.n()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Inverse transform without the reality assertion; returns complex samples.
    fn inverse_raw(&self) -> Result<Vec<Complex64>> {
        let n = self.grid.n();
        let mut buf = self.coeffs.clone();
        with_plans(n, |_, inv| {
            inv.process(&mut buf);
        })?;
        Ok(buf)
    }

    /// Inverse transform asserting the result is real; imaginary residue
    /// above [`REALITY_TOL`] (relative to the field scale) is an error,
    /// below it it is discarded.
    pub fn to_real(&self) -> Result<RealField> {
        let buf = self.inverse_raw()?;
        let scale = buf.iter().fold(0.0f64, |m, c| m.max(c.re.abs())).max(1.0);
        let residue = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
        if residue > REALITY_TOL * scale {
            return Err(Error::RealityLoss { residue: residue / scale, tol: REALITY_TOL });
        }
        Ok(RealField { grid: self.grid.clone(), values: buf.iter().map(|c| c.re).collect() })
    }

    /// Project onto the Hermitian subspace: mirror the positive-frequency
    /// half onto the negative one and pin the self-conjugate bins real.
    /// Multiplier application amplifies the transform's tiny asymmetric
    /// round-off (by up to `|xi|^(2 nu)`), so operators re-project after
    /// every multiply; this is the half-spectrum layout in disguise.
    pub fn hermitize(&mut self) {
        let n = self.grid.n();
        self.coeffs[0].im = 0.0;
        self.coeffs[n / 2].im = 0.0;
        for k in 1..n / 2 {
            let avg = 0.5 * (self.coeffs[k] + self.coeffs[n - k].conj());
            self.coeffs[k] = avg;
            self.coeffs[n - k] = avg.conj();
        }
    }

    /// Largest deviation from Hermitian symmetry, `max_k |c_k - conj(c_{-k})|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let mut worst = 0.0f64;
        for i in 1..n {
            let j = n - i;
            worst = worst.max((self.coeffs[i] - self.coeffs[j].conj()).norm());
        }
        worst = worst.max(self.coeffs[0].im.abs());
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(n: usize, length: f64, seed: u64) -> RealField {
        let grid = Grid::new(n, length).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        RealField::new(grid, values).unwrap()
    }

    #[test]
    fn roundtrip_is_within_health_tolerance() {
        for seed in 0..20 {
            let f = random_field(64, 2.0 * PI, seed);
            let back = f.to_spectrum().unwrap().to_real().unwrap();
            let rel = f.max_diff(&back) / f.max_norm().max(1e-300);
            assert!(rel < ROUNDTRIP_TOL, "round-trip error {rel:.3e} too large for seed {seed}");
        }
    }

    #[test]
    fn real_fields_have_hermitian_spectra() {
        for seed in 0..10 {
            let f = random_field(48, 5.0, seed + 100);
            let s = f.to_spectrum().unwrap();
            assert!(s.hermitian_defect() < 1e-14, "hermitian defect too large");
        }
    }

    #[test]
    fn single_mode_lands_in_expected_bin() {
        let grid = Grid::new(32, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&grid, |x| (3.0 * x).cos());
        let s = f.to_spectrum().unwrap();
        for i in 0..32 {
            let k = grid.mode(i);
            let c = s.coeffs()[i];
            if k.abs() == 3 {
                assert!((c.re - 0.5).abs() < 1e-14 && c.im.abs() < 1e-14);
            } else {
                assert!(c.norm() < 1e-14, "leakage into bin {i}");
            }
        }
    }

    #[test]
    fn trapezoid_integral_matches_zero_mode() {
        let f = random_field(64, 7.5, 3);
        let s = f.to_spectrum().unwrap();
        let mass = f.integral();
        assert!((mass - s.coeffs()[0].re * 7.5).abs() < 1e-12);
    }

    #[test]
    fn reality_loss_is_detected() {
        let grid = Grid::new(16, 2.0 * PI).unwrap();
        let mut s = Spectrum::zeros(&grid);
        // deliberately non-Hermitian: energy only in k = +1
        s.coeffs_mut()[1] = Complex64::new(1.0, 0.0);
        assert!(matches!(s.to_real(), Err(Error::RealityLoss { .. })));
    }
}
