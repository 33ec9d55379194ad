//! Periodic 1D spectral discretization: grids, real/spectral fields,
//! Fourier transforms and diagonal multipliers.
//!
//! Conventions. The torus is `[-length/2, length/2)` sampled at
//! `x_m = -length/2 + m*spacing`. Spectral coefficients follow the
//! trigonometric-interpolation normalization
//! `f(x) = sum_k c_k exp(i xi_k x)` with `xi_k = 2 pi k / length`,
//! `k in {-n/2, ..., n/2 - 1}`, stored in FFT slot order (slot `j`
//! holds `k = j` for `j < n/2` and `k = j - n` otherwise). With this
//! normalization the grid quadrature is exact for trigonometric
//! polynomials and Parseval reads `int |f|^2 dx = length * sum_k |c_k|^2`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid on the torus `[-length/2, length/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n_points: usize,
    length: f64,
}

impl Grid1D {
    /// `n_points` must be a power of two >= 8; `length` positive and finite.
    pub fn new(n_points: usize, length: f64) -> Result<Self> {
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(Error::Config(format!(
                "n_points must be a power of two >= 8, got {n_points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Config(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        Ok(Grid1D { n_points, length })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n_points as f64
    }

    /// Largest resolved frequency magnitude, `pi * n / length`.
    pub fn nyquist(&self) -> f64 {
        PI * self.n_points as f64 / self.length
    }

    /// Smallest nonzero frequency magnitude, `2 pi / length`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn x(&self, m: usize) -> f64 {
        -0.5 * self.length + m as f64 * self.spacing()
    }

    /// Signed mode index of an FFT slot.
    pub fn freq_index(&self, slot: usize) -> i64 {
        let n = self.n_points as i64;
        let j = slot as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Frequency `xi_k = 2 pi k / length` of an FFT slot.
    pub fn freq(&self, slot: usize) -> f64 {
        2.0 * PI * self.freq_index(slot) as f64 / self.length
    }

    /// FFT slot holding signed mode index `k` (must lie in `[-n/2, n/2)`).
    pub fn slot_of(&self, k: i64) -> usize {
        let n = self.n_points as i64;
        debug_assert!(k >= -n / 2 && k < n / 2);
        k.rem_euclid(n) as usize
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_points).map(|m| self.x(m)).collect()
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.freq(j)).collect()
    }
}

/// Real-valued samples on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid1D,
    samples: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid1D, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n_points() {
            return Err(Error::Config(format!(
                "sample count {} does not match grid size {}",
                samples.len(),
                grid.n_points()
            )));
        }
        if !samples.iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric("non-finite sample in real field".into()));
        }
        Ok(RealField { grid, samples })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        RealField {
            grid,
            samples: vec![0.0; grid.n_points()],
        }
    }

    /// Sample a function of `x` on the grid.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples: Vec<f64> = (0..grid.n_points()).map(|m| f(grid.x(m))).collect();
        RealField::new(grid, samples)
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Grid mean, `(1/n) sum f_m`.
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// `L^2` norm by exact grid quadrature.
    pub fn l2_norm(&self) -> f64 {
        let dx = self.grid.spacing();
        (self.samples.iter().map(|v| v * v).sum::<f64>() * dx).sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        RealField {
            grid: self.grid,
            samples: self.samples.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &RealField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Domain("grid mismatch in field addition".into()));
        }
        Ok(RealField {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &RealField) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }
}

/// Complex Fourier modes of a field on a [`Grid1D`], in FFT slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid1D,
    modes: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid1D, modes: Vec<Complex64>) -> Result<Self> {
        if modes.len() != grid.n_points() {
            return Err(Error::Config(format!(
                "mode count {} does not match grid size {}",
                modes.len(),
                grid.n_points()
            )));
        }
        if !modes.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::Numeric("non-finite mode in spectral field".into()));
        }
        Ok(SpectralField { grid, modes })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        SpectralField {
            grid,
            modes: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    /// Build modes from an analytic line transform `f_hat(xi)`, using the
    /// correspondence `c_k = f_hat(xi_k) / length` of the truncation to the
    /// torus. `f_hat` must satisfy `f_hat(-xi) = conj(f_hat(xi))` for the
    /// result to represent a real field.
    pub fn from_line_transform(grid: Grid1D, f_hat: impl Fn(f64) -> Complex64) -> Result<Self> {
        let modes: Vec<Complex64> = (0..grid.n_points())
            .map(|j| f_hat(grid.freq(j)) / grid.length())
            .collect();
        SpectralField::new(grid, modes)
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    pub fn modes_mut(&mut self) -> &mut [Complex64] {
        &mut self.modes
    }

    /// Coefficient of the zero mode (the field mean).
    pub fn mean_mode(&self) -> Complex64 {
        self.modes[0]
    }

    /// Spectral `L^2` norm, `sqrt(length * sum |c_k|^2)`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.length() * self.modes.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Max deviation from conjugate symmetry `c_{-k} = conj(c_k)`.
    pub fn conj_symmetry_residual(&self) -> f64 {
        let n = self.grid.n_points();
        let mut worst: f64 = self.modes[0].im.abs().max(self.modes[n / 2].im.abs());
        for j in 1..n / 2 {
            let d = self.modes[j] - self.modes[n - j].conj();
            worst = worst.max(d.norm());
        }
        worst
    }

    /// Apply a frequency-dependent real multiplier.
    pub fn apply_multiplier(&self, m: impl Fn(f64) -> f64) -> Self {
        let modes = (0..self.modes.len())
            .map(|j| self.modes[j] * m(self.grid.freq(j)))
            .collect();
        SpectralField {
            grid: self.grid,
            modes,
        }
    }

    /// Apply a frequency-dependent complex multiplier.
    pub fn apply_complex_multiplier(&self, m: impl Fn(f64) -> Complex64) -> Self {
        let modes = (0..self.modes.len())
            .map(|j| self.modes[j] * m(self.grid.freq(j)))
            .collect();
        SpectralField {
            grid: self.grid,
            modes,
        }
    }

    /// Exact spectral derivative, multiplier `i xi`.
    pub fn derivative(&self) -> Self {
        self.apply_complex_multiplier(|xi| Complex64::new(0.0, xi))
    }

    pub fn scaled(&self, c: f64) -> Self {
        SpectralField {
            grid: self.grid,
            modes: self.modes.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Domain("grid mismatch in field addition".into()));
        }
        Ok(SpectralField {
            grid: self.grid,
            modes: self
                .modes
                .iter()
                .zip(&other.modes)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }
}

static FFT_PLANS: Lazy<Mutex<HashMap<usize, (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plans_for(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    let mut cache = FFT_PLANS.lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Physical samples to spectral coefficients.
pub fn forward_transform(f: &RealField) -> SpectralField {
    let n = f.grid.n_points();
    let (fwd, _) = plans_for(n);
    let mut buf: Vec<Complex64> = f.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut buf);
    // Slot phase (-1)^j accounts for x_0 = -length/2 rather than 0.
    let inv_n = 1.0 / n as f64;
    for (j, c) in buf.iter_mut().enumerate() {
        let sign = if j % 2 == 0 { inv_n } else { -inv_n };
        *c *= sign;
    }
    SpectralField {
        grid: f.grid,
        modes: buf,
    }
}

/// Spectral coefficients back to physical samples (real part).
pub fn inverse_transform(f: &SpectralField) -> RealField {
    RealField {
        grid: f.grid,
        samples: inverse_transform_complex(f)
            .into_iter()
            .map(|c| c.re)
            .collect(),
    }
}

/// Full complex inverse; the imaginary parts diagnose conjugate-symmetry loss.
pub fn inverse_transform_complex(f: &SpectralField) -> Vec<Complex64> {
    let n = f.grid.n_points();
    let (_, inv) = plans_for(n);
    let mut buf: Vec<Complex64> = f
        .modes
        .iter()
        .enumerate()
        .map(|(j, &c)| if j % 2 == 0 { c } else { -c })
        .collect();
    inv.process(&mut buf);
    buf
}

/// Multiplier `|xi|^alpha`. Negative `alpha` requires a mean-free field;
/// the zero mode is mapped to zero (to one for `alpha = 0`).
pub fn fractional_derivative(f: &SpectralField, alpha: f64) -> Result<SpectralField> {
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("non-finite derivative order {alpha}")));
    }
    if alpha < 0.0 {
        let scale = f.l2_norm().max(f64::MIN_POSITIVE);
        let mean_l2 = (f.grid.length()).sqrt() * f.mean_mode().norm();
        if mean_l2 > 1e-10 * scale {
            return Err(Error::Domain(format!(
                "negative-order derivative (alpha = {alpha}) on a field with nonzero mean"
            )));
        }
    }
    Ok(f.apply_multiplier(|xi| {
        if xi == 0.0 {
            if alpha == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            xi.abs().powf(alpha)
        }
    }))
}

/// Zero all modes with `|xi| > fraction * nyquist`. The 2/3 rule is the
/// default for pseudo-spectral products.
pub fn dealias(f: &SpectralField, fraction: f64) -> SpectralField {
    let cutoff = fraction * f.grid.nyquist();
    f.apply_multiplier(|xi| if xi.abs() > cutoff { 0.0 } else { 1.0 })
}

/// `int f g dx` of two real fields given spectrally, via Parseval.
pub fn inner_product(f: &SpectralField, g: &SpectralField) -> f64 {
    debug_assert_eq!(f.grid, g.grid);
    f.grid.length()
        * f.modes
            .iter()
            .zip(&g.modes)
            .map(|(a, b)| (a * b.conj()).re)
            .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_arithmetic() {
        let g = Grid1D::new(8, 2.0 * PI).unwrap();
        assert_relative_eq!(g.spacing(), PI / 4.0);
        assert_relative_eq!(g.nyquist(), 4.0);
        assert_relative_eq!(g.spacing() * g.n_points() as f64, g.length());
    }

    #[test]
    fn grid_mode_layout_is_integer_for_2pi() {
        let g = Grid1D::new(16, 2.0 * PI).unwrap();
        let ks: Vec<i64> = (0..16).map(|j| g.freq_index(j)).collect();
        let mut sorted = ks.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (-8..8).collect::<Vec<i64>>());
        for j in 0..16 {
            assert_relative_eq!(g.freq(j), g.freq_index(j) as f64, epsilon = 1e-14);
        }
    }

    #[test]
    fn grid_rejects_bad_inputs() {
        assert!(Grid1D::new(8, 0.0).is_err());
        assert!(Grid1D::new(12, 1.0).is_err());
        assert!(Grid1D::new(4, 1.0).is_err());
        assert!(Grid1D::new(8, f64::NAN).is_err());
    }

    #[test]
    fn constant_field_has_only_zero_mode() {
        let g = Grid1D::new(64, 2.0 * PI).unwrap();
        let f = RealField::from_fn(g, |_| 3.25).unwrap();
        let c = forward_transform(&f);
        assert_relative_eq!(c.modes()[0].re, 3.25, epsilon = 1e-13);
        for j in 1..64 {
            assert!(c.modes()[j].norm() < 1e-13);
        }
    }

    #[test]
    fn sine_occupies_modes_pm_one() {
        let g = Grid1D::new(64, 2.0 * PI).unwrap();
        let f = RealField::from_fn(g, f64::sin).unwrap();
        let c = forward_transform(&f);
        for j in 0..64 {
            let k = g.freq_index(j);
            if k.abs() == 1 {
                assert_relative_eq!(c.modes()[j].norm(), 0.5, epsilon = 1e-12);
            } else {
                assert!(c.modes()[j].norm() < 1e-12, "mode {k} leaked");
            }
        }
    }

    #[test]
    fn gaussian_round_trip_below_1e12() {
        let g = Grid1D::new(256, 40.0).unwrap();
        let f = RealField::from_fn(g, |x| (-x * x).exp()).unwrap();
        let back = inverse_transform(&forward_transform(&f));
        let err = f
            .samples()
            .iter()
            .zip(back.samples())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12, "round-trip error {err}");
    }

    #[test]
    fn round_trip_and_parseval_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = *[64usize, 128, 256].choose(&mut rng).unwrap();
            let len = rng.gen_range(1.0..50.0);
            let g = Grid1D::new(n, len).unwrap();
            let samples: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f = RealField::new(g, samples).unwrap();
            let c = forward_transform(&f);
            let back = inverse_transform(&c);
            let err = f
                .samples()
                .iter()
                .zip(back.samples())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err < 1e-12);
            let phys = f.l2_norm();
            let spec = c.l2_norm();
            assert!(
                ((phys - spec) / phys).abs() < 1e-10,
                "parseval mismatch {phys} vs {spec}"
            );
            assert!(c.conj_symmetry_residual() < 1e-12 * f.max_abs().max(1.0));
        }
    }

    #[test]
    fn lambda_multipliers() {
        let g = Grid1D::new(64, 2.0 * PI).unwrap();
        let f = forward_transform(&RealField::from_fn(g, f64::sin).unwrap());
        // |xi|^1 acts as identity on modes +-1
        let d1 = fractional_derivative(&f, 1.0).unwrap();
        let diff = d1.sub(&f).unwrap();
        assert!(diff.l2_norm() < 1e-12);
        // alpha = 0 is the identity even with a mean present
        let fc = forward_transform(&RealField::from_fn(g, |x| 1.0 + x.sin()).unwrap());
        let d0 = fractional_derivative(&fc, 0.0).unwrap();
        assert!(d0.sub(&fc).unwrap().l2_norm() < 1e-13);
        // Lambda^2 scales mode xi=2 by 4
        let f2 = forward_transform(&RealField::from_fn(g, |x| (2.0 * x).cos()).unwrap());
        let d2 = fractional_derivative(&f2, 2.0).unwrap();
        let j = g.slot_of(2);
        assert_relative_eq!(d2.modes()[j].norm(), 4.0 * f2.modes()[j].norm(), epsilon = 1e-12);
        // negative order rejects a mean-bearing field
        assert!(fractional_derivative(&fc, -0.5).is_err());
        assert!(fractional_derivative(&f, -0.5).is_ok());
    }

    #[test]
    fn spectral_derivative_of_pure_mode() {
        let g = Grid1D::new(64, 2.0 * PI).unwrap();
        let f = forward_transform(&RealField::from_fn(g, f64::sin).unwrap());
        let d = inverse_transform(&f.derivative());
        let expect = RealField::from_fn(g, f64::cos).unwrap();
        let err = d
            .samples()
            .iter()
            .zip(expect.samples())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12);
    }

    #[test]
    fn dealias_behaviour() {
        let g = Grid1D::new(64, 2.0 * PI).unwrap();
        // fraction = 1 keeps everything
        let f = forward_transform(&RealField::from_fn(g, |x| x.sin() + (20.0 * x).cos()).unwrap());
        assert!(dealias(&f, 1.0).sub(&f).unwrap().l2_norm() < 1e-14);
        // pure mode above 2/3 nyquist (nyquist = 32, cutoff 21.33) is wiped
        let hi = forward_transform(&RealField::from_fn(g, |x| (25.0 * x).cos()).unwrap());
        assert!(dealias(&hi, 2.0 / 3.0).l2_norm() < 1e-13);
        // low mode untouched
        let lo = forward_transform(&RealField::from_fn(g, |x| (5.0 * x).cos()).unwrap());
        assert!(dealias(&lo, 2.0 / 3.0).sub(&lo).unwrap().l2_norm() < 1e-14);
    }

    #[test]
    fn non_finite_inputs_are_numeric_errors() {
        let g = Grid1D::new(8, 1.0).unwrap();
        let mut s = vec![0.0; 8];
        s[3] = f64::NAN;
        assert!(matches!(RealField::new(g, s), Err(Error::Numeric(_))));
    }
}
