//! Discrete Littlewood-Paley decomposition.
//!
//! The dyadic multipliers are built from the classical smooth ramp
//! `s(t) = h(t) / (h(t) + h(1-t))`, `h(t) = exp(-1/t)`: the raw shell
//! profile `rho` equals 1 on `[1, 2]` and vanishes outside `(3/4, 8/3)`,
//! and the normalization `phi(xi) = rho(xi) / sum_j rho(2^-j xi)` makes
//! the dyadic partition of unity hold to machine precision. The low
//! block is `chi(xi) = 1 - sum_{q >= 0} phi(2^-q xi)`, supported in
//! `|xi| <= 4/3`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, SpectralField};

/// Smooth ramp: 0 for `t <= 0`, 1 for `t >= 1`, C-infinity in between.
pub fn smooth_ramp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let h = |u: f64| (-1.0 / u).exp();
        let a = h(t);
        a / (a + h(1.0 - t))
    }
}

/// Unnormalized shell profile: 1 on `[1, 2]`, supported in `(3/4, 8/3)`.
fn rho(xi_abs: f64) -> f64 {
    smooth_ramp((8.0 / 3.0 - xi_abs) / (8.0 / 3.0 - 2.0))
        * smooth_ramp((xi_abs - 3.0 / 4.0) / (1.0 - 3.0 / 4.0))
}

/// Normalized shell multiplier `phi`, supported in `3/4 <= |xi| <= 8/3`,
/// with `sum_{k in Z} phi(2^-k xi) = 1` exactly for `xi != 0`.
pub fn phi_bump(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 3.0 / 4.0 || a >= 8.0 / 3.0 {
        return 0.0;
    }
    let num = rho(a);
    // Only scales within a factor 4 of `a` can contribute.
    let mut den = 0.0;
    for j in -2..=2 {
        den += rho(a * (2.0f64).powi(j));
    }
    num / den
}

/// Low-frequency multiplier `chi`, 1 on `|xi| <= 3/4`, 0 for `|xi| >= 4/3`.
pub fn chi_bump(xi: f64) -> f64 {
    let a = xi.abs();
    if a >= 4.0 / 3.0 {
        0.0
    } else {
        // Only the q = 0 shell reaches below 4/3.
        1.0 - phi_bump(a)
    }
}

/// Sampled dyadic multipliers on a grid, blocks `q_min..=q_max`.
#[derive(Debug, Clone)]
pub struct LpFilterBank {
    grid: Grid1D,
    q_min: i32,
    q_max: i32,
    chi: Vec<f64>,
    phi: Vec<Vec<f64>>,
}

impl LpFilterBank {
    /// Explicit block range. Every requested shell must be fully resolved:
    /// `2^q_max * 8/3 <= nyquist`.
    pub fn new(grid: Grid1D, q_min: i32, q_max: i32) -> Result<Self> {
        if q_min > q_max {
            return Err(Error::Config(format!(
                "empty block range [{q_min}, {q_max}]"
            )));
        }
        let top = (2.0f64).powi(q_max) * 8.0 / 3.0;
        if top > grid.nyquist() * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "unresolved shell: 2^{q_max} * 8/3 = {top:.3} exceeds nyquist {:.3}",
                grid.nyquist()
            )));
        }
        Ok(Self::build(grid, q_min, q_max))
    }

    /// Default bank for a grid: the lower edge sits one octave below the
    /// fundamental so every nonzero grid frequency is fully tiled, and the
    /// upper edge extends to the shell containing the nyquist frequency so
    /// both partitions of unity hold at every grid frequency. Shells whose
    /// support extends past the nyquist are truncated by the grid itself;
    /// see [`LpFilterBank::is_fully_resolved`].
    pub fn auto(grid: Grid1D) -> Self {
        let q_min = grid.fundamental().log2().floor() as i32 - 1;
        let q_top = (grid.nyquist() * 2.0 / 3.0).log2().ceil() as i32;
        Self::build(grid, q_min, q_top.max(q_min))
    }

    fn build(grid: Grid1D, q_min: i32, q_max: i32) -> Self {
        let chi = (0..grid.n_points())
            .map(|j| chi_bump(grid.freq(j)))
            .collect();
        let phi = (q_min..=q_max)
            .map(|q| {
                let scale = (2.0f64).powi(-q);
                (0..grid.n_points())
                    .map(|j| phi_bump(grid.freq(j) * scale))
                    .collect()
            })
            .collect();
        LpFilterBank {
            grid,
            q_min,
            q_max,
            chi,
            phi,
        }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn q_min(&self) -> i32 {
        self.q_min
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    /// Largest block index whose shell lies entirely below the nyquist.
    pub fn q_max_resolved(&self) -> i32 {
        (self.grid.nyquist() * 3.0 / 8.0).log2().floor() as i32
    }

    pub fn is_fully_resolved(&self, q: i32) -> bool {
        q <= self.q_max_resolved()
    }

    pub fn chi_weights(&self) -> &[f64] {
        &self.chi
    }

    pub fn phi_weights(&self, q: i32) -> Result<&[f64]> {
        if q < self.q_min || q > self.q_max {
            return Err(Error::Domain(format!(
                "block {q} outside bank range [{}, {}]",
                self.q_min, self.q_max
            )));
        }
        Ok(&self.phi[(q - self.q_min) as usize])
    }

    /// Multiplier of one block; `None` encodes the zero block
    /// (inhomogeneous `q <= -2`).
    pub fn block_weights(&self, q: i32, homogeneous: bool) -> Result<Option<&[f64]>> {
        if homogeneous {
            self.phi_weights(q).map(Some)
        } else if q == -1 {
            Ok(Some(&self.chi))
        } else if q <= -2 {
            Ok(None)
        } else if q > self.q_max {
            Err(Error::Domain(format!(
                "inhomogeneous block {q} above bank range (q_max = {})",
                self.q_max
            )))
        } else {
            self.phi_weights(q).map(Some)
        }
    }

    /// Apply one frequency-localization block.
    pub fn apply_block(&self, q: i32, f: &SpectralField, homogeneous: bool) -> Result<SpectralField> {
        if f.grid() != self.grid {
            return Err(Error::Domain("field grid does not match bank grid".into()));
        }
        match self.block_weights(q, homogeneous)? {
            None => Ok(SpectralField::zeros(self.grid)),
            Some(w) => {
                let modes = f
                    .modes()
                    .iter()
                    .zip(w)
                    .map(|(c, &wk)| c * wk)
                    .collect::<Vec<Complex64>>();
                SpectralField::new(self.grid, modes)
            }
        }
    }

    /// Spectral `L^2` norm of one block without materializing the field.
    pub fn block_l2(&self, q: i32, f: &SpectralField, homogeneous: bool) -> Result<f64> {
        match self.block_weights(q, homogeneous)? {
            None => Ok(0.0),
            Some(w) => {
                let sum: f64 = f
                    .modes()
                    .iter()
                    .zip(w)
                    .map(|(c, &wk)| (wk * wk) * c.norm_sqr())
                    .sum();
                Ok((self.grid.length() * sum).sqrt())
            }
        }
    }

    /// Inhomogeneous blocks: `q = -1` plus all shells up to `q_max`.
    pub fn inhomogeneous_range(&self) -> impl Iterator<Item = i32> {
        -1..=self.q_max
    }

    /// Homogeneous blocks available in this bank.
    pub fn homogeneous_range(&self) -> impl Iterator<Item = i32> {
        self.q_min..=self.q_max
    }

    /// Band of frequencies on which the dyadic partition restricted to
    /// `[q_min, q_max]` sums to exactly 1: `[2^q_min * 4/3, 2^q_max * 3/2]`.
    pub fn homogeneous_coverage(&self) -> (f64, f64) {
        (
            (2.0f64).powi(self.q_min) * 4.0 / 3.0,
            (2.0f64).powi(self.q_max) * 3.0 / 2.0,
        )
    }

    /// Max of `|chi + sum_q phi - 1|` over all grid frequencies.
    pub fn inhomogeneous_partition_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.grid.n_points() {
            let mut s = self.chi[j];
            for q in 0..=self.q_max {
                if q >= self.q_min {
                    s += self.phi[(q - self.q_min) as usize][j];
                }
            }
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }

    /// Max of `|sum_q phi - 1|` over nonzero grid frequencies inside the
    /// coverage band.
    pub fn homogeneous_partition_residual(&self) -> f64 {
        let (lo, hi) = self.homogeneous_coverage();
        let mut worst: f64 = 0.0;
        for j in 0..self.grid.n_points() {
            let a = self.grid.freq(j).abs();
            if a < lo || a > hi {
                continue;
            }
            let s: f64 = (self.q_min..=self.q_max)
                .map(|q| self.phi[(q - self.q_min) as usize][j])
                .sum();
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }

    /// `L^2` mass of a zero-mean field not captured by any block of this
    /// bank (the infrared tail of the torus truncation).
    pub fn uncovered_mass(&self, f: &SpectralField) -> f64 {
        let mut sum = 0.0;
        for j in 1..self.grid.n_points() {
            let covered: f64 = (self.q_min..=self.q_max)
                .map(|q| self.phi[(q - self.q_min) as usize][j])
                .sum();
            let leftover = (1.0 - covered).max(0.0);
            sum += (leftover * f.modes()[j].norm()).powi(2);
        }
        (self.grid.length() * sum).sqrt()
    }
}
