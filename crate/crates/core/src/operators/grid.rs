use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic box `[-L/2, L/2)^d` with `N` points per axis.
///
/// Position lattice: `x_j = -L/2 + j L/N`. Momentum lattice: `k_n = 2πn/L`
/// with `n ∈ {-N/2, …, N/2-1}`, stored in FFT order (`n` for indices below
/// `N/2`, `n - N` above). Fields are flattened row-major, axis 0 slowest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub length: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, length: f64, points: usize) -> Result<Self> {
        let grid = Self { dim, length, points };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidParameter(format!("grid dimension must be 1, 2 or 3, got {}", self.dim)));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::InvalidParameter(format!("box length must be > 0, got {}", self.length)));
        }
        if self.points < 2 || !self.points.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "points per axis must be a power of two >= 2, got {}",
                self.points
            )));
        }
        Ok(())
    }

    /// Total number of lattice sites, `N^d`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// `2π/L`.
    pub fn momentum_quantum(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn position_1d(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    /// Signed integer momentum label of FFT slot `i` along one axis.
    pub fn momentum_label(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// FFT slot holding integer momentum label `n`, wrapping periodically.
    pub fn momentum_slot(&self, n: i64) -> usize {
        n.rem_euclid(self.points as i64) as usize
    }

    pub fn is_nyquist_slot(&self, i: usize) -> bool {
        i == self.points / 2
    }

    /// Per-axis indices of a flat index.
    pub fn unflatten(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for axis in (0..self.dim).rev() {
            idx[axis] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx[..self.dim].iter().fold(0, |acc, &i| acc * self.points + i)
    }

    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.position_1d(idx[axis]);
        }
        x
    }

    /// Integer momentum labels of a flat FFT-ordered index.
    pub fn momentum_labels(&self, flat: usize) -> [i64; 3] {
        let idx = self.unflatten(flat);
        let mut n = [0i64; 3];
        for axis in 0..self.dim {
            n[axis] = self.momentum_label(idx[axis]);
        }
        n
    }

    pub fn momentum(&self, flat: usize) -> [f64; 3] {
        let q = self.momentum_quantum();
        let n = self.momentum_labels(flat);
        [n[0] as f64 * q, n[1] as f64 * q, n[2] as f64 * q]
    }

    /// Whether any axis of the FFT-ordered index sits on the Nyquist slot.
    pub fn touches_nyquist(&self, flat: usize) -> bool {
        let idx = self.unflatten(flat);
        idx[..self.dim].iter().any(|&i| self.is_nyquist_slot(i))
    }

    /// Flat index of the reflected momentum `k -> -k`.
    pub fn reflect_momentum(&self, flat: usize) -> usize {
        let mut idx = self.unflatten(flat);
        for i in idx.iter_mut().take(self.dim) {
            *i = (self.points - *i) % self.points;
        }
        self.flatten(&idx)
    }

    /// Flat index of the mirrored site `x -> -x`. The origin is a lattice
    /// site, so this has the same index arithmetic as the momentum reflection.
    pub fn reflect_site(&self, flat: usize) -> usize {
        self.reflect_momentum(flat)
    }

    /// Flat index of site `flat` shifted by `shift` lattice steps per axis.
    pub fn shift_site(&self, flat: usize, shift: &[i64]) -> usize {
        let mut idx = self.unflatten(flat);
        let n = self.points as i64;
        for axis in 0..self.dim {
            idx[axis] = (idx[axis] as i64 + shift[axis]).rem_euclid(n) as usize;
        }
        self.flatten(&idx)
    }

    /// Doubles the points per axis at fixed box length.
    pub fn refined(&self) -> Self {
        Self { points: self.points * 2, ..*self }
    }

    /// Same lattice? Compared bitwise on the box length.
    pub fn same_lattice(&self, other: &Self) -> bool {
        self.dim == other.dim && self.points == other.points && self.length.to_bits() == other.length.to_bits()
    }
}
