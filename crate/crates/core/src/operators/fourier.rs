use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::GridSpec;

/// Unitary d-dimensional DFT on a [`GridSpec`] lattice.
///
/// Transforms act axis by axis on row-major data; each direction is scaled by
/// `N^{-d/2}` so the pair is unitary.
#[derive(Clone)]
pub struct Fourier {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Fourier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fourier").field("grid", &self.grid).finish()
    }
}

impl Fourier {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.points),
            inverse: planner.plan_fft_inverse(grid.points),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &*self.forward);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &*self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], plan: &dyn Fft<f64>) {
        let n = self.grid.points;
        let d = self.grid.dim;
        assert_eq!(data.len(), self.grid.len());
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for axis in 0..d {
            let stride = n.pow((d - 1 - axis) as u32);
            let block = stride * n;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (i, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + i * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (i, value) in line.iter().enumerate() {
                        data[base + i * stride] = *value;
                    }
                }
            }
        }
        let scale = (self.grid.len() as f64).sqrt().recip();
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    /// `F^{-1} (m ⊙ F ψ)` for a real momentum-space multiplier, accumulated into `out`.
    pub fn apply_multiplier(&self, multiplier: &[f64], psi: &[Complex64], out: &mut [Complex64]) {
        let mut work = psi.to_vec();
        self.forward(&mut work);
        for (w, m) in work.iter_mut().zip(multiplier) {
            *w *= *m;
        }
        self.inverse(&mut work);
        for (o, w) in out.iter_mut().zip(&work) {
            *o += *w;
        }
    }
}
