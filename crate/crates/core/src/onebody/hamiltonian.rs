use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::krylov::HermitianOperator;
use crate::operators::{
    kinetic_on_grid, potential_on_grid, Fourier, GridSpec, KineticProfile, MomentumField, PositionField,
    PotentialSpec,
};

/// `h = K(p) + V` on a periodic lattice: `K` diagonal in momentum, `V`
/// diagonal in position.
#[derive(Debug, Clone)]
pub struct OneBodyHamiltonian {
    fourier: Fourier,
    kinetic: Vec<f64>,
    potential: Vec<f64>,
}

impl OneBodyHamiltonian {
    pub fn new(kinetic: &MomentumField, potential: &PositionField) -> Result<Self> {
        if !kinetic.grid.same_lattice(&potential.grid) {
            return Err(Error::InvalidParameter("kinetic and potential fields live on different lattices".into()));
        }
        let n = kinetic.grid.len();
        for len in [kinetic.values.len(), potential.values.len()] {
            if len != n {
                return Err(Error::Dimension { expected: n, got: len });
            }
        }
        Ok(Self {
            fourier: Fourier::new(kinetic.grid),
            kinetic: kinetic.values.clone(),
            potential: potential.values.clone(),
        })
    }

    pub fn from_specs(profile: &KineticProfile, potential: &PotentialSpec, grid: &GridSpec) -> Result<Self> {
        profile.validate()?;
        Self::new(&kinetic_on_grid(profile, grid), &potential_on_grid(potential, grid)?)
    }

    pub fn grid(&self) -> &GridSpec {
        self.fourier.grid()
    }

    pub fn kinetic(&self) -> &[f64] {
        &self.kinetic
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn fourier(&self) -> &Fourier {
        &self.fourier
    }

    /// `(ψ, hψ) / (ψ, ψ)`.
    pub fn rayleigh_quotient(&self, psi: &[Complex64]) -> f64 {
        let h_psi = self.apply_new(psi);
        let num: f64 = psi.iter().zip(&h_psi).map(|(a, b)| (a.conj() * b).re).sum();
        let den: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        num / den
    }

    /// `(f, K(p) f)` alone.
    pub fn kinetic_expectation(&self, psi: &[Complex64]) -> f64 {
        let mut work = psi.to_vec();
        self.fourier.forward(&mut work);
        work.iter().zip(&self.kinetic).map(|(z, k)| z.norm_sqr() * k).sum()
    }

    /// Lower and upper ends of the range any Rayleigh quotient can take.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let fold = |v: &[f64]| {
            v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
        };
        let (kmin, kmax) = fold(&self.kinetic);
        let (vmin, vmax) = fold(&self.potential);
        (kmin + vmin, kmax + vmax)
    }

    /// Digest of the lattice operator: grid plus the exact bits of both
    /// diagonals. Two operators with the same digest are identical.
    pub fn lattice_checksum(&self) -> String {
        lattice_checksum(self.grid(), &self.kinetic, &self.potential)
    }
}

pub fn lattice_checksum(grid: &GridSpec, kinetic: &[f64], potential: &[f64]) -> String {
    let mut hasher = Sha256::new();
    hasher.update((grid.dim as u64).to_le_bytes());
    hasher.update(grid.length.to_bits().to_le_bytes());
    hasher.update((grid.points as u64).to_le_bytes());
    for v in kinetic.iter().chain(potential) {
        hasher.update(v.to_bits().to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

impl HermitianOperator for OneBodyHamiltonian {
    fn dim(&self) -> usize {
        self.kinetic.len()
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        self.fourier.apply_multiplier(&self.kinetic, x, out);
        for ((o, xi), v) in out.iter_mut().zip(x).zip(&self.potential) {
            *o += xi * v;
        }
    }
}

/// `F^{-1}(K ⊙ Fψ) + V ⊙ ψ` with the unitary transform.
pub fn apply_h(
    kinetic: &MomentumField,
    potential: &PositionField,
    grid: &GridSpec,
    psi: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = grid.len();
    if !kinetic.grid.same_lattice(grid) || !potential.grid.same_lattice(grid) {
        return Err(Error::InvalidParameter("field lattice does not match the grid".into()));
    }
    if psi.len() != n {
        return Err(Error::Dimension { expected: n, got: psi.len() });
    }
    let h = OneBodyHamiltonian::new(kinetic, potential)?;
    Ok(h.apply_new(psi))
}
