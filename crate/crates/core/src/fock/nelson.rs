use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::field::{degree, field_polynomial, FieldOrdering, FockBasis, SparseMatrix};
use crate::bernstein::BernsteinFunction;
use crate::error::{Error, Result};
use crate::krylov::HermitianOperator;
use crate::onebody::lattice_checksum;
use crate::operators::{kinetic_on_grid, potential_on_grid, Fourier, GridSpec, KineticProfile, PotentialSpec};

/// One boson mode: momentum `k`, coupling `g(k)` and dispersion `ω(k) ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub momentum: Vec<f64>,
    pub coupling: Complex64,
    pub omega: f64,
}

impl Mode {
    /// Mode at the lattice momentum with integer labels `label` (per axis).
    pub fn on_lattice(grid: &GridSpec, label: &[i64], coupling: Complex64, omega: f64) -> Self {
        let q = grid.momentum_quantum();
        Self { momentum: label.iter().map(|&n| n as f64 * q).collect(), coupling, omega }
    }

    /// Whether `k` is a multiple of `2π/L` on every axis (to 1e-9 relative).
    pub fn is_on_lattice(&self, grid: &GridSpec) -> bool {
        let q = grid.momentum_quantum();
        self.momentum.iter().all(|k| {
            let n = k / q;
            (n - n.round()).abs() <= 1e-9 * n.abs().max(1.0)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockTruncation {
    pub modes: Vec<Mode>,
    /// Occupation cap per mode.
    pub n_max: u32,
}

impl FockTruncation {
    pub fn basis(&self) -> FockBasis {
        FockBasis { modes: self.modes.len(), cap: self.n_max }
    }

    pub fn couplings(&self) -> Vec<Complex64> {
        self.modes.iter().map(|m| m.coupling).collect()
    }

    pub fn is_decoupled(&self) -> bool {
        self.modes.iter().all(|m| m.coupling == Complex64::default())
    }

    /// Indices of modes whose momentum is not on the lattice of `grid`.
    pub fn off_lattice(&self, grid: &GridSpec) -> Vec<usize> {
        (0..self.modes.len()).filter(|&i| !self.modes[i].is_on_lattice(grid)).collect()
    }

    pub fn with_n_max(&self, n_max: u32) -> Self {
        Self { n_max, ..self.clone() }
    }
}

pub const DEFAULT_DIM_CAP: usize = 200_000;

/// `H^V = B(p²) ⊗ I + I ⊗ H_f + P(φ(x)) + V ⊗ I` on a lattice times a
/// truncated Fock space; `H⁰` is the same without `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct NelsonInstance {
    pub grid: GridSpec,
    pub bernstein: BernsteinFunction,
    pub truncation: FockTruncation,
    /// Ascending real coefficients of `P`.
    pub polynomial: Vec<f64>,
    pub potential: PotentialSpec,
    pub ordering: FieldOrdering,
    pub dim_cap: usize,
}

impl NelsonInstance {
    pub fn new(
        grid: GridSpec,
        bernstein: BernsteinFunction,
        truncation: FockTruncation,
        polynomial: Vec<f64>,
        potential: PotentialSpec,
    ) -> Self {
        Self {
            grid,
            bernstein,
            truncation,
            polynomial,
            potential,
            ordering: FieldOrdering::default(),
            dim_cap: DEFAULT_DIM_CAP,
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.len().saturating_mul(self.truncation.basis().len())
    }

    pub fn kinetic_profile(&self) -> KineticProfile {
        KineticProfile::BernsteinComposed { bernstein: self.bernstein.clone() }
    }

    /// A nonconstant `P` of degree ≤ 1 is not bounded below once the field
    /// is untruncated; such instances are still accepted but tagged.
    pub fn continuum_unbounded(&self) -> bool {
        degree(&self.polynomial) == Some(1)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.kinetic_profile().validate()?;
        self.potential.validate()?;
        let t = &self.truncation;
        if t.n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        for (i, m) in t.modes.iter().enumerate() {
            if m.momentum.len() != self.grid.dim {
                return Err(Error::Dimension { expected: self.grid.dim, got: m.momentum.len() });
            }
            if !(m.omega >= 0.0 && m.omega.is_finite()) {
                return Err(Error::InvalidParameter(format!("mode {i}: omega must be finite and >= 0")));
            }
            if m.momentum.iter().any(|k| !k.is_finite()) {
                return Err(Error::InvalidParameter(format!("mode {i}: non-finite momentum")));
            }
        }
        if let Some(deg) = degree(&self.polynomial) {
            if deg >= 2 && (deg % 2 == 1 || self.polynomial[deg] < 0.0) {
                return Err(Error::InvalidParameter(
                    "P must have even degree with positive leading coefficient, or degree <= 1".into(),
                ));
            }
        }
        if self.dim() > self.dim_cap {
            return Err(Error::SizeCap { dim: self.dim(), cap: self.dim_cap });
        }
        Ok(())
    }
}

#[derive(Debug)]
struct Shared {
    grid: GridSpec,
    fock: FockBasis,
    fourier: Fourier,
    kinetic: Vec<f64>,
    /// `Σ_m ω_m n_m` per Fock state.
    field_energy: Vec<f64>,
    /// `e^{i x_j·κ_s}` at `s * sites + j`, `κ_s = Σ_m n_m k_m`.
    phases: Vec<Complex64>,
    /// `P(φ(0))`; the field at `x` is `D(x)† P(φ(0)) D(x)` with `D = diag(e^{i x·κ})`.
    field_polynomial: SparseMatrix,
}

/// Matrix-free `H⁰` or `H^V`. States are indexed `s * sites + j` (Fock
/// state `s`, lattice site `j`).
#[derive(Debug, Clone)]
pub struct NelsonOperator {
    shared: Arc<Shared>,
    potential: Option<Vec<f64>>,
}

impl NelsonOperator {
    pub fn grid(&self) -> &GridSpec {
        &self.shared.grid
    }

    pub fn fock(&self) -> FockBasis {
        self.shared.fock
    }

    pub fn sites(&self) -> usize {
        self.shared.grid.len()
    }

    pub fn kinetic(&self) -> &[f64] {
        &self.shared.kinetic
    }

    pub fn field_energy(&self) -> &[f64] {
        &self.shared.field_energy
    }

    pub fn phase(&self, s: usize, j: usize) -> Complex64 {
        self.shared.phases[s * self.sites() + j]
    }

    pub fn field_polynomial(&self) -> &SparseMatrix {
        &self.shared.field_polynomial
    }

    pub fn potential(&self) -> Option<&[f64]> {
        self.potential.as_deref()
    }

    /// The same operator with the potential removed.
    pub fn without_potential(&self) -> Self {
        Self { shared: Arc::clone(&self.shared), potential: None }
    }
}

impl HermitianOperator for NelsonOperator {
    fn dim(&self) -> usize {
        self.sites() * self.shared.fock.len()
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let sh = &*self.shared;
        let sites = self.sites();
        for s in 0..sh.fock.len() {
            let range = s * sites..(s + 1) * sites;
            sh.fourier.apply_multiplier(&sh.kinetic, &x[range.clone()], &mut out[range.clone()]);
            let w = sh.field_energy[s];
            if w != 0.0 {
                for (o, xi) in out[range.clone()].iter_mut().zip(&x[range]) {
                    *o += xi * w;
                }
            }
        }
        if sh.field_polynomial.nnz() > 0 {
            let y: Vec<Complex64> = x.iter().zip(&sh.phases).map(|(a, p)| a * p).collect();
            let mut acc = vec![Complex64::default(); sites];
            for (s, row) in sh.field_polynomial.rows.iter().enumerate() {
                if row.is_empty() {
                    continue;
                }
                acc.fill(Complex64::default());
                for &(t, val) in row {
                    for (a, yt) in acc.iter_mut().zip(&y[t * sites..(t + 1) * sites]) {
                        *a += val * yt;
                    }
                }
                let base = s * sites;
                for j in 0..sites {
                    out[base + j] += sh.phases[base + j].conj() * acc[j];
                }
            }
        }
        if let Some(v) = &self.potential {
            for (chunk_out, chunk_x) in out.chunks_mut(sites).zip(x.chunks(sites)) {
                for ((o, xi), vj) in chunk_out.iter_mut().zip(chunk_x).zip(v) {
                    *o += xi * vj;
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct AssembledPair {
    pub h0: NelsonOperator,
    pub hv: NelsonOperator,
    /// Digest of `(grid, B(k²) samples, V samples)`, comparable with
    /// [`crate::onebody::OneBodyHamiltonian::lattice_checksum`].
    pub checksum: String,
    /// Hermiticity defect of the field polynomial before symmetrization.
    pub hermiticity_defect: f64,
    pub continuum_unbounded: bool,
    pub off_lattice_modes: Vec<usize>,
}

pub const ASSEMBLY_HERMITICITY_TOLERANCE: f64 = 1e-13;

/// Builds `(H⁰, H^V)`. Off-lattice mode momenta are accepted here (they are
/// recorded and caught by the translation check).
pub fn assemble(instance: &NelsonInstance) -> Result<AssembledPair> {
    instance.validate()?;
    let grid = instance.grid;
    let trunc = &instance.truncation;
    let fock = trunc.basis();
    let sites = grid.len();

    let kinetic = kinetic_on_grid(&instance.kinetic_profile(), &grid).values;
    let potential = potential_on_grid(&instance.potential, &grid)?.values;

    let mut field_energy = Vec::with_capacity(fock.len());
    let mut phases = Vec::with_capacity(fock.len() * sites);
    for s in 0..fock.len() {
        let occ = fock.occupations(s);
        field_energy.push(occ.iter().zip(&trunc.modes).map(|(&n, m)| n as f64 * m.omega).sum());
        let mut kappa = [0.0; 3];
        for (&n, m) in occ.iter().zip(&trunc.modes) {
            for (a, k) in m.momentum.iter().enumerate() {
                kappa[a] += n as f64 * k;
            }
        }
        for j in 0..sites {
            let x = grid.position(j);
            let arg: f64 = (0..grid.dim).map(|a| x[a] * kappa[a]).sum();
            phases.push(Complex64::from_polar(1.0, arg));
        }
    }

    let raw = field_polynomial(&trunc.couplings(), trunc.n_max, &instance.polynomial, instance.ordering)?;
    let hermiticity_defect = raw.hermiticity_defect();
    if hermiticity_defect > ASSEMBLY_HERMITICITY_TOLERANCE * raw.max_abs().max(1.0) {
        return Err(Error::NonHermitian { defect: hermiticity_defect });
    }
    let checksum = lattice_checksum(&grid, &kinetic, &potential);
    let shared = Arc::new(Shared {
        grid,
        fock,
        fourier: Fourier::new(grid),
        kinetic,
        field_energy,
        phases,
        field_polynomial: raw.symmetrized(),
    });
    Ok(AssembledPair {
        h0: NelsonOperator { shared: Arc::clone(&shared), potential: None },
        hv: NelsonOperator { shared, potential: Some(potential) },
        checksum,
        hermiticity_defect,
        continuum_unbounded: instance.continuum_unbounded(),
        off_lattice_modes: trunc.off_lattice(&grid),
    })
}

/// Momentum `2π n / L` for integer `n`; handy for building instances.
pub fn lattice_momentum(length: f64, n: i64) -> f64 {
    2.0 * PI * n as f64 / length
}
