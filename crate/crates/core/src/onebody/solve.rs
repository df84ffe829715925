use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::OneBodyHamiltonian;
use crate::error::{Error, Result};
use crate::krylov::{lowest_eigenpair, KrylovOptions};
use crate::operators::{GridSpec, KineticProfile, PositionField, PotentialSpec, TabulatedField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub basis_size: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        let k = KrylovOptions::default();
        Self { tol: k.tol, max_iter: k.max_iter, seed: k.seed, basis_size: k.basis_size }
    }
}

impl SolveOptions {
    pub fn krylov(&self) -> KrylovOptions {
        KrylovOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            basis_size: self.basis_size,
            seed: self.seed,
            ..KrylovOptions::default()
        }
    }
}

/// Lowest lattice eigenvalue of `h` with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub eigenvalue: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub grid: GridSpec,
    /// Eigenvector weight on sites farther than `L/4` from the centre along any axis.
    pub boundary_mass: f64,
    pub checksum: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub result: SolveResult,
    /// Unit eigenvector, phase-normalized.
    pub vector: Vec<Complex64>,
}

impl GroundState {
    /// Real part of the eigenvector in the tabulated text format.
    pub fn export(&self) -> TabulatedField {
        TabulatedField { grid: self.result.grid, values: self.vector.iter().map(|z| z.re).collect() }
    }
}

pub fn boundary_mass(grid: &GridSpec, psi: &[Complex64]) -> f64 {
    let quarter = 0.25 * grid.length;
    let total: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let outer: f64 = psi
        .iter()
        .enumerate()
        .filter(|(i, _)| grid.position(*i)[..grid.dim].iter().any(|x| x.abs() > quarter))
        .map(|(_, z)| z.norm_sqr())
        .sum();
    outer / total
}

pub fn solve_operator(h: &OneBodyHamiltonian, opts: &SolveOptions) -> Result<GroundState> {
    let pair = lowest_eigenpair(h, &opts.krylov())?;
    let grid = *h.grid();
    let mut notes = Vec::new();
    if !pair.converged {
        notes.push("unconverged".to_string());
    }
    let result = SolveResult {
        eigenvalue: pair.value,
        residual: pair.residual,
        iterations: pair.iterations,
        converged: pair.converged,
        grid,
        boundary_mass: boundary_mass(&grid, &pair.vector),
        checksum: h.lattice_checksum(),
        notes,
    };
    Ok(GroundState { result, vector: pair.vector })
}

/// Lowest eigenpair of the lattice operator `K(p) + V`.
pub fn ground_state(
    profile: &KineticProfile,
    potential: &PotentialSpec,
    grid: &GridSpec,
    opts: &SolveOptions,
) -> Result<GroundState> {
    let h = OneBodyHamiltonian::from_specs(profile, potential, grid)?;
    solve_operator(&h, opts)
}

pub const BOUNDARY_MASS_LIMIT: f64 = 1e-8;

/// Repeats [`ground_state`], doubling `L` and `N` together (fixed spacing)
/// until the boundary mass drops below [`BOUNDARY_MASS_LIMIT`] or
/// `max_doublings` is reached.
pub fn ground_state_with_box_control(
    profile: &KineticProfile,
    potential: &PotentialSpec,
    grid: &GridSpec,
    opts: &SolveOptions,
    max_doublings: usize,
) -> Result<GroundState> {
    let mut current = *grid;
    let mut state = ground_state(profile, potential, &current, opts)?;
    let mut doublings = 0;
    while state.result.boundary_mass >= BOUNDARY_MASS_LIMIT && doublings < max_doublings {
        current = GridSpec::new(current.dim, current.length * 2.0, current.points * 2)?;
        state = ground_state(profile, potential, &current, opts)?;
        doublings += 1;
    }
    if doublings > 0 {
        state.result.notes.push(format!("box doubled {doublings} time(s)"));
    }
    if state.result.boundary_mass >= BOUNDARY_MASS_LIMIT {
        state.result.notes.push("boundary mass above limit".to_string());
    }
    Ok(state)
}

/// How a coarse potential is carried to the doubled lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lift {
    /// Zero-padded trigonometric interpolation.
    FourierInterpolation,
    /// Coarse samples scaled by `2^d` on the coarse sites, zero in between.
    /// Its spectrum is the periodic replication of the coarse one, which
    /// makes the coarse operator exactly the compression of the fine one.
    SpectralReplication,
}

/// Carries a potential field to `field.grid.refined()`.
pub fn lift_potential(field: &PositionField, lift: Lift) -> Result<PositionField> {
    let coarse = field.grid;
    let fine = coarse.refined();
    let factor = 2f64.powi(coarse.dim as i32);
    let values = match lift {
        Lift::SpectralReplication => {
            let mut out = vec![0.0; fine.len()];
            for (i, v) in field.values.iter().enumerate() {
                let idx = coarse.unflatten(i);
                let mut fidx = [0usize; 3];
                for a in 0..coarse.dim {
                    fidx[a] = 2 * idx[a];
                }
                out[fine.flatten(&fidx)] = factor * v;
            }
            out
        }
        Lift::FourierInterpolation => {
            let mut spec: Vec<Complex64> = field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            crate::operators::Fourier::new(coarse).forward(&mut spec);
            let padded = pad_spectrum(&coarse, &fine, &spec);
            let mut work = padded;
            crate::operators::Fourier::new(fine).inverse(&mut work);
            // both transforms are unitary; values of a band-limited field
            // survive only after scaling by sqrt(N_fine / N_coarse)
            work.iter().map(|z| z.re * factor.sqrt()).collect()
        }
    };
    Ok(PositionField { grid: fine, values })
}

/// Zero-pads a coarse spectrum; the coarse Nyquist coefficient is split evenly
/// between `±N/2` so real fields stay real.
fn pad_spectrum(coarse: &GridSpec, fine: &GridSpec, spec: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); fine.len()];
    for (i, c) in spec.iter().enumerate() {
        let labels = coarse.momentum_labels(i);
        let nyquist_axes: Vec<usize> =
            (0..coarse.dim).filter(|&a| labels[a] == -(coarse.points as i64) / 2).collect();
        let copies = 1usize << nyquist_axes.len();
        let weight = 1.0 / copies as f64;
        for mask in 0..copies {
            let mut fidx = [0usize; 3];
            for a in 0..coarse.dim {
                let mut label = labels[a];
                if let Some(pos) = nyquist_axes.iter().position(|&x| x == a) {
                    if mask & (1 << pos) != 0 {
                        label = -label;
                    }
                }
                fidx[a] = fine.momentum_slot(label);
            }
            out[fine.flatten(&fidx)] += c * weight;
        }
    }
    out
}

/// Checks a lifted field has the expected lattice.
pub fn ensure_refinement(coarse: &GridSpec, fine: &GridSpec) -> Result<()> {
    if fine.dim != coarse.dim || fine.points != 2 * coarse.points || fine.length.to_bits() != coarse.length.to_bits()
    {
        return Err(Error::InvalidParameter("grids are not a nested doubling pair".into()));
    }
    Ok(())
}
