use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::nelson::{AssembledPair, NelsonInstance, NelsonOperator};
use crate::error::{Error, Result};
use crate::krylov::{inner, norm, HermitianOperator};
use crate::operators::{h3_margin, GridSpec, H3Report};

pub const H2_TOLERANCE: f64 = 1e-12;

/// Above this many sites the kinetic block is not materialized; it is a
/// circulant by construction and the shift leaves it unchanged.
pub const H2_KINETIC_SITE_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H2Report {
    /// `max_axis ‖T H⁰ T† − H⁰‖_max` over unit translations.
    pub max_norm: f64,
    pub kinetic_part: f64,
    pub field_part: f64,
    pub axis: usize,
    pub tolerance: f64,
}

impl H2Report {
    pub fn holds(&self) -> bool {
        self.max_norm <= self.tolerance
    }
}

/// Total field momentum `κ_s = Σ_m n_m k_m` of every Fock state.
fn field_momenta(op: &NelsonOperator, instance: &NelsonInstance) -> Vec<[f64; 3]> {
    let fock = op.fock();
    (0..fock.len())
        .map(|s| {
            let mut kappa = [0.0; 3];
            for (n, m) in fock.occupations(s).iter().zip(&instance.truncation.modes) {
                for (a, k) in m.momentum.iter().enumerate() {
                    kappa[a] += *n as f64 * k;
                }
            }
            kappa
        })
        .collect()
}

fn unit(axis: usize) -> [i64; 3] {
    let mut v = [0; 3];
    v[axis] = 1;
    v
}

/// Translation of a state by the lattice vector `shift` (site steps):
/// `(T ψ)[s, j + shift] = e^{-i (shift·h)·κ_s} ψ[s, j]`.
pub fn translate(op: &NelsonOperator, kappa: &[[f64; 3]], psi: &[Complex64], shift: &[i64; 3]) -> Vec<Complex64> {
    let grid = op.grid();
    let sites = op.sites();
    let h = grid.spacing();
    let mut out = vec![Complex64::default(); psi.len()];
    for (s, k) in kappa.iter().enumerate() {
        let arg: f64 = (0..grid.dim).map(|a| shift[a] as f64 * h * k[a]).sum();
        let c = Complex64::from_polar(1.0, -arg);
        for j in 0..sites {
            out[s * sites + grid.shift_site(j, shift)] = c * psi[s * sites + j];
        }
    }
    out
}

fn kinetic_matrix(op: &NelsonOperator) -> Vec<Complex64> {
    let n = op.sites();
    let fourier = crate::operators::Fourier::new(*op.grid());
    let mut m = vec![Complex64::default(); n * n];
    let mut e = vec![Complex64::default(); n];
    let mut col = vec![Complex64::default(); n];
    for l in 0..n {
        e[l] = Complex64::new(1.0, 0.0);
        col.fill(Complex64::default());
        fourier.apply_multiplier(op.kinetic(), &e, &mut col);
        e[l] = Complex64::default();
        for j in 0..n {
            m[j * n + l] = col[j];
        }
    }
    m
}

/// Discrete translation symmetry of `H⁰`: for each axis, the unit
/// translation `T` (particle shift times mode phases) must commute with
/// `H⁰`. The difference is assembled block by block: the kinetic block
/// `S K S† − K` and, per site, the field polynomial with shifted phases.
/// `I ⊗ H_f` is diagonal in the Fock index and commutes exactly.
pub fn check_h2(instance: &NelsonInstance, pair: &AssembledPair) -> H2Report {
    let op = &pair.h0;
    let grid: GridSpec = *op.grid();
    let sites = op.sites();
    let kappa = field_momenta(op, instance);
    let h = grid.spacing();
    let kin = (sites <= H2_KINETIC_SITE_LIMIT).then(|| kinetic_matrix(op));
    let mut report =
        H2Report { max_norm: 0.0, kinetic_part: 0.0, field_part: 0.0, axis: 0, tolerance: H2_TOLERANCE };
    for axis in 0..grid.dim {
        let shift = unit(axis);
        let mut kinetic_part = 0.0f64;
        if let Some(k) = &kin {
            for j in 0..sites {
                let js = grid.shift_site(j, &shift);
                for l in 0..sites {
                    let ls = grid.shift_site(l, &shift);
                    kinetic_part = kinetic_part.max((k[js * sites + ls] - k[j * sites + l]).norm());
                }
            }
        }
        let mut field_part = 0.0f64;
        for (s, row) in op.field_polynomial().rows.iter().enumerate() {
            for &(t, val) in row {
                let dk: Vec<f64> = (0..grid.dim).map(|a| kappa[s][a] - kappa[t][a]).collect();
                for j in 0..sites {
                    let x = grid.position(j);
                    let xs = grid.position(grid.shift_site(j, &shift));
                    let moved: f64 = (0..grid.dim).map(|a| (x[a] + if a == axis { h } else { 0.0 }) * dk[a]).sum();
                    let there: f64 = (0..grid.dim).map(|a| xs[a] * dk[a]).sum();
                    let d = Complex64::from_polar(1.0, -moved) - Complex64::from_polar(1.0, -there);
                    field_part = field_part.max(val.norm() * d.norm());
                }
            }
        }
        let total = kinetic_part.max(field_part);
        if total > report.max_norm || axis == 0 {
            report = H2Report { max_norm: total, kinetic_part, field_part, axis, tolerance: H2_TOLERANCE };
        }
    }
    report
}

/// Pointwise second-difference condition for `K(k) = B(k²)` on the
/// instance lattice.
pub fn check_h3(instance: &NelsonInstance) -> H3Report {
    h3_margin(&instance.kinetic_profile(), &instance.grid)
}

pub const TRIAL_NORM_TOLERANCE: f64 = 1e-12;
pub const TRIAL_ENERGY_TOLERANCE: f64 = 1e-10;
pub const TRIAL_POTENTIAL_TOLERANCE: f64 = 1e-12;

/// The three claims about `Φ_y = f(x) T^y F`, summed over every lattice
/// translation `y` (unit weight per translation, ℓ² norms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    /// `Σ_y ‖Φ_y‖²`
    pub norm_sum: f64,
    /// `Σ_y ⟨Φ_y, H⁰ Φ_y⟩`
    pub energy_sum: f64,
    /// `⟨F, H⁰ F⟩ + ⟨f, K f⟩`
    pub energy_bound: f64,
    /// `Σ_y ⟨Φ_y, V Φ_y⟩`
    pub potential_sum: f64,
    /// `⟨f, V f⟩`
    pub potential_expectation: f64,
}

impl TrialReport {
    pub fn norm_margin(&self) -> f64 {
        (self.norm_sum - 1.0).abs()
    }

    /// `Σ⟨Φ_y,H⁰Φ_y⟩ − (⟨F,H⁰F⟩ + ⟨f,Kf⟩)`, nonpositive when the claim holds.
    pub fn energy_margin(&self) -> f64 {
        self.energy_sum - self.energy_bound
    }

    pub fn potential_margin(&self) -> f64 {
        (self.potential_sum - self.potential_expectation).abs()
    }

    pub fn norm_check(&self) -> bool {
        self.norm_margin() <= TRIAL_NORM_TOLERANCE
    }

    pub fn kinetic_check(&self) -> bool {
        self.energy_margin() <= TRIAL_ENERGY_TOLERANCE
    }

    pub fn potential_check(&self) -> bool {
        self.potential_margin() <= TRIAL_POTENTIAL_TOLERANCE
    }

    pub fn holds(&self) -> bool {
        self.norm_check() && self.kinetic_check() && self.potential_check()
    }
}

/// Real part of a unit one-body vector, renormalized; rejects vectors whose
/// imaginary part is not negligible.
pub fn real_trial_function(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let scale = norm(v);
    let imag = v.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if !(scale > 0.0) || imag > 1e-8 * scale {
        return Err(Error::InvalidParameter(format!("trial function is not real (max |Im| = {imag:e})")));
    }
    let re_norm = v.iter().map(|z| z.re * z.re).sum::<f64>().sqrt();
    Ok(v.iter().map(|z| Complex64::new(z.re / re_norm, 0.0)).collect())
}

/// Builds every `Φ_y` and evaluates the three claims. `field_ground` is a
/// unit vector of the particle–field space, `f` a real unit lattice function.
pub fn trial_state_verify(
    instance: &NelsonInstance,
    pair: &AssembledPair,
    field_ground: &[Complex64],
    f: &[Complex64],
) -> Result<TrialReport> {
    let h0 = &pair.h0;
    let sites = h0.sites();
    if field_ground.len() != h0.dim() {
        return Err(Error::Dimension { expected: h0.dim(), got: field_ground.len() });
    }
    if f.len() != sites {
        return Err(Error::Dimension { expected: sites, got: f.len() });
    }
    if f.iter().any(|z| z.im != 0.0) {
        return Err(Error::InvalidParameter("trial function f must be real".into()));
    }
    for (what, v) in [("F", field_ground), ("f", f)] {
        let n = norm(v);
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("{what} must be normalized, has norm {n}")));
        }
    }
    let grid = *h0.grid();
    let kappa = field_momenta(h0, instance);
    let potential = pair.hv.potential().expect("H^V carries the potential");

    let per_shift: Vec<(f64, f64, f64)> = (0..sites)
        .into_par_iter()
        .map(|y| {
            let idx = grid.unflatten(y);
            let shift = [idx[0] as i64, idx[1] as i64, idx[2] as i64];
            let mut phi = translate(h0, &kappa, field_ground, &shift);
            for chunk in phi.chunks_mut(sites) {
                for (z, fj) in chunk.iter_mut().zip(f) {
                    *z *= fj.re;
                }
            }
            let hphi = h0.apply_new(&phi);
            let norm_sq: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
            let energy = inner(&phi, &hphi).re;
            let pot: f64 =
                phi.chunks(sites).map(|c| c.iter().zip(potential).map(|(z, v)| z.norm_sqr() * v).sum::<f64>()).sum();
            (norm_sq, energy, pot)
        })
        .collect();
    let norm_sum = per_shift.iter().map(|t| t.0).sum();
    let energy_sum = per_shift.iter().map(|t| t.1).sum();
    let potential_sum = per_shift.iter().map(|t| t.2).sum();

    let field_energy = inner(field_ground, &h0.apply_new(field_ground)).re;
    let mut fhat = f.to_vec();
    crate::operators::Fourier::new(grid).forward(&mut fhat);
    let kinetic: f64 = fhat.iter().zip(h0.kinetic()).map(|(z, k)| z.norm_sqr() * k).sum();
    let potential_expectation = f.iter().zip(potential).map(|(z, v)| z.norm_sqr() * v).sum();

    Ok(TrialReport {
        norm_sum,
        energy_sum,
        energy_bound: field_energy + kinetic,
        potential_sum,
        potential_expectation,
    })
}
