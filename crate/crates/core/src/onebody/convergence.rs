use serde::{Deserialize, Serialize};

use super::hamiltonian::OneBodyHamiltonian;
use super::solve::{lift_potential, solve_operator, Lift, SolveOptions, SolveResult};
use crate::error::{Error, Result};
use crate::operators::{kinetic_on_grid, potential_on_grid, GridSpec, KineticProfile, PositionField, PotentialSpec};

/// Nested pairs may rise by at most this much before being flagged.
pub const NESTED_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedPair {
    pub coarse: usize,
    pub fine: usize,
    /// `e(fine) - e(coarse)`; should be ≤ 0.
    pub change: f64,
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub rows: Vec<SolveResult>,
    pub nested: Vec<NestedPair>,
    /// Eigenvalue on the finest grid.
    pub finest: f64,
    /// Richardson estimate in `h²` from the last (up to) three grids.
    pub extrapolated: f64,
    /// Set when some nested pair rose by more than [`NESTED_TOLERANCE`],
    /// which points at an inconsistently sampled (aliased) potential.
    pub aliasing_warning: bool,
}

impl ConvergenceStudy {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }
}

fn is_nested(coarse: &GridSpec, fine: &GridSpec) -> bool {
    fine.dim == coarse.dim && fine.length.to_bits() == coarse.length.to_bits() && fine.points == 2 * coarse.points
}

/// Polynomial extrapolation to `h = 0` in the variable `h²` through the last
/// (up to) three points. For grids doubling at fixed `L` this is Romberg:
/// with three values it equals `(16 R₂ − R₁)/15`, `Rᵢ = (4eᵢ₊₁ − eᵢ)/3`.
pub fn richardson(spacings: &[f64], values: &[f64]) -> Result<f64> {
    if spacings.is_empty() || spacings.len() != values.len() {
        return Err(Error::Empty("refinement list"));
    }
    let start = values.len().saturating_sub(3);
    let s: Vec<f64> = spacings[start..].iter().map(|h| h * h).collect();
    let e = &values[start..];
    let mut total = 0.0;
    for i in 0..s.len() {
        let mut weight = 1.0;
        for j in 0..s.len() {
            if i != j {
                weight *= s[j] / (s[j] - s[i]);
            }
        }
        total += weight * e[i];
    }
    Ok(total)
}

fn assemble(rows: Vec<SolveResult>) -> Result<ConvergenceStudy> {
    if rows.is_empty() {
        return Err(Error::Empty("refinement list"));
    }
    let mut nested = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if is_nested(&rows[i].grid, &rows[j].grid) {
                let change = rows[j].eigenvalue - rows[i].eigenvalue;
                nested.push(NestedPair { coarse: i, fine: j, change, monotone: change <= NESTED_TOLERANCE });
            }
        }
    }
    let spacings: Vec<f64> = rows.iter().map(|r| r.grid.spacing()).collect();
    let values: Vec<f64> = rows.iter().map(|r| r.eigenvalue).collect();
    let extrapolated = richardson(&spacings, &values)?;
    let aliasing_warning = nested.iter().any(|p| !p.monotone);
    Ok(ConvergenceStudy { finest: *values.last().unwrap(), rows, nested, extrapolated, aliasing_warning })
}

/// Solves on every grid (ordered coarse to fine), checks nested pairs and
/// extrapolates.
pub fn converge_study(
    profile: &KineticProfile,
    potential: &PotentialSpec,
    grids: &[GridSpec],
    opts: &SolveOptions,
) -> Result<ConvergenceStudy> {
    if grids.is_empty() {
        return Err(Error::Empty("refinement list"));
    }
    for pair in grids.windows(2) {
        if pair[1].spacing() > pair[0].spacing() {
            return Err(Error::InvalidParameter("grids must be ordered from coarse to fine".into()));
        }
    }
    let rows = grids
        .iter()
        .map(|g| {
            let h = OneBodyHamiltonian::from_specs(profile, potential, g)?;
            Ok(solve_operator(&h, opts)?.result)
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(rows)
}

/// Like [`converge_study`] but the potential is sampled once on the coarsest
/// grid and carried to each doubling by `lift`, so every level sees the same
/// underlying lattice potential.
pub fn converge_study_lifted(
    profile: &KineticProfile,
    coarse: &PositionField,
    levels: usize,
    lift: Lift,
    opts: &SolveOptions,
) -> Result<ConvergenceStudy> {
    if levels == 0 {
        return Err(Error::Empty("refinement list"));
    }
    let mut field = coarse.clone();
    let mut rows = Vec::with_capacity(levels);
    for level in 0..levels {
        if level > 0 {
            field = lift_potential(&field, lift)?;
        }
        let h = OneBodyHamiltonian::new(&kinetic_on_grid(profile, &field.grid), &field)?;
        rows.push(solve_operator(&h, opts)?.result);
    }
    assemble(rows)
}

/// Samples `potential` on `grid`; convenience for lifted studies.
pub fn sample(potential: &PotentialSpec, grid: &GridSpec) -> Result<PositionField> {
    potential_on_grid(potential, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_matches_romberg() {
        let h = [0.4, 0.2, 0.1];
        let e = [1.3, 1.1, 1.02];
        let r1 = (4.0 * e[1] - e[0]) / 3.0;
        let r2 = (4.0 * e[2] - e[1]) / 3.0;
        let romberg = (16.0 * r2 - r1) / 15.0;
        assert!((richardson(&h, &e).unwrap() - romberg).abs() < 1e-13);
        assert!((richardson(&h[1..], &e[1..]).unwrap() - r2).abs() < 1e-13);
        assert_eq!(richardson(&h[..1], &e[..1]).unwrap(), e[0]);
    }

    #[test]
    fn richardson_is_exact_on_quartic_error() {
        let h: [f64; 4] = [0.3, 0.15, 0.075, 0.0375];
        let e: Vec<f64> = h.iter().map(|x| 2.0 + 3.0 * x * x - 5.0 * x.powi(4)).collect();
        assert!((richardson(&h, &e).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_list_is_an_error() {
        let profile = KineticProfile::non_relativistic(1.0).unwrap();
        let r = converge_study(&profile, &PotentialSpec::zero(), &[], &SolveOptions::default());
        assert!(matches!(r, Err(Error::Empty(_))));
    }

    #[test]
    fn harmonic_study() {
        let profile = KineticProfile::non_relativistic(1.0).unwrap();
        let grids: Vec<GridSpec> = [32, 64, 128].iter().map(|&n| GridSpec::new(1, 20.0, n).unwrap()).collect();
        let study =
            converge_study(&profile, &PotentialSpec::Harmonic { stiffness: 1.0 }, &grids, &SolveOptions::default())
                .unwrap();
        assert!(study.all_converged());
        assert_eq!(study.nested.len(), 2);
        let errs: Vec<f64> = study.rows.iter().map(|r| (r.eigenvalue - 0.5).abs()).collect();
        assert!(errs[2] < 1e-8 && errs[1] <= errs[0] + 1e-12);
        assert!(!study.aliasing_warning);
    }
}
