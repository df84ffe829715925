use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use crate::bernstein::BernsteinFunction;
use crate::error::{Error, Result};

/// Dispersion relation `K(k)`, a function of `|k|^2` only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KineticProfile {
    /// `|k|^2 / 2m`
    NonRelativistic { mass: f64 },
    /// `sqrt(|k|^2 + m^2) - m`
    SemiRelativistic { mass: f64 },
    /// `B(|k|^2)`
    BernsteinComposed { bernstein: BernsteinFunction },
}

impl KineticProfile {
    pub fn non_relativistic(mass: f64) -> Result<Self> {
        check_mass(mass)?;
        Ok(Self::NonRelativistic { mass })
    }

    pub fn semi_relativistic(mass: f64) -> Result<Self> {
        check_mass(mass)?;
        Ok(Self::SemiRelativistic { mass })
    }

    pub fn bernstein(bernstein: BernsteinFunction) -> Result<Self> {
        if !bernstein.vanishes_at_zero() {
            return Err(Error::InvalidParameter(
                "a Bernstein kinetic energy needs B(0) = 0 (drift a must vanish)".into(),
            ));
        }
        Ok(Self::BernsteinComposed { bernstein })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::NonRelativistic { mass } | Self::SemiRelativistic { mass } => check_mass(*mass),
            Self::BernsteinComposed { bernstein } => Self::bernstein(bernstein.clone()).map(|_| ()),
        }
    }

    /// `K` as a function of `u = |k|^2 >= 0`.
    pub fn of_squared(&self, u: f64) -> f64 {
        match self {
            Self::NonRelativistic { mass } => u / (2.0 * mass),
            // sqrt(u + m^2) - m without cancellation
            Self::SemiRelativistic { mass } => u / ((u + mass * mass).sqrt() + mass),
            Self::BernsteinComposed { bernstein } => bernstein.eval_unchecked(u),
        }
    }

    pub fn evaluate(&self, k: &[f64]) -> f64 {
        self.of_squared(k.iter().map(|x| x * x).sum())
    }

    /// Splits `K(u) = c u + R(u)` into its linear coefficient `c` and the
    /// remainder `R`, so second differences of the linear part can be formed
    /// exactly on integer lattices.
    fn linear_part(&self) -> f64 {
        match self {
            Self::NonRelativistic { mass } => 1.0 / (2.0 * mass),
            Self::SemiRelativistic { .. } => 0.0,
            Self::BernsteinComposed { bernstein } => bernstein.drift_b(),
        }
    }

    fn remainder_of_squared(&self, u: f64) -> f64 {
        match self {
            Self::NonRelativistic { .. } => 0.0,
            Self::SemiRelativistic { .. } => self.of_squared(u),
            Self::BernsteinComposed { bernstein } => bernstein.nonlinear_part(u),
        }
    }
}

fn check_mass(mass: f64) -> Result<()> {
    if mass.is_finite() && mass > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("mass must be > 0, got {mass}")))
    }
}

/// Real field on the momentum lattice, FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

pub fn kinetic_on_grid(profile: &KineticProfile, grid: &GridSpec) -> MomentumField {
    let values = (0..grid.len()).map(|i| profile.evaluate(&grid.momentum(i)[..grid.dim])).collect();
    MomentumField { grid: *grid, values }
}

/// Largest violation of `½(K(p+k) + K(p-k) - 2K(p)) <= K(k)` over all
/// lattice pairs, with `p ± k` evaluated off-lattice (no wrapping).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H3Report {
    pub max_margin: f64,
    /// Integer momentum labels of the worst `(p, k)`.
    pub argmax: ([i64; 3], [i64; 3]),
    pub pairs: u64,
    pub tolerance: f64,
}

impl H3Report {
    pub fn holds(&self) -> bool {
        self.max_margin <= self.tolerance
    }
}

pub const H3_TOLERANCE: f64 = 1e-12;

/// Enumerates every pair of non-Nyquist lattice momenta. Cost is
/// `O(N^{2d})`; the linear part of the dispersion is handled in integer
/// arithmetic so its (identically zero) contribution carries no rounding.
pub fn h3_margin(profile: &KineticProfile, grid: &GridSpec) -> H3Report {
    let q2 = grid.momentum_quantum().powi(2);
    let d = grid.dim;
    let half = grid.points as i64 / 2;
    // |p ± k|^2 in lattice units is at most d (2 * N/2)^2
    let max_sq = (d as i64) * (2 * half) * (2 * half);
    let remainder: Vec<f64> = (0..=max_sq).map(|m| profile.remainder_of_squared(m as f64 * q2)).collect();
    let linear = profile.linear_part() * q2;

    let sites: Vec<[i64; 3]> =
        (0..grid.len()).filter(|&i| !grid.touches_nyquist(i)).map(|i| grid.momentum_labels(i)).collect();

    let best = sites
        .par_iter()
        .enumerate()
        .map(|(ip, p)| {
            let mut best = (f64::NEG_INFINITY, ip, 0usize);
            let p2: i64 = p.iter().map(|x| x * x).sum();
            for (ik, k) in sites.iter().enumerate() {
                let mut k2 = 0i64;
                let mut plus = 0i64;
                let mut minus = 0i64;
                for a in 0..d {
                    k2 += k[a] * k[a];
                    plus += (p[a] + k[a]) * (p[a] + k[a]);
                    minus += (p[a] - k[a]) * (p[a] - k[a]);
                }
                // (plus + minus) / 2 - p2 - k2 == 0 exactly, kept for clarity
                let lin = linear * ((plus + minus - 2 * p2 - 2 * k2) as f64) * 0.5;
                let rem = 0.5 * (remainder[plus as usize] + remainder[minus as usize] - 2.0 * remainder[p2 as usize])
                    - remainder[k2 as usize];
                let margin = lin + rem;
                if margin > best.0 {
                    best = (margin, ip, ik);
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                    b
                } else {
                    a
                }
            },
        );

    let argmax = if best.1 == usize::MAX { ([0; 3], [0; 3]) } else { (sites[best.1], sites[best.2]) };
    H3Report {
        max_margin: best.0,
        argmax,
        pairs: (sites.len() as u64) * (sites.len() as u64),
        tolerance: H3_TOLERANCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn nonrelativistic_example_values() {
        let grid = GridSpec::new(1, 2.0 * PI, 4).unwrap();
        let field = kinetic_on_grid(&KineticProfile::non_relativistic(1.0).unwrap(), &grid);
        // FFT order: k = 0, 1, -2, -1
        assert_eq!(field.values, vec![0.0, 0.5, 2.0, 0.5]);
    }

    #[test]
    fn zero_momentum_is_zero() {
        let grid = GridSpec::new(3, 7.0, 8).unwrap();
        for profile in [
            KineticProfile::semi_relativistic(1.0).unwrap(),
            KineticProfile::non_relativistic(0.3).unwrap(),
            KineticProfile::bernstein(BernsteinFunction::one_minus_exp(2.0, 1.5).unwrap()).unwrap(),
        ] {
            let field = kinetic_on_grid(&profile, &grid);
            assert_eq!(field.values[0], 0.0);
            assert!(field.values.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn linear_bernstein_matches_half_mass() {
        let grid = GridSpec::new(2, 9.0, 16).unwrap();
        let a = kinetic_on_grid(&KineticProfile::bernstein(BernsteinFunction::linear(1.0).unwrap()).unwrap(), &grid);
        let b = kinetic_on_grid(&KineticProfile::non_relativistic(0.5).unwrap(), &grid);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-14 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn semirelativistic_is_stable_for_small_momenta() {
        let p = KineticProfile::semi_relativistic(1e3).unwrap();
        let u = 1e-6;
        let naive = (u + 1e6f64).sqrt() - 1e3;
        assert!((p.of_squared(u) - u / 2e3).abs() < 1e-20);
        assert!(naive.abs() < 1e-8);
    }

    #[test]
    fn bernstein_profile_requires_vanishing_constant() {
        let b = BernsteinFunction::new(0.5, 1.0, vec![]).unwrap();
        assert!(KineticProfile::bernstein(b).is_err());
        assert!(KineticProfile::non_relativistic(0.0).is_err());
    }

    #[test]
    fn h3_margins_small_grids() {
        let grid = GridSpec::new(1, 2.0 * PI, 64).unwrap();
        let nr = h3_margin(&KineticProfile::non_relativistic(1.0).unwrap(), &grid);
        assert_eq!(nr.max_margin, 0.0);
        let sr = h3_margin(&KineticProfile::semi_relativistic(1.0).unwrap(), &grid);
        assert!(sr.holds(), "{sr:?}");
        let b = BernsteinFunction::from_pairs(0.0, 0.7, &[(0.3, 2.0), (5.0, 0.5)]).unwrap();
        let bc = h3_margin(&KineticProfile::bernstein(b).unwrap(), &grid);
        assert!(bc.holds(), "{bc:?}");
        assert_eq!(nr.pairs, 63 * 63);
    }
}
