use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::OneBodyHamiltonian;
use crate::error::{Error, Result};
use crate::operators::{GridSpec, KineticProfile, PotentialSpec};

/// One-parameter families of real, even, lattice-normalized trial functions
/// centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrialFamily {
    /// `exp(-|x|² / 2θ²)`
    Gaussian { theta_min: f64, theta_max: f64 },
    /// `exp(-|x| / θ)`
    Hydrogenic { theta_min: f64, theta_max: f64 },
}

impl TrialFamily {
    pub fn range(&self) -> (f64, f64) {
        match *self {
            TrialFamily::Gaussian { theta_min, theta_max } | TrialFamily::Hydrogenic { theta_min, theta_max } => {
                (theta_min, theta_max)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.range();
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("trial range [{lo}, {hi}] must satisfy 0 < min <= max")));
        }
        Ok(())
    }

    fn profile(&self, r: f64, theta: f64) -> f64 {
        match self {
            TrialFamily::Gaussian { .. } => (-0.5 * (r / theta).powi(2)).exp(),
            TrialFamily::Hydrogenic { .. } => (-r / theta).exp(),
        }
    }

    /// The member with parameter `theta`, sampled and normalized to unit ℓ² norm.
    pub fn sample(&self, theta: f64, grid: &GridSpec) -> Vec<Complex64> {
        let mut f: Vec<f64> = (0..grid.len())
            .map(|i| {
                let x = grid.position(i);
                let r = x[..grid.dim].iter().map(|c| c * c).sum::<f64>().sqrt();
                self.profile(r, theta)
            })
            .collect();
        let n = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        f.iter_mut().for_each(|v| *v /= n);
        f.into_iter().map(|v| Complex64::new(v, 0.0)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationalBound {
    pub theta: f64,
    pub value: f64,
    pub evaluations: usize,
}

pub const GOLDEN_ITERATIONS: usize = 60;

/// Golden-section minimization of the lattice Rayleigh quotient over the
/// family parameter. Any value returned bounds the lattice ground energy
/// from above.
pub fn variational_upper_bound(
    profile: &KineticProfile,
    potential: &PotentialSpec,
    grid: &GridSpec,
    family: &TrialFamily,
) -> Result<VariationalBound> {
    family.validate()?;
    let h = OneBodyHamiltonian::from_specs(profile, potential, grid)?;
    Ok(minimize_over_family(&h, family))
}

pub fn minimize_over_family(h: &OneBodyHamiltonian, family: &TrialFamily) -> VariationalBound {
    let grid = *h.grid();
    let quotient = |theta: f64| h.rayleigh_quotient(&family.sample(theta, &grid));
    let (mut a, mut b) = family.range();
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = quotient(c);
    let mut fd = quotient(d);
    let mut evaluations = 2;
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for _ in 0..GOLDEN_ITERATIONS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = quotient(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = quotient(d);
        }
        evaluations += 1;
        for (t, v) in [(c, fc), (d, fd)] {
            if v < best.1 {
                best = (t, v);
            }
        }
    }
    // the endpoints matter for monotone quotients (e.g. V = 0)
    let (lo, hi) = family.range();
    for t in [lo, hi] {
        let v = quotient(t);
        evaluations += 1;
        if v < best.1 {
            best = (t, v);
        }
    }
    VariationalBound { theta: best.0, value: best.1, evaluations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members_are_real_even_and_normalized() {
        let grid = GridSpec::new(2, 10.0, 16).unwrap();
        for family in [
            TrialFamily::Gaussian { theta_min: 0.5, theta_max: 2.0 },
            TrialFamily::Hydrogenic { theta_min: 0.5, theta_max: 2.0 },
        ] {
            let f = family.sample(1.3, &grid);
            let norm: f64 = f.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-14);
            assert!(f.iter().all(|z| z.im == 0.0));
            for i in 0..grid.len() {
                let j = grid.reflect_site(i);
                assert!((f[i].re - f[j].re).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn harmonic_gaussian_optimum() {
        let grid = GridSpec::new(1, 20.0, 128).unwrap();
        let bound = variational_upper_bound(
            &KineticProfile::non_relativistic(1.0).unwrap(),
            &PotentialSpec::Harmonic { stiffness: 1.0 },
            &grid,
            &TrialFamily::Gaussian { theta_min: 0.2, theta_max: 5.0 },
        )
        .unwrap();
        assert!((bound.value - 0.5).abs() < 1e-9, "{}", bound.value);
        assert!((bound.theta - 1.0).abs() < 1e-4, "{}", bound.theta);
        assert!(bound.evaluations >= 40);
    }

    #[test]
    fn free_particle_widens() {
        let grid = GridSpec::new(1, 40.0, 64).unwrap();
        let bound = variational_upper_bound(
            &KineticProfile::non_relativistic(1.0).unwrap(),
            &PotentialSpec::zero(),
            &grid,
            &TrialFamily::Gaussian { theta_min: 0.5, theta_max: 4.0 },
        )
        .unwrap();
        assert!(bound.value >= 0.0);
        assert!((bound.theta - 4.0).abs() < 1e-6);
    }

    #[test]
    fn empty_range_rejected() {
        let family = TrialFamily::Gaussian { theta_min: 2.0, theta_max: 1.0 };
        assert!(family.validate().is_err());
    }
}
