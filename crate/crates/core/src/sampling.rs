//! Seeded generators for the randomized suites (lemma triples, lattices,
//! particle–field instances). Every draw goes through a caller-supplied
//! `ChaCha8Rng`, so a seed fixes the whole batch.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bernstein::{Atom, BernsteinFunction};
use crate::fock::{FockTruncation, Mode, NelsonInstance};
use crate::operators::{GridSpec, PotentialSpec};

/// Log-uniform draw from `[lo, hi]`.
pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

/// Bernstein function with `a = 0`, `b ∈ [0, 1]` and 0 to `max_atoms` atoms
/// with rates and weights log-uniform in `[1e-2, 1e2]`.
pub fn random_bernstein(rng: &mut ChaCha8Rng, max_atoms: usize) -> BernsteinFunction {
    let b = if rng.random_bool(0.25) { 0.0 } else { rng.random::<f64>() };
    let n = rng.random_range(0..=max_atoms);
    let atoms = (0..n)
        .map(|_| Atom { rate: log_uniform(rng, 1e-2, 1e2), weight: log_uniform(rng, 1e-2, 1e2) })
        .collect();
    BernsteinFunction::new(0.0, b, atoms).expect("parameters drawn in range")
}

/// Vector with entries uniform in `[-scale, scale]`.
pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-scale..=scale)).collect()
}

/// Lattice for the second-difference margin: full pair enumeration is
/// `O(N^{2d})`, so the point count is capped per dimension
/// (d=1: N ≤ 128, d=2: N ≤ 64, d=3: N ≤ 16).
pub fn random_h3_grid(rng: &mut ChaCha8Rng) -> GridSpec {
    let dim = rng.random_range(1..=3usize);
    let max_exp = match dim {
        1 => 7,
        2 => 6,
        _ => 4,
    };
    let points = 1usize << rng.random_range(3..=max_exp);
    let length = rng.random_range(2.0..30.0);
    GridSpec::new(dim, length, points).expect("valid grid")
}

/// Ranges for [`random_nelson_instance`].
#[derive(Debug, Clone, Copy)]
pub struct InstanceRanges {
    pub max_atoms: usize,
    pub max_modes: usize,
    pub max_n_max: u32,
    /// Largest lattice is `2^max_points_exp` sites.
    pub max_points_exp: u32,
    pub max_degree: usize,
    pub decoupled: bool,
}

impl Default for InstanceRanges {
    fn default() -> Self {
        Self { max_atoms: 4, max_modes: 4, max_n_max: 3, max_points_exp: 5, max_degree: 2, decoupled: false }
    }
}

/// A d=1 particle–field instance: random Bernstein dispersion, on-lattice
/// modes with random complex couplings, random Gaussian or square well, and
/// a field polynomial of degree ≤ `max_degree` that is allowed by the
/// instance validation.
pub fn random_nelson_instance(rng: &mut ChaCha8Rng, ranges: &InstanceRanges) -> NelsonInstance {
    let points = 1usize << rng.random_range(2..=ranges.max_points_exp);
    let length = rng.random_range(4.0..16.0);
    let grid = GridSpec::new(1, length, points).expect("valid grid");
    let bernstein = loop {
        let b = random_bernstein(rng, ranges.max_atoms);
        if b.drift_b() > 0.0 || !b.atoms().is_empty() {
            break b;
        }
    };
    let n_modes = rng.random_range(1..=ranges.max_modes);
    let half = (points / 2) as i64;
    let modes = (0..n_modes)
        .map(|_| {
            let label = rng.random_range(-half + 1..half);
            let coupling = if ranges.decoupled {
                Complex64::default()
            } else {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            };
            Mode::on_lattice(&grid, &[label], coupling, rng.random_range(0.0..2.0))
        })
        .collect();
    let n_max = rng.random_range(1..=ranges.max_n_max);
    let potential = if rng.random_bool(0.5) {
        PotentialSpec::GaussianWell { depth: rng.random_range(0.1..3.0), width: rng.random_range(0.3..2.0) }
    } else {
        PotentialSpec::SquareWell { depth: rng.random_range(0.1..3.0), radius: rng.random_range(0.5..3.0) }
    };
    let degree = rng.random_range(1..=ranges.max_degree.max(1));
    let mut polynomial: Vec<f64> = (0..=degree).map(|_| rng.random_range(-1.0..1.0)).collect();
    if degree >= 2 && degree % 2 == 0 {
        polynomial[degree] = polynomial[degree].abs() + 0.05;
    }
    if degree >= 3 && degree % 2 == 1 {
        polynomial[degree] = 0.0;
    }
    let truncation = FockTruncation { modes, n_max };
    NelsonInstance::new(grid, bernstein, truncation, polynomial, potential)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn instances_are_valid_and_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let x = random_nelson_instance(&mut a, &InstanceRanges::default());
            let y = random_nelson_instance(&mut b, &InstanceRanges::default());
            x.validate().unwrap();
            assert_eq!(x, y);
            assert!(x.dim() <= 32 * 256);
        }
    }

    #[test]
    fn h3_grids_respect_caps() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let g = random_h3_grid(&mut rng);
            assert!(g.points <= [128, 64, 16][g.dim - 1]);
        }
    }
}
