mod common;

use bindcert::bernstein::BernsteinFunction;
use bindcert::onebody::*;
use bindcert::operators::{potential_on_grid, GridSpec, KineticProfile, PositionField, PotentialSpec, Sampling};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tight() -> SolveOptions {
    SolveOptions { tol: 1e-11, ..Default::default() }
}

fn dense_e0(profile: &KineticProfile, v: &PositionField) -> f64 {
    let g = v.grid;
    common::lowest(&common::dense_onebody(g.dim, g.length, g.points, &|k| profile.evaluate(k), &v.values))
}

#[test]
fn agrees_with_dense_diagonalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let profiles = [
        KineticProfile::non_relativistic(0.7).unwrap(),
        KineticProfile::semi_relativistic(1.3).unwrap(),
        KineticProfile::bernstein(BernsteinFunction::from_pairs(0.0, 0.2, &[(0.5, 3.0)]).unwrap()).unwrap(),
    ];
    for (i, (dim, n)) in [(1, 64), (2, 8), (2, 16), (3, 4), (1, 128), (3, 8)].into_iter().enumerate() {
        let grid = GridSpec::new(dim, rng.random_range(4.0..12.0), n).unwrap();
        let v = PositionField { grid, values: (0..grid.len()).map(|_| rng.random_range(-3.0..1.0)).collect() };
        let profile = &profiles[i % 3];
        let h = OneBodyHamiltonian::new(&bindcert::operators::kinetic_on_grid(profile, &grid), &v).unwrap();
        let got = solve_operator(&h, &tight()).unwrap().result;
        assert!(got.converged);
        let want = dense_e0(profile, &v);
        assert!((got.eigenvalue - want).abs() < 1e-10, "{dim}d N={n}: {} vs {want}", got.eigenvalue);
    }
}

#[test]
fn harmonic_oscillator() {
    let grid = GridSpec::new(1, 20.0, 128).unwrap();
    let r = ground_state(
        &KineticProfile::non_relativistic(1.0).unwrap(),
        &PotentialSpec::Harmonic { stiffness: 1.0 },
        &grid,
        &tight(),
    )
    .unwrap();
    assert!((r.result.eigenvalue - 0.5).abs() < 1e-8, "{}", r.result.eigenvalue);
    assert!(r.result.boundary_mass < 1e-8);
}

#[test]
fn free_particle_does_not_bind() {
    let grid = GridSpec::new(2, 10.0, 16).unwrap();
    let r = ground_state(&KineticProfile::semi_relativistic(1.0).unwrap(), &PotentialSpec::zero(), &grid, &tight())
        .unwrap();
    assert!(r.result.eigenvalue.abs() < 1e-10);
    assert!(!binding_certificate(r.result.eigenvalue, 1e-3).binding_positive);
}

#[test]
fn variational_bound_sits_above_lattice_energy() {
    let grid = GridSpec::new(3, 20.0, 16).unwrap();
    let profile = KineticProfile::non_relativistic(1.0).unwrap();
    let potential = PotentialSpec::Coulomb { charge: 1.0, softening: None, sampling: Sampling::CellAveraged };
    let e0 = ground_state(&profile, &potential, &grid, &tight()).unwrap().result.eigenvalue;
    for family in [
        TrialFamily::Gaussian { theta_min: 0.3, theta_max: 5.0 },
        TrialFamily::Hydrogenic { theta_min: 0.3, theta_max: 5.0 },
    ] {
        let b = variational_upper_bound(&profile, &potential, &grid, &family).unwrap();
        assert!(b.value >= e0 - 1e-12, "{family:?}: {} < {e0}", b.value);
        assert!(b.value < 0.0);
    }
}

#[test]
fn box_control_grows_the_box() {
    let grid = GridSpec::new(1, 6.0, 32).unwrap();
    let profile = KineticProfile::non_relativistic(1.0).unwrap();
    let well = PotentialSpec::SquareWell { depth: 0.3, radius: 0.5 };
    let r = ground_state_with_box_control(&profile, &well, &grid, &tight(), 3).unwrap();
    assert!(r.result.grid.length > grid.length);
    assert_eq!(r.result.grid.spacing(), grid.spacing());
}

#[test]
fn fourier_lift_keeps_smooth_studies_monotone() {
    let coarse = GridSpec::new(1, 16.0, 32).unwrap();
    let field = sample(&PotentialSpec::GaussianWell { depth: 1.0, width: 2.0 }, &coarse).unwrap();
    let study = converge_study_lifted(
        &KineticProfile::non_relativistic(1.0).unwrap(),
        &field,
        4,
        Lift::FourierInterpolation,
        &tight(),
    )
    .unwrap();
    assert!(!study.aliasing_warning, "{:?}", study.nested);
}

#[test]
fn richardson_removes_quadratic_and_quartic_terms() {
    let h = [0.4, 0.2, 0.1];
    let e: Vec<f64> = h.iter().map(|h: &f64| -0.5 + 0.3 * h * h - 0.7 * h.powi(4)).collect();
    assert!((richardson(&h, &e).unwrap() + 0.5).abs() < 1e-13);
}

#[test]
fn convergence_study_rejects_bad_input() {
    let p = KineticProfile::non_relativistic(1.0).unwrap();
    assert!(converge_study(&p, &PotentialSpec::zero(), &[], &tight()).is_err());
    let fine = GridSpec::new(1, 8.0, 32).unwrap();
    let coarse = GridSpec::new(1, 8.0, 16).unwrap();
    assert!(converge_study(&p, &PotentialSpec::zero(), &[fine, coarse], &tight()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn replication_lift_is_exactly_nested(seed in any::<u64>(), dim in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = if dim == 1 { 16 } else { 4 };
        let grid = GridSpec::new(dim, rng.random_range(3.0..10.0), n).unwrap();
        let field = PositionField { grid, values: (0..grid.len()).map(|_| rng.random_range(-4.0..2.0)).collect() };
        let study = converge_study_lifted(
            &KineticProfile::semi_relativistic(1.0).unwrap(),
            &field,
            3,
            Lift::SpectralReplication,
            &tight(),
        ).unwrap();
        for p in &study.nested {
            prop_assert!(p.change <= NESTED_TOLERANCE && p.monotone, "{p:?}");
        }
    }

    #[test]
    fn deeper_well_lowers_the_energy(d1 in 0.1f64..3.0, extra in 0.0f64..2.0) {
        let grid = GridSpec::new(1, 12.0, 32).unwrap();
        let profile = KineticProfile::semi_relativistic(1.0).unwrap();
        let e = |d: f64| ground_state(&profile, &PotentialSpec::GaussianWell { depth: d, width: 1.0 }, &grid, &tight())
            .unwrap().result.eigenvalue;
        prop_assert!(e(d1 + extra) <= e(d1) + 1e-10);
    }

    #[test]
    fn energy_is_below_every_rayleigh_quotient(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = GridSpec::new(1, 10.0, 32).unwrap();
        let v = potential_on_grid(&PotentialSpec::SquareWell { depth: 1.0, radius: 2.0 }, &grid).unwrap();
        let h = OneBodyHamiltonian::new(
            &bindcert::operators::kinetic_on_grid(&KineticProfile::non_relativistic(1.0).unwrap(), &grid), &v,
        ).unwrap();
        let e0 = solve_operator(&h, &tight()).unwrap().result.eigenvalue;
        let psi: Vec<_> = (0..grid.len())
            .map(|_| num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        prop_assert!(h.rayleigh_quotient(&psi) >= e0 - 1e-10);
    }
}
