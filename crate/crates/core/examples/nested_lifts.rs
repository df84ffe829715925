//! Carrying a rough coarse potential to finer lattices.
//!
//! Zero-insertion (spectral replication) makes every coarse operator the
//! compression of the next one, so the energies can only go down, but the
//! lifted field is a comb of ever narrower spikes, not a refinement of the
//! same smooth well. Trigonometric interpolation converges to a fixed
//! potential instead, and the study flags its non-nested first step.

use bindcert::onebody::{converge_study_lifted, Lift, SolveOptions};
use bindcert::operators::{GridSpec, KineticProfile, PositionField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> bindcert::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = GridSpec::new(1, 8.0, 16)?;
    let field = PositionField { grid, values: (0..16).map(|_| rng.random_range(-4.0..1.0)).collect() };
    let profile = KineticProfile::semi_relativistic(1.0)?;
    let opts = SolveOptions { tol: 1e-11, ..Default::default() };
    for lift in [Lift::SpectralReplication, Lift::FourierInterpolation] {
        let study = converge_study_lifted(&profile, &field, 4, lift, &opts)?;
        let e: Vec<String> = study.rows.iter().map(|r| format!("{:.10}", r.eigenvalue)).collect();
        println!("{lift:?}: {} aliasing_warning={}", e.join(" "), study.aliasing_warning);
    }
    Ok(())
}
