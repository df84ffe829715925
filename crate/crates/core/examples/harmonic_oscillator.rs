//! Lowest eigenvalue of p²/2 + x²/2 on a periodic lattice (exact: 1/2) and
//! the binding certificate that goes with it.

use bindcert::onebody::{binding_certificate, ground_state, SolveOptions};
use bindcert::operators::{GridSpec, KineticProfile, PotentialSpec};

fn main() -> bindcert::Result<()> {
    let profile = KineticProfile::non_relativistic(1.0)?;
    let potential = PotentialSpec::Harmonic { stiffness: 1.0 };
    let opts = SolveOptions { tol: 1e-11, ..Default::default() };
    for points in [32, 64, 128] {
        let grid = GridSpec::new(1, 20.0, points)?;
        let r = ground_state(&profile, &potential, &grid, &opts)?.result;
        println!(
            "N={points:<4} e0={:.14} error {:.2e} residual {:.1e} iterations {}",
            r.eigenvalue,
            (r.eigenvalue - 0.5).abs(),
            r.residual,
            r.iterations
        );
    }
    let cert = binding_certificate(0.5, 1e-3);
    println!("positive e0 certifies nothing: binding_positive = {}", cert.binding_positive);
    Ok(())
}
