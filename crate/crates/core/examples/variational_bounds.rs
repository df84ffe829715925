//! Upper bounds from Gaussian and hydrogenic trial families against the
//! lattice ground energy of a softened Coulomb well.

use bindcert::onebody::{ground_state, variational_upper_bound, SolveOptions, TrialFamily};
use bindcert::operators::{GridSpec, KineticProfile, PotentialSpec, Sampling};

fn main() -> bindcert::Result<()> {
    let grid = GridSpec::new(3, 24.0, 32)?;
    let potential = PotentialSpec::Coulomb { charge: 1.0, softening: None, sampling: Sampling::CellAveraged };
    for profile in [KineticProfile::non_relativistic(1.0)?, KineticProfile::semi_relativistic(1.0)?] {
        let e0 = ground_state(&profile, &potential, &grid, &SolveOptions::default())?.result.eigenvalue;
        println!("{profile:?}: lattice e0 {e0:.6}");
        for family in [
            TrialFamily::Gaussian { theta_min: 0.2, theta_max: 6.0 },
            TrialFamily::Hydrogenic { theta_min: 0.2, theta_max: 6.0 },
        ] {
            let b = variational_upper_bound(&profile, &potential, &grid, &family)?;
            println!("  {family:?}: bound {:.6} at theta {:.4} ({} evaluations)", b.value, b.theta, b.evaluations);
        }
    }
    Ok(())
}
