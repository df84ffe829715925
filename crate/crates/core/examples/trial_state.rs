//! The translated trial state built from the field ground state and the
//! one-body ground vector: norm, energy and potential identities, then the
//! binding inequality itself.

use bindcert::bernstein::BernsteinFunction;
use bindcert::fock::{
    assemble, ground_pair, onebody_operator, real_trial_function, theorem_verify, trial_state_verify,
    FockTruncation, GroundPairOptions, Mode, NelsonInstance,
};
use bindcert::onebody::{solve_operator, SolveOptions};
use bindcert::operators::{GridSpec, PotentialSpec};
use num_complex::Complex64;

fn main() -> bindcert::Result<()> {
    let grid = GridSpec::new(1, 10.0, 32)?;
    let inst = NelsonInstance::new(
        grid,
        BernsteinFunction::sqrt_shifted(1.0, 200)?,
        FockTruncation {
            modes: vec![
                Mode::on_lattice(&grid, &[1], Complex64::new(0.8, 0.1), 0.5),
                Mode::on_lattice(&grid, &[3], Complex64::new(-0.3, 0.4), 1.0),
            ],
            n_max: 3,
        },
        vec![0.0, 1.0],
        PotentialSpec::SquareWell { depth: 1.0, radius: 1.5 },
    );
    let pair = assemble(&inst)?;
    let g = ground_pair(&pair, &GroundPairOptions::default())?;
    let one = solve_operator(&onebody_operator(&pair)?, &SolveOptions::default())?;
    let f = real_trial_function(&one.vector)?;
    let t = trial_state_verify(&inst, &pair, &g.vector0, &f)?;
    println!("norm sum {:.15} (1)", t.norm_sum);
    println!("energy sum {:.12} <= E0 + <f,Kf> = {:.12}", t.energy_sum, t.energy_bound);
    println!("potential sum {:.12} = <f,Vf> = {:.12}", t.potential_sum, t.potential_expectation);
    let th = theorem_verify(&inst, &pair, &g, &one.result)?;
    println!(
        "EV {:.10} <= E0 + e0 = {:.10} + {:.10}, slack {:.3e}{}",
        th.ev,
        th.e0_field,
        th.e0,
        th.slack,
        if th.continuum_unbounded { " (linear coupling: continuum model unbounded below)" } else { "" }
    );
    Ok(())
}
