//! Assembles a truncated particle–field instance, runs the hypothesis
//! checks, and shows the ground energies with and without the potential as
//! the occupation cap grows.

use bindcert::bernstein::BernsteinFunction;
use bindcert::fock::{assemble, ground_pair, hypotheses, FockTruncation, GroundPairOptions, Mode, NelsonInstance};
use bindcert::operators::{GridSpec, PotentialSpec};
use num_complex::Complex64;

fn main() -> bindcert::Result<()> {
    let grid = GridSpec::new(1, 8.0, 16)?;
    let modes = vec![
        Mode::on_lattice(&grid, &[1], Complex64::new(0.7, -0.4), 0.6),
        Mode::on_lattice(&grid, &[-2], Complex64::new(0.35, -0.2), 1.1),
    ];
    for n_max in 1..=4 {
        let inst = NelsonInstance::new(
            grid,
            BernsteinFunction::one_minus_exp(1.0, 2.0)?,
            FockTruncation { modes: modes.clone(), n_max },
            vec![0.0, 1.0, 0.3],
            PotentialSpec::GaussianWell { depth: 1.5, width: 0.8 },
        );
        let pair = assemble(&inst)?;
        let hyp = hypotheses(&inst, &pair);
        let g = ground_pair(&pair, &GroundPairOptions::default())?;
        println!(
            "n_max={n_max} dim={:<5} E0={:.10} EV={:.10} binding={:.6} translation defect {:.1e} dense gap {}",
            inst.dim(),
            g.e0,
            g.ev,
            g.binding(),
            hyp.h2.max_norm,
            g.dense_gap.map_or("skipped".into(), |x| format!("{x:.1e}")),
        );
    }
    Ok(())
}
