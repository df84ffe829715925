//! The three kinetic profiles on a lattice and their second-difference
//! margins over every pair of non-Nyquist momenta.

use bindcert::bernstein::BernsteinFunction;
use bindcert::operators::{h3_margin, kinetic_on_grid, GridSpec, KineticProfile};

fn main() -> bindcert::Result<()> {
    let profiles = [
        ("k^2/2m", KineticProfile::non_relativistic(1.0)?),
        ("sqrt(k^2+m^2)-m", KineticProfile::semi_relativistic(1.0)?),
        ("B(k^2)", KineticProfile::bernstein(BernsteinFunction::one_minus_exp(0.5, 3.0)?)?),
    ];
    for grid in [GridSpec::new(1, 10.0, 128)?, GridSpec::new(2, 8.0, 32)?, GridSpec::new(3, 6.0, 8)?] {
        for (name, p) in &profiles {
            let k = kinetic_on_grid(p, &grid);
            let top = k.values.iter().cloned().fold(0.0, f64::max);
            let r = h3_margin(p, &grid);
            println!(
                "d={} N={:<3} {name:<16} max K {top:>9.3} margin {:+.2e} over {} pairs",
                grid.dim, grid.points, r.max_margin, r.pairs
            );
        }
    }
    Ok(())
}
