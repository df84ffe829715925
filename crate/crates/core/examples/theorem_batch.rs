//! Verifies the binding inequality on a seeded batch of random
//! particle–field instances and prints one line per instance.

use bindcert::fock::{verify_instance, GroundPairOptions};
use bindcert::sampling::{random_nelson_instance, InstanceRanges};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bindcert::Result<()> {
    let count: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let opts = GroundPairOptions { dense_limit: 0, ..Default::default() };
    println!("{:>3} {:>6} {:>14} {:>14} {:>14} {:>11}", "#", "dim", "E0", "EV", "e0", "slack");
    for i in 0..count {
        let ranges = InstanceRanges { decoupled: i % 5 == 4, ..Default::default() };
        let inst = random_nelson_instance(&mut rng, &ranges);
        let v = verify_instance(&inst, &opts)?;
        println!(
            "{i:>3} {:>6} {:>14.8} {:>14.8} {:>14.8} {:>11.3e} {}",
            inst.dim(),
            v.theorem.e0_field,
            v.theorem.ev,
            v.theorem.e0,
            v.theorem.slack,
            if v.holds() { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}
