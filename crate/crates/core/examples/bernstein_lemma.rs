//! Bernstein dispersions: values, derivative signs, the second-difference
//! bound and the single-atom exponential inequality.

use bindcert::bernstein::{
    cubic_upper_bound_check, exponential_inequality_check, lemma1_check, lemma1_sides, BernsteinFunction,
};

fn main() -> bindcert::Result<()> {
    let functions = [
        ("linear b=0.8", BernsteinFunction::linear(0.8)?),
        ("1-exp(-u)", BernsteinFunction::one_minus_exp(1.0, 1.0)?),
        ("sqrt(u+1)-1", BernsteinFunction::sqrt_shifted(1.0, 400)?),
        ("mixed", BernsteinFunction::from_pairs(0.0, 0.3, &[(0.2, 2.0), (5.0, 0.7)])?),
    ];
    let grid: Vec<Vec<f64>> = (-6..=6).flat_map(|i| (-6..=6).map(move |j| vec![0.5 * i as f64, 0.5 * j as f64])).collect();
    for (name, b) in &functions {
        let r = lemma1_check(b, &grid, &grid)?;
        let d: Vec<String> = (1..=4).map(|n| format!("{:+.3e}", b.derivative(1.0, n).unwrap())).collect();
        let cubic = cubic_upper_bound_check(b, &[0.01, 0.1, 1.0, 10.0])?;
        println!(
            "{name:<12} B(1)={:.6} B^(n)(1)=[{}] lemma max excess {:+.2e} over {} pairs, cubic bound {}",
            b.evaluate(1.0)?,
            d.join(", "),
            r.max_excess,
            r.pairs,
            if cubic.holds() { "holds" } else { "violated (reported only)" },
        );
    }
    let (lhs, rhs) = lemma1_sides(&functions[0].1, &[1.0, 2.0], &[0.5, -1.0]);
    println!("linear case is an identity: {lhs:.15} vs {rhs:.15}");
    let worst = [0.01, 0.3, 1.0, 7.0]
        .iter()
        .flat_map(|&t| grid.iter().map(move |p| exponential_inequality_check(t, p, &[0.7, -0.2]).unwrap()))
        .fold(f64::NEG_INFINITY, f64::max);
    println!("exponential inequality: largest value {worst:.3e} (must be <= 0)");
    Ok(())
}
