//! Bernstein functions in Lévy–Khintchine form.
//!
//! A Bernstein function is represented as
//!
//! ```text
//! B(u) = a + b u + Σ_i w_i (1 - exp(-t_i u)),    u >= 0
//! ```
//!
//! with a finite atomic Lévy measure `Σ_i w_i δ(t - t_i)`. Every inequality
//! checked here (the second-difference lemma, the exponential inequality it
//! reduces to, the cubic growth bound) is closed under this class.
//!
//! Derivatives follow the standard sign convention `(-1)^(n-1) B^(n) >= 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One atom `w δ(t - rate)` of the Lévy measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub rate: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinFunction {
    drift_a: f64,
    drift_b: f64,
    atoms: Vec<Atom>,
}

impl BernsteinFunction {
    pub fn new(drift_a: f64, drift_b: f64, atoms: Vec<Atom>) -> Result<Self> {
        if !(drift_a.is_finite() && drift_a >= 0.0) {
            return Err(Error::InvalidParameter(format!("drift a must be >= 0, got {drift_a}")));
        }
        if !(drift_b.is_finite() && drift_b >= 0.0) {
            return Err(Error::InvalidParameter(format!("drift b must be >= 0, got {drift_b}")));
        }
        for (i, atom) in atoms.iter().enumerate() {
            if !(atom.rate.is_finite() && atom.rate > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "atom {i}: rate must be > 0, got {}",
                    atom.rate
                )));
            }
            if !(atom.weight.is_finite() && atom.weight > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "atom {i}: weight must be > 0, got {}",
                    atom.weight
                )));
            }
        }
        let levy_mass: f64 = atoms.iter().map(|a| a.weight * a.rate.min(1.0)).sum();
        if !levy_mass.is_finite() {
            return Err(Error::InvalidParameter("Lévy measure integral of min(t,1) diverges".into()));
        }
        Ok(Self { drift_a, drift_b, atoms })
    }

    /// Builds from `(rate, weight)` pairs.
    pub fn from_pairs(drift_a: f64, drift_b: f64, pairs: &[(f64, f64)]) -> Result<Self> {
        let atoms = pairs.iter().map(|&(rate, weight)| Atom { rate, weight }).collect();
        Self::new(drift_a, drift_b, atoms)
    }

    /// `B(u) = b u`.
    pub fn linear(b: f64) -> Result<Self> {
        Self::new(0.0, b, Vec::new())
    }

    /// `B(u) = w (1 - exp(-t u))`.
    pub fn one_minus_exp(rate: f64, weight: f64) -> Result<Self> {
        Self::new(0.0, 0.0, vec![Atom { rate, weight }])
    }

    /// Atomic approximation of `B(u) = sqrt(u + m^2) - m`.
    ///
    /// Uses `sqrt(u + m^2) - m = ∫ (1 - e^{-tu}) e^{-m^2 t} / (2 sqrt(pi) t^{3/2}) dt`
    /// discretized by the midpoint rule in `s = ln t`. The atoms are positive,
    /// so the result is an exact Bernstein function approximating the target
    /// uniformly on bounded intervals.
    pub fn sqrt_shifted(mass: f64, n_atoms: usize) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be > 0, got {mass}")));
        }
        if n_atoms == 0 {
            return Err(Error::InvalidParameter("sqrt_shifted needs at least one atom".into()));
        }
        let m2 = mass * mass;
        let s_lo = (1e-8f64).ln();
        let s_hi = (60.0 / m2).ln();
        let ds = (s_hi - s_lo) / n_atoms as f64;
        let norm = 0.5 / std::f64::consts::PI.sqrt();
        let atoms = (0..n_atoms)
            .map(|i| {
                let s = s_lo + (i as f64 + 0.5) * ds;
                let t = s.exp();
                Atom { rate: t, weight: norm * (-m2 * t).exp() * t.powf(-0.5) * ds }
            })
            .collect();
        Self::new(0.0, 0.0, atoms)
    }

    pub fn drift_a(&self) -> f64 {
        self.drift_a
    }

    pub fn drift_b(&self) -> f64 {
        self.drift_b
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `B(0) = 0`, required when the function is used as a kinetic energy.
    pub fn vanishes_at_zero(&self) -> bool {
        self.drift_a == 0.0
    }

    pub fn evaluate(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return Err(Error::Domain { what: "Bernstein argument", value: u });
        }
        Ok(self.eval_unchecked(u))
    }

    pub(crate) fn eval_unchecked(&self, u: f64) -> f64 {
        self.nonlinear_part(u) + self.drift_b * u
    }

    /// `B(u) - b u`: the constant plus the jump part.
    pub(crate) fn nonlinear_part(&self, u: f64) -> f64 {
        let jumps: f64 = self.atoms.iter().map(|a| a.weight * -(-a.rate * u).exp_m1()).sum();
        self.drift_a + jumps
    }

    /// Closed-form `n`-th derivative at `u > 0`, `1 <= n <= 4`.
    pub fn derivative(&self, u: f64, n: u32) -> Result<f64> {
        if !(1..=4).contains(&n) {
            return Err(Error::UnsupportedOrder(n));
        }
        if !(u > 0.0 && u.is_finite()) {
            return Err(Error::Domain { what: "derivative argument", value: u });
        }
        Ok(self.derivative_closed_form(u, n))
    }

    /// Same closed form, extended to `u = 0` as the one-sided limit.
    pub fn derivative_at_zero(&self, n: u32) -> Result<f64> {
        if !(1..=4).contains(&n) {
            return Err(Error::UnsupportedOrder(n));
        }
        Ok(self.derivative_closed_form(0.0, n))
    }

    fn derivative_closed_form(&self, u: f64, n: u32) -> f64 {
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let drift = if n == 1 { self.drift_b } else { 0.0 };
        let jumps: f64 = self
            .atoms
            .iter()
            .map(|a| a.weight * a.rate.powi(n as i32) * (-a.rate * u).exp())
            .sum();
        drift + sign * jumps
    }
}

/// Worst point found by a grid check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicBoundReport {
    pub max_violation: f64,
    pub argmax: f64,
    pub points: usize,
}

impl CubicBoundReport {
    pub fn holds(&self) -> bool {
        self.max_violation <= 0.0
    }
}

/// Evaluates `B(u) - [u^3/6 + B''(0) u^2/2 + B'(0) u]` on a grid.
///
/// The bound is reported, not asserted: with `B''(0) < 0` the right-hand side
/// can turn negative while `B >= 0`, so violations are possible for some `B`.
pub fn cubic_upper_bound_check(b: &BernsteinFunction, u_grid: &[f64]) -> Result<CubicBoundReport> {
    if u_grid.is_empty() {
        return Err(Error::Empty("cubic bound grid"));
    }
    let d1 = b.derivative_at_zero(1)?;
    let d2 = b.derivative_at_zero(2)?;
    let mut best = (f64::NEG_INFINITY, u_grid[0]);
    for &u in u_grid {
        let bound = u * u * u / 6.0 + d2 * u * u / 2.0 + d1 * u;
        let violation = b.evaluate(u)? - bound;
        if violation > best.0 {
            best = (violation, u);
        }
    }
    Ok(CubicBoundReport { max_violation: best.0, argmax: best.1, points: u_grid.len() })
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn sum_sq(p: &[f64], k: &[f64], sign: f64) -> f64 {
    p.iter().zip(k).map(|(a, b)| (a + sign * b) * (a + sign * b)).sum()
}

/// Both sides of the second-difference inequality at one `(p, k)` pair:
/// `(½[B(|p+k|²) + B(|p-k|²) - 2B(|p|²)], B(|k|²))`.
pub fn lemma1_sides(b: &BernsteinFunction, p: &[f64], k: &[f64]) -> (f64, f64) {
    let plus = b.eval_unchecked(sum_sq(p, k, 1.0));
    let minus = b.eval_unchecked(sum_sq(p, k, -1.0));
    let centre = b.eval_unchecked(norm_sq(p));
    (0.5 * (plus + minus - 2.0 * centre), b.eval_unchecked(norm_sq(k)))
}

/// How a lemma side pair is turned into a signed excess (positive = violated).
pub type Comparator = fn(lhs: f64, rhs: f64) -> f64;

pub fn standard_comparator(lhs: f64, rhs: f64) -> f64 {
    lhs - rhs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub max_excess: f64,
    /// Indices into the `p` and `k` grids of the worst pair.
    pub argmax: (usize, usize),
    pub pairs: usize,
    pub tolerance: f64,
}

impl Lemma1Report {
    pub fn holds(&self) -> bool {
        self.max_excess <= self.tolerance
    }
}

pub const LEMMA1_TOLERANCE: f64 = 1e-12;

/// Checks `½(B(|p+k|²)+B(|p-k|²)-2B(|p|²)) <= B(|k|²)` over all grid pairs.
pub fn lemma1_check(b: &BernsteinFunction, p_grid: &[Vec<f64>], k_grid: &[Vec<f64>]) -> Result<Lemma1Report> {
    lemma1_check_with(b, p_grid, k_grid, standard_comparator)
}

pub fn lemma1_check_with(
    b: &BernsteinFunction,
    p_grid: &[Vec<f64>],
    k_grid: &[Vec<f64>],
    comparator: Comparator,
) -> Result<Lemma1Report> {
    if p_grid.is_empty() {
        return Err(Error::Empty("lemma1 p grid"));
    }
    if k_grid.is_empty() {
        return Err(Error::Empty("lemma1 k grid"));
    }
    let dim = p_grid[0].len();
    if let Some(bad) = p_grid.iter().chain(k_grid).find(|v| v.len() != dim) {
        return Err(Error::Dimension { expected: dim, got: bad.len() });
    }
    let mut max_excess = f64::NEG_INFINITY;
    let mut argmax = (0, 0);
    for (i, p) in p_grid.iter().enumerate() {
        for (j, k) in k_grid.iter().enumerate() {
            let (lhs, rhs) = lemma1_sides(b, p, k);
            let excess = comparator(lhs, rhs);
            if excess > max_excess {
                max_excess = excess;
                argmax = (i, j);
            }
        }
    }
    Ok(Lemma1Report { max_excess, argmax, pairs: p_grid.len() * k_grid.len(), tolerance: LEMMA1_TOLERANCE })
}

/// `[-e^{-|p+k|²t} - e^{-|p-k|²t} + 2e^{-|p|²t}] - 2(1 - e^{-|k|²t})`, which
/// is never positive. This is the single-atom case the lemma reduces to.
pub fn exponential_inequality_check(t: f64, p: &[f64], k: &[f64]) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain { what: "exponential inequality t", value: t });
    }
    if p.len() != k.len() {
        return Err(Error::Dimension { expected: p.len(), got: k.len() });
    }
    let lhs = -(-sum_sq(p, k, 1.0) * t).exp() - (-sum_sq(p, k, -1.0) * t).exp() + 2.0 * (-norm_sq(p) * t).exp();
    let rhs = -2.0 * (-norm_sq(k) * t).exp_m1();
    Ok(lhs - rhs)
}
