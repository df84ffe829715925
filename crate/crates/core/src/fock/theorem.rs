use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::checks::{check_h2, check_h3, real_trial_function, trial_state_verify, H2Report, TrialReport};
use super::nelson::{assemble, AssembledPair, NelsonInstance, NelsonOperator};
use crate::error::{Error, Result};
use crate::krylov::{dense_eigenvalues, lowest_eigenpair, to_dense, HermitianOperator};
use crate::onebody::{solve_operator, OneBodyHamiltonian, SolveOptions, SolveResult};
use crate::operators::{H3Report, MomentumField, PositionField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroundPairOptions {
    pub solver: SolveOptions,
    /// Cross-check against dense diagonalization up to this dimension.
    pub dense_limit: usize,
}

impl Default for GroundPairOptions {
    fn default() -> Self {
        Self { solver: SolveOptions::default(), dense_limit: 512 }
    }
}

pub const DENSE_AGREEMENT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct GroundPair {
    pub e0: f64,
    pub ev: f64,
    pub vector0: Vec<Complex64>,
    pub vectorv: Vec<Complex64>,
    pub residual0: f64,
    pub residualv: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `max(|E⁰ − dense|, |E^V − dense|)` when the dense oracle ran.
    pub dense_gap: Option<f64>,
}

impl GroundPair {
    /// `E⁰ − E^V`.
    pub fn binding(&self) -> f64 {
        self.e0 - self.ev
    }
}

fn lowest_dense(op: &NelsonOperator) -> f64 {
    dense_eigenvalues(&to_dense(op))[0]
}

pub fn ground_pair(pair: &AssembledPair, opts: &GroundPairOptions) -> Result<GroundPair> {
    let k = opts.solver.krylov();
    let a = lowest_eigenpair(&pair.h0, &k)?;
    let b = lowest_eigenpair(&pair.hv, &k)?;
    let dense_gap = (pair.h0.dim() <= opts.dense_limit)
        .then(|| (a.value - lowest_dense(&pair.h0)).abs().max((b.value - lowest_dense(&pair.hv)).abs()));
    Ok(GroundPair {
        e0: a.value,
        ev: b.value,
        residual0: a.residual,
        residualv: b.residual,
        iterations: a.iterations + b.iterations,
        converged: a.converged && b.converged,
        vector0: a.vector,
        vectorv: b.vector,
        dense_gap,
    })
}

/// `h = B(p²) + V` on the instance lattice, built from exactly the samples
/// the particle–field operator uses.
pub fn onebody_operator(pair: &AssembledPair) -> Result<OneBodyHamiltonian> {
    let grid = *pair.hv.grid();
    let potential = pair.hv.potential().expect("H^V carries the potential");
    OneBodyHamiltonian::new(
        &MomentumField { grid, values: pair.h0.kinetic().to_vec() },
        &PositionField { grid, values: potential.to_vec() },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub h2: H2Report,
    pub h3: H3Report,
    pub off_lattice_modes: Vec<usize>,
}

impl HypothesisReport {
    pub fn holds(&self) -> bool {
        self.h2.holds() && self.h3.holds()
    }
}

pub fn hypotheses(instance: &NelsonInstance, pair: &AssembledPair) -> HypothesisReport {
    HypothesisReport {
        h2: check_h2(instance, pair),
        h3: check_h3(instance),
        off_lattice_modes: pair.off_lattice_modes.clone(),
    }
}

pub const SLACK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub ev: f64,
    pub e0_field: f64,
    pub e0: f64,
    /// `E⁰ + e₀ − E^V`.
    pub slack: f64,
    pub tolerance: f64,
    pub checksum: String,
    pub continuum_unbounded: bool,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.slack >= -self.tolerance
    }
}

/// `E^V ≤ E⁰ + e₀`. Refuses (hypothesis error) when the translation or
/// second-difference check fails, and (consistency error) when `onebody`
/// was computed on a different lattice operator.
pub fn theorem_verify(
    instance: &NelsonInstance,
    pair: &AssembledPair,
    ground: &GroundPair,
    onebody: &SolveResult,
) -> Result<TheoremReport> {
    let hyp = hypotheses(instance, pair);
    if !hyp.holds() {
        return Err(Error::Hypothesis(format!(
            "translation defect {:e}, second-difference margin {:e}",
            hyp.h2.max_norm, hyp.h3.max_margin
        )));
    }
    if onebody.checksum != pair.checksum {
        return Err(Error::Consistency("one-body energy was computed on a different lattice operator".into()));
    }
    Ok(TheoremReport {
        ev: ground.ev,
        e0_field: ground.e0,
        e0: onebody.eigenvalue,
        slack: ground.e0 + onebody.eigenvalue - ground.ev,
        tolerance: SLACK_TOLERANCE,
        checksum: pair.checksum.clone(),
        continuum_unbounded: pair.continuum_unbounded,
    })
}

/// Everything computed for one instance.
#[derive(Debug, Clone)]
pub struct Verification {
    pub hypotheses: HypothesisReport,
    pub ground: GroundPair,
    pub onebody: SolveResult,
    pub trial: TrialReport,
    pub theorem: TheoremReport,
}

impl Verification {
    pub fn holds(&self) -> bool {
        self.hypotheses.holds() && self.trial.holds() && self.theorem.holds()
    }
}

/// Assembles, checks hypotheses, solves both problems on the shared lattice
/// and runs the trial-state and theorem checks. The trial function is the
/// one-body ground vector (phase-normalized, hence real up to rounding).
pub fn verify_instance(instance: &NelsonInstance, opts: &GroundPairOptions) -> Result<Verification> {
    let pair = assemble(instance)?;
    let hyp = hypotheses(instance, &pair);
    if !hyp.holds() {
        return Err(Error::Hypothesis(format!(
            "translation defect {:e}, second-difference margin {:e}",
            hyp.h2.max_norm, hyp.h3.max_margin
        )));
    }
    let ground = ground_pair(&pair, opts)?;
    let one = solve_operator(&onebody_operator(&pair)?, &opts.solver)?;
    let f = real_trial_function(&one.vector)?;
    let trial = trial_state_verify(instance, &pair, &ground.vector0, &f)?;
    let theorem = theorem_verify(instance, &pair, &ground, &one.result)?;
    Ok(Verification { hypotheses: hyp, ground, onebody: one.result, trial, theorem })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::BernsteinFunction;
    use crate::fock::nelson::{FockTruncation, Mode};
    use crate::operators::{GridSpec, PotentialSpec};

    fn base(g: Complex64, potential: PotentialSpec) -> NelsonInstance {
        let grid = GridSpec::new(1, 6.0, 8).unwrap();
        NelsonInstance::new(
            grid,
            BernsteinFunction::one_minus_exp(1.0, 2.0).unwrap(),
            FockTruncation {
                modes: vec![
                    Mode::on_lattice(&grid, &[1], g, 0.6),
                    Mode::on_lattice(&grid, &[-2], g * 0.5, 1.1),
                ],
                n_max: 2,
            },
            vec![0.0, 1.0, 0.3],
            potential,
        )
    }

    #[test]
    fn decoupled_slack_is_zero() {
        let inst = base(Complex64::default(), PotentialSpec::SquareWell { depth: 2.0, radius: 1.0 });
        let v = verify_instance(&inst, &GroundPairOptions::default()).unwrap();
        assert!(v.theorem.slack.abs() < 1e-10, "{}", v.theorem.slack);
        assert!(v.ground.e0.abs() < 1e-10);
        assert!(v.holds());
    }

    #[test]
    fn coupled_instance_satisfies_everything() {
        let inst = base(Complex64::new(0.7, -0.4), PotentialSpec::GaussianWell { depth: 1.5, width: 0.8 });
        let v = verify_instance(&inst, &GroundPairOptions::default()).unwrap();
        assert!(v.ground.dense_gap.unwrap() < DENSE_AGREEMENT_TOLERANCE);
        assert!(v.holds(), "{:?} {:?}", v.trial, v.theorem);
    }

    #[test]
    fn constant_potential_shifts_energy() {
        let inst = base(Complex64::new(0.5, 0.2), PotentialSpec::Constant { value: 0.75 });
        let pair = assemble(&inst).unwrap();
        let g = ground_pair(&pair, &GroundPairOptions::default()).unwrap();
        assert!((g.ev - g.e0 - 0.75).abs() < 1e-10);
    }

    #[test]
    fn mismatched_lattice_is_refused() {
        let inst = base(Complex64::new(0.5, 0.2), PotentialSpec::GaussianWell { depth: 1.0, width: 1.0 });
        let pair = assemble(&inst).unwrap();
        let g = ground_pair(&pair, &GroundPairOptions::default()).unwrap();
        let mut other = inst.clone();
        other.potential = PotentialSpec::GaussianWell { depth: 1.0, width: 1.1 };
        let other_pair = assemble(&other).unwrap();
        let one = solve_operator(&onebody_operator(&other_pair).unwrap(), &SolveOptions::default()).unwrap();
        assert!(matches!(theorem_verify(&inst, &pair, &g, &one.result), Err(Error::Consistency(_))));
    }

    #[test]
    fn off_lattice_is_refused() {
        let mut inst = base(Complex64::new(0.5, 0.2), PotentialSpec::zero());
        inst.truncation.modes[0].momentum[0] = 0.9;
        assert!(matches!(verify_instance(&inst, &GroundPairOptions::default()), Err(Error::Hypothesis(_))));
    }
}
