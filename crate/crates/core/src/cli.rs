//! The `bindcert` command line: subcommands that read a job config, run
//! one of the checks and write a report.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical
//! non-convergence, 3 a hypothesis or inequality check failed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bernstein::{exponential_inequality_check, lemma1_check, lemma1_sides, LEMMA1_TOLERANCE};
use crate::config::{set_parameter, Format, JobConfig};
use crate::error::{Error, Result};
use crate::fock::{
    assemble, ground_pair, hypotheses, onebody_operator, real_trial_function, theorem_verify, trial_state_verify,
    GroundPairOptions, NelsonInstance, DENSE_AGREEMENT_TOLERANCE, H2_TOLERANCE, TRIAL_ENERGY_TOLERANCE,
    TRIAL_NORM_TOLERANCE, TRIAL_POTENTIAL_TOLERANCE,
};
use crate::onebody::{
    binding_certificate, converge_study, ground_state, ground_state_with_box_control, solve_operator,
    ConvergenceStudy,
};
use crate::operators::H3_TOLERANCE;
use crate::report::{digest_of, emit_convergence_csv, emit_json, CertificateRecord, RecordKind};
use crate::sampling::{log_uniform, random_bernstein, random_nelson_instance, random_vector, InstanceRanges};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_UNCONVERGED: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "bindcert", version, about = "Binding-energy certificates for particle-field Hamiltonians")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Job configuration (TOML).
    #[arg(long, global = true, env = "BINDCERT_CONFIG")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true, env = "BINDCERT_OUT")]
    pub out: Option<PathBuf>,
    /// Seed for every randomized step (overrides `solver.seed`).
    #[arg(long, global = true, env = "BINDCERT_SEED")]
    pub seed: Option<u64>,
    /// Worker threads for batches and sweeps.
    #[arg(long, global = true, env = "BINDCERT_JOBS")]
    pub jobs: Option<usize>,
    /// Report format; `csv` is only available for convergence tables.
    #[arg(long, global = true, env = "BINDCERT_FORMAT", value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Ground-state energy of K(p)+V and the binding certificate.
    SolveOnebody,
    /// Randomized check of the second-difference lemma and the exponential inequality.
    VerifyLemma1,
    /// Particle–field instances: hypotheses, trial state and the binding inequality.
    VerifyTheorem,
    /// One-body solves over a list of values of one config parameter.
    Sweep,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SolveOnebody => "solve-onebody",
            Command::VerifyLemma1 => "verify-lemma1",
            Command::VerifyTheorem => "verify-theorem",
            Command::Sweep => "sweep",
        }
    }
}

/// A loaded job: the parsed config, its text (for error anchors) and the
/// directory relative paths are resolved against.
#[derive(Debug, Clone)]
pub struct Job {
    pub config: JobConfig,
    pub text: String,
    pub base: PathBuf,
    /// Whether `solver.seed` was written in the file or given on the command line.
    pub seed_given: bool,
}

impl Job {
    pub fn from_text(text: &str, base: &Path) -> Result<Self> {
        let config = JobConfig::parse(text)?;
        let doc: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let seed_given = doc.get("solver").and_then(|s| s.get("seed")).is_some();
        Ok(Self { config, text: text.to_string(), base: base.to_path_buf(), seed_given })
    }

    /// The seed of a randomized suite; there is no fallback entropy.
    fn required_seed(&self) -> Result<u64> {
        if !self.seed_given {
            return Err(Error::Config("randomized runs need an explicit seed (`solver.seed` or --seed)".into()));
        }
        Ok(self.config.solver.seed)
    }

    /// Digest of everything except the `[output]` section, after defaults.
    fn digest(&self) -> Result<String> {
        let mut v = serde_json::to_value(&self.config).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output");
        }
        digest_of(&v)
    }

    /// The resolved config, defaults included, as compact JSON.
    fn echo(&self) -> String {
        let mut v = serde_json::to_value(&self.config).unwrap_or_default();
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output");
        }
        format!("config {v}")
    }
}

/// Records plus the exit code they imply.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub records: Vec<CertificateRecord>,
    pub csv: Option<String>,
    pub code: i32,
}

impl Outcome {
    fn new() -> Self {
        Self { records: Vec::new(), csv: None, code: EXIT_OK }
    }

    fn escalate(&mut self, code: i32) {
        // a failed hypothesis outranks non-convergence
        if code == EXIT_HYPOTHESIS || (code == EXIT_UNCONVERGED && self.code == EXIT_OK) {
            self.code = code;
        }
    }
}

fn study_record(digest: &str, study: &ConvergenceStudy, tol: f64) -> CertificateRecord {
    let cert = binding_certificate(study.extrapolated, tol).with_grids(study.rows.iter().map(|r| r.grid));
    let mut r = CertificateRecord::binding(digest, &cert, study.rows.last())
        .value("e0_finest", study.finest)
        .value("e0_extrapolated", study.extrapolated)
        .flag("aliasing_warning", study.aliasing_warning)
        .pass(study.all_converged());
    for (i, row) in study.rows.iter().enumerate() {
        r = r.value(&format!("e0_grid{i}"), row.eigenvalue);
    }
    r
}

/// `solve-onebody`: one grid gives a direct solve, several grids a
/// convergence study whose extrapolated value is certified.
pub fn solve_onebody(job: &Job, format: Format) -> Result<Outcome> {
    let cfg = &job.config;
    let profile = cfg.kinetic_profile()?;
    let potential = cfg.potential_spec(&job.text, &job.base)?;
    let grids = cfg.onebody_grids()?;
    let opts = cfg.solver.solve_options();
    let digest = job.digest()?;
    let tol = cfg.solver.certificate_tolerance;
    let mut out = Outcome::new();
    if grids.len() == 1 && format == Format::Json {
        let state = if cfg.solver.auto_box {
            ground_state_with_box_control(&profile, &potential, &grids[0], &opts, cfg.solver.max_doublings)?
        } else {
            ground_state(&profile, &potential, &grids[0], &opts)?
        };
        let cert = binding_certificate(state.result.eigenvalue, tol).with_grids([state.result.grid]);
        out.records.push(CertificateRecord::binding(&digest, &cert, Some(&state.result)).note(job.echo()));
        if !state.result.converged {
            out.escalate(EXIT_UNCONVERGED);
        }
        if cfg.output.eigenvector {
            out.csv = Some(state.export().render());
        }
    } else {
        let study = converge_study(&profile, &potential, &grids, &opts)?;
        out.records.push(study_record(&digest, &study, tol).note(job.echo()));
        if format == Format::Csv {
            out.csv = Some(emit_convergence_csv(&study)?);
        }
        if !study.all_converged() {
            out.escalate(EXIT_UNCONVERGED);
        }
    }
    Ok(out)
}

/// `verify-lemma1`: random triples `(B, p, k)` and random `(t, p, k)`.
/// With a `[bernstein]` section every triple uses that function.
pub fn verify_lemma1(job: &Job) -> Result<Outcome> {
    let cfg = &job.config;
    let seed = job.required_seed()?;
    let l = &cfg.lemma1;
    if l.dim == 0 || !(l.scale > 0.0) {
        return Err(Error::Config("lemma1: dim must be >= 1 and scale > 0".into()));
    }
    let fixed = cfg.bernstein.as_ref().map(|b| b.build()).transpose()?;
    let digest = job.digest()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_gap = 0.0f64;
    for _ in 0..l.samples {
        let b = fixed.clone().unwrap_or_else(|| random_bernstein(&mut rng, l.max_atoms));
        let p = random_vector(&mut rng, l.dim, l.scale);
        let k = random_vector(&mut rng, l.dim, l.scale);
        let report = lemma1_check(&b, &[p.clone()], &[k.clone()])?;
        max_excess = max_excess.max(report.max_excess);
        let (lhs, rhs) = lemma1_sides(&b, &p, &k);
        max_gap = max_gap.max((lhs - rhs).abs());
    }
    let mut max_exp = f64::NEG_INFINITY;
    for _ in 0..l.exp_samples {
        let t = log_uniform(&mut rng, 1e-3, 1e2);
        let p = random_vector(&mut rng, l.dim, l.scale);
        let k = random_vector(&mut rng, l.dim, l.scale);
        max_exp = max_exp.max(exponential_inequality_check(t, &p, &k)?);
    }
    let lemma_ok = l.samples == 0 || max_excess <= LEMMA1_TOLERANCE;
    let exp_ok = l.exp_samples == 0 || max_exp <= 0.0;
    let mut out = Outcome::new();
    let mut lemma = CertificateRecord::new(RecordKind::Lemma1, "second_difference", &digest)
        .value("samples", l.samples as f64)
        .tolerance("max_excess", LEMMA1_TOLERANCE)
        .flag("equality", l.samples > 0 && max_gap <= 1e-10)
        .pass(lemma_ok)
        .note(job.echo());
    if l.samples > 0 {
        lemma = lemma.value("max_excess", max_excess).value("max_abs_difference", max_gap);
    }
    let mut exp = CertificateRecord::new(RecordKind::Lemma1, "exp_inequality", &digest)
        .value("samples", l.exp_samples as f64)
        .tolerance("max_value", 0.0)
        .pass(exp_ok);
    if l.exp_samples > 0 {
        exp = exp.value("max_value", max_exp);
    }
    out.records.push(lemma);
    out.records.push(exp);
    if !(lemma_ok && exp_ok) {
        out.escalate(EXIT_HYPOTHESIS);
    }
    Ok(out)
}

fn verify_one(index: usize, inst: &NelsonInstance, opts: &GroundPairOptions, digest: &str) -> Result<Outcome> {
    let mut out = Outcome::new();
    let pair = assemble(inst)?;
    let hyp = hypotheses(inst, &pair);
    let i = index as f64;
    out.records.push(
        CertificateRecord::new(RecordKind::Hypothesis, "h2", digest)
            .value("instance", i)
            .value("max_norm", hyp.h2.max_norm)
            .value("off_lattice_modes", hyp.off_lattice_modes.len() as f64)
            .tolerance("max_norm", H2_TOLERANCE)
            .pass(hyp.h2.holds()),
    );
    out.records.push(
        CertificateRecord::new(RecordKind::Hypothesis, "h3", digest)
            .value("instance", i)
            .value("max_margin", hyp.h3.max_margin)
            .value("pairs", hyp.h3.pairs as f64)
            .tolerance("max_margin", H3_TOLERANCE)
            .pass(hyp.h3.holds()),
    );
    if !hyp.holds() {
        out.records.push(
            CertificateRecord::new(RecordKind::Theorem, "slack", digest)
                .value("instance", i)
                .pass(false)
                .note("refused: hypothesis check failed"),
        );
        out.escalate(EXIT_HYPOTHESIS);
        return Ok(out);
    }
    let ground = ground_pair(&pair, opts)?;
    let one = solve_operator(&onebody_operator(&pair)?, &opts.solver)?;
    let converged = ground.converged && one.result.converged;
    let f = real_trial_function(&one.vector)?;
    let trial = trial_state_verify(inst, &pair, &ground.vector0, &f)?;
    let theorem = theorem_verify(inst, &pair, &ground, &one.result)?;

    let mut gp = CertificateRecord::new(RecordKind::Theorem, "ground_pair", digest)
        .value("instance", i)
        .value("dim", inst.dim() as f64)
        .value("E0", ground.e0)
        .value("EV", ground.ev)
        .value("residual0", ground.residual0)
        .value("residualV", ground.residualv)
        .flag("converged", converged)
        .pass(converged);
    if let Some(gap) = ground.dense_gap {
        gp = gp.value("dense_gap", gap).tolerance("dense_gap", DENSE_AGREEMENT_TOLERANCE);
        gp.pass &= gap <= DENSE_AGREEMENT_TOLERANCE;
    }
    out.records.push(gp);
    out.records.push(
        CertificateRecord::new(RecordKind::Theorem, "trial_state", digest)
            .value("instance", i)
            .value("norm_sum", trial.norm_sum)
            .value("energy_sum", trial.energy_sum)
            .value("energy_bound", trial.energy_bound)
            .value("energy_margin", trial.energy_margin())
            .value("potential_sum", trial.potential_sum)
            .value("potential_expectation", trial.potential_expectation)
            .flag("norm_check", trial.norm_check())
            .flag("kinetic_check", trial.kinetic_check())
            .flag("potential_check", trial.potential_check())
            .tolerance("norm", TRIAL_NORM_TOLERANCE)
            .tolerance("energy", TRIAL_ENERGY_TOLERANCE)
            .tolerance("potential", TRIAL_POTENTIAL_TOLERANCE)
            .pass(trial.holds()),
    );
    out.records.push(
        CertificateRecord::new(RecordKind::Theorem, "slack", digest)
            .value("instance", i)
            .value("E0", theorem.e0_field)
            .value("EV", theorem.ev)
            .value("e0", theorem.e0)
            .value("slack", theorem.slack)
            .flag("continuum_unbounded", theorem.continuum_unbounded)
            .tolerance("slack", theorem.tolerance)
            .pass(theorem.holds())
            .note(format!("lattice checksum {}", theorem.checksum)),
    );
    if !converged {
        out.escalate(EXIT_UNCONVERGED);
    }
    if !(trial.holds() && theorem.holds()) {
        out.escalate(EXIT_HYPOTHESIS);
    }
    Ok(out)
}

/// The seeded batch used by `verify-theorem` when `nelson.random_instances > 0`;
/// every fifth instance is decoupled.
pub fn random_batch(count: usize, seed: u64) -> Vec<NelsonInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let ranges = InstanceRanges { decoupled: i % 5 == 4, ..Default::default() };
            random_nelson_instance(&mut rng, &ranges)
        })
        .collect()
}

pub fn verify_theorem(job: &Job) -> Result<Outcome> {
    let cfg = &job.config;
    let nelson = cfg.nelson.as_ref().ok_or_else(|| Error::Config("missing [nelson] section".into()))?;
    let instances = if nelson.random_instances > 0 {
        random_batch(nelson.random_instances, job.required_seed()?)
    } else {
        let potential = cfg.potential_spec(&job.text, &job.base)?;
        vec![cfg.nelson_instance(potential).map_err(|e| match e {
            Error::InvalidParameter(m) => Error::Config(m),
            other => other,
        })?]
    };
    let opts = GroundPairOptions { solver: cfg.solver.solve_options(), dense_limit: cfg.solver.dense_limit };
    let digest = job.digest()?;
    let parts: Vec<Result<Outcome>> =
        instances.par_iter().enumerate().map(|(i, inst)| verify_one(i, inst, &opts, &digest)).collect();
    let mut out = Outcome::new();
    for part in parts {
        let part = part?;
        out.records.extend(part.records);
        out.escalate(part.code);
    }
    if let Some(first) = out.records.first_mut() {
        first.notes.push(job.echo());
    }
    Ok(out)
}

/// `sweep`: re-runs `solve-onebody` with `sweep.parameter` set to each value.
pub fn sweep(job: &Job) -> Result<Outcome> {
    let cfg = job.config.sweep.as_ref().ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
    if cfg.values.is_empty() {
        return Err(Error::Config("sweep.values is empty".into()));
    }
    let doc: toml::Table = toml::from_str(&job.text).map_err(|e| Error::Config(e.to_string()))?;
    let points: Vec<Job> = cfg
        .values
        .iter()
        .map(|&v| {
            let mut d = doc.clone();
            d.remove("sweep");
            set_parameter(&mut d, &cfg.parameter, v)?;
            let text = toml::to_string(&d).map_err(|e| Error::Config(e.to_string()))?;
            Job::from_text(&text, &job.base)
        })
        .collect::<Result<_>>()?;
    let parts: Vec<Result<Outcome>> = points.par_iter().map(|p| solve_onebody(p, Format::Json)).collect();
    let mut out = Outcome::new();
    for (part, v) in parts.into_iter().zip(&cfg.values) {
        let part = part?;
        for r in part.records {
            out.records.push(r.value("parameter", *v).note(format!("sweep {} = {v}", cfg.parameter)));
        }
        out.escalate(part.code);
    }
    Ok(out)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Hypothesis(_) => EXIT_HYPOTHESIS,
        _ => EXIT_CONFIG,
    }
}

fn execute(cli: &Cli) -> Result<(Outcome, PathBuf, String, Format)> {
    let path = cli.common.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut job = Job::from_text(&text, &base).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    if let Some(seed) = cli.common.seed {
        job.config.solver.seed = seed;
        job.seed_given = true;
    }
    let format = cli.common.format.or(job.config.output.format).unwrap_or(Format::Json);
    if format == Format::Csv && !matches!(cli.command, Command::SolveOnebody) {
        return Err(Error::Config("--format csv is only available for solve-onebody".into()));
    }
    let outcome = match cli.command {
        Command::SolveOnebody => solve_onebody(&job, format),
        Command::VerifyLemma1 => verify_lemma1(&job),
        Command::VerifyTheorem => verify_theorem(&job),
        Command::Sweep => sweep(&job),
    }?;
    let dir = cli.common.out.clone().or_else(|| job.config.output.dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let stem = job.config.output.name.clone().unwrap_or_else(|| cli.command.name().to_string());
    Ok((outcome, dir, stem, format))
}

fn write_outputs(outcome: &Outcome, dir: &Path, stem: &str, format: Format, eigenvector: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let json = dir.join(format!("{stem}.json"));
    std::fs::write(&json, emit_json(&outcome.records)?)?;
    written.push(json);
    if let Some(extra) = &outcome.csv {
        let name = if format == Format::Csv {
            format!("{stem}.csv")
        } else if eigenvector {
            format!("{stem}.eigenvector.txt")
        } else {
            format!("{stem}.txt")
        };
        let p = dir.join(name);
        std::fs::write(&p, extra)?;
        written.push(p);
    }
    Ok(written)
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.common.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    pool.install(|| match execute(&cli) {
        Ok((outcome, dir, stem, format)) => {
            let eigenvector = outcome.csv.is_some() && format == Format::Json;
            match write_outputs(&outcome, &dir, &stem, format, eigenvector) {
                Ok(paths) => {
                    for p in paths {
                        println!("{}", p.display());
                    }
                    outcome.code
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_CONFIG
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    })
}
