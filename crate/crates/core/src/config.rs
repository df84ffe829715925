//! Job configuration files (TOML). Unknown keys are rejected; parse errors
//! carry the line and column of the offending text.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::bernstein::{Atom, BernsteinFunction};
use crate::error::{Error, Result};
use crate::fock::{FieldOrdering, FockTruncation, Mode, NelsonInstance, DEFAULT_DIM_CAP};
use crate::krylov::KrylovOptions;
use crate::onebody::SolveOptions;
use crate::operators::{GridSpec, KineticProfile, PotentialSpec, TabulatedField};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub grid: Option<GridSpec>,
    /// Refinement sequence for a convergence study, coarse to fine.
    #[serde(default)]
    pub grids: Vec<GridSpec>,
    pub kinetic: Option<KineticConfig>,
    pub potential: Option<Spanned<toml::Table>>,
    pub bernstein: Option<BernsteinConfig>,
    pub nelson: Option<NelsonConfig>,
    #[serde(default)]
    pub lemma1: Lemma1Config,
    #[serde(default)]
    pub solver: SolverConfig,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KineticConfig {
    NonRelativistic { mass: f64 },
    SemiRelativistic { mass: f64 },
    /// `B(|k|²)` with `B` from the `[bernstein]` section.
    BernsteinComposed,
}

fn default_atoms() -> usize {
    400
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BernsteinConfig {
    /// `b u`
    Linear { b: f64 },
    /// `w (1 - e^{-t u})`
    OneMinusExp { rate: f64, weight: f64 },
    /// Atomic approximation of `sqrt(u + m²) - m`.
    SqrtShifted {
        mass: f64,
        #[serde(default = "default_atoms")]
        atoms: usize,
    },
    /// `a + b u + Σ w (1 - e^{-t u})` with `atoms = [[t, w], ...]`.
    Explicit {
        #[serde(default)]
        drift_a: f64,
        #[serde(default)]
        drift_b: f64,
        #[serde(default)]
        atoms: Vec<[f64; 2]>,
    },
}

impl BernsteinConfig {
    pub fn build(&self) -> Result<BernsteinFunction> {
        match self {
            BernsteinConfig::Linear { b } => BernsteinFunction::linear(*b),
            BernsteinConfig::OneMinusExp { rate, weight } => BernsteinFunction::one_minus_exp(*rate, *weight),
            BernsteinConfig::SqrtShifted { mass, atoms } => BernsteinFunction::sqrt_shifted(*mass, *atoms),
            BernsteinConfig::Explicit { drift_a, drift_b, atoms } => BernsteinFunction::new(
                *drift_a,
                *drift_b,
                atoms.iter().map(|[rate, weight]| Atom { rate: *rate, weight: *weight }).collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    /// Integer lattice labels `n` (momentum `2πn/L` per axis).
    pub label: Option<Vec<i64>>,
    /// Raw momentum; may be off the lattice (the translation check will say so).
    pub momentum: Option<Vec<f64>>,
    /// `[re, im]`
    #[serde(default)]
    pub coupling: [f64; 2],
    pub omega: f64,
}

fn default_n_max() -> u32 {
    2
}

fn default_dim_cap() -> usize {
    DEFAULT_DIM_CAP
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NelsonConfig {
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    /// Ascending coefficients of `P`.
    #[serde(default)]
    pub polynomial: Vec<f64>,
    #[serde(default)]
    pub ordering: FieldOrdering,
    #[serde(default = "default_dim_cap")]
    pub dim_cap: usize,
    #[serde(default)]
    pub modes: Vec<ModeConfig>,
    /// When positive, verify this many seeded random instances instead of
    /// the one described by the other keys.
    #[serde(default)]
    pub random_instances: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Lemma1Config {
    pub samples: usize,
    pub exp_samples: usize,
    pub dim: usize,
    pub max_atoms: usize,
    /// Momenta are drawn uniformly from `[-scale, scale]^dim`.
    pub scale: f64,
}

impl Default for Lemma1Config {
    fn default() -> Self {
        Self { samples: 10_000, exp_samples: 100_000, dim: 3, max_atoms: 4, scale: 3.0 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub basis_size: usize,
    /// Double `L` (and `N`) until the boundary mass is below 1e-8.
    pub auto_box: bool,
    pub max_doublings: usize,
    /// Error budget subtracted from `e0` before certifying binding.
    pub certificate_tolerance: f64,
    /// Dense cross-check of the particle–field energies up to this dimension.
    pub dense_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let k = KrylovOptions::default();
        Self {
            tol: k.tol,
            max_iter: k.max_iter,
            seed: k.seed,
            basis_size: k.basis_size,
            auto_box: false,
            max_doublings: 2,
            certificate_tolerance: 1e-3,
            dense_limit: 512,
        }
    }
}

impl SolverConfig {
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { tol: self.tol, max_iter: self.max_iter, seed: self.seed, basis_size: self.basis_size }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Dotted key of a numeric entry, e.g. `potential.charge`.
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// File stem; defaults to the subcommand name.
    pub name: Option<String>,
    pub format: Option<Format>,
    /// Also write the one-body ground vector in the tabulated format.
    #[serde(default)]
    pub eigenvector: bool,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

/// Offset of the first line at or after `from` that assigns `key`, if the
/// message names one (serde reports unknown fields at the table, not the key).
fn key_offset(text: &str, from: usize, msg: &str) -> Option<usize> {
    let key = msg.split('`').nth(1).filter(|_| msg.contains("unknown field"))?;
    let mut offset = from.min(text.len());
    offset = text[..offset].rfind('\n').map_or(0, |i| i + 1);
    for line in text[offset..].split_inclusive('\n') {
        let t = line.trim_start();
        if let Some(rest) = t.strip_prefix(key) {
            if rest.trim_start().starts_with('=') {
                return Some(offset + line.len() - t.len());
            }
        }
        offset += line.len();
    }
    None
}

impl JobConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e: toml::de::Error| {
            let Some(span) = e.span() else {
                return Error::Config(e.to_string());
            };
            let at = key_offset(text, span.start, e.message()).unwrap_or(span.start);
            let (line, col) = line_col(text, at);
            Error::Config(format!("line {line}, column {col}: {}", e.message()))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn section<T>(&self, name: &str, v: &Option<T>) -> Result<()> {
        if v.is_none() {
            return Err(Error::Config(format!("missing [{name}] section")));
        }
        Ok(())
    }

    pub fn bernstein_function(&self) -> Result<BernsteinFunction> {
        self.section("bernstein", &self.bernstein)?;
        self.bernstein.as_ref().unwrap().build()
    }

    pub fn kinetic_profile(&self) -> Result<KineticProfile> {
        self.section("kinetic", &self.kinetic)?;
        let profile = match self.kinetic.as_ref().unwrap() {
            KineticConfig::NonRelativistic { mass } => KineticProfile::non_relativistic(*mass)?,
            KineticConfig::SemiRelativistic { mass } => KineticProfile::semi_relativistic(*mass)?,
            KineticConfig::BernsteinComposed => KineticProfile::bernstein(self.bernstein_function()?)?,
        };
        Ok(profile)
    }

    /// The `[potential]` section; `kind = "tabulated"` reads `path`
    /// (relative to `base`) in the tabulated text format. `text` is the
    /// document the config was parsed from, used to anchor errors.
    pub fn potential_spec(&self, text: &str, base: &Path) -> Result<PotentialSpec> {
        let Some(section) = &self.potential else {
            return Ok(PotentialSpec::zero());
        };
        let table = section.get_ref();
        let at = |msg: String| {
            let start = section.span().start;
            let (line, col) = line_col(text, key_offset(text, start, &msg).unwrap_or(start));
            Error::Config(format!("[potential] at line {line}, column {col}: {msg}"))
        };
        if table.get("kind").and_then(|k| k.as_str()) == Some("tabulated") {
            if let Some(k) = table.keys().find(|k| *k != "kind" && *k != "path") {
                return Err(at(format!("unknown field `{k}` for a tabulated potential")));
            }
            let path = table
                .get("path")
                .and_then(|p| p.as_str())
                .ok_or_else(|| at("tabulated potential needs a `path`".into()))?;
            let table = TabulatedField::load(&base.join(path))?;
            return Ok(PotentialSpec::Tabulated { table });
        }
        let spec: PotentialSpec =
            toml::Value::Table(table.clone()).try_into().map_err(|e: toml::de::Error| at(e.message().to_string()))?;
        spec.validate().map_err(|e| at(e.to_string()))?;
        Ok(spec)
    }

    /// Grids for a one-body run: `grids` if given, else the single `grid`.
    pub fn onebody_grids(&self) -> Result<Vec<GridSpec>> {
        let grids = if self.grids.is_empty() {
            self.grid.into_iter().collect::<Vec<_>>()
        } else {
            self.grids.clone()
        };
        if grids.is_empty() {
            return Err(Error::Config("missing [grid] section or [[grids]] list".into()));
        }
        for g in &grids {
            g.validate().map_err(|e| Error::Config(format!("grid: {e}")))?;
        }
        Ok(grids)
    }

    /// The explicit particle–field instance described by `[nelson]`,
    /// `[grid]`, `[bernstein]` and `[potential]`.
    pub fn nelson_instance(&self, potential: PotentialSpec) -> Result<NelsonInstance> {
        self.section("nelson", &self.nelson)?;
        let cfg = self.nelson.as_ref().unwrap();
        let grid = self.grid.ok_or_else(|| Error::Config("missing [grid] section".into()))?;
        grid.validate().map_err(|e| Error::Config(format!("grid: {e}")))?;
        let modes = cfg
            .modes
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let coupling = Complex64::new(m.coupling[0], m.coupling[1]);
                match (&m.label, &m.momentum) {
                    (Some(label), None) => Ok(Mode::on_lattice(&grid, label, coupling, m.omega)),
                    (None, Some(k)) => Ok(Mode { momentum: k.clone(), coupling, omega: m.omega }),
                    _ => Err(Error::Config(format!("mode {i}: give exactly one of `label` or `momentum`"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut inst = NelsonInstance::new(
            grid,
            self.bernstein_function()?,
            FockTruncation { modes, n_max: cfg.n_max },
            cfg.polynomial.clone(),
            potential,
        );
        inst.ordering = cfg.ordering;
        inst.dim_cap = cfg.dim_cap;
        inst.validate()?;
        Ok(inst)
    }
}

/// Sets the dotted numeric key `path` in a parsed TOML document.
pub fn set_parameter(doc: &mut toml::Table, path: &str, value: f64) -> Result<()> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| Error::Config("empty sweep parameter".into()))?;
    let mut table = doc;
    for p in parts {
        table = table
            .get_mut(p)
            .and_then(|v| v.as_table_mut())
            .ok_or_else(|| Error::Config(format!("sweep parameter `{path}`: no table `{p}`")))?;
    }
    let slot = table.entry(last.to_string()).or_insert(toml::Value::Float(value));
    match slot {
        // keep integer keys (n_max, points) integral
        toml::Value::Integer(_) if value.fract() == 0.0 => *slot = toml::Value::Integer(value as i64),
        toml::Value::Float(_) => *slot = toml::Value::Float(value),
        toml::Value::Integer(_) => {
            return Err(Error::Config(format!("sweep parameter `{path}` takes integers, got {value}")));
        }
        _ => return Err(Error::Config(format!("sweep parameter `{path}` is not numeric"))),
    }
    Ok(())
}
