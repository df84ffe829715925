use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// How a Coulomb-type singularity is turned into finite lattice samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// `-Z / sqrt(|x|^2 + ε^2)` at each lattice point.
    #[default]
    Softened,
    /// Exact average of `-Z/|x|` over the lattice cell (d = 2, 3).
    CellAveraged,
}

/// External potential `V(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `-Z/|x|`. `softening = None` means one lattice spacing.
    Coulomb {
        charge: f64,
        #[serde(default)]
        softening: Option<f64>,
        #[serde(default)]
        sampling: Sampling,
    },
    /// `-g e^{-μ|x|} / |x|`, softened like Coulomb.
    Yukawa {
        strength: f64,
        range: f64,
        #[serde(default)]
        softening: Option<f64>,
    },
    /// `-V₀ exp(-|x|²/2σ²)`
    GaussianWell { depth: f64, width: f64 },
    /// `-V₀` for `|x| < R`, else 0
    SquareWell { depth: f64, radius: f64 },
    /// `ω² |x|² / 2`
    Harmonic { stiffness: f64 },
    Constant { value: f64 },
    /// Samples on their own lattice, resampled by nearest neighbour.
    Tabulated { table: TabulatedField },
}

impl PotentialSpec {
    pub fn zero() -> Self {
        Self::Constant { value: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")))
            }
        };
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
            }
        };
        let softening_ok = |s: Option<f64>| match s {
            Some(e) if !(e.is_finite() && e >= 0.0) => {
                Err(Error::InvalidParameter(format!("softening must be >= 0, got {e}")))
            }
            _ => Ok(()),
        };
        match self {
            Self::Coulomb { charge, softening, .. } => {
                finite("charge", *charge)?;
                softening_ok(*softening)
            }
            Self::Yukawa { strength, range, softening } => {
                finite("strength", *strength)?;
                if !(range.is_finite() && *range >= 0.0) {
                    return Err(Error::InvalidParameter(format!("range must be >= 0, got {range}")));
                }
                softening_ok(*softening)
            }
            Self::GaussianWell { depth, width } => {
                finite("depth", *depth)?;
                positive("width", *width)
            }
            Self::SquareWell { depth, radius } => {
                finite("depth", *depth)?;
                positive("radius", *radius)
            }
            Self::Harmonic { stiffness } => finite("stiffness", *stiffness),
            Self::Constant { value } => finite("value", *value),
            Self::Tabulated { table } => table.validate(),
        }
    }

    /// Pointwise value; `None` at an unsoftened singularity.
    pub fn evaluate(&self, x: &[f64], spacing: f64) -> Option<f64> {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let eps = |s: &Option<f64>| s.unwrap_or(spacing);
        let v = match self {
            Self::Coulomb { charge, softening, .. } => {
                let denom = (r2 + eps(softening).powi(2)).sqrt();
                if denom == 0.0 {
                    return None;
                }
                -charge / denom
            }
            Self::Yukawa { strength, range, softening } => {
                let denom = (r2 + eps(softening).powi(2)).sqrt();
                if denom == 0.0 {
                    return None;
                }
                -strength * (-range * r2.sqrt()).exp() / denom
            }
            Self::GaussianWell { depth, width } => -depth * (-r2 / (2.0 * width * width)).exp(),
            Self::SquareWell { depth, radius } => {
                if r2.sqrt() < *radius {
                    -depth
                } else {
                    0.0
                }
            }
            Self::Harmonic { stiffness } => 0.5 * stiffness * stiffness * r2,
            Self::Constant { value } => *value,
            Self::Tabulated { table } => table.nearest(x),
        };
        Some(v)
    }
}

/// Real field on the position lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl PositionField {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn potential_on_grid(spec: &PotentialSpec, grid: &GridSpec) -> Result<PositionField> {
    spec.validate()?;
    grid.validate()?;
    if let PotentialSpec::Tabulated { table } = spec {
        if table.grid.dim != grid.dim {
            return Err(Error::Dimension { expected: grid.dim, got: table.grid.dim });
        }
    }
    let h = grid.spacing();
    let cell_averaged = matches!(spec, PotentialSpec::Coulomb { sampling: Sampling::CellAveraged, .. });
    if cell_averaged && grid.dim == 1 {
        return Err(Error::InvalidParameter("1/|x| is not locally integrable in d = 1; cell averaging undefined".into()));
    }
    let mut values = Vec::with_capacity(grid.len());
    for flat in 0..grid.len() {
        let x = grid.position(flat);
        let v = match spec {
            PotentialSpec::Coulomb { charge, sampling: Sampling::CellAveraged, .. } => {
                -charge * inverse_distance_cell_average(&x[..grid.dim], h)
            }
            _ => spec.evaluate(&x[..grid.dim], h).ok_or(Error::Singularity { index: flat })?,
        };
        values.push(v);
    }
    Ok(PositionField { grid: *grid, values })
}

/// Average of `1/|x|` over the cube (square in d = 2) of side `h` centred at `centre`.
pub fn inverse_distance_cell_average(centre: &[f64], h: f64) -> f64 {
    let lo: Vec<f64> = centre.iter().map(|c| c - 0.5 * h).collect();
    let hi: Vec<f64> = centre.iter().map(|c| c + 0.5 * h).collect();
    match centre.len() {
        2 => {
            let mut total = 0.0;
            for (xi, sx) in [(hi[0], 1.0), (lo[0], -1.0)] {
                for (yi, sy) in [(hi[1], 1.0), (lo[1], -1.0)] {
                    total += sx * sy * antiderivative_2d(xi, yi);
                }
            }
            total / (h * h)
        }
        3 => {
            let mut total = 0.0;
            for (xi, sx) in [(hi[0], 1.0), (lo[0], -1.0)] {
                for (yi, sy) in [(hi[1], 1.0), (lo[1], -1.0)] {
                    for (zi, sz) in [(hi[2], 1.0), (lo[2], -1.0)] {
                        total += sx * sy * sz * antiderivative_3d(xi, yi, zi);
                    }
                }
            }
            total / (h * h * h)
        }
        d => panic!("cell average of 1/|x| is only defined for d = 2, 3 (got {d})"),
    }
}

/// `a ln(b + r)` with the `a = 0` limit taken as 0.
fn weighted_log(a: f64, b: f64, r: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * (b + r).ln()
    }
}

/// `a²/2 atan(bc / (a r))` with the `a = 0` limit taken as 0.
fn weighted_atan(a: f64, b: f64, c: f64, r: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        0.5 * a * a * (b * c / (a * r)).atan()
    }
}

/// Antiderivative of `1/sqrt(x²+y²)` in x and y.
fn antiderivative_2d(x: f64, y: f64) -> f64 {
    let r = (x * x + y * y).sqrt();
    weighted_log(x, y, r) + weighted_log(y, x, r)
}

/// Antiderivative of `1/sqrt(x²+y²+z²)` in x, y and z.
fn antiderivative_3d(x: f64, y: f64, z: f64) -> f64 {
    let r = (x * x + y * y + z * z).sqrt();
    weighted_log(y * z, x, r) + weighted_log(x * z, y, r) + weighted_log(x * y, z, r)
        - weighted_atan(x, y, z, r)
        - weighted_atan(y, x, z, r)
        - weighted_atan(z, x, y, r)
}

/// Scalar samples on a periodic lattice, in the plain-text format
///
/// ```text
/// d L N
/// v_0
/// v_1
/// ...
/// ```
///
/// with `N^d` values in row-major order. Used both for tabulated potentials
/// and for exporting eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl TabulatedField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        let field = Self { grid, values };
        field.validate()?;
        Ok(field)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.values.len() != self.grid.len() {
            return Err(Error::Dimension { expected: self.grid.len(), got: self.values.len() });
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("tabulated value {v} is not finite")));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Empty("tabulated field"))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("line 1: expected header `d L N`, got `{header}`")));
        }
        let bad = |what: &str| Error::Config(format!("line 1: invalid {what} in header `{header}`"));
        let dim: usize = parts[0].parse().map_err(|_| bad("d"))?;
        let length: f64 = parts[1].parse().map_err(|_| bad("L"))?;
        let points: usize = parts[2].parse().map_err(|_| bad("N"))?;
        let grid = GridSpec::new(dim, length, points)?;
        let values = lines
            .map(|(i, l)| {
                l.trim().parse::<f64>().map_err(|_| Error::Config(format!("line {}: invalid value `{}`", i + 1, l.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        Self::new(grid, values)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {} {}", self.grid.dim, self.grid.length, self.grid.points).unwrap();
        for v in &self.values {
            writeln!(out, "{v:.17e}").unwrap();
        }
        out
    }

    /// Nearest lattice sample, wrapping periodically.
    pub fn nearest(&self, x: &[f64]) -> f64 {
        let h = self.grid.spacing();
        let n = self.grid.points as i64;
        let mut idx = [0usize; 3];
        for (axis, xi) in x.iter().enumerate().take(self.grid.dim) {
            let j = ((xi + 0.5 * self.grid.length) / h).round() as i64;
            idx[axis] = j.rem_euclid(n) as usize;
        }
        self.values[self.grid.flatten(&idx)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_samples() {
        let g1 = GridSpec::new(1, 4.0, 8).unwrap();
        let harmonic = PotentialSpec::Harmonic { stiffness: 1.0 };
        assert_eq!(harmonic.evaluate(&[0.0], g1.spacing()), Some(0.0));

        let coulomb = PotentialSpec::Coulomb { charge: 1.0, softening: Some(0.1), sampling: Sampling::Softened };
        assert!((coulomb.evaluate(&[0.0, 0.0, 0.0], 1.0).unwrap() + 10.0).abs() < 1e-12);

        let well = PotentialSpec::SquareWell { depth: 1.0, radius: 1.0 };
        assert_eq!(well.evaluate(&[0.5], 1.0), Some(-1.0));
        assert_eq!(well.evaluate(&[1.5], 1.0), Some(0.0));
    }

    #[test]
    fn unsoftened_coulomb_hits_the_origin() {
        let grid = GridSpec::new(3, 10.0, 8).unwrap();
        let spec = PotentialSpec::Coulomb { charge: 1.0, softening: Some(0.0), sampling: Sampling::Softened };
        assert!(matches!(potential_on_grid(&spec, &grid), Err(Error::Singularity { .. })));
        let averaged = PotentialSpec::Coulomb { charge: 1.0, softening: Some(0.0), sampling: Sampling::CellAveraged };
        let field = potential_on_grid(&averaged, &grid).unwrap();
        assert!(field.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn default_softening_is_one_spacing() {
        let grid = GridSpec::new(3, 8.0, 8).unwrap();
        let spec = PotentialSpec::Coulomb { charge: 2.0, softening: None, sampling: Sampling::Softened };
        let field = potential_on_grid(&spec, &grid).unwrap();
        let origin = grid.flatten(&[4, 4, 4]);
        assert!((field.values[origin] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn cell_average_matches_known_constants() {
        // mean of 1/|x| over the unit cube centred at the origin
        assert!((inverse_distance_cell_average(&[0.0, 0.0, 0.0], 1.0) - 2.380_077_363_979_553_6).abs() < 1e-12);
        // scales as 1/h
        assert!((inverse_distance_cell_average(&[0.0, 0.0, 0.0], 0.5) - 2.0 * 2.380_077_363_979_553_6).abs() < 1e-11);
        // far cells approach the point value
        let far = inverse_distance_cell_average(&[10.0, 3.0, -4.0], 0.1);
        assert!((far - 1.0 / (125.0f64).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn cell_average_against_midpoint_quadrature() {
        for centre in [[1.0, 0.5, 0.0], [0.3, -0.2, 0.7]] {
            let m = 60;
            let mut sum = 0.0;
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        let p = [
                            centre[0] - 0.5 + (i as f64 + 0.5) / m as f64,
                            centre[1] - 0.5 + (j as f64 + 0.5) / m as f64,
                            centre[2] - 0.5 + (k as f64 + 0.5) / m as f64,
                        ];
                        sum += 1.0 / (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                    }
                }
            }
            let quad = sum / (m * m * m) as f64;
            let exact = inverse_distance_cell_average(&centre, 1.0);
            assert!((quad - exact).abs() < 2e-3 * exact, "{centre:?}: {quad} vs {exact}");
        }
        // 2D: mean of 1/|x| over the unit square centred at the origin is 4 asinh(1)
        let exact_2d = 4.0 * (1.0f64).asinh();
        assert!((inverse_distance_cell_average(&[0.0, 0.0], 1.0) - exact_2d).abs() < 1e-12);
    }

    #[test]
    fn tabulated_roundtrip_and_nearest() {
        let grid = GridSpec::new(1, 4.0, 4).unwrap();
        let table = TabulatedField::new(grid, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let parsed = TabulatedField::parse(&table.render()).unwrap();
        assert_eq!(parsed, table);
        // lattice -2, -1, 0, 1
        assert_eq!(table.nearest(&[-0.9]), 2.0);
        assert_eq!(table.nearest(&[1.9]), 1.0);
        assert!(TabulatedField::parse("1 4.0 4\n1\n2\n").is_err());
        assert!(TabulatedField::parse("1 4.0\n1\n").is_err());
        let err = TabulatedField::parse("1 4.0 4\n1\n2\nx\n4\n").unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
    }

    #[test]
    fn one_dimensional_cell_average_is_rejected() {
        let grid = GridSpec::new(1, 4.0, 8).unwrap();
        let spec = PotentialSpec::Coulomb { charge: 1.0, softening: None, sampling: Sampling::CellAveraged };
        assert!(potential_on_grid(&spec, &grid).is_err());
    }
}
