//! Truncated boson modes and the field polynomial at the origin.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Occupation-number basis of `modes` bosonic modes, each capped at `cap`.
/// State index `s = Σ_m n_m (cap+1)^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasis {
    pub modes: usize,
    pub cap: u32,
}

impl FockBasis {
    pub fn len(&self) -> usize {
        (self.cap as usize + 1).pow(self.modes as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn occupations(&self, mut s: usize) -> Vec<u32> {
        let base = self.cap as usize + 1;
        (0..self.modes)
            .map(|_| {
                let n = (s % base) as u32;
                s /= base;
                n
            })
            .collect()
    }

    pub fn index(&self, occ: &[u32]) -> usize {
        let base = self.cap as usize + 1;
        occ.iter().rev().fold(0, |acc, &n| acc * base + n as usize)
    }

    /// Index in a basis with a larger cap holding the same occupations.
    pub fn embed(&self, s: usize, larger: &FockBasis) -> usize {
        larger.index(&self.occupations(s))
    }
}

/// Rows of a square sparse complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.rows[r].iter().find(|(j, _)| *j == c).map(|(_, v)| *v).unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        self.rows.iter().flatten().map(|(_, v)| v.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                worst = worst.max((v - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// `(A + A†)/2`, dropping exact zeros.
    pub fn symmetrized(&self) -> Self {
        let n = self.dim();
        let mut acc: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); n];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                *acc[r].entry(c).or_default() += v * 0.5;
                *acc[c].entry(r).or_default() += v.conj() * 0.5;
            }
        }
        let rows = acc
            .into_iter()
            .map(|m| {
                let mut row: Vec<(usize, Complex64)> = m.into_iter().filter(|(_, v)| *v != Complex64::default()).collect();
                row.sort_by_key(|(c, _)| *c);
                row
            })
            .collect();
        Self { rows }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] += v;
            }
        }
        m
    }
}

/// How the polynomial of the field is truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldOrdering {
    /// Compression of the untruncated `P(φ)` onto the capped space:
    /// intermediate states may exceed the cap by up to `deg/2` quanta.
    /// Raising the cap then only enlarges a nested subspace.
    #[default]
    Compressed,
    /// Polynomial of the already truncated field matrix.
    TruncatedFirst,
}

/// `φ(0) v` on a sparse vector: `(1/√2) Σ_m (g_m a_m* + conj(g_m) a_m)`.
fn apply_field(basis: &FockBasis, couplings: &[Complex64], v: &BTreeMap<usize, Complex64>) -> BTreeMap<usize, Complex64> {
    let mut out: BTreeMap<usize, Complex64> = BTreeMap::new();
    let stride: Vec<usize> = (0..basis.modes).map(|m| (basis.cap as usize + 1).pow(m as u32)).collect();
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for (&s, &amp) in v {
        let occ = basis.occupations(s);
        for (m, g) in couplings.iter().enumerate() {
            let n = occ[m];
            if n < basis.cap {
                *out.entry(s + stride[m]).or_default() += amp * g * (half * ((n + 1) as f64).sqrt());
            }
            if n > 0 {
                *out.entry(s - stride[m]).or_default() += amp * g.conj() * (half * (n as f64).sqrt());
            }
        }
    }
    out
}

/// Degree after dropping trailing zero coefficients (`None` for the zero polynomial).
pub fn degree(coeffs: &[f64]) -> Option<usize> {
    coeffs.iter().rposition(|&c| c != 0.0)
}

/// Matrix of `P(φ(0))` on the capped basis, `coeffs` ascending.
pub fn field_polynomial(
    couplings: &[Complex64],
    cap: u32,
    coeffs: &[f64],
    ordering: FieldOrdering,
) -> Result<SparseMatrix> {
    if coeffs.iter().any(|c| !c.is_finite()) || couplings.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
        return Err(Error::InvalidParameter("non-finite field coefficient".into()));
    }
    let basis = FockBasis { modes: couplings.len(), cap };
    let Some(deg) = degree(coeffs) else {
        return Ok(SparseMatrix { rows: vec![Vec::new(); basis.len()] });
    };
    let work = match ordering {
        FieldOrdering::Compressed => FockBasis { modes: basis.modes, cap: cap + (deg / 2) as u32 },
        FieldOrdering::TruncatedFirst => basis,
    };
    let mut columns: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(basis.len());
    for t in 0..basis.len() {
        let start = basis.embed(t, &work);
        let mut v: BTreeMap<usize, Complex64> = BTreeMap::new();
        v.insert(start, Complex64::new(coeffs[deg], 0.0));
        for r in (0..deg).rev() {
            v = apply_field(&work, couplings, &v);
            *v.entry(start).or_default() += coeffs[r];
        }
        let mut col: Vec<(usize, Complex64)> = v
            .into_iter()
            .filter_map(|(s, a)| {
                let occ = work.occupations(s);
                (occ.iter().all(|&n| n <= cap) && a != Complex64::default()).then(|| (basis.index(&occ), a))
            })
            .collect();
        col.sort_by_key(|(s, _)| *s);
        columns.push(col);
    }
    // transpose columns into rows
    let mut rows = vec![Vec::new(); basis.len()];
    for (t, col) in columns.into_iter().enumerate() {
        for (s, a) in col {
            rows[s].push((t, a));
        }
    }
    Ok(SparseMatrix { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_roundtrip() {
        let b = FockBasis { modes: 3, cap: 2 };
        assert_eq!(b.len(), 27);
        for s in 0..b.len() {
            assert_eq!(b.index(&b.occupations(s)), s);
        }
        assert_eq!(b.occupations(1 + 2 * 3 + 9), vec![1, 2, 1]);
        let big = FockBasis { modes: 3, cap: 4 };
        assert_eq!(big.occupations(b.embed(16, &big)), b.occupations(16));
    }

    #[test]
    fn vacuum_expectation_of_square() {
        let g = [c(0.7, -0.2), c(-1.1, 0.4), c(0.3, 0.0)];
        let expected = 0.5 * g.iter().map(|z| z.norm_sqr()).sum::<f64>();
        for ordering in [FieldOrdering::Compressed, FieldOrdering::TruncatedFirst] {
            let p = field_polynomial(&g, 1, &[0.0, 0.0, 1.0], ordering).unwrap();
            assert!((p.get(0, 0).re - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn single_mode_matrices() {
        // one mode, cap 1: φ = (g a* + g* a)/√2 is [[0, g*/√2],[g/√2, 0]]
        let g = c(0.6, 0.8);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = field_polynomial(&[g], 1, &[0.0, 1.0], FieldOrdering::Compressed).unwrap();
        assert!((phi.get(1, 0) - g * s).norm() < 1e-15);
        assert!((phi.get(0, 1) - g.conj() * s).norm() < 1e-15);
        // φ² compressed: <1|φ²|1> = |g|²/2 (2 + 1) because <1|a a*|1> = 2
        let sq = field_polynomial(&[g], 1, &[0.0, 0.0, 1.0], FieldOrdering::Compressed).unwrap();
        assert!((sq.get(1, 1).re - 1.5).abs() < 1e-15);
        let sq_t = field_polynomial(&[g], 1, &[0.0, 0.0, 1.0], FieldOrdering::TruncatedFirst).unwrap();
        assert!((sq_t.get(1, 1).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn polynomial_is_hermitian() {
        let g = [c(0.4, 0.3), c(-0.2, 0.9)];
        let p = field_polynomial(&g, 3, &[0.3, -1.0, 0.5, 0.2, 0.7], FieldOrdering::Compressed).unwrap();
        assert!(p.hermiticity_defect() < 1e-13);
        assert_eq!(p.dim(), 16);
    }

    #[test]
    fn zero_polynomial() {
        let p = field_polynomial(&[c(1.0, 0.0)], 2, &[0.0, 0.0], FieldOrdering::Compressed).unwrap();
        assert_eq!(p.nnz(), 0);
        assert_eq!(degree(&[1.0, 0.0]), Some(0));
        assert_eq!(degree(&[]), None);
    }
}
