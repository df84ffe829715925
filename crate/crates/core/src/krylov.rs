//! Lowest eigenpair of a Hermitian operator given only its action on vectors.
//!
//! Lanczos with full (twice-iterated Gram–Schmidt) reorthogonalization and
//! thick restarts. The projected matrix is filled from the Gram–Schmidt
//! coefficients of every `H v_j`, so after a restart the retained Ritz vectors
//! and the new residual direction need no special bookkeeping.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Hermitian operator on `C^dim`.
pub trait HermitianOperator {
    fn dim(&self) -> usize;

    /// `out = H x`; `out` arrives zeroed.
    fn apply(&self, x: &[Complex64], out: &mut [Complex64]);

    fn apply_new(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.apply(x, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrylovOptions {
    /// Target for `‖Hx - θx‖`.
    pub tol: f64,
    /// Budget of operator applications.
    pub max_iter: usize,
    pub basis_size: usize,
    /// Ritz vectors kept across a restart.
    pub keep: usize,
    pub seed: u64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 5000, basis_size: 48, keep: 6, seed: 0x5eed }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn scale(v: &mut [Complex64], s: f64) {
    for z in v.iter_mut() {
        *z *= s;
    }
}

/// Removes the span of `basis` from `w`; returns the projection coefficients.
fn orthogonalize(basis: &[Vec<Complex64>], w: &mut [Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.len()];
    for _ in 0..2 {
        for (c, v) in coeffs.iter_mut().zip(basis) {
            let proj = inner(v, w);
            axpy(-proj, v, w);
            *c += proj;
        }
    }
    coeffs
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    (0..dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
}

/// Rotates `v` so its largest-magnitude component (first index on ties) is
/// real and positive.
pub fn normalize_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().position(|z| z.norm() >= max * (1.0 - 1e-12)).unwrap();
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}

fn lowest_ritz(projected: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let herm = (projected + projected.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(projected.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn combine(basis: &[Vec<Complex64>], coeffs: impl Iterator<Item = Complex64>) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); basis[0].len()];
    for (c, v) in coeffs.zip(basis) {
        axpy(c, v, &mut out);
    }
    out
}

fn check_finite(v: &[Complex64]) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric("operator application produced a non-finite value".into()))
    }
}

/// Lowest eigenpair of `op`. A result with `converged = false` is returned
/// (not an error) when the application budget runs out.
pub fn lowest_eigenpair<O: HermitianOperator + ?Sized>(op: &O, opts: &KrylovOptions) -> Result<Eigenpair> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::Empty("operator of dimension 0"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {}", opts.tol)));
    }
    let m_max = opts.basis_size.max(4).min(n);
    let keep = opts.keep.clamp(1, m_max.saturating_sub(2).max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut start = random_vector(&mut rng, n);
    let s = norm(&start);
    scale(&mut start, 1.0 / s);

    let mut basis: Vec<Vec<Complex64>> = vec![start];
    // projected[(i, j)] = <v_i, H v_j>
    let mut projected = DMatrix::<Complex64>::zeros(m_max, m_max);
    // columns of `projected` already filled (vectors whose image is known)
    let mut filled = 0usize;
    let mut applications = 0usize;
    let mut scale_estimate = 0.0f64;

    loop {
        // Expand until the basis is full, filling one column per application.
        let mut next: Option<Vec<Complex64>> = None;
        let mut beta = 0.0;
        while filled < basis.len() {
            let j = filled;
            let mut w = op.apply_new(&basis[j]);
            check_finite(&w)?;
            applications += 1;
            scale_estimate = scale_estimate.max(norm(&w));
            let coeffs = orthogonalize(&basis, &mut w);
            for (i, c) in coeffs.iter().enumerate() {
                projected[(i, j)] = *c;
                projected[(j, i)] = c.conj();
            }
            filled += 1;
            beta = norm(&w);
            let breakdown = beta <= 1e-13 * scale_estimate.max(1.0);
            if breakdown {
                beta = 0.0;
            }
            if basis.len() < m_max && basis.len() < n {
                let mut v = if breakdown {
                    // invariant subspace: continue from a fresh direction
                    let mut r = random_vector(&mut rng, n);
                    orthogonalize(&basis, &mut r);
                    r
                } else {
                    w
                };
                let nv = norm(&v);
                if nv == 0.0 {
                    break;
                }
                scale(&mut v, 1.0 / nv);
                basis.push(v);
            } else if !breakdown {
                scale(&mut w, 1.0 / beta);
                next = Some(w);
            }
            if applications >= opts.max_iter {
                break;
            }
        }

        let dim = filled;
        let sub = projected.view((0, 0), (dim, dim)).into_owned();
        let (values, vectors) = lowest_ritz(&sub);
        let theta = values[0];
        // ‖H y - θ y‖ = β |s_last| for the final residual direction
        let estimate = beta * vectors[(dim - 1, 0)].norm();
        let exhausted = applications >= opts.max_iter;
        let spans_all = dim == n;

        if estimate <= opts.tol || exhausted || spans_all || next.is_none() {
            let mut y = combine(&basis[..dim], vectors.column(0).iter().copied());
            let ny = norm(&y);
            scale(&mut y, 1.0 / ny);
            let mut r = op.apply_new(&y);
            check_finite(&r)?;
            applications += 1;
            axpy(Complex64::new(-theta, 0.0), &y, &mut r);
            let residual = norm(&r);
            if residual <= opts.tol || exhausted || spans_all {
                normalize_phase(&mut y);
                return Ok(Eigenpair {
                    value: theta,
                    vector: y,
                    residual,
                    iterations: applications,
                    converged: residual <= opts.tol,
                });
            }
            if next.is_none() {
                // basis full with an exact breakdown but the residual is not
                // small: restart from the Ritz vector alone
                basis = vec![y];
                projected.fill(Complex64::new(0.0, 0.0));
                filled = 0;
                continue;
            }
        }

        // Thick restart: keep the lowest Ritz vectors, then the residual direction.
        let k = keep.min(dim - 1);
        let mut kept: Vec<Vec<Complex64>> =
            (0..k).map(|c| combine(&basis[..dim], vectors.column(c).iter().copied())).collect();
        // re-orthonormalize against drift
        for i in 0..kept.len() {
            let (done, rest) = kept.split_at_mut(i);
            let v = &mut rest[0];
            orthogonalize(done, v);
            let nv = norm(v);
            scale(v, 1.0 / nv);
        }
        projected.fill(Complex64::new(0.0, 0.0));
        for (i, value) in values.iter().take(k).enumerate() {
            projected[(i, i)] = Complex64::new(*value, 0.0);
        }
        let mut tail = next.expect("residual direction present");
        orthogonalize(&kept, &mut tail);
        let nt = norm(&tail);
        scale(&mut tail, 1.0 / nt);
        kept.push(tail);
        basis = kept;
        filled = k;
    }
}

/// Materializes `op` as a dense matrix by applying it to the unit vectors.
pub fn to_dense<O: HermitianOperator + ?Sized>(op: &O) -> DMatrix<Complex64> {
    let n = op.dim();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = Complex64::new(1.0, 0.0);
        let col = op.apply_new(&e);
        e[j] = Complex64::new(0.0, 0.0);
        for (i, v) in col.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

/// `max |H - H†|` of a dense matrix.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Ascending eigenvalues of a dense Hermitian matrix (the dense oracle).
pub fn dense_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut values: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Dense-matrix wrapper, mostly for tests and oracles.
#[derive(Debug, Clone)]
pub struct DenseOperator(pub DMatrix<Complex64>);

impl HermitianOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    }

    #[test]
    fn matches_dense_on_random_matrices() {
        for (n, seed) in [(1, 1), (3, 2), (17, 3), (60, 4), (150, 5)] {
            let m = random_hermitian(n, seed);
            let exact = dense_eigenvalues(&m)[0];
            let opts = KrylovOptions { tol: 1e-11, basis_size: 20, ..Default::default() };
            let pair = lowest_eigenpair(&DenseOperator(m), &opts).unwrap();
            assert!(pair.converged, "n={n}");
            assert!((pair.value - exact).abs() < 1e-10, "n={n}: {} vs {exact}", pair.value);
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let n = 30;
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(if i < 5 { -1.0 } else { i as f64 }, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let pair = lowest_eigenpair(&DenseOperator(m), &KrylovOptions::default()).unwrap();
        assert!(pair.converged);
        assert!((pair.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let m = random_hermitian(80, 9);
        let opts = KrylovOptions { basis_size: 12, ..Default::default() };
        let a = lowest_eigenpair(&DenseOperator(m.clone()), &opts).unwrap();
        let b = lowest_eigenpair(&DenseOperator(m), &opts).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let m = random_hermitian(200, 11);
        let opts = KrylovOptions { tol: 1e-14, max_iter: 6, basis_size: 5, ..Default::default() };
        let pair = lowest_eigenpair(&DenseOperator(m), &opts).unwrap();
        assert!(!pair.converged);
    }

    #[test]
    fn nan_operator_is_a_numeric_error() {
        let mut m = random_hermitian(5, 1);
        m[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(lowest_eigenpair(&DenseOperator(m), &KrylovOptions::default()), Err(Error::Numeric(_))));
    }

    #[test]
    fn phase_normalization() {
        let mut v = vec![Complex64::new(0.0, 0.5), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)];
        normalize_phase(&mut v);
        assert!((v[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }
}
