// Independent dense oracles. Nothing here goes through the crate's FFT,
// Lanczos or Fock code: the kinetic matrix is an explicit Fourier sum, the
// field operators are explicit ladder matrices.
#![allow(dead_code)]

use std::f64::consts::PI;

use bindcert::fock::{FieldOrdering, NelsonInstance};
use bindcert::operators::potential_on_grid;
use nalgebra::DMatrix;
use num_complex::Complex64 as C;

pub fn lowest(m: &DMatrix<C>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn label(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn multi(mut flat: usize, dim: usize, n: usize) -> Vec<usize> {
    let mut idx = vec![0; dim];
    for a in (0..dim).rev() {
        idx[a] = flat % n;
        flat /= n;
    }
    idx
}

/// Position-space matrix of `K(p)` on a periodic lattice, `kinetic` a
/// function of the momentum vector.
pub fn dense_kinetic(dim: usize, length: f64, n: usize, kinetic: &dyn Fn(&[f64]) -> f64) -> DMatrix<C> {
    let sites = n.pow(dim as u32);
    let dk = 2.0 * PI / length;
    let h = length / n as f64;
    // c(m) = N^{-d} Σ_k K(k) e^{i k·m h}, a function of the site difference
    let conv: Vec<C> = (0..sites)
        .map(|m| {
            let dm = multi(m, dim, n);
            (0..sites)
                .map(|kf| {
                    let kl = multi(kf, dim, n);
                    let k: Vec<f64> = kl.iter().map(|&i| dk * label(i, n) as f64).collect();
                    let phase: f64 = k.iter().zip(&dm).map(|(k, &d)| k * d as f64 * h).sum();
                    C::from_polar(kinetic(&k), phase)
                })
                .sum::<C>()
                / sites as f64
        })
        .collect();
    DMatrix::from_fn(sites, sites, |j, l| {
        let a = multi(j, dim, n);
        let b = multi(l, dim, n);
        let d: Vec<usize> = a.iter().zip(&b).map(|(x, y)| (x + n - y) % n).collect();
        conv[d.iter().fold(0, |acc, &i| acc * n + i)]
    })
}

/// `K + V` in the plane-wave basis: `K` is exactly diagonal there and only
/// the (small) potential goes through an explicit DFT, so the oracle's own
/// rounding stays at `ε·max|V|` even when `‖K‖` is large.
pub fn dense_onebody(dim: usize, length: f64, n: usize, kinetic: &dyn Fn(&[f64]) -> f64, v: &[f64]) -> DMatrix<C> {
    let sites = n.pow(dim as u32);
    let dk = 2.0 * PI / length;
    // v̂(q) = N^{-d} Σ_j V_j e^{-2πi q·j/N}, phases reduced exactly mod N
    let vhat: Vec<C> = (0..sites)
        .map(|q| {
            let qi = multi(q, dim, n);
            v.iter()
                .enumerate()
                .map(|(j, &vj)| {
                    let ji = multi(j, dim, n);
                    let r = qi.iter().zip(&ji).map(|(a, b)| a * b).sum::<usize>() % n;
                    C::from_polar(vj, -2.0 * PI * r as f64 / n as f64)
                })
                .sum::<C>()
                / sites as f64
        })
        .collect();
    DMatrix::from_fn(sites, sites, |a, b| {
        let ai = multi(a, dim, n);
        let bi = multi(b, dim, n);
        let d: Vec<usize> = ai.iter().zip(&bi).map(|(x, y)| (x + n - y) % n).collect();
        let mut h = vhat[d.iter().fold(0, |acc, &i| acc * n + i)];
        if a == b {
            let k: Vec<f64> = ai.iter().map(|&i| dk * label(i, n) as f64).collect();
            h += kinetic(&k);
        }
        h
    })
}

/// All occupation tuples with each entry ≤ cap.
fn occupations(modes: usize, cap: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..modes {
        out = out
            .into_iter()
            .flat_map(|o| {
                (0..=cap).map(move |n| {
                    let mut v = o.clone();
                    v.push(n);
                    v
                })
            })
            .collect();
    }
    out
}

/// Dense Hamiltonian of a d=1 particle–field instance. With `with_potential`
/// false this is `H⁰`.
pub fn dense_nelson(inst: &NelsonInstance, with_potential: bool) -> DMatrix<C> {
    let grid = inst.grid;
    assert_eq!(grid.dim, 1);
    let sites = grid.points;
    let modes = &inst.truncation.modes;
    let cap = inst.truncation.n_max;
    let deg = inst.polynomial.iter().rposition(|&c| c != 0.0).unwrap_or(0) as u32;
    let big_cap = match inst.ordering {
        FieldOrdering::Compressed => cap + deg,
        FieldOrdering::TruncatedFirst => cap,
    };
    let big = occupations(modes.len(), big_cap);
    let small: Vec<usize> = (0..big.len()).filter(|&i| big[i].iter().all(|&n| n <= cap)).collect();
    let find = |o: &Vec<u32>| big.iter().position(|b| b == o);
    let fdim = small.len();
    let b = &inst.bernstein;
    let kin = dense_kinetic(1, grid.length, sites, &|k| b.evaluate(k[0] * k[0]).unwrap());
    let v = potential_on_grid(&inst.potential, &grid).unwrap().values;
    let dim = sites * fdim;
    let mut h = DMatrix::<C>::zeros(dim, dim);
    for j in 0..sites {
        for l in 0..sites {
            for s in 0..fdim {
                h[(j * fdim + s, l * fdim + s)] = kin[(j, l)];
            }
        }
    }
    for (s, &bi) in small.iter().enumerate() {
        let w: f64 = big[bi].iter().zip(modes).map(|(&n, m)| n as f64 * m.omega).sum();
        for j in 0..sites {
            h[(j * fdim + s, j * fdim + s)] += w;
        }
    }
    for j in 0..sites {
        let x = -0.5 * grid.length + j as f64 * grid.spacing();
        let mut phi = DMatrix::<C>::zeros(big.len(), big.len());
        for (t, occ) in big.iter().enumerate() {
            for (m, mode) in modes.iter().enumerate() {
                let e = C::from_polar(1.0, -mode.momentum[0] * x);
                let mut up = occ.clone();
                up[m] += 1;
                if let Some(u) = find(&up) {
                    phi[(u, t)] += mode.coupling * e * ((occ[m] + 1) as f64 / 2.0).sqrt();
                }
                if occ[m] > 0 {
                    let mut down = occ.clone();
                    down[m] -= 1;
                    let d = find(&down).unwrap();
                    phi[(d, t)] += mode.coupling.conj() * e.conj() * (occ[m] as f64 / 2.0).sqrt();
                }
            }
        }
        let mut p = DMatrix::<C>::zeros(big.len(), big.len());
        let mut power = DMatrix::<C>::identity(big.len(), big.len());
        for c in &inst.polynomial {
            p += &power * C::new(*c, 0.0);
            power = &power * &phi;
        }
        for (s, &bs) in small.iter().enumerate() {
            for (t, &bt) in small.iter().enumerate() {
                h[(j * fdim + s, j * fdim + t)] += p[(bs, bt)];
            }
            if with_potential {
                h[(j * fdim + s, j * fdim + s)] += v[j];
            }
        }
    }
    h
}
