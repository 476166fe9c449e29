#![allow(dead_code)]

use frontal_core::bdlr::LowRankFactor;
use frontal_core::{DenseMat, HodlrMatrix, SparseMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Row-major dense copy of a sparse matrix.
pub fn dense_rows(a: &SparseMatrix) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; a.ncols()]; a.nrows()];
    for (i, j, v) in a.triplets() {
        m[i][j] += v;
    }
    m
}

/// Gaussian elimination with partial pivoting on a row-major copy.
pub fn oracle_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
        m.swap(k, p);
        x.swap(k, p);
        assert!(m[k][k] != 0.0, "oracle: singular matrix");
        let pivot = m[k].clone();
        for i in k + 1..n {
            let l = m[i][k] / pivot[k];
            if l != 0.0 {
                for (a, p) in m[i][k..].iter_mut().zip(&pivot[k..]) {
                    *a -= l * p;
                }
                x[i] -= l * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (x[k] - s) / m[k][k];
    }
    x
}

pub fn oracle_matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn rel_err(x: &[f64], y: &[f64]) -> f64 {
    let d: f64 = x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let n: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    d / n.max(f64::MIN_POSITIVE)
}

pub fn rel_frob(a: &DenseMat, b: &DenseMat) -> f64 {
    a.sub(b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

pub fn random_dense(r: &mut impl Rng, rows: usize, cols: usize) -> DenseMat {
    DenseMat::from_fn(rows, cols, |_, _| r.gen_range(-1.0..1.0))
}

/// Random sparse matrix with a dominant diagonal and roughly `per_row`
/// off-diagonal entries per row; `symmetric` mirrors the pattern.
pub fn random_sparse(r: &mut impl Rng, n: usize, per_row: usize, symmetric: bool) -> SparseMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, per_row as f64 * 2.0 + 1.0 + r.gen_range(0.0..1.0)));
        for _ in 0..per_row {
            let j = r.gen_range(0..n);
            if j != i {
                let v = r.gen_range(-1.0..1.0);
                t.push((i, j, v));
                if symmetric {
                    t.push((j, i, v));
                } else if r.gen_bool(0.5) {
                    t.push((j, i, r.gen_range(-1.0..1.0)));
                }
            }
        }
    }
    SparseMatrix::from_triplets(n, n, t).unwrap()
}

/// Random HODLR matrix and its dense value, assembled entry by entry.
pub fn random_hodlr(r: &mut impl Rng, n: usize, leaf: usize, max_rank: usize) -> (HodlrMatrix, Vec<Vec<f64>>) {
    if n <= leaf {
        let mut d = random_dense(r, n, n);
        for i in 0..n {
            d[(i, i)] += 2.0 * n as f64;
        }
        let rows = (0..n).map(|i| (0..n).map(|j| d[(i, j)]).collect()).collect();
        return (HodlrMatrix::from_dense(d), rows);
    }
    let n1 = n / 2;
    let n2 = n - n1;
    let (h1, d1) = random_hodlr(r, n1, leaf, max_rank);
    let (h2, d2) = random_hodlr(r, n2, leaf, max_rank);
    let mut factor = |rows: usize, cols: usize| {
        let k = r.gen_range(0..=max_rank);
        let c = random_dense(r, rows, k);
        let rt = random_dense(r, k, cols);
        let dense: Vec<Vec<f64>> = (0..rows)
            .map(|i| {
                (0..cols)
                    .map(|j| (0..k).map(|l| c[(i, l)] * rt[(l, j)]).sum())
                    .collect()
            })
            .collect();
        (LowRankFactor::from_factors(c, rt), dense)
    };
    let (up, dup) = factor(n1, n2);
    let (lo, dlo) = factor(n2, n1);
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n1 {
        rows[i][..n1].copy_from_slice(&d1[i]);
        rows[i][n1..].copy_from_slice(&dup[i]);
    }
    for i in 0..n2 {
        rows[n1 + i][..n1].copy_from_slice(&dlo[i]);
        rows[n1 + i][n1..].copy_from_slice(&d2[i]);
    }
    (HodlrMatrix::from_parts(h1, h2, up, lo).unwrap(), rows)
}
