mod common;

use common::{oracle_solve, random_dense, random_hodlr, rel_err, rel_frob, rng};
use frontal_core::hodlr::{build_hodlr, HodlrOptions};
use frontal_core::{AdjGraph, DenseMat, UpdateRep};
use rand::seq::index::sample;
use rand::Rng;

fn as_dense(rows: &[Vec<f64>]) -> DenseMat {
    DenseMat::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
}

#[test]
fn factorization_matvec_and_solve() {
    let mut r = rng(3);
    for trial in 0..40 {
        let n = r.gen_range(1..=256);
        let leaf = r.gen_range(1..=32);
        let (h, oracle) = random_hodlr(&mut r, n, leaf, 4);
        assert!(rel_frob(&h.to_dense(), &as_dense(&oracle)) <= 1e-15, "trial {trial}");
        let x: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let want: Vec<f64> = oracle
            .iter()
            .map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum())
            .collect();
        assert!(rel_err(&h.matvec(&x).unwrap(), &want) <= 1e-14, "trial {trial}");

        let b: Vec<f64> = (0..n).map(|i| 1.0 + (i % 5) as f64).collect();
        let f = h.factorize().unwrap();
        let sol = f.solve(&b).unwrap();
        assert!(rel_err(&h.matvec(&sol).unwrap(), &b) <= 1e-9, "trial {trial}: residual");
        assert!(
            rel_err(&sol, &oracle_solve(&oracle, &b)) <= 1e-9,
            "trial {trial}: oracle"
        );
    }
}

#[test]
fn exact_low_rank_off_diagonals_are_recovered() {
    let mut r = rng(5);
    for &(n, k) in &[(40, 1), (96, 3), (200, 5)] {
        let u = random_dense(&mut r, n, k);
        let v = random_dense(&mut r, n, k);
        let a = DenseMat::from_fn(n, n, |i, j| {
            let lr: f64 = (0..k).map(|l| u[(i, l)] * v[(j, l)]).sum();
            lr + if i == j { n as f64 } else { 0.0 }
        });
        let ids: Vec<usize> = (0..n).collect();
        let g = AdjGraph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap();
        let opts = HodlrOptions {
            n_leaf: 8,
            eps: 1e-12,
            ..HodlrOptions::default()
        };
        let h = build_hodlr(&a, &ids, &g, &opts).unwrap();
        assert!(rel_frob(&h.to_dense(), &a) <= 1e-10, "n {n}");
        assert!(h.max_rank() <= k, "n {n}: rank {}", h.max_rank());
    }
}

#[test]
fn laplacian_storage_is_near_linear() {
    let sizes = [64usize, 128, 256, 512];
    let stored: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let a = DenseMat::from_fn(n, n, |i, j| match i.abs_diff(j) {
                0 => 2.0,
                1 => -1.0,
                _ => 0.0,
            });
            let ids: Vec<usize> = (0..n).collect();
            let g = AdjGraph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap();
            let opts = HodlrOptions {
                n_leaf: 16,
                eps: 1e-10,
                ..HodlrOptions::default()
            };
            let h = build_hodlr(&a, &ids, &g, &opts).unwrap();
            assert_eq!(h.max_rank(), 1);
            h.stored_reals() as f64
        })
        .collect();
    let slope = (stored[3] / stored[0]).ln() / (sizes[3] as f64 / sizes[0] as f64).ln();
    assert!(slope <= 1.2, "fit exponent {slope}");
}

#[test]
fn update_sampling_matches_dense() {
    let mut r = rng(9);
    for trial in 0..10 {
        let n = r.gen_range(2..=64);
        let (h, oracle) = random_hodlr(&mut r, n, 8, 3);
        let k = r.gen_range(0..4);
        let w = random_dense(&mut r, n, k);
        let v = random_dense(&mut r, n, k);
        let mut ids = sample(&mut r, 4 * n, n).into_vec();
        ids.sort_unstable();
        let u = UpdateRep::new(h, w.clone(), v.clone(), ids.clone()).unwrap();
        let full = DenseMat::from_fn(n, n, |i, j| {
            oracle[i][j] - (0..k).map(|l| w[(i, l)] * v[(j, l)]).sum::<f64>()
        });
        assert!(rel_frob(&u.to_dense(), &full) <= 1e-14, "trial {trial}");
        for _ in 0..50 {
            let nr = r.gen_range(0..=n);
            let nc = r.gen_range(0..=n);
            let rows: Vec<usize> = (0..nr).map(|_| r.gen_range(0..n)).collect();
            let cols = sample(&mut r, n, nc).into_vec();
            let got = u
                .sample_update(
                    &rows.iter().map(|&p| ids[p]).collect::<Vec<_>>(),
                    &cols.iter().map(|&p| ids[p]).collect::<Vec<_>>(),
                )
                .unwrap();
            for (a, &i) in rows.iter().enumerate() {
                for (b, &j) in cols.iter().enumerate() {
                    assert!((got[(a, b)] - full[(i, j)]).abs() <= 1e-13 * (1.0 + full[(i, j)].abs()));
                }
            }
        }
        let missing = (0..4 * n).find(|x| ids.binary_search(x).is_err()).unwrap();
        assert!(u.sample_update(&[missing], &[ids[0]]).is_err());
    }
}
