mod common;

use common::{dense_rows, oracle_solve, random_dense, random_hodlr, random_sparse, rel_err, rel_frob, rng};
use frontal_core::hodlr::HodlrOptions;
use frontal_core::multifrontal::{
    analyze_and_factorize, extend_add_dense, extend_add_hodlr, ChildUpdate, DenseUpdate, FrontSampler, FrontSeed,
};
use frontal_core::problems::{gen_elasticity_hex, gen_poisson7, MeshSpec};
use frontal_core::{AdjGraph, BlockSampler, DenseMat, FactorMode, MfParams, SparseMatrix, UpdateRep};
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;

fn conventional_error(a: &SparseMatrix, b: &[f64]) -> f64 {
    let (_, f) = analyze_and_factorize(a, 16, FactorMode::Conventional, MfParams::default()).unwrap();
    rel_err(&f.solve(b).unwrap(), &oracle_solve(&dense_rows(a), b))
}

#[test]
fn conventional_matches_dense_oracle() {
    for nx in [4, 6, 8] {
        let (a, b) = gen_poisson7(nx, nx, nx);
        assert!(conventional_error(&a, &b) <= 1e-10, "poisson {nx}");
    }
    for (nx, ny, nz) in [(2, 2, 2), (3, 3, 3), (4, 3, 2)] {
        let (a, b) = gen_elasticity_hex(&MeshSpec::new(nx, ny, nz)).unwrap();
        assert!(conventional_error(&a, &b) <= 1e-10, "elasticity {nx}x{ny}x{nz}");
    }
    let mut r = rng(21);
    for trial in 0..20 {
        let n = r.gen_range(1..=200);
        let a = random_sparse(&mut r, n, 3, trial % 2 == 0);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 1.0).collect();
        assert!(conventional_error(&a, &b) <= 1e-10, "random trial {trial}");
    }
}

#[test]
fn accelerated_converges_to_conventional_as_eps_shrinks() {
    let (a, b) = gen_poisson7(12, 12, 12);
    let base = MfParams {
        n_c: 64,
        ..MfParams::default()
    };
    let (_, conv) = analyze_and_factorize(&a, 64, FactorMode::Conventional, base).unwrap();
    let x = conv.solve(&b).unwrap();
    let mut last = f64::INFINITY;
    for eps in [1e-4, 1e-8, 1e-12] {
        let (_, acc) = analyze_and_factorize(&a, 64, FactorMode::Accelerated, MfParams { eps, ..base }).unwrap();
        assert!(acc.structured_fronts() > 0);
        assert_eq!(acc.full_outer_products(), 0);
        let err = rel_err(&acc.solve(&b).unwrap(), &x);
        assert!(err < last, "eps {eps}: {err} after {last}");
        last = err;
    }
    assert!(last <= 1e-8, "{last}");
}

/// Random seed over `ids` (pivots first) with an empty `F_ff` block.
fn random_seed(r: &mut impl Rng, ids: Vec<usize>, np: usize) -> FrontSeed {
    let n = ids.len();
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if (i < np || j < np) && r.gen_bool(0.4) {
                t.push((i, j, r.gen_range(-1.0..1.0) + if i == j { 2.0 * n as f64 } else { 0.0 }));
            }
        }
    }
    FrontSeed::new(ids, np, t).unwrap()
}

fn sorted_subset(r: &mut impl Rng, from: &[usize], k: usize) -> Vec<usize> {
    let mut v: Vec<usize> = sample(r, from.len(), k).into_iter().map(|i| from[i]).collect();
    v.sort_unstable();
    v
}

/// Child update over a subset of the front's non-pivot ids, with its
/// dense value computed independently.
fn random_child(r: &mut impl Rng, fids: &[usize], structured: bool) -> (ChildUpdate, DenseMat) {
    let k = r.gen_range(1..=fids.len());
    let ids = sorted_subset(r, fids, k);
    if structured {
        let (h, d) = random_hodlr(r, k, 4, 2);
        let rank = r.gen_range(0..3);
        let w = random_dense(r, k, rank);
        let v = random_dense(r, k, rank);
        let dense = DenseMat::from_fn(k, k, |i, j| {
            d[i][j] - (0..rank).map(|l| w[(i, l)] * v[(j, l)]).sum::<f64>()
        });
        (ChildUpdate::Structured(UpdateRep::new(h, w, v, ids).unwrap()), dense)
    } else {
        let m = random_dense(r, k, k);
        (ChildUpdate::Dense(DenseUpdate { ids, mat: m.clone() }), m)
    }
}

fn scatter_oracle(seed: &FrontSeed, children: &[(ChildUpdate, DenseMat)]) -> DenseMat {
    let mut f = seed.to_dense();
    for (c, d) in children {
        let pos: Vec<usize> = c
            .ids()
            .iter()
            .map(|id| seed.ids().iter().position(|x| x == id).unwrap())
            .collect();
        for (a, &pa) in pos.iter().enumerate() {
            for (b, &pb) in pos.iter().enumerate() {
                f[(pa, pb)] += d[(a, b)];
            }
        }
    }
    f
}

fn random_front(r: &mut impl Rng, max_n: usize) -> (FrontSeed, Vec<usize>) {
    let n = r.gen_range(4..=max_n);
    let np = r.gen_range(1..n);
    let ids = sorted_subset(r, &(0..3 * max_n).collect::<Vec<_>>(), n);
    let fids = ids[np..].to_vec();
    (random_seed(r, ids, np), fids)
}

#[test]
fn extend_add_is_order_independent() {
    let mut r = rng(31);
    for trial in 0..30 {
        let (seed, fids) = random_front(&mut r, 48);
        let mut kids: Vec<(ChildUpdate, DenseMat)> = (0..4).map(|c| random_child(&mut r, &fids, c % 2 == 1)).collect();
        let oracle = scatter_oracle(&seed, &kids);
        let first = extend_add_dense(&seed, &kids.iter().map(|k| k.0.clone()).collect::<Vec<_>>()).unwrap();
        assert!(rel_frob(&first, &oracle) <= 1e-13, "trial {trial}");
        kids.shuffle(&mut r);
        let second = extend_add_dense(&seed, &kids.iter().map(|k| k.0.clone()).collect::<Vec<_>>()).unwrap();
        assert!(rel_frob(&second, &first) <= 1e-13, "trial {trial}");
    }
}

#[test]
fn structured_extend_add_matches_dense() {
    let mut r = rng(41);
    for trial in 0..50 {
        let (seed, fids) = random_front(&mut r, 64);
        let kids: Vec<(ChildUpdate, DenseMat)> = (0..2)
            .map(|c| random_child(&mut r, &fids, (trial + c) % 3 != 0))
            .collect();
        let children: Vec<ChildUpdate> = kids.iter().map(|k| k.0.clone()).collect();
        let dense = extend_add_dense(&seed, &children).unwrap();
        assert!(rel_frob(&dense, &scatter_oracle(&seed, &kids)) <= 1e-13);
        let max_id = seed.ids().last().unwrap() + 1;
        let ids = seed.ids();
        let edges = (0..ids.len())
            .flat_map(|a| (0..ids.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && dense[(a, b)] != 0.0)
            .map(|(a, b)| (ids[a], ids[b]));
        let g = AdjGraph::from_edges(max_id, edges).unwrap();
        let opts = HodlrOptions {
            n_leaf: 8,
            eps: 1e-13,
            ..HodlrOptions::default()
        };
        let front = extend_add_hodlr(&seed, &children, &g, seed.ids(), &opts).unwrap();
        let e = rel_frob(&front.to_dense(), &dense);
        assert!(
            e <= 1e-10,
            "trial {trial}: {e:.3e} n {} np {}",
            seed.n(),
            seed.n_pivots()
        );
    }
}

#[test]
fn mismatched_child_is_rejected() {
    let seed = FrontSeed::new(vec![0, 1, 2], 1, [(0, 0, 1.0)]).unwrap();
    let child = ChildUpdate::Dense(DenseUpdate {
        ids: vec![2, 7],
        mat: DenseMat::zeros(2, 2),
    });
    assert!(extend_add_dense(&seed, &[child]).is_err());
}

#[test]
fn outer_product_counter_is_live() {
    let mut r = rng(51);
    let ids: Vec<usize> = (0..40).collect();
    let seed = FrontSeed::new(ids.clone(), 10, (0..40).map(|i| (i, i, 1.0))).unwrap();
    let (h, _) = random_hodlr(&mut r, 30, 4, 2);
    let upd = UpdateRep::new(
        h,
        random_dense(&mut r, 30, 2),
        random_dense(&mut r, 30, 2),
        ids[10..].to_vec(),
    )
    .unwrap();
    let children = [ChildUpdate::Structured(upd)];
    let s = FrontSampler::new(&seed, &children, 8).unwrap();
    s.sample(&[0, 12, 20], &[15, 30]).unwrap();
    assert_eq!(s.full_outer_products(), 0);
    let all: Vec<usize> = (0..40).collect();
    s.sample(&all, &all).unwrap();
    assert_eq!(s.full_outer_products(), 1);
}
