mod common;

use common::{oracle_matvec, random_dense, rel_err, rng};
use frontal_core::krylov::{gmres, ilut, GmresOptions, Labeled, NoPreconditioner};
use frontal_core::{DenseLu, DenseMat, Preconditioner, SparseMatrix};
use rand::Rng;

struct ExactInverse(DenseLu);

impl Preconditioner for ExactInverse {
    fn label(&self) -> &str {
        "exact"
    }

    fn apply_inverse(&self, r: &[f64], z: &mut [f64]) -> frontal_core::Result<()> {
        z.copy_from_slice(&self.0.solve(r));
        Ok(())
    }
}

fn well_conditioned(r: &mut impl Rng, n: usize) -> DenseMat {
    let mut a = random_dense(r, n, n);
    for i in 0..n {
        a[(i, i)] += n as f64;
    }
    a
}

#[test]
fn full_restart_terminates_within_n_plus_one() {
    let mut r = rng(61);
    for trial in 0..40 {
        let n = r.gen_range(1..=30);
        let a = well_conditioned(&mut r, n);
        let b: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let opts = GmresOptions {
            tol: 1e-8,
            max_iter: n + 1,
            restart: n,
        };
        let (x, h) = gmres(&a, &b, &NoPreconditioner, &opts).unwrap();
        assert!(h.converged && h.iterations <= n + 1, "trial {trial}: {h:?}");
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
        assert!(rel_err(&oracle_matvec(&rows, &x), &b) <= 1e-8);
        assert!(h.residuals.iter().all(|&v| v >= 0.0));
        assert!(
            h.residuals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)),
            "trial {trial}"
        );
    }
}

#[test]
fn residuals_decrease_within_each_cycle() {
    let mut r = rng(62);
    let n = 80;
    let a = SparseMatrix::from_triplets(
        n,
        n,
        (0..n).flat_map(|i| {
            let mut t = vec![(i, i, 2.0 + 0.1 * (i % 3) as f64)];
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -0.7));
            }
            t
        }),
    )
    .unwrap();
    let b: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    let restart = 7;
    let opts = GmresOptions {
        tol: 1e-10,
        max_iter: 400,
        restart,
    };
    let (_, h) = gmres(&a, &b, &NoPreconditioner, &opts).unwrap();
    assert!(h.converged);
    for cycle in h.residuals[1..].chunks(restart) {
        assert!(cycle.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }
    if h.converged {
        assert!(*h.residuals.last().unwrap() <= opts.tol);
    }
}

#[test]
fn results_ignore_the_preconditioner_label() {
    let mut r = rng(63);
    let n = 25;
    let a = well_conditioned(&mut r, n);
    let b: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let lu = || DenseLu::factor(a.clone()).unwrap();
    let opts = GmresOptions::default();
    let (x1, h1) = gmres(&a, &b, &ExactInverse(lu()), &opts).unwrap();
    let wrapped = Labeled {
        inner: ExactInverse(lu()),
        label: "accelerated-mf".into(),
    };
    assert_eq!(wrapped.label(), "accelerated-mf");
    let (x2, h2) = gmres(&a, &b, &wrapped, &opts).unwrap();
    assert_eq!(h1.iterations, 1);
    assert_eq!(h1.iterations, h2.iterations);
    assert!(rel_err(&x1, &x2) <= 1e-10);
}

#[test]
fn ilut_is_exact_on_tridiagonal() {
    let n = 30;
    let a = SparseMatrix::from_triplets(
        n,
        n,
        (0..n).flat_map(|i| {
            let mut t = vec![(i, i, 3.0)];
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.5));
            }
            t
        }),
    )
    .unwrap();
    let m = ilut(&a, 1, 0.0).unwrap();
    let mut col = vec![0.0; n];
    for j in 0..n {
        let e: Vec<f64> = (0..n).map(|i| a.get(i, j)).collect();
        m.apply_inverse(&e, &mut col).unwrap();
        for (i, v) in col.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((v - want).abs() <= 1e-12, "({i}, {j}): {v}");
        }
    }
}
