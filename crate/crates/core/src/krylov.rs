//! Right-preconditioned restarted GMRES and the baseline preconditioners.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::dense::{self, DenseMat};
use crate::multifrontal::{FactorMode, MfFactorization};
use crate::sparse::SparseMatrix;
use crate::{Error, Result};

/// Square linear map applied to vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()>;
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.nrows(),
                cols: self.ncols(),
            });
        }
        self.spmv_into(x, y)
    }
}

impl LinearOperator for DenseMat {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.ncols() || y.len() != self.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.ncols(),
                found: x.len(),
            });
        }
        y.iter_mut().for_each(|v| *v = 0.0);
        self.matvec_acc(1.0, x, y);
        Ok(())
    }
}

/// Approximate inverse applied on the right of the operator.
pub trait Preconditioner {
    fn label(&self) -> &str;

    /// `z = M⁻¹ r`.
    fn apply_inverse(&self, r: &[f64], z: &mut [f64]) -> Result<()>;
}

/// `M = I`.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoPreconditioner;

impl Preconditioner for NoPreconditioner {
    fn label(&self) -> &str {
        "none"
    }

    fn apply_inverse(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        check_len(r.len(), z.len())?;
        z.copy_from_slice(r);
        Ok(())
    }
}

/// Any preconditioner under a different label.
#[derive(Clone, Debug)]
pub struct Labeled<P> {
    pub inner: P,
    pub label: String,
}

impl<P: Preconditioner> Preconditioner for Labeled<P> {
    fn label(&self) -> &str {
        &self.label
    }

    fn apply_inverse(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        self.inner.apply_inverse(r, z)
    }
}

impl<P: Preconditioner + ?Sized> Preconditioner for &P {
    fn label(&self) -> &str {
        (**self).label()
    }

    fn apply_inverse(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        (**self).apply_inverse(r, z)
    }
}

impl Preconditioner for MfFactorization {
    fn label(&self) -> &str {
        match self.mode() {
            FactorMode::Accelerated => "accelerated-mf",
            FactorMode::Conventional => "conventional-mf",
        }
    }

    fn apply_inverse(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        check_len(r.len(), z.len())?;
        z.copy_from_slice(r);
        self.solve_in_place(z)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Jacobi scaling by the inverse diagonal.
#[derive(Clone, Debug)]
pub struct DiagonalPreconditioner {
    inv_diag: Vec<f64>,
}

pub fn diagonal_preconditioner(a: &SparseMatrix) -> Result<DiagonalPreconditioner> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let inv_diag = a
        .diagonal()
        .iter()
        .enumerate()
        .map(|(index, &d)| {
            if d == 0.0 {
                Err(Error::ZeroDiagonal { index })
            } else {
                Ok(1.0 / d)
            }
        })
        .collect::<Result<_>>()?;
    Ok(DiagonalPreconditioner { inv_diag })
}

impl Preconditioner for DiagonalPreconditioner {
    fn label(&self) -> &str {
        "diagonal"
    }

    fn apply_inverse(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        check_len(self.inv_diag.len(), r.len())?;
        check_len(r.len(), z.len())?;
        for ((z, r), d) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *z = r * d;
        }
        Ok(())
    }
}

/// Incomplete LU with threshold dropping and a per-row fill cap.
///
/// `L` is unit lower triangular and stored without its diagonal; each `U`
/// row stores its diagonal first.
#[derive(Clone, Debug)]
pub struct Ilut {
    n: usize,
    cap: usize,
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    u_ptr: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<f64>,
}

/// ILUT keeping `floor(k NNZ / N) + 1` entries per row of `L` and of `U`
/// besides the diagonal, and dropping entries below `drop_tol` times the
/// 2-norm of the original row.
pub fn ilut(a: &SparseMatrix, k: usize, drop_tol: f64) -> Result<Ilut> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1"));
    }
    let n = a.nrows().max(1);
    ilut_with_cap(a, k * a.nnz() / n + 1, drop_tol)
}

/// ILUT with an explicit per-row cap.
pub fn ilut_with_cap(a: &SparseMatrix, cap: usize, drop_tol: f64) -> Result<Ilut> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if drop_tol.is_nan() || drop_tol < 0.0 {
        return Err(Error::InvalidParameter("drop_tol must be non-negative"));
    }
    let n = a.nrows();
    // rows of A are the columns of its transpose
    let rows = a.transpose();
    let mut f = Ilut {
        n,
        cap,
        l_ptr: vec![0],
        l_idx: Vec::new(),
        l_val: Vec::new(),
        u_ptr: vec![0],
        u_idx: Vec::new(),
        u_val: Vec::new(),
    };
    let mut w = vec![0.0; n];
    let mut present = vec![false; n];
    let mut nz: Vec<usize> = Vec::new();
    let mut lower: BTreeSet<usize> = BTreeSet::new();

    for i in 0..n {
        let (cols, vals) = rows.column(i);
        let tau = drop_tol * dense::norm2(vals);
        for (&j, &v) in cols.iter().zip(vals) {
            w[j] = v;
            present[j] = true;
            nz.push(j);
            if j < i {
                lower.insert(j);
            }
        }
        while let Some(k) = lower.pop_first() {
            let (ks, ke) = (f.u_ptr[k], f.u_ptr[k + 1]);
            let lik = w[k] / f.u_val[ks];
            if lik.abs() < tau {
                w[k] = 0.0;
                continue;
            }
            w[k] = lik;
            for t in ks + 1..ke {
                let j = f.u_idx[t];
                if !present[j] {
                    present[j] = true;
                    nz.push(j);
                    w[j] = 0.0;
                    if j < i {
                        lower.insert(j);
                    }
                }
                w[j] -= lik * f.u_val[t];
            }
        }

        let mut l_part: Vec<(usize, f64)> = Vec::new();
        let mut u_part: Vec<(usize, f64)> = Vec::new();
        let mut diag = 0.0;
        for &j in &nz {
            let v = w[j];
            if j == i {
                diag = v;
            } else if v != 0.0 && v.abs() >= tau {
                if j < i {
                    l_part.push((j, v));
                } else {
                    u_part.push((j, v));
                }
            }
            w[j] = 0.0;
            present[j] = false;
        }
        nz.clear();
        if diag == 0.0 || !diag.is_finite() {
            return Err(Error::ZeroPivot { row: i });
        }
        push_row(&mut l_part, cap, None, &mut f.l_idx, &mut f.l_val, &mut f.l_ptr);
        push_row(
            &mut u_part,
            cap,
            Some((i, diag)),
            &mut f.u_idx,
            &mut f.u_val,
            &mut f.u_ptr,
        );
    }
    Ok(f)
}

/// Keeps the `cap` largest entries of `part`, then appends them in column
/// order after the optional leading entry.
fn push_row(
    part: &mut Vec<(usize, f64)>,
    cap: usize,
    lead: Option<(usize, f64)>,
    idx: &mut Vec<usize>,
    val: &mut Vec<f64>,
    ptr: &mut Vec<usize>,
) {
    if part.len() > cap {
        part.sort_unstable_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
        part.truncate(cap);
    }
    part.sort_unstable_by_key(|e| e.0);
    for (j, v) in lead.into_iter().chain(part.iter().copied()) {
        idx.push(j);
        val.push(v);
    }
    ptr.push(idx.len());
}

impl Ilut {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entries kept per row of `L` and of `U` besides the diagonal.
    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Off-diagonal entries kept in row `i` of `L`.
    pub fn l_row_len(&self, i: usize) -> usize {
        self.l_ptr[i + 1] - self.l_ptr[i]
    }

    /// Off-diagonal entries kept in row `i` of `U`.
    pub fn u_row_len(&self, i: usize) -> usize {
        self.u_ptr[i + 1] - self.u_ptr[i] - 1
    }

    pub fn stored_reals(&self) -> usize {
        self.l_val.len() + self.u_val.len()
    }

    /// `L + U - I` as a dense matrix.
    pub fn to_dense_factors(&self) -> (DenseMat, DenseMat) {
        let mut l = DenseMat::identity(self.n);
        let mut u = DenseMat::zeros(self.n, self.n);
        for i in 0..self.n {
            for t in self.l_ptr[i]..self.l_ptr[i + 1] {
                l[(i, self.l_idx[t])] = self.l_val[t];
            }
            for t in self.u_ptr[i]..self.u_ptr[i + 1] {
                u[(i, self.u_idx[t])] = self.u_val[t];
            }
        }
        (l, u)
    }
}

impl Preconditioner for Ilut {
    fn label(&self) -> &str {
        "ilut"
    }

    fn apply_inverse(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        check_len(self.n, r.len())?;
        check_len(r.len(), z.len())?;
        for i in 0..self.n {
            let mut s = r[i];
            for t in self.l_ptr[i]..self.l_ptr[i + 1] {
                s -= self.l_val[t] * z[self.l_idx[t]];
            }
            z[i] = s;
        }
        for i in (0..self.n).rev() {
            let (s0, e) = (self.u_ptr[i], self.u_ptr[i + 1]);
            let mut s = z[i];
            for t in s0 + 1..e {
                s -= self.u_val[t] * z[self.u_idx[t]];
            }
            z[i] = s / self.u_val[s0];
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GmresOptions {
    /// Relative residual target `‖b - A x‖ / ‖b‖`.
    pub tol: f64,
    pub max_iter: usize,
    pub restart: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 4000,
            restart: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceHistory {
    /// Relative residual before the first iteration and after each one.
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// `‖b - A x‖ / ‖b‖` recomputed for the returned `x`.
    pub final_residual: f64,
}

impl ConvergenceHistory {
    /// `iteration,relative_residual` CSV.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iteration,relative_residual\n");
        for (i, r) in self.residuals.iter().enumerate() {
            let _ = writeln!(s, "{},{:.6e}", i, r);
        }
        s
    }
}

/// Restarted GMRES on `A M⁻¹ y = b`, `x = M⁻¹ y`, from `x = 0`.
///
/// A Hessenberg breakdown ends the cycle early and counts as convergence
/// when the recomputed residual meets the tolerance.
pub fn gmres(
    a: &(impl LinearOperator + ?Sized),
    b: &[f64],
    m: &(impl Preconditioner + ?Sized),
    opts: &GmresOptions,
) -> Result<(Vec<f64>, ConvergenceHistory)> {
    if !(opts.tol > 0.0 && opts.tol < 1.0) {
        return Err(Error::InvalidParameter("tol must lie in (0, 1)"));
    }
    if opts.max_iter == 0 || opts.restart == 0 {
        return Err(Error::InvalidParameter("max_iter and restart must be at least 1"));
    }
    let n = a.dim();
    check_len(n, b.len())?;
    let mut x = vec![0.0; n];
    let bnorm = dense::norm2(b);
    let mut hist = ConvergenceHistory {
        residuals: Vec::new(),
        converged: false,
        iterations: 0,
        final_residual: 0.0,
    };
    if bnorm == 0.0 {
        hist.residuals.push(0.0);
        hist.converged = true;
        return Ok((x, hist));
    }

    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];
    let true_residual = |x: &[f64], r: &mut [f64]| -> Result<f64> {
        a.apply(x, r)?;
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        Ok(dense::norm2(r))
    };

    let mut beta = true_residual(&x, &mut r)?;
    hist.residuals.push(beta / bnorm);
    let m_dim = opts.restart.min(n.max(1));
    loop {
        let rel = beta / bnorm;
        if !rel.is_finite() {
            return Err(Error::NonFiniteResidual {
                iteration: hist.iterations,
            });
        }
        if rel <= opts.tol {
            hist.converged = true;
            hist.final_residual = rel;
            return Ok((x, hist));
        }
        if hist.iterations >= opts.max_iter {
            hist.final_residual = rel;
            return Ok((x, hist));
        }

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m_dim + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        let mut h = DenseMat::zeros(m_dim + 1, m_dim);
        let mut cs = vec![0.0; m_dim];
        let mut sn = vec![0.0; m_dim];
        let mut g = vec![0.0; m_dim + 1];
        g[0] = beta;
        let mut k = 0;
        while k < m_dim && hist.iterations < opts.max_iter {
            m.apply_inverse(&basis[k], &mut z)?;
            a.apply(&z, &mut w)?;
            let w0 = dense::norm2(&w);
            for (i, v) in basis.iter().enumerate() {
                let hik = dense::dot(&w, v);
                h[(i, k)] = hik;
                dense::axpy(-hik, v, &mut w);
            }
            let hnext = dense::norm2(&w);
            h[(k + 1, k)] = hnext;
            for i in 0..k {
                let (a0, a1) = (h[(i, k)], h[(i + 1, k)]);
                h[(i, k)] = cs[i] * a0 + sn[i] * a1;
                h[(i + 1, k)] = -sn[i] * a0 + cs[i] * a1;
            }
            let (a0, a1) = (h[(k, k)], h[(k + 1, k)]);
            let rho = libm::hypot(a0, a1);
            if rho == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = a0 / rho;
                sn[k] = a1 / rho;
            }
            h[(k, k)] = rho;
            h[(k + 1, k)] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            hist.iterations += 1;
            k += 1;
            let est = g[k].abs() / bnorm;
            if !est.is_finite() {
                return Err(Error::NonFiniteResidual {
                    iteration: hist.iterations,
                });
            }
            hist.residuals.push(est);
            let breakdown = hnext <= 1e-14 * w0;
            if est <= opts.tol || breakdown {
                break;
            }
            basis.push(w.iter().map(|v| v / hnext).collect());
        }

        // back substitution on the rotated Hessenberg matrix
        let mut y = g[..k].to_vec();
        for i in (0..k).rev() {
            let mut s = y[i];
            for j in i + 1..k {
                s -= h[(i, j)] * y[j];
            }
            y[i] = if h[(i, i)] == 0.0 { 0.0 } else { s / h[(i, i)] };
        }
        let mut u = vec![0.0; n];
        for (yi, v) in y.iter().zip(&basis) {
            dense::axpy(*yi, v, &mut u);
        }
        m.apply_inverse(&u, &mut z)?;
        dense::axpy(1.0, &z, &mut x);
        beta = true_residual(&x, &mut r)?;
        if beta == 0.0 {
            hist.converged = true;
            hist.final_residual = 0.0;
            return Ok((x, hist));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -2.0));
            }
        }
        SparseMatrix::from_triplets(n, n, t).unwrap()
    }

    #[test]
    fn identity_converges_in_one_step() {
        let a = SparseMatrix::identity(5);
        let b = [1.0, -2.0, 3.0, 0.5, 0.0];
        let (x, h) = gmres(&a, &b, &NoPreconditioner, &GmresOptions::default()).unwrap();
        assert!(h.converged);
        assert_eq!(h.iterations, 1);
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-15);
        }
    }

    #[test]
    fn two_by_two_by_hand() {
        let a = DenseMat::from_row_major(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let opts = GmresOptions {
            tol: 1e-12,
            ..GmresOptions::default()
        };
        let (x, h) = gmres(&a, &[1.0, 2.0], &NoPreconditioner, &opts).unwrap();
        assert!(h.converged && h.iterations <= 2);
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-12);
        assert!((x[1] - 7.0 / 11.0).abs() < 1e-12);
        assert!(h.to_csv().starts_with("iteration,relative_residual\n0,1.000000e0\n"));
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let (x, h) = gmres(&tridiag(4), &[0.0; 4], &NoPreconditioner, &GmresOptions::default()).unwrap();
        assert_eq!(x, vec![0.0; 4]);
        assert!(h.converged);
    }

    #[test]
    fn non_finite_operator_is_an_error() {
        let a = DenseMat::from_row_major(2, 2, &[f64::NAN, 0.0, 0.0, 1.0]);
        let err = gmres(&a, &[1.0, 1.0], &NoPreconditioner, &GmresOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteResidual { .. }));
    }

    #[test]
    fn diagonal_examples() {
        let a = SparseMatrix::from_triplets(3, 3, [(0, 0, 1.0), (1, 1, 2.0), (2, 2, 4.0)]).unwrap();
        let d = diagonal_preconditioner(&a).unwrap();
        let mut z = [0.0; 3];
        d.apply_inverse(&[1.0, 2.0, 4.0], &mut z).unwrap();
        assert_eq!(z, [1.0; 3]);
        let singular = SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(
            diagonal_preconditioner(&singular).unwrap_err(),
            Error::ZeroDiagonal { index: 1 }
        );
    }

    #[test]
    fn ilut_is_exact_on_tridiagonal() {
        let a = tridiag(12);
        let f = ilut(&a, 1, 0.0).unwrap();
        let (l, u) = f.to_dense_factors();
        assert!(l.matmul(&u).sub(&a.to_dense()).max_abs() <= 1e-12);
        let (_, h) = gmres(&a, &[1.0; 12], &f, &GmresOptions::default()).unwrap();
        assert_eq!(h.iterations, 1);
    }

    #[test]
    fn ilut_cap_limits_rows() {
        let n = 6;
        let a = SparseMatrix::from_triplets(
            n,
            n,
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j, if i == j { 10.0 } else { 1.0 + (i * n + j) as f64 * 0.1 }))),
        )
        .unwrap();
        let f = ilut_with_cap(&a, 1, 0.0).unwrap();
        for i in 0..n {
            assert_eq!(f.l_row_len(i), i.min(1));
            assert_eq!(f.u_row_len(i), (n - 1 - i).min(1));
        }
        let zero = SparseMatrix::from_triplets(2, 2, [(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(ilut(&zero, 1, 0.0).unwrap_err(), Error::ZeroPivot { row: 0 });
    }
}
