//! Structured test problems: 7-point Poisson and trilinear hexahedral
//! linear elasticity on the unit cube.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMat;
use crate::sparse::SparseMatrix;
use crate::{Error, Result};

/// 7-point Laplacian on an `nx x ny x nz` interior grid with the Dirichlet
/// boundary eliminated. Unknown `(i, j, k)` has index `i + nx (j + ny k)`;
/// the right-hand side is all ones.
pub fn gen_poisson7(nx: usize, ny: usize, nz: usize) -> (SparseMatrix, Vec<f64>) {
    let n = nx * ny * nz;
    let idx = |i: usize, j: usize, k: usize| i + nx * (j + ny * k);
    let mut t = Vec::with_capacity(7 * n);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let p = idx(i, j, k);
                if k > 0 {
                    t.push((idx(i, j, k - 1), p, -1.0));
                }
                if j > 0 {
                    t.push((idx(i, j - 1, k), p, -1.0));
                }
                if i > 0 {
                    t.push((idx(i - 1, j, k), p, -1.0));
                }
                t.push((p, p, 6.0));
                if i + 1 < nx {
                    t.push((idx(i + 1, j, k), p, -1.0));
                }
                if j + 1 < ny {
                    t.push((idx(i, j + 1, k), p, -1.0));
                }
                if k + 1 < nz {
                    t.push((idx(i, j, k + 1), p, -1.0));
                }
            }
        }
    }
    let a = SparseMatrix::from_triplets(n, n, t)
        .expect("stencil indices are in range")
        .with_symmetric_flag(true);
    (a, vec![1.0; n])
}

/// Hexahedral mesh of the unit cube with isotropic material constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshSpec {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub lame_lambda: f64,
    pub lame_mu: f64,
}

impl MeshSpec {
    /// `nx x ny x nz` elements with `lambda = mu = 1`.
    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        Self {
            nx,
            ny,
            nz,
            lame_lambda: 1.0,
            lame_mu: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 || self.nz == 0 {
            return Err(Error::InvalidParameter("element counts must be at least 1"));
        }
        if !(self.lame_mu > 0.0 && self.lame_mu.is_finite()) {
            return Err(Error::InvalidParameter("mu must be positive"));
        }
        if !(self.lame_lambda >= 0.0 && self.lame_lambda.is_finite()) {
            return Err(Error::InvalidParameter("lambda must be non-negative"));
        }
        Ok(())
    }
}

/// Reference coordinates of the 8 hex nodes, counter-clockwise on the
/// bottom face, then the top face.
const HEX_NODES: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

/// 24x24 stiffness of an `hx x hy x hz` brick, 2x2x2 Gauss quadrature.
/// DOFs are ordered node-major, `(u, v, w)` per node.
pub fn hex8_stiffness(hx: f64, hy: f64, hz: f64, lambda: f64, mu: f64) -> DenseMat {
    let g = 1.0 / libm::sqrt(3.0);
    let jac = [hx / 2.0, hy / 2.0, hz / 2.0];
    let det = jac[0] * jac[1] * jac[2];
    let mut d = DenseMat::zeros(6, 6);
    for a in 0..3 {
        for b in 0..3 {
            d[(a, b)] = lambda;
        }
        d[(a, a)] += 2.0 * mu;
        d[(a + 3, a + 3)] = mu;
    }
    let mut ke = DenseMat::zeros(24, 24);
    for &gz in &[-g, g] {
        for &gy in &[-g, g] {
            for &gx in &[-g, g] {
                let q = [gx, gy, gz];
                let mut bm = DenseMat::zeros(6, 24);
                for (a, xa) in HEX_NODES.iter().enumerate() {
                    let f = |c: usize| 1.0 + xa[c] * q[c];
                    let dn = [
                        xa[0] * f(1) * f(2) / 8.0 / jac[0],
                        xa[1] * f(0) * f(2) / 8.0 / jac[1],
                        xa[2] * f(0) * f(1) / 8.0 / jac[2],
                    ];
                    let c = 3 * a;
                    bm[(0, c)] = dn[0];
                    bm[(1, c + 1)] = dn[1];
                    bm[(2, c + 2)] = dn[2];
                    bm[(3, c)] = dn[1];
                    bm[(3, c + 1)] = dn[0];
                    bm[(4, c + 1)] = dn[2];
                    bm[(4, c + 2)] = dn[1];
                    bm[(5, c)] = dn[2];
                    bm[(5, c + 2)] = dn[0];
                }
                let db = d.matmul(&bm);
                let mut k = bm.transpose_matmul(&db);
                k.scale(det);
                ke.add_block(0, 0, &k);
            }
        }
    }
    ke
}

/// Assembled elasticity system on `[0,1]^3`: the face `x = 0` is clamped
/// and a uniform body force `(0, 0, -1)` loads the rest. Free node
/// `(i, j, k)`, `i >= 1`, owns DOFs `3 ((k (ny+1) + j) nx + i - 1) + c`.
pub fn gen_elasticity_hex(spec: &MeshSpec) -> Result<(SparseMatrix, Vec<f64>)> {
    spec.validate()?;
    let (nx, ny, nz) = (spec.nx, spec.ny, spec.nz);
    let (hx, hy, hz) = (1.0 / nx as f64, 1.0 / ny as f64, 1.0 / nz as f64);
    let ke = hex8_stiffness(hx, hy, hz, spec.lame_lambda, spec.lame_mu);
    let n = 3 * nx * (ny + 1) * (nz + 1);
    let node_dof =
        |i: usize, j: usize, k: usize| -> Option<usize> { (i > 0).then(|| 3 * ((k * (ny + 1) + j) * nx + i - 1)) };
    let nodal_load = hx * hy * hz / 8.0;
    let mut rhs = vec![0.0; n];
    let mut t = Vec::with_capacity(nx * ny * nz * 576);
    for ek in 0..nz {
        for ej in 0..ny {
            for ei in 0..nx {
                let dofs: Vec<Option<usize>> = HEX_NODES
                    .iter()
                    .map(|x| {
                        let o = |c: usize| usize::from(x[c] > 0.0);
                        node_dof(ei + o(0), ej + o(1), ek + o(2))
                    })
                    .collect();
                for (a, da) in dofs.iter().enumerate() {
                    let Some(da) = *da else { continue };
                    rhs[da + 2] -= nodal_load;
                    for (b, db) in dofs.iter().enumerate() {
                        let Some(db) = *db else { continue };
                        for r in 0..3 {
                            for c in 0..3 {
                                t.push((da + r, db + c, ke[(3 * a + r, 3 * b + c)]));
                            }
                        }
                    }
                }
            }
        }
    }
    let a = SparseMatrix::from_triplets(n, n, t)?.with_symmetric_flag(true);
    Ok((a, rhs))
}
