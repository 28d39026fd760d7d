//! Linear solves with the interior stiffness matrix.
//!
//! The default is a sparse Cholesky factorization that is computed once and
//! reused for every right-hand side. Jacobi-preconditioned conjugate
//! gradients are available for large meshes.

use faer::prelude::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use super::sparse::CsrMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Cholesky,
    Pcg,
}

/// Relative residual target of the iterative solver, `‖Ax − b‖_∞ ≤ tol ‖b‖_∞`.
const PCG_TOL: f64 = 1e-13;

pub struct Factorization {
    n: usize,
    inner: Inner,
}

enum Inner {
    Cholesky(Llt<usize, f64>),
    Pcg { matrix: CsrMatrix, inv_diag: Vec<f64> },
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.inner {
            Inner::Cholesky(_) => "Cholesky",
            Inner::Pcg { .. } => "Pcg",
        };
        f.debug_struct("Factorization")
            .field("n", &self.n)
            .field("kind", &kind)
            .finish()
    }
}

pub fn factorize(a: &CsrMatrix) -> Result<Factorization> {
    factorize_with(a, SolverKind::Cholesky)
}

pub fn factorize_with(a: &CsrMatrix, kind: SolverKind) -> Result<Factorization> {
    let n = a.n();
    if a.asymmetry() > 1e-12 * a.max_abs() {
        return Err(Error::Factorization("matrix is not symmetric".into()));
    }
    let inner = match kind {
        SolverKind::Cholesky => {
            let triplets: Vec<Triplet<usize, usize, f64>> = a
                .iter()
                .filter(|&(i, j, _)| i >= j)
                .map(|(i, j, v)| Triplet::new(i, j, v))
                .collect();
            let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
                .map_err(|e| Error::Factorization(format!("{e:?}")))?;
            let symbolic = SymbolicLlt::try_new(mat.symbolic(), Side::Lower)
                .map_err(|e| Error::Factorization(format!("{e:?}")))?;
            let llt = Llt::try_new_with_symbolic(symbolic, mat.as_ref(), Side::Lower)
                .map_err(|e| Error::Factorization(format!("{e:?}")))?;
            Inner::Cholesky(llt)
        }
        SolverKind::Pcg => {
            let diag = a.diagonal();
            if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
                return Err(Error::Factorization(format!(
                    "non-positive diagonal entry {} at row {i}",
                    diag[i]
                )));
            }
            Inner::Pcg {
                matrix: a.clone(),
                inv_diag: diag.iter().map(|d| 1.0 / d).collect(),
            }
        }
    };
    Ok(Factorization { n, inner })
}

impl Factorization {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::Precondition(format!(
                "right-hand side has length {}, expected {}",
                b.len(),
                self.n
            )));
        }
        match &self.inner {
            Inner::Cholesky(llt) => {
                let rhs = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
                let x = llt.solve(&rhs);
                Ok((0..self.n).map(|i| x[(i, 0)]).collect())
            }
            Inner::Pcg { matrix, inv_diag } => pcg(matrix, inv_diag, b),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn pcg(a: &CsrMatrix, inv_diag: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let target = PCG_TOL * max_norm(b);
    if target == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..(10 * n).max(100) {
        let ap = a.mul_vec(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Factorization("matrix is not positive definite".into()));
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        if max_norm(&r) <= target {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::LinearSolver(format!(
        "conjugate gradients stalled at residual {:e}",
        max_norm(&r)
    )))
}
