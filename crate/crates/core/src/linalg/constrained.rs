//! Equality-constrained SPD problems
//!
//! ```text
//! [ A  Cᵀ ] [x]   [b]
//! [ C  0  ] [μ] = [0]
//! ```
//!
//! solved by conjugate gradients on the projected operator `P A P`, with
//! `P = I - Cᵀ (C Cᵀ)⁻¹ C`. `C` is kept sparse and `C Cᵀ` is factored densely.

use super::cg::{projected_cg, CgOptions, CgOutcome};
use super::csr::{norm2, norm_inf, CsrMatrix};
use super::dense::{Cholesky, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A sparse row vector with sorted indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRow<T> {
    pub indices: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Real> SparseRow<T> {
    pub fn from_dense(v: &[T]) -> Self {
        let mut row = Self::default();
        for (i, x) in v.iter().enumerate() {
            if *x != T::zero() {
                row.indices.push(i);
                row.values.push(*x);
            }
        }
        row
    }

    pub fn dot_dense(&self, x: &[T]) -> T {
        self.indices.iter().zip(&self.values).map(|(i, v)| *v * x[*i]).sum()
    }

    pub fn dot(&self, other: &Self) -> T {
        let (mut i, mut j) = (0, 0);
        let mut s = T::zero();
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    s += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        s
    }

    pub fn norm(&self) -> T {
        norm2(&self.values)
    }
}

/// Relative Gram–Schmidt residual (squared) below which a constraint row is
/// considered dependent on the rows before it.
pub const RANK_DROP_TOL: f64 = 1e-12;

/// Orthogonal projector onto `ker C`.
#[derive(Debug, Clone)]
pub struct ConstraintProjector<T> {
    n: usize,
    rows: Vec<SparseRow<T>>,
    kept: Vec<usize>,
    chol: Option<Cholesky<T>>,
}

impl<T: Real> ConstraintProjector<T> {
    /// Rows are processed in order; a row is dropped when its squared norm
    /// after orthogonalization against the kept rows falls below
    /// [`RANK_DROP_TOL`] times its original squared norm. The residual is read
    /// off the Cholesky pivots of the Gram matrix.
    pub fn new(n: usize, rows: Vec<SparseRow<T>>) -> Result<Self> {
        for r in &rows {
            if r.indices.iter().any(|&i| i >= n) {
                return Err(Error::config("constraint row index outside the unknown range"));
            }
        }
        let m = rows.len();
        let mut gram = DenseMatrix::zeros(m);
        let bounds: Vec<(usize, usize)> = rows
            .iter()
            .map(|r| match (r.indices.first(), r.indices.last()) {
                (Some(a), Some(b)) => (*a, *b),
                _ => (1, 0),
            })
            .collect();
        for i in 0..m {
            for j in 0..=i {
                let overlap = bounds[i].0 <= bounds[j].1 && bounds[j].0 <= bounds[i].1;
                let g = if overlap { rows[i].dot(&rows[j]) } else { T::zero() };
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
        }
        // incremental Cholesky with rank filtering
        let tol = T::lit(RANK_DROP_TOL);
        let mut kept: Vec<usize> = Vec::new();
        let mut l: Vec<Vec<T>> = Vec::new();
        for i in 0..m {
            let gii = gram[(i, i)];
            if gii == T::zero() {
                continue;
            }
            let mut li: Vec<T> = Vec::with_capacity(kept.len() + 1);
            for (a, &ka) in kept.iter().enumerate() {
                let mut s = gram[(i, ka)];
                for b in 0..a {
                    s -= li[b] * l[a][b];
                }
                li.push(s / l[a][a]);
            }
            let resid = gii - li.iter().map(|v| *v * *v).sum::<T>();
            if resid <= tol * gii {
                continue;
            }
            li.push(resid.sqrt());
            l.push(li);
            kept.push(i);
        }
        let k = kept.len();
        let chol = if k == 0 {
            None
        } else {
            let mut g = DenseMatrix::zeros(k);
            for a in 0..k {
                for b in 0..k {
                    g[(a, b)] = gram[(kept[a], kept[b])];
                }
            }
            Some(Cholesky::factor(&g).map_err(|e| {
                Error::config(format!("constraint rows rank deficient after filtering: {e}"))
            })?)
        };
        Ok(Self { n, rows, kept, chol })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of rows surviving rank filtering.
    pub fn rank(&self) -> usize {
        self.kept.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseRow<T>] {
        &self.rows
    }

    /// `C x` over all (unfiltered) rows.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.rows.iter().map(|r| r.dot_dense(x)).collect()
    }

    /// `x ← P x`.
    pub fn project(&self, x: &mut [T]) {
        let Some(chol) = &self.chol else { return };
        let cx: Vec<T> = self.kept.iter().map(|&i| self.rows[i].dot_dense(x)).collect();
        let mu = chol.solve(&cx);
        for (&i, m) in self.kept.iter().zip(&mu) {
            let r = &self.rows[i];
            for (idx, v) in r.indices.iter().zip(&r.values) {
                x[*idx] -= *m * *v;
            }
        }
    }
}

/// `A` (SPD on `ker C`), the constraints and a right-hand side.
#[derive(Debug, Clone)]
pub struct SaddleSystem<T> {
    pub a: CsrMatrix<T>,
    pub constraints: ConstraintProjector<T>,
    pub rhs: Vec<T>,
}

/// Bound on `‖C x‖_∞ / ‖x‖_∞` accepted after a constrained solve.
pub const CONSTRAINT_RESIDUAL_TOL: f64 = 1e-9;

pub fn constrained_solve<T: Real>(sys: &SaddleSystem<T>, opts: &CgOptions) -> Result<CgOutcome<T>> {
    constrained_solve_with(&sys.a, &sys.constraints, &sys.rhs, opts)
}

/// Null-space projected CG for one right-hand side; `b` and every iterate are
/// projected onto `ker C`.
pub fn constrained_solve_with<T: Real>(
    a: &CsrMatrix<T>,
    constraints: &ConstraintProjector<T>,
    b: &[T],
    opts: &CgOptions,
) -> Result<CgOutcome<T>> {
    if constraints.dim() != a.nrows() {
        return Err(Error::config("constraint width does not match the operator"));
    }
    let mut out = projected_cg(a, b, opts, |v| constraints.project(v), |_| {})?;
    constraints.project(&mut out.x);
    let xn = norm_inf(&out.x);
    let cn = norm_inf(&constraints.apply(&out.x));
    if cn > T::lit(CONSTRAINT_RESIDUAL_TOL) * xn.max(T::min_positive_value()) {
        return Err(Error::numerical(format!(
            "constraint residual {cn:e} exceeds tolerance relative to solution size {xn:e}"
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cg::{cg_solve, Preconditioner};

    fn laplace_1d(n: usize) -> CsrMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, t)
    }

    #[test]
    fn empty_constraints_reduce_to_cg() {
        let a = laplace_1d(12);
        let b: Vec<f64> = (0..12).map(|i| i as f64 * 0.3 - 1.0).collect();
        let proj = ConstraintProjector::new(12, vec![]).unwrap();
        let x = constrained_solve_with(&a, &proj, &b, &CgOptions::with_tol(1e-12)).unwrap().x;
        let y = cg_solve(&a, &b, &CgOptions::with_tol(1e-12)).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_with_mean_constraint() {
        let n = 7;
        let proj = ConstraintProjector::new(n, vec![SparseRow::from_dense(&vec![1.0; n])]).unwrap();
        let mut b = vec![0.0; n];
        b[0] = 1.0;
        let sys = SaddleSystem {
            a: CsrMatrix::identity(n),
            constraints: proj,
            rhs: b,
        };
        let x = constrained_solve(&sys, &CgOptions::with_tol(1e-12)).unwrap().x;
        for (i, v) in x.iter().enumerate() {
            let want = if i == 0 { 1.0 } else { 0.0 } - 1.0 / n as f64;
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn dependent_rows_are_dropped() {
        let n = 5;
        let r1 = SparseRow::from_dense(&[1.0, 1.0, 0.0, 0.0, 0.0]);
        let r2 = SparseRow::from_dense(&[0.0, 0.0, 1.0, 1.0, 0.0]);
        let r3 = SparseRow::from_dense(&[2.0, 2.0, 3.0, 3.0, 0.0]);
        let zero = SparseRow::default();
        let proj = ConstraintProjector::new(n, vec![r1, zero, r2, r3]).unwrap();
        assert_eq!(proj.rank(), 2);
        let mut x: Vec<f64> = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        proj.project(&mut x);
        assert!(proj.apply(&x).iter().all(|v| v.abs() < 1e-14));
        assert_eq!(x[4], 5.0);
    }

    #[test]
    fn projected_iterates_stay_in_kernel() {
        let n = 30;
        let a = laplace_1d(n);
        let rows: Vec<SparseRow<f64>> = (0..4)
            .map(|k| {
                let v: Vec<f64> = (0..n).map(|i| ((i * (k + 2)) % 7) as f64 - 3.0).collect();
                SparseRow::from_dense(&v)
            })
            .collect();
        let proj = ConstraintProjector::new(n, rows).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let opts = CgOptions {
            tol: 1e-12,
            max_iter: None,
            precond: Preconditioner::Jacobi,
        };
        let mut worst = 0.0f64;
        let out = projected_cg(&a, &b, &opts, |v| proj.project(v), |x| {
            let c = proj.apply(x);
            worst = worst.max(norm_inf(&c) / norm_inf(x).max(1e-300));
        })
        .unwrap();
        assert!(worst < 1e-10, "{worst}");
        // residual orthogonal to ker C
        let mut r = a.mul_vec(&out.x);
        for (ri, bi) in r.iter_mut().zip(&b) {
            *ri -= bi;
        }
        proj.project(&mut r);
        assert!(norm2(&r) < 1e-10 * norm2(&b));
    }
}
