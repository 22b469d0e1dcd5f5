use super::csr::{axpy, dot, norm2, CsrMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preconditioner {
    None,
    #[default]
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Relative residual `‖b - Ax‖ / ‖b‖` to reach.
    pub tol: f64,
    /// Defaults to `10 n` when `None`.
    pub max_iter: Option<usize>,
    pub precond: Preconditioner,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: None,
            precond: Preconditioner::Jacobi,
        }
    }
}

impl CgOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    pub residual: f64,
}

/// Preconditioned conjugate gradients for SPD systems.
pub fn cg_solve<T: Real>(a: &CsrMatrix<T>, b: &[T], opts: &CgOptions) -> Result<Vec<T>> {
    Ok(cg_solve_monitored(a, b, opts, |_| {})?.x)
}

/// Like [`cg_solve`], calling `monitor` with every iterate.
pub fn cg_solve_monitored<T: Real>(
    a: &CsrMatrix<T>,
    b: &[T],
    opts: &CgOptions,
    monitor: impl FnMut(&[T]),
) -> Result<CgOutcome<T>> {
    let identity = |_: &mut [T]| {};
    projected_cg(a, b, opts, identity, monitor)
}

/// CG on `P A P x = P b` where `project` applies an orthogonal projector `P`
/// in place. With the identity this is plain (preconditioned) CG. The
/// preconditioner is applied as `P D⁻¹ P`, which stays SPD on the range of P.
pub(crate) fn projected_cg<T: Real>(
    a: &CsrMatrix<T>,
    b: &[T],
    opts: &CgOptions,
    mut project: impl FnMut(&mut [T]),
    mut monitor: impl FnMut(&[T]),
) -> Result<CgOutcome<T>> {
    let n = a.nrows();
    assert_eq!(b.len(), n, "right-hand side length");
    let max_iter = opts.max_iter.unwrap_or(10 * n.max(1));
    let inv_diag: Vec<T> = match opts.precond {
        Preconditioner::None => vec![T::one(); n],
        Preconditioner::Jacobi => a
            .diagonal()
            .into_iter()
            .map(|d| if d > T::zero() { T::one() / d } else { T::one() })
            .collect(),
    };

    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    project(&mut r);
    let bnorm = norm2(&r);
    if bnorm == T::zero() {
        return Ok(CgOutcome {
            x,
            iterations: 0,
            residual: 0.0,
        });
    }
    let tol = T::lit(opts.tol) * bnorm;
    let precond = |r: &[T], z: &mut Vec<T>, project: &mut dyn FnMut(&mut [T])| {
        z.clear();
        z.extend(r.iter().zip(&inv_diag).map(|(ri, di)| *ri * *di));
        project(z);
    };
    let mut z = Vec::with_capacity(n);
    precond(&r, &mut z, &mut project);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); n];
    let mut rnorm = bnorm;
    for it in 1..=max_iter {
        a.spmv(&p, &mut ap);
        project(&mut ap);
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            return Err(Error::Solver {
                message: "operator not positive definite on the search space".into(),
                residual: (rnorm / bnorm).as_f64(),
                iterations: it,
            });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        monitor(&x);
        rnorm = norm2(&r);
        if rnorm <= tol {
            // true residual check guards against drift of the recursive one
            let mut res = a.mul_vec(&x);
            for (ri, bi) in res.iter_mut().zip(b) {
                *ri = *bi - *ri;
            }
            project(&mut res);
            let true_norm = norm2(&res);
            if true_norm <= tol * T::lit(10.0) {
                return Ok(CgOutcome {
                    x,
                    iterations: it,
                    residual: (true_norm / bnorm).as_f64(),
                });
            }
            r = res;
        }
        precond(&r, &mut z, &mut project);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = *zi + beta * *pi;
        }
    }
    Err(Error::Solver {
        message: format!("conjugate gradients did not converge to {:.1e}", opts.tol),
        residual: (rnorm / bnorm).as_f64(),
        iterations: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn identity_returns_rhs() {
        let b = vec![1.0, -2.0, 3.5];
        let x = cg_solve(&CsrMatrix::identity(3), &b, &CgOptions::default()).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn tridiagonal_three_by_three() {
        let x = cg_solve(&laplace_1d(3), &[1.0, 1.0, 1.0], &CgOptions::default()).unwrap();
        for (got, want) in x.iter().zip([1.5, 2.0, 1.5]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let x = cg_solve(&laplace_1d(5), &[0.0; 5], &CgOptions::default()).unwrap();
        assert!(x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn energy_decreases_monotonically() {
        let n = 60;
        let a = laplace_1d(n);
        let b: Vec<f64> = (0..n).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let mut energies = Vec::new();
        let opts = CgOptions {
            precond: Preconditioner::None,
            ..CgOptions::default()
        };
        cg_solve_monitored(&a, &b, &opts, |x| {
            let ax = a.mul_vec(x);
            energies.push(0.5 * dot(x, &ax) - dot(&b, x));
        })
        .unwrap();
        for w in energies.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs());
        }
    }

    #[test]
    fn reports_non_convergence() {
        let opts = CgOptions {
            tol: 1e-14,
            max_iter: Some(2),
            precond: Preconditioner::None,
        };
        let err = cg_solve(&laplace_1d(40), &[1.0; 40], &opts).unwrap_err();
        assert!(matches!(err, Error::Solver { iterations: 2, .. }));
    }
}
