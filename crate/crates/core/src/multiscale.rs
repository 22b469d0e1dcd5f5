//! The truncated Petrov–Galerkin multiscale solve, the fine reference
//! solution, weighted error norms and convergence studies.

use rayon::prelude::*;

use crate::assembly::{assemble_singular_rhs, element_weights, AssembledForms, ElementWeights};
use crate::coefficients::CoefficientField;
use crate::correctors::{build_corrector_basis, CorrectorBasis, WeightedForms};
use crate::error::{Error, Result};
use crate::geometry::{check_source_exponent, SingularSet, WeightSpec};
use crate::linalg::{cg_solve, norm_inf, CgOptions, CsrMatrix, DenseMatrix, Lu, SparseRow};
use crate::mesh::{MeshHierarchy, MeshLevel};
use crate::quadrature::QuadParams;
use crate::quasi_interp::weighted_grad_sq;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct MultiscaleSolution<T> {
    /// One coefficient per interior coarse node.
    pub coarse_coeffs: Vec<T>,
    /// `Σ_j c_j ms_j` at all fine nodes.
    pub fine: Vec<T>,
    /// Largest over smallest LU pivot of the coarse system.
    pub pivot_ratio: T,
}

/// `B_ij = ms_iᵀ K ms_j` with rows from `test` and columns from `trial`.
pub fn petrov_galerkin_matrix<T: Real>(
    trial: &CorrectorBasis<T>,
    test: &CorrectorBasis<T>,
    stiffness: &CsrMatrix<T>,
) -> Result<DenseMatrix<T>> {
    if trial.nodes != test.nodes || trial.k != test.k {
        return Err(Error::config("trial and test bases must share the mesh and the patch size"));
    }
    let n = trial.len();
    let nf = stiffness.nrows();
    let mut by_fine: Vec<Vec<(usize, T)>> = vec![Vec::new(); nf];
    for (i, col) in test.ms_basis.iter().enumerate() {
        for (f, x) in col.indices.iter().zip(&col.values) {
            by_fine[*f].push((i, *x));
        }
    }
    let cols: Vec<Vec<T>> = trial
        .ms_basis
        .par_iter()
        .map_init(
            || (vec![T::zero(); nf], vec![false; nf], Vec::new()),
            |(y, mark, touched), col| {
                for (f, x) in col.indices.iter().zip(&col.values) {
                    let (ks, vs) = stiffness.row(*f);
                    for (g, a) in ks.iter().zip(vs) {
                        if !mark[*g] {
                            mark[*g] = true;
                            touched.push(*g);
                        }
                        y[*g] += *a * *x;
                    }
                }
                let mut out = vec![T::zero(); n];
                for &g in touched.iter() {
                    for (i, t) in &by_fine[g] {
                        out[*i] += *t * y[g];
                    }
                    y[g] = T::zero();
                    mark[g] = false;
                }
                touched.clear();
                out
            },
        )
        .collect();
    let mut b = DenseMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            b[(i, j)] = *x;
        }
    }
    Ok(b)
}

/// Solves `Σ_j B_ij c_j = rhs · test_i` and assembles the trial combination.
pub fn solve_multiscale<T: Real>(
    trial: &CorrectorBasis<T>,
    test: &CorrectorBasis<T>,
    forms: &AssembledForms<T>,
    rhs: &[T],
) -> Result<MultiscaleSolution<T>> {
    let b = petrov_galerkin_matrix(trial, test, &forms.stiffness)?;
    let g: Vec<T> = test.ms_basis.iter().map(|c| c.dot_dense(rhs)).collect();
    let lu = Lu::factor(&b).map_err(|e| e.context("multiscale Petrov-Galerkin system"))?;
    let c = lu.solve(&g);
    let bc = b.mul_vec(&c);
    let res = norm_inf(&bc.iter().zip(&g).map(|(x, y)| *x - *y).collect::<Vec<_>>());
    if res > T::lit(1e-10) * norm_inf(&g) {
        return Err(Error::numerical(format!(
            "coarse solve residual {res:e} too large (pivot ratio {:e})",
            lu.pivot_ratio()
        )));
    }
    let mut fine = vec![T::zero(); rhs.len()];
    for (cj, col) in c.iter().zip(&trial.ms_basis) {
        for (f, x) in col.indices.iter().zip(&col.values) {
            fine[*f] += *cj * *x;
        }
    }
    Ok(MultiscaleSolution {
        coarse_coeffs: c,
        fine,
        pivot_ratio: lu.pivot_ratio(),
    })
}

/// Standard P1 solution on the fine mesh, over all fine nodes.
pub fn solve_reference<T: Real>(
    mesh: &MeshLevel<T>,
    forms: &AssembledForms<T>,
    rhs: &[T],
    tol: f64,
) -> Result<Vec<T>> {
    let k = forms.free_stiffness();
    let b = mesh.restrict_free(rhs);
    let x = cg_solve(&k, &b, &CgOptions::with_tol(tol)).map_err(|e| e.context("fine reference solve"))?;
    Ok(mesh.extend_free(&x))
}

/// Plain coarse P1 Galerkin solution (hats integrated on the fine mesh),
/// prolonged to the fine mesh.
pub fn solve_coarse_galerkin<T: Real>(
    hier: &MeshHierarchy<T>,
    forms: &AssembledForms<T>,
    rhs: &[T],
    tol: f64,
) -> Result<Vec<T>> {
    let coarse = hier.coarse();
    let cols: Vec<SparseRow<T>> = coarse
        .interior_nodes()
        .iter()
        .map(|&v| SparseRow::from_dense(&hier.prolong_hat(v)))
        .collect();
    let basis = CorrectorBasis {
        beta: T::zero(),
        k: Some(0),
        coarse_level: coarse.level(),
        fine_level: hier.fine().level(),
        nodes: coarse.interior_nodes().to_vec(),
        corrections: Vec::new(),
        ms_basis: cols,
    };
    let b = petrov_galerkin_matrix(&basis, &basis, &forms.stiffness)?;
    let n = b.dim();
    let mut trip = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if b[(i, j)] != T::zero() {
                trip.push((i, j, b[(i, j)]));
            }
        }
    }
    let k = CsrMatrix::from_triplets(n, n, trip);
    let g: Vec<T> = basis.ms_basis.iter().map(|c| c.dot_dense(rhs)).collect();
    let c = cg_solve(&k, &g, &CgOptions::with_tol(tol)).map_err(|e| e.context("coarse Galerkin solve"))?;
    Ok(hier.prolong_free(&c))
}

/// `‖∇(u - v)‖_{L²_α}` from per-element weight integrals `∫_t d^(2α)`.
pub fn weighted_h1_seminorm_error<T: Real>(mesh: &MeshLevel<T>, weights: &ElementWeights<T>, u: &[T], v: &[T]) -> T {
    let e: Vec<T> = u.iter().zip(v).map(|(a, b)| *a - *b).collect();
    weighted_grad_sq(mesh, weights, &e).sqrt()
}

/// Convergence rate `α - (d - ℓ)/2 + 1` predicted for `d = 2`.
pub fn predicted_rate(alpha: f64, ell: u32) -> f64 {
    alpha - (2.0 - f64::from(ell)) / 2.0 + 1.0
}

/// Least-squares slope of `log₂ err` against `log₂ H`.
pub fn fitted_rate(hs: &[f64], errs: &[f64]) -> Option<f64> {
    if hs.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = hs.iter().map(|h| h.log2()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.log2()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Inputs of a convergence study.
#[derive(Debug, Clone)]
pub struct StudyConfig<T> {
    pub field: CoefficientField<T>,
    pub source: SingularSet<T>,
    pub alphas: Vec<f64>,
    pub coarse_levels: Vec<u32>,
    pub fine_level: u32,
    /// Patch layers; `None` uses global correctors.
    pub k: Option<usize>,
    pub quad: QuadParams,
    pub corrector_tol: f64,
    pub reference_tol: f64,
    pub allow_endpoint: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub alpha: f64,
    pub h: f64,
    pub error: f64,
    /// `log₂(err(2H) / err(H))`, absent for the coarsest H.
    pub rate: Option<f64>,
    pub predicted_rate: f64,
    /// Error of the plain coarse P1 solution, for comparison.
    pub coarse_p1_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
    /// Least-squares rate per α, in the order of `StudyConfig::alphas`.
    pub fitted: Vec<(f64, Option<f64>)>,
}

impl ErrorReport {
    pub fn rows_for(&self, alpha: f64) -> impl Iterator<Item = &ErrorRow> {
        self.rows.iter().filter(move |r| r.alpha == alpha)
    }
}

pub(crate) fn weight_for<T: Real>(source: &SingularSet<T>, beta: f64, allow_endpoint: bool) -> Result<WeightSpec<T>> {
    if allow_endpoint {
        WeightSpec::new_allow_endpoint(source.clone(), T::lit(beta))
    } else {
        WeightSpec::new(source.clone(), T::lit(beta))
    }
}

/// Trial (`+α`) and test (`-α`) bases and the multiscale solution on one
/// hierarchy.
pub struct MultiscaleRun<T> {
    pub trial_forms: WeightedForms<T>,
    pub trial: CorrectorBasis<T>,
    pub test: CorrectorBasis<T>,
    pub solution: MultiscaleSolution<T>,
}

#[allow(clippy::too_many_arguments)]
pub fn run_multiscale<T: Real>(
    hier: &MeshHierarchy<T>,
    field: &CoefficientField<T>,
    source: &SingularSet<T>,
    forms: &AssembledForms<T>,
    rhs: &[T],
    alpha: f64,
    k: Option<usize>,
    quad: &QuadParams,
    corrector_tol: f64,
    allow_endpoint: bool,
) -> Result<MultiscaleRun<T>> {
    let opts = CgOptions::with_tol(corrector_tol);
    let w_trial = weight_for(source, alpha, allow_endpoint)?;
    let trial_forms = WeightedForms::new(hier, field, Some(&w_trial), quad)?;
    let trial = build_corrector_basis(hier, &trial_forms, k, &opts)?;
    let test = if alpha == 0.0 {
        trial.clone()
    } else {
        let w_test = weight_for(source, -alpha, allow_endpoint)?;
        let test_forms = WeightedForms::new(hier, field, Some(&w_test), quad)?;
        build_corrector_basis(hier, &test_forms, k, &opts)?
    };
    let solution = solve_multiscale(&trial, &test, forms, rhs)?;
    Ok(MultiscaleRun {
        trial_forms,
        trial,
        test,
        solution,
    })
}

pub fn convergence_study<T: Real>(cfg: &StudyConfig<T>) -> Result<ErrorReport> {
    let ell = cfg.source.ell();
    for &a in &cfg.alphas {
        check_source_exponent(a, ell, cfg.allow_endpoint)?;
    }
    let mut levels = cfg.coarse_levels.clone();
    levels.sort_unstable();
    levels.dedup();
    if let Some(&l) = levels.iter().find(|&&l| l >= cfg.fine_level) {
        return Err(Error::config(format!(
            "coarse level {l} must be coarser than the fine level {}",
            cfg.fine_level
        )));
    }
    let fine = MeshLevel::build(cfg.fine_level)?;
    let forms = AssembledForms::new(&fine, &cfg.field)?;
    let rhs = assemble_singular_rhs(&fine, &cfg.source);
    let reference = solve_reference(&fine, &forms, &rhs, cfg.reference_tol)?;
    let one = CoefficientField::constant(T::one())?;

    let jobs: Vec<(f64, u32)> = cfg
        .alphas
        .iter()
        .flat_map(|&a| levels.iter().map(move |&l| (a, l)))
        .collect();
    let results: Vec<(f64, u32, f64, f64)> = jobs
        .par_iter()
        .map(|&(alpha, level)| -> Result<(f64, u32, f64, f64)> {
            let ctx = |e: Error| e.context(format_args!("alpha={alpha}, H=2^-{level}"));
            let hier = MeshHierarchy::build(level, cfg.fine_level).map_err(ctx)?;
            let run = run_multiscale(
                &hier,
                &cfg.field,
                &cfg.source,
                &forms,
                &rhs,
                alpha,
                cfg.k,
                &cfg.quad,
                cfg.corrector_tol,
                cfg.allow_endpoint,
            )
            .map_err(ctx)?;
            let w = weight_for(&cfg.source, alpha, cfg.allow_endpoint).map_err(ctx)?;
            let ew = element_weights(&fine, &one, Some(&w), &cfg.quad).map_err(ctx)?;
            let err = weighted_h1_seminorm_error(&fine, &ew, &reference, &run.solution.fine);
            let p1 = solve_coarse_galerkin(&hier, &forms, &rhs, cfg.reference_tol).map_err(ctx)?;
            let p1_err = weighted_h1_seminorm_error(&fine, &ew, &reference, &p1);
            Ok((alpha, level, err.as_f64(), p1_err.as_f64()))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut fitted = Vec::new();
    for &alpha in &cfg.alphas {
        let mut prev: Option<f64> = None;
        let mut hs = Vec::new();
        let mut errs = Vec::new();
        for &(a, level, error, p1) in &results {
            if a != alpha {
                continue;
            }
            let h = 0.5f64.powi(level as i32);
            rows.push(ErrorRow {
                alpha,
                h,
                error,
                rate: prev.map(|p| (p / error).log2()),
                predicted_rate: predicted_rate(alpha, ell),
                coarse_p1_error: p1,
            });
            prev = Some(error);
            hs.push(h);
            errs.push(error);
        }
        fitted.push((alpha, fitted_rate(&hs, &errs)));
    }
    Ok(ErrorReport { rows, fitted })
}
