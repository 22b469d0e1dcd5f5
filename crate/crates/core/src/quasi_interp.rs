//! Projective weighted quasi-interpolation `I_H^β` from the fine P1 space to
//! the coarse one, assembled from local weighted L² projections on the node
//! patches `ω_v`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::assembly::{assemble_weighted_mass_local, check_same_mesh, element_weights, ElementWeights};
use crate::coefficients::CoefficientField;
use crate::error::{Error, Result};
use crate::geometry::WeightSpec;
use crate::linalg::{Cholesky, SparseRow};
use crate::mesh::{patch, MeshHierarchy, MeshLevel};
use crate::quadrature::QuadParams;
use crate::scalar::Real;

/// One functional row per interior coarse node; `(I_H^β u)(v) = r_v · u`.
#[derive(Debug, Clone)]
pub struct InterpolationOperator<T> {
    beta: T,
    /// Interior coarse nodes, in the coarse mesh's interior order.
    nodes: Vec<usize>,
    rows: Vec<SparseRow<T>>,
    fine_dim: usize,
    coarse_dim: usize,
}

/// Builds the operator for the weight `d^(2β)`; `None` is the unit weight.
pub fn build_interpolation<T: Real>(
    hier: &MeshHierarchy<T>,
    weight: Option<&WeightSpec<T>>,
    params: &QuadParams,
) -> Result<InterpolationOperator<T>> {
    let one = CoefficientField::constant(T::one())?;
    let ew = element_weights(hier.fine(), &one, weight, params)?;
    InterpolationOperator::from_element_weights(hier, &ew)
}

impl<T: Real> InterpolationOperator<T> {
    pub fn from_element_weights(hier: &MeshHierarchy<T>, ew: &ElementWeights<T>) -> Result<Self> {
        check_same_mesh(hier.fine(), ew)?;
        let coarse = hier.coarse();
        let fine = hier.fine();
        let p = hier.prolongation();
        let rows = coarse
            .interior_nodes()
            .par_iter()
            .map(|&v| -> Result<SparseRow<T>> {
                let omega = patch(coarse, v, 0)?;
                let (nodes, gram) = assemble_weighted_mass_local(hier, &omega, ew)?;
                let mut e = vec![T::zero(); nodes.len()];
                e[nodes.binary_search(&v).expect("centre in its patch")] = T::one();
                let y = Cholesky::factor(&gram)?.solve(&e);
                // r_v(i) = ∫_{ω_v} φ_i ψ w with ψ = Σ_j y_j λ_j
                let psi = |fine_node: usize| -> T {
                    let (cols, vals) = p.row(fine_node);
                    cols.iter()
                        .zip(vals)
                        .filter_map(|(j, x)| nodes.binary_search(j).ok().map(|k| y[k] * *x))
                        .sum()
                };
                let mut acc: Vec<(usize, T)> = Vec::new();
                for &ct in &omega.elements {
                    for &ft in hier.children(ct) {
                        let tri = fine.triangles()[ft];
                        let vals = tri.map(psi);
                        let m = &ew.mass[ft];
                        for a in 0..3 {
                            let s: T = (0..3).map(|b| m[a][b] * vals[b]).sum();
                            acc.push((tri[a], s));
                        }
                    }
                }
                acc.sort_unstable_by_key(|e| e.0);
                let mut row = SparseRow::default();
                for (i, s) in acc {
                    if row.indices.last() == Some(&i) {
                        *row.values.last_mut().expect("nonempty") += s;
                    } else {
                        row.indices.push(i);
                        row.values.push(s);
                    }
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            beta: ew.beta,
            nodes: coarse.interior_nodes().to_vec(),
            rows,
            fine_dim: fine.num_nodes(),
            coarse_dim: coarse.num_nodes(),
        })
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn rows(&self) -> &[SparseRow<T>] {
        &self.rows
    }

    /// Row of the interior coarse node with interior index `k`.
    pub fn row(&self, k: usize) -> &SparseRow<T> {
        &self.rows[k]
    }

    /// Nodal values at the interior coarse nodes of `I_H^β u`, for `u` given
    /// at all fine nodes.
    pub fn apply(&self, u: &[T]) -> Result<Vec<T>> {
        if u.len() != self.fine_dim {
            return Err(Error::config(format!(
                "interpolation expects {} fine values, got {}",
                self.fine_dim,
                u.len()
            )));
        }
        Ok(self.rows.iter().map(|r| r.dot_dense(u)).collect())
    }

    /// `I_H^β u` as a coarse vector over all coarse nodes (zero on ∂Ω).
    pub fn apply_full(&self, u: &[T]) -> Result<Vec<T>> {
        let vals = self.apply(u)?;
        let mut full = vec![T::zero(); self.coarse_dim];
        for (&v, x) in self.nodes.iter().zip(vals) {
            full[v] = x;
        }
        Ok(full)
    }
}

/// Weighted L² norm squared from per-element mass matrices.
pub fn weighted_l2_sq<T: Real>(mesh: &MeshLevel<T>, ew: &ElementWeights<T>, u: &[T]) -> T {
    mesh.triangles()
        .iter()
        .zip(&ew.mass)
        .map(|(tri, m)| {
            let ut = tri.map(|v| u[v]);
            (0..3)
                .flat_map(|a| (0..3).map(move |b| (a, b)))
                .map(|(a, b)| ut[a] * m[a][b] * ut[b])
                .sum::<T>()
        })
        .sum()
}

/// Weighted squared H¹ seminorm `Σ_t |∇u|²_t ∫_t w`.
pub fn weighted_grad_sq<T: Real>(mesh: &MeshLevel<T>, ew: &ElementWeights<T>, u: &[T]) -> T {
    (0..mesh.num_triangles())
        .map(|t| {
            let g = mesh.gradients(t);
            let tri = mesh.triangles()[t];
            let mut grad = g[0] * u[tri[0]];
            grad = grad + g[1] * u[tri[1]];
            grad = grad + g[2] * u[tri[2]];
            grad.dot(grad) * ew.w[t]
        })
        .sum()
}

/// Largest observed ratios of the stability and approximation estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport<T> {
    /// `‖I u‖ / ‖u‖` in `L²_β`.
    pub l2: T,
    /// `‖∇I u‖ / ‖∇u‖` in `L²_β`.
    pub h1: T,
    /// `‖u - I u‖ / (H ‖∇u‖)` in `L²_β`.
    pub approximation: T,
}

/// Samples random fine functions (zero on ∂Ω) from a seeded generator.
pub fn measure_stability<T: Real>(
    op: &InterpolationOperator<T>,
    hier: &MeshHierarchy<T>,
    ew: &ElementWeights<T>,
    samples: usize,
    seed: u64,
) -> Result<StabilityReport<T>> {
    let fine = hier.fine();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = StabilityReport {
        l2: T::zero(),
        h1: T::zero(),
        approximation: T::zero(),
    };
    for _ in 0..samples {
        let free: Vec<T> = (0..fine.interior_nodes().len())
            .map(|_| T::lit(rng.gen_range(-1.0..1.0)))
            .collect();
        let u = fine.extend_free(&free);
        let iu = hier.prolong(&op.apply_full(&u)?);
        let diff: Vec<T> = u.iter().zip(&iu).map(|(a, b)| *a - *b).collect();
        let (nu, gu) = (weighted_l2_sq(fine, ew, &u).sqrt(), weighted_grad_sq(fine, ew, &u).sqrt());
        if nu == T::zero() || gu == T::zero() {
            continue;
        }
        rep.l2 = rep.l2.max(weighted_l2_sq(fine, ew, &iu).sqrt() / nu);
        rep.h1 = rep.h1.max(weighted_grad_sq(fine, ew, &iu).sqrt() / gu);
        rep.approximation = rep
            .approximation
            .max(weighted_l2_sq(fine, ew, &diff).sqrt() / (hier.coarse().h() * gu));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point2, SingularSet};

    fn op(cl: u32, fl: u32, beta: f64) -> (MeshHierarchy<f64>, InterpolationOperator<f64>) {
        let h = MeshHierarchy::build(cl, fl).unwrap();
        let w = WeightSpec::new(SingularSet::point(Point2::new(0.5, 0.5), 1.0).unwrap(), beta).unwrap();
        let op = build_interpolation(&h, Some(&w), &QuadParams::default()).unwrap();
        (h, op)
    }

    #[test]
    fn reproduces_coarse_hats_and_constants() {
        let (h, op) = op(2, 4, 0.0);
        for (k, &v) in h.coarse().interior_nodes().iter().enumerate() {
            let got = op.apply(&h.prolong_hat(v)).unwrap();
            for (j, g) in got.iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-12);
            }
        }
        // constants lie in the local space only on patches away from ∂Ω
        let (h3, op3) = self::op(3, 5, 0.0);
        let ones = vec![1.0; h3.fine().num_nodes()];
        let got = op3.apply(&ones).unwrap();
        for (&v, g) in op3.nodes().iter().zip(&got) {
            let (i, j) = h3.coarse().grid_coords(v);
            if (2..=6).contains(&i) && (2..=6).contains(&j) {
                assert!((g - 1.0).abs() < 1e-12);
            }
        }
        assert!(op.apply(&[0.0; 3]).is_err());
    }

    #[test]
    fn rows_are_local() {
        let (h, op) = op(2, 4, 0.5);
        for (k, &v) in h.coarse().interior_nodes().iter().enumerate() {
            let c = h.coarse().nodes()[v];
            for &i in &op.row(k).indices {
                let x = h.fine().nodes()[i];
                // ω_v lies in the box of half-width H around v
                assert!((x.x - c.x).abs() <= 0.25 + 1e-14 && (x.y - c.y).abs() <= 0.25 + 1e-14);
            }
        }
    }

    #[test]
    fn projection_on_random_vectors() {
        let (h, op) = op(2, 4, -0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let u: Vec<f64> = (0..h.fine().num_nodes()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let once = op.apply(&u).unwrap();
            let twice = op.apply(&h.prolong_free(&once)).unwrap();
            for (a, b) in once.iter().zip(&twice) {
                assert!((a - b).abs() < 1e-10 * once.iter().fold(1e-300f64, |m, x| m.max(x.abs())));
            }
        }
    }

    #[test]
    fn stability_of_coarse_input() {
        let (h, op) = op(2, 4, 0.25);
        let one = CoefficientField::constant(1.0).unwrap();
        let w = WeightSpec::new(SingularSet::point(Point2::new(0.5, 0.5), 1.0).unwrap(), 0.25).unwrap();
        let ew = element_weights(h.fine(), &one, Some(&w), &QuadParams::default()).unwrap();
        let coarse = h.prolong_hat(h.coarse().node_at(1, 2));
        let iu = h.prolong(&op.apply_full(&coarse).unwrap());
        let diff: Vec<f64> = coarse.iter().zip(&iu).map(|(a, b)| a - b).collect();
        assert!(weighted_l2_sq(h.fine(), &ew, &diff) < 1e-24);
        let rep = measure_stability(&op, &h, &ew, 4, 1).unwrap();
        assert!(rep.l2 > 0.0 && rep.l2 < 50.0 && rep.h1 < 50.0 && rep.approximation < 50.0);
    }
}
