//! P1 stiffness and mass assembly with optional distance weights, and the
//! load vectors of Dirac sources on points and segments.

use rayon::prelude::*;

use crate::coefficients::CoefficientField;
use crate::error::{Error, Result};
use crate::geometry::{Point2, SingularGeometry, SingularSet, WeightSpec};
use crate::linalg::{CsrMatrix, DenseMatrix};
use crate::mesh::{MeshHierarchy, MeshLevel, Patch};
use crate::quadrature::{barycentric, QuadParams, QuadratureRule, WeightedQuadrature};
use crate::scalar::Real;

/// Per-triangle integrals of one weight `w = d_Λ^(2β)` on a mesh.
#[derive(Debug, Clone)]
pub struct ElementWeights<T> {
    pub beta: T,
    /// `∫_t w`.
    pub w: Vec<T>,
    /// `∫_t A w`.
    pub aw: Vec<T>,
    /// `∫_t φ_a φ_b w` for the local hats.
    pub mass: Vec<[[T; 3]; 3]>,
}

/// Computes [`ElementWeights`]; `weight = None` means the unit weight.
pub fn element_weights<T: Real>(
    mesh: &MeshLevel<T>,
    field: &CoefficientField<T>,
    weight: Option<&WeightSpec<T>>,
    params: &QuadParams,
) -> Result<ElementWeights<T>> {
    let quad = match weight {
        Some(w) if w.beta() != T::zero() => Some(WeightedQuadrature::new(w.clone(), params.clone())?),
        _ => None,
    };
    let base = QuadratureRule::<T>::degree6();
    let per: Vec<(T, T, [[T; 3]; 3])> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let tri = mesh.coords(t);
            let mut w = T::zero();
            let mut aw = T::zero();
            let mut m = [[T::zero(); 3]; 3];
            let mut visit = |x: Point2<T>, q: T| {
                let b = barycentric(&tri, x);
                w += q;
                aw += q * field.evaluate(x);
                for a in 0..3 {
                    for c in 0..3 {
                        m[a][c] += q * b[a] * b[c];
                    }
                }
            };
            match &quad {
                Some(quad) => quad.for_each_point(&tri, &mut visit),
                None => {
                    let area = mesh.area(t);
                    for (p, &wq) in base.points.iter().zip(&base.weights) {
                        let x = crate::quadrature::from_barycentric(&tri, p);
                        visit(x, wq * area);
                    }
                }
            }
            (w, aw, m)
        })
        .collect();
    let mut out = ElementWeights {
        beta: weight.map_or(T::zero(), |w| w.beta()),
        w: Vec::with_capacity(per.len()),
        aw: Vec::with_capacity(per.len()),
        mass: Vec::with_capacity(per.len()),
    };
    for (w, aw, m) in per {
        out.w.push(w);
        out.aw.push(aw);
        out.mass.push(m);
    }
    Ok(out)
}

/// `Σ_t (∇φ_a·∇φ_b) c_t` over all nodes, for per-element factors `c_t`.
pub fn stiffness_from_elements<T: Real>(mesh: &MeshLevel<T>, factors: &[T]) -> CsrMatrix<T> {
    let mut trip = Vec::with_capacity(9 * mesh.num_triangles());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let g = mesh.gradients(t);
        for a in 0..3 {
            for b in 0..3 {
                trip.push((tri[a], tri[b], g[a].dot(g[b]) * factors[t]));
            }
        }
    }
    CsrMatrix::from_triplets(mesh.num_nodes(), mesh.num_nodes(), trip)
}

/// `∫ A ∇φ_i·∇φ_j d_Λ^(2β)` over all nodes (unweighted when `weight` is `None`).
pub fn assemble_stiffness<T: Real>(
    mesh: &MeshLevel<T>,
    field: &CoefficientField<T>,
    weight: Option<&WeightSpec<T>>,
    params: &QuadParams,
) -> Result<CsrMatrix<T>> {
    let ew = element_weights(mesh, field, weight, params)?;
    Ok(stiffness_from_elements(mesh, &ew.aw))
}

/// Weighted Gram matrix `∫_{ω} λ_j λ_k d^(2β)` of the coarse hats of the
/// interior patch nodes, integrated on the fine mesh. Returns the nodes (sorted) and
/// the matrix.
pub fn assemble_weighted_mass_local<T: Real>(
    hier: &MeshHierarchy<T>,
    patch: &Patch,
    fine_weights: &ElementWeights<T>,
) -> Result<(Vec<usize>, DenseMatrix<T>)> {
    let coarse = hier.coarse();
    let mut nodes: Vec<usize> = patch
        .elements
        .iter()
        .flat_map(|&t| coarse.triangles()[t])
        .filter(|&v| coarse.is_interior(v))
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    let local = |v: usize| nodes.binary_search(&v).ok();
    let mut m = DenseMatrix::zeros(nodes.len());
    let p = hier.prolongation();
    for &ct in &patch.elements {
        for &ft in hier.children(ct) {
            let ftri = hier.fine().triangles()[ft];
            let mt = &fine_weights.mass[ft];
            for a in 0..3 {
                let (ca, va) = p.row(ftri[a]);
                for b in 0..3 {
                    let (cb, vb) = p.row(ftri[b]);
                    for (j, x) in ca.iter().zip(va) {
                        let Some(lj) = local(*j).filter(|_| coarse.triangles()[ct].contains(j)) else {
                            continue;
                        };
                        for (k, y) in cb.iter().zip(vb) {
                            let Some(lk) = local(*k).filter(|_| coarse.triangles()[ct].contains(k)) else {
                                continue;
                            };
                            m[(lj, lk)] += *x * *y * mt[a][b];
                        }
                    }
                }
            }
        }
    }
    crate::linalg::Cholesky::factor(&m)
        .map_err(|e| e.context(format_args!("weighted Gram matrix of patch around node {}", patch.center)))?;
    Ok((nodes, m))
}

/// Parameters in `(0, 1)` where the segment `a + t (b - a)` crosses a mesh
/// line `x = ih`, `y = jh` or `x - y = mh`, together with 0 and 1.
pub fn segment_breakpoints<T: Real>(mesh: &MeshLevel<T>, a: Point2<T>, b: Point2<T>) -> Vec<T> {
    let n = T::from_usize_lossy(mesh.cells_per_side());
    let d = b - a;
    let mut ts = vec![T::zero(), T::one()];
    let mut crossings = |start: T, delta: T, lo: T, hi: T| {
        if delta == T::zero() {
            return;
        }
        let (s0, s1) = (start * n, (start + delta) * n);
        let (lo_k, hi_k) = (s0.min(s1).max(lo * n).ceil(), s0.max(s1).min(hi * n).floor());
        let mut k = lo_k;
        while k <= hi_k {
            let t = (k - s0) / (s1 - s0);
            if t > T::zero() && t < T::one() {
                ts.push(t);
            }
            k += T::one();
        }
    };
    crossings(a.x, d.x, T::zero(), T::one());
    crossings(a.y, d.y, T::zero(), T::one());
    crossings(a.x - a.y, d.x - d.y, -T::one(), T::one());
    ts.sort_by(|p, q| p.partial_cmp(q).expect("finite breakpoints"));
    let eps = T::lit(1e-14);
    ts.dedup_by(|p, q| (*p - *q).abs() <= eps);
    ts
}

/// Load vector `b_i = ∫_Λ f φ_i ds` over all nodes.
pub fn assemble_singular_rhs<T: Real>(mesh: &MeshLevel<T>, lambda: &SingularSet<T>) -> Vec<T> {
    let mut b = vec![T::zero(); mesh.num_nodes()];
    let add_point = |x: Point2<T>, f: T, b: &mut Vec<T>| {
        let (t, bary) = mesh.locate(x);
        for (k, &v) in mesh.triangles()[t].iter().enumerate() {
            b[v] += f * bary[k];
        }
    };
    match lambda.geometry() {
        SingularGeometry::Point(p) => add_point(*p, lambda.density()[0], &mut b),
        SingularGeometry::PointPair(ps) => {
            for (p, f) in ps.iter().zip(lambda.density()) {
                add_point(*p, *f, &mut b);
            }
        }
        SingularGeometry::Segment(a, c) => {
            let (a, c) = (*a, *c);
            let f = lambda.density()[0];
            let len = a.dist(c);
            let half = T::lit(0.5);
            let off = T::lit(0.5 / 3f64.sqrt());
            for w in segment_breakpoints(mesh, a, c).windows(2) {
                let (t0, t1) = (w[0], w[1]);
                let mid = (t0 + t1) * half;
                let h = t1 - t0;
                let (tri_id, _) = mesh.locate(a.lerp(c, mid));
                let tri = mesh.coords(tri_id);
                for q in [mid - off * h, mid + off * h] {
                    let bary = barycentric(&tri, a.lerp(c, q));
                    for (k, &v) in mesh.triangles()[tri_id].iter().enumerate() {
                        b[v] += f * bary[k] * h * half * len;
                    }
                }
            }
        }
    }
    b
}

/// Fine-grid operators shared by every stage of a solve.
#[derive(Debug, Clone)]
pub struct AssembledForms<T> {
    /// `∫ A ∇φ_i·∇φ_j` over all nodes.
    pub stiffness: CsrMatrix<T>,
    /// Interior node indices.
    pub free_dofs: Vec<usize>,
}

impl<T: Real> AssembledForms<T> {
    pub fn new(mesh: &MeshLevel<T>, field: &CoefficientField<T>) -> Result<Self> {
        let stiffness = assemble_stiffness(mesh, field, None, &QuadParams::default())?;
        Ok(Self {
            stiffness,
            free_dofs: mesh.interior_nodes().to_vec(),
        })
    }

    pub fn free_stiffness(&self) -> CsrMatrix<T> {
        self.stiffness.principal_submatrix(&self.free_dofs)
    }
}

pub(crate) fn check_same_mesh<T: Real>(mesh: &MeshLevel<T>, ew: &ElementWeights<T>) -> Result<()> {
    if ew.w.len() != mesh.num_triangles() {
        return Err(Error::config("element data does not belong to this mesh"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::patch;

    fn unit() -> CoefficientField<f64> {
        CoefficientField::constant(1.0).unwrap()
    }

    fn center() -> SingularSet<f64> {
        SingularSet::point(Point2::new(0.5, 0.5), 1.0).unwrap()
    }

    #[test]
    fn level_one_stencil() {
        let m = MeshLevel::<f64>::build(1).unwrap();
        let k = assemble_stiffness(&m, &unit(), None, &QuadParams::default()).unwrap();
        assert!((k.get(4, 4) - 4.0).abs() < 1e-14);
        // diagonal neighbours across the split diagonal are decoupled
        assert!(k.get(4, 0).abs() < 1e-14 && k.get(4, 8).abs() < 1e-14);
        assert!((k.get(4, 1) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn stiffness_symmetric_with_zero_row_sums() {
        let m = MeshLevel::<f64>::build(4).unwrap();
        let a = CoefficientField::oscillatory(0.1).unwrap();
        for w in [None, Some(WeightSpec::new(center(), 0.4).unwrap())] {
            let k = assemble_stiffness(&m, &a, w.as_ref(), &QuadParams::default()).unwrap();
            assert!(k.symmetry_defect() < 1e-12);
            let ones = vec![1.0; m.num_nodes()];
            let scale = k.diagonal().iter().fold(0.0f64, |x, y| x.max(*y));
            assert!(k.mul_vec(&ones).iter().all(|r| r.abs() < 1e-12 * scale));
        }
    }

    #[test]
    fn zero_beta_matches_unweighted() {
        let m = MeshLevel::<f64>::build(3).unwrap();
        let a = CoefficientField::oscillatory(0.1).unwrap();
        let k0 = assemble_stiffness(&m, &a, None, &QuadParams::default()).unwrap();
        let kw = assemble_stiffness(&m, &a, Some(&WeightSpec::new(center(), 0.0).unwrap()), &QuadParams::default()).unwrap();
        let d0 = k0.to_dense();
        let dw = kw.to_dense();
        for (r0, rw) in d0.iter().zip(&dw) {
            for (x, y) in r0.iter().zip(rw) {
                assert!((x - y).abs() <= 1e-8 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn unit_weight_mass_is_standard() {
        let m = MeshLevel::<f64>::build(0).unwrap();
        let ew = element_weights(&m, &unit(), None, &QuadParams::default()).unwrap();
        let area = 0.5;
        for t in 0..2 {
            for a in 0..3 {
                for b in 0..3 {
                    let want = if a == b { area / 6.0 } else { area / 12.0 };
                    assert!((ew.mass[t][a][b] - want).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn gram_matrices_spd_and_symmetric() {
        let h = MeshHierarchy::<f64>::build(3, 5).unwrap();
        for beta in [-0.5, 0.5] {
            let w = WeightSpec::new(center(), beta).unwrap();
            let ew = element_weights(h.fine(), &unit(), Some(&w), &QuadParams::default()).unwrap();
            for &v in h.coarse().interior_nodes() {
                let p = patch(h.coarse(), v, 0).unwrap();
                let (nodes, g) = assemble_weighted_mass_local(&h, &p, &ew).unwrap();
                let (i, j) = h.coarse().grid_coords(v);
                let (i, j) = (i as i64, j as i64);
                let neighbours = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)];
                let inner = neighbours
                    .iter()
                    .filter(|(di, dj)| (1..8).contains(&(i + di)) && (1..8).contains(&(j + dj)))
                    .count();
                assert_eq!(nodes.len(), 1 + inner);
                assert!(g.symmetry_defect() < 1e-13);
            }
            // the Gram matrix at the centre is invariant under x ↔ y
            let c = h.coarse().node_at(4, 4);
            let (nodes, g) = assemble_weighted_mass_local(&h, &patch(h.coarse(), c, 0).unwrap(), &ew).unwrap();
            let swap = |v: usize| {
                let (i, j) = h.coarse().grid_coords(v);
                nodes.binary_search(&h.coarse().node_at(j, i)).unwrap()
            };
            for a in 0..nodes.len() {
                for b in 0..nodes.len() {
                    let (sa, sb) = (swap(nodes[a]), swap(nodes[b]));
                    assert!((g[(a, b)] - g[(sa, sb)]).abs() < 1e-12 * g[(a, a)]);
                }
            }
        }
    }

    #[test]
    fn point_rhs() {
        let m = MeshLevel::<f64>::build(2).unwrap();
        let b = assemble_singular_rhs(&m, &center());
        let v = m.node_at(2, 2);
        assert!(b.iter().enumerate().all(|(i, x)| *x == if i == v { 1.0 } else { 0.0 }));
        let tri = m.coords(5);
        let c = Point2::new((tri[0].x + tri[1].x + tri[2].x) / 3.0, (tri[0].y + tri[1].y + tri[2].y) / 3.0);
        let b = assemble_singular_rhs(&m, &SingularSet::point(c, 1.0).unwrap());
        for &v in &m.triangles()[5] {
            assert!((b[v] - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn segment_rhs_mass_and_linear_exactness() {
        let m = MeshLevel::<f64>::build(4).unwrap();
        let seg = SingularSet::segment(Point2::new(0.375, 0.5), Point2::new(0.625, 0.5), 1.0).unwrap();
        let b = assemble_singular_rhs(&m, &seg);
        assert!((b.iter().sum::<f64>() - 0.25).abs() < 1e-14);
        // oblique segment: Σ b_i x_i = ∫ x ds
        let (a, c) = (Point2::new(0.11, 0.23), Point2::new(0.87, 0.64));
        let seg = SingularSet::segment(a, c, 2.0).unwrap();
        let b = assemble_singular_rhs(&m, &seg);
        let moment: f64 = b.iter().zip(m.nodes()).map(|(bi, x)| bi * x.x).sum();
        let want = 2.0 * a.dist(c) * (a.x + c.x) / 2.0;
        assert!((moment - want).abs() < 1e-13);
        assert!((b.iter().sum::<f64>() - 2.0 * a.dist(c)).abs() < 1e-13);
    }

    #[test]
    fn breakpoints_include_mesh_crossings() {
        let m = MeshLevel::<f64>::build(2).unwrap();
        let ts = segment_breakpoints(&m, Point2::new(0.1, 0.1), Point2::new(0.9, 0.3));
        for w in ts.windows(2) {
            let mid = Point2::new(0.1, 0.1).lerp(Point2::new(0.9, 0.3), 0.5 * (w[0] + w[1]));
            let t = m.locate(mid).0;
            // both Gauss points sit inside the same triangle as the midpoint
            for s in [w[0] + 1e-9, w[1] - 1e-9] {
                let x = Point2::new(0.1, 0.1).lerp(Point2::new(0.9, 0.3), s);
                let bary = barycentric(&m.coords(t), x);
                assert!(bary.iter().all(|v| *v > -1e-7));
            }
        }
    }

    #[test]
    fn grading_depth_stability() {
        let m = MeshLevel::<f64>::build(3).unwrap();
        let a = CoefficientField::oscillatory(0.1).unwrap();
        let w = WeightSpec::new(SingularSet::point(Point2::new(0.31, 0.47), 1.0).unwrap(), -0.4).unwrap();
        let p0 = QuadParams::default();
        let p2 = QuadParams {
            depth: p0.depth + 2,
            ..p0.clone()
        };
        let e0 = element_weights(&m, &a, Some(&w), &p0).unwrap();
        let e2 = element_weights(&m, &a, Some(&w), &p2).unwrap();
        for (x, y) in e0.aw.iter().zip(&e2.aw) {
            assert!((x - y).abs() <= 1e-6 * y.abs());
        }
    }
}
