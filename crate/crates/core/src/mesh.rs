//! Nested uniform triangulations of the unit square and element patches.
//!
//! Level `L` has `2^L` cells per side; every cell is split along the
//! diagonal from its lower-left to its upper-right corner. Nodes are ordered
//! lexicographically by `(y, x)`.

use crate::error::{Error, Result};
use crate::geometry::{signed_area, Point2};
use crate::linalg::CsrMatrix;
use crate::quadrature::barycentric;
use crate::scalar::Real;

pub const MAX_LEVEL: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    Dirichlet,
}

#[derive(Debug, Clone)]
pub struct MeshLevel<T> {
    level: u32,
    cells: usize,
    nodes: Vec<Point2<T>>,
    triangles: Vec<[usize; 3]>,
    node_class: Vec<NodeClass>,
    node_to_elements: Vec<Vec<usize>>,
    interior: Vec<usize>,
    /// Position of each node in `interior`.
    free_index: Vec<Option<usize>>,
}

impl<T: Real> MeshLevel<T> {
    pub fn build(level: u32) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::config(format!(
                "mesh level {level} out of range 0..={MAX_LEVEL}"
            )));
        }
        let n = 1usize << level;
        let inv = T::one() / T::from_usize_lossy(n);
        let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
        let mut node_class = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                nodes.push(Point2::new(T::from_usize_lossy(i) * inv, T::from_usize_lossy(j) * inv));
                let boundary = i == 0 || j == 0 || i == n || j == n;
                node_class.push(if boundary {
                    NodeClass::Dirichlet
                } else {
                    NodeClass::Interior
                });
            }
        }
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (ll, lr, ur, ul) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                triangles.push([ll, lr, ur]);
                triangles.push([ll, ur, ul]);
            }
        }
        let mut node_to_elements = vec![Vec::new(); nodes.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                node_to_elements[v].push(t);
            }
        }
        let mut free_index = vec![None; nodes.len()];
        let mut interior = Vec::new();
        for (v, c) in node_class.iter().enumerate() {
            if *c == NodeClass::Interior {
                free_index[v] = Some(interior.len());
                interior.push(v);
            }
        }
        Ok(Self {
            level,
            cells: n,
            nodes,
            triangles,
            node_class,
            node_to_elements,
            interior,
            free_index,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Cells per side, `2^level`.
    pub fn cells_per_side(&self) -> usize {
        self.cells
    }

    pub fn h(&self) -> T {
        T::one() / T::from_usize_lossy(self.cells)
    }

    pub fn nodes(&self) -> &[Point2<T>] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn node_class(&self, v: usize) -> NodeClass {
        self.node_class[v]
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.node_class[v] == NodeClass::Interior
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }

    /// Index of node `v` among the interior nodes.
    pub fn free_index(&self, v: usize) -> Option<usize> {
        self.free_index[v]
    }

    pub fn elements_of(&self, v: usize) -> &[usize] {
        &self.node_to_elements[v]
    }

    pub fn node_at(&self, i: usize, j: usize) -> usize {
        j * (self.cells + 1) + i
    }

    /// Grid coordinates `(i, j)` of node `v`.
    pub fn grid_coords(&self, v: usize) -> (usize, usize) {
        (v % (self.cells + 1), v / (self.cells + 1))
    }

    pub fn coords(&self, t: usize) -> [Point2<T>; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn area(&self, t: usize) -> T {
        let [a, b, c] = self.coords(t);
        signed_area(a, b, c)
    }

    /// Constant gradients of the three local P1 basis functions.
    pub fn gradients(&self, t: usize) -> [Point2<T>; 3] {
        let p = self.coords(t);
        let two_area = (p[1] - p[0]).cross(p[2] - p[0]);
        std::array::from_fn(|i| {
            let e = p[(i + 2) % 3] - p[(i + 1) % 3];
            Point2::new(-e.y / two_area, e.x / two_area)
        })
    }

    /// Triangle containing `x` and the barycentric coordinates of `x` in it.
    /// Points on shared edges resolve to the cell with the larger index.
    pub fn locate(&self, x: Point2<T>) -> (usize, [T; 3]) {
        let n = self.cells;
        let nf = T::from_usize_lossy(n);
        let cell = |c: T| -> usize {
            let k = (c * nf).floor().to_usize().unwrap_or(0);
            k.min(n - 1)
        };
        let (i, j) = (cell(x.x), cell(x.y));
        let dx = x.x * nf - T::from_usize_lossy(i);
        let dy = x.y * nf - T::from_usize_lossy(j);
        let t = 2 * (j * n + i) + usize::from(dy > dx);
        let b = barycentric(&self.coords(t), x);
        (t, b)
    }

    /// Fine-grid vector with zeros outside the interior nodes.
    pub fn extend_free(&self, free: &[T]) -> Vec<T> {
        let mut full = vec![T::zero(); self.num_nodes()];
        for (k, &v) in self.interior.iter().enumerate() {
            full[v] = free[k];
        }
        full
    }

    pub fn restrict_free(&self, full: &[T]) -> Vec<T> {
        self.interior.iter().map(|&v| full[v]).collect()
    }
}

/// A coarse mesh, a nested fine mesh and the maps between them.
#[derive(Debug, Clone)]
pub struct MeshHierarchy<T> {
    coarse: MeshLevel<T>,
    fine: MeshLevel<T>,
    /// Fine nodes × coarse nodes, all nodes included.
    prolongation: CsrMatrix<T>,
    element_parent: Vec<usize>,
    children: Vec<Vec<usize>>,
}

impl<T: Real> MeshHierarchy<T> {
    /// Equal levels are accepted and give the identity prolongation.
    pub fn build(coarse_level: u32, fine_level: u32) -> Result<Self> {
        if fine_level < coarse_level {
            return Err(Error::config(format!(
                "fine level {fine_level} must not be coarser than coarse level {coarse_level}"
            )));
        }
        let coarse = MeshLevel::build(coarse_level)?;
        let fine = MeshLevel::build(fine_level)?;
        let mut trip = Vec::new();
        for (v, x) in fine.nodes().iter().enumerate() {
            let (t, b) = coarse.locate(*x);
            for (k, &cv) in coarse.triangles()[t].iter().enumerate() {
                if b[k] != T::zero() {
                    trip.push((v, cv, b[k]));
                }
            }
        }
        let prolongation = CsrMatrix::from_triplets(fine.num_nodes(), coarse.num_nodes(), trip);
        let third = T::lit(1.0 / 3.0);
        let mut children = vec![Vec::new(); coarse.num_triangles()];
        let element_parent: Vec<usize> = (0..fine.num_triangles())
            .map(|t| {
                let p = fine.coords(t);
                let c = Point2::new(
                    (p[0].x + p[1].x + p[2].x) * third,
                    (p[0].y + p[1].y + p[2].y) * third,
                );
                let parent = coarse.locate(c).0;
                children[parent].push(t);
                parent
            })
            .collect();
        Ok(Self {
            coarse,
            fine,
            prolongation,
            element_parent,
            children,
        })
    }

    pub fn coarse(&self) -> &MeshLevel<T> {
        &self.coarse
    }

    pub fn fine(&self) -> &MeshLevel<T> {
        &self.fine
    }

    pub fn prolongation(&self) -> &CsrMatrix<T> {
        &self.prolongation
    }

    pub fn element_parent(&self, fine_t: usize) -> usize {
        self.element_parent[fine_t]
    }

    pub fn children(&self, coarse_t: usize) -> &[usize] {
        &self.children[coarse_t]
    }

    /// Coarse nodal vector (all coarse nodes) to fine nodal vector.
    pub fn prolong(&self, coarse: &[T]) -> Vec<T> {
        self.prolongation.mul_vec(coarse)
    }

    /// Prolongation of a coarse vector given on interior coarse nodes only.
    pub fn prolong_free(&self, coarse_free: &[T]) -> Vec<T> {
        self.prolong(&self.coarse.extend_free(coarse_free))
    }

    /// Fine nodal values of the coarse hat function at node `v`.
    pub fn prolong_hat(&self, v: usize) -> Vec<T> {
        let mut e = vec![T::zero(); self.coarse.num_nodes()];
        e[v] = T::one();
        self.prolong(&e)
    }
}

/// The k-layer element patch `ω_{v,k}` around a coarse node.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub center: usize,
    pub k: usize,
    /// Sorted coarse triangle indices.
    pub elements: Vec<usize>,
    /// Interior coarse nodes that are vertices of patch elements, sorted.
    pub constraint_nodes: Vec<usize>,
}

impl Patch {
    pub fn contains(&self, t: usize) -> bool {
        self.elements.binary_search(&t).is_ok()
    }
}

/// `ω_{v,0}` is the support of the hat at `v`; each further layer adds all
/// triangles sharing a vertex with the previous patch.
pub fn patch<T: Real>(mesh: &MeshLevel<T>, v: usize, k: usize) -> Result<Patch> {
    if v >= mesh.num_nodes() || !mesh.is_interior(v) {
        return Err(Error::config(format!("patch center {v} is not an interior node")));
    }
    let mut in_patch = vec![false; mesh.num_triangles()];
    let mut elements: Vec<usize> = mesh.elements_of(v).to_vec();
    for &t in &elements {
        in_patch[t] = true;
    }
    let mut seen_node = vec![false; mesh.num_nodes()];
    let mut frontier: Vec<usize> = elements.clone();
    for _ in 0..k {
        let mut added = Vec::new();
        for &t in &frontier {
            for &w in &mesh.triangles()[t] {
                if seen_node[w] {
                    continue;
                }
                seen_node[w] = true;
                for &s in mesh.elements_of(w) {
                    if !in_patch[s] {
                        in_patch[s] = true;
                        added.push(s);
                    }
                }
            }
        }
        if added.is_empty() {
            break;
        }
        elements.extend_from_slice(&added);
        frontier = added;
    }
    elements.sort_unstable();
    let mut nodes: Vec<usize> = elements
        .iter()
        .flat_map(|&t| mesh.triangles()[t])
        .filter(|&w| mesh.is_interior(w))
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    Ok(Patch {
        center: v,
        k,
        elements,
        constraint_nodes: nodes,
    })
}
