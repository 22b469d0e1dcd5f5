//! Localized correctors `Q_{v,k}^β`, the truncated multiscale basis and the
//! ideal (global) corrector.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::assembly::{element_weights, stiffness_from_elements, ElementWeights};
use crate::coefficients::CoefficientField;
use crate::error::{Error, Result};
use crate::geometry::{Point2, WeightSpec};
use crate::linalg::{constrained_solve_with, CgOptions, ConstraintProjector, CsrMatrix, SparseRow};
use crate::mesh::{patch, MeshHierarchy, Patch};
use crate::quadrature::{barycentric, QuadParams, QuadratureRule, WeightedQuadrature};
use crate::quasi_interp::InterpolationOperator;
use crate::scalar::Real;

/// Everything the corrector problems need for one weight exponent β.
#[derive(Debug, Clone)]
pub struct WeightedForms<T> {
    pub weight: Option<WeightSpec<T>>,
    pub elements: ElementWeights<T>,
    /// `∫ A ∇φ_i·∇φ_j d^(2β)` over all fine nodes.
    pub stiffness: CsrMatrix<T>,
    pub interpolation: InterpolationOperator<T>,
    /// `∫_t A λ̂_c d^(2β)` for the three vertices `c` of the parent coarse
    /// triangle of each fine triangle `t`.
    pub hat_integrals: Vec<[T; 3]>,
}

impl<T: Real> WeightedForms<T> {
    pub fn new(
        hier: &MeshHierarchy<T>,
        field: &CoefficientField<T>,
        weight: Option<&WeightSpec<T>>,
        params: &QuadParams,
    ) -> Result<Self> {
        let weight = weight.filter(|w| w.beta() != T::zero()).cloned();
        let elements = element_weights(hier.fine(), field, weight.as_ref(), params)?;
        let stiffness = stiffness_from_elements(hier.fine(), &elements.aw);
        let interpolation = InterpolationOperator::from_element_weights(hier, &elements)?;
        let hat_integrals = hat_integrals(hier, field, weight.as_ref(), params)?;
        Ok(Self {
            weight,
            elements,
            stiffness,
            interpolation,
            hat_integrals,
        })
    }

    pub fn beta(&self) -> T {
        self.elements.beta
    }
}

/// `∫_t A λ̂_c d^(2β)` with `λ̂_c = λ_c / Σ_{interior v} λ_v`, zero for
/// boundary vertices `c`.
fn hat_integrals<T: Real>(
    hier: &MeshHierarchy<T>,
    field: &CoefficientField<T>,
    weight: Option<&WeightSpec<T>>,
    params: &QuadParams,
) -> Result<Vec<[T; 3]>> {
    let quad = match weight {
        Some(w) => Some(WeightedQuadrature::new(w.clone(), params.clone())?),
        None => None,
    };
    let base = QuadratureRule::<T>::degree6();
    let coarse = hier.coarse();
    let fine = hier.fine();
    Ok((0..fine.num_triangles())
        .into_par_iter()
        .map(|t| {
            let ct = hier.element_parent(t);
            let ctri = coarse.coords(ct);
            let interior = coarse.triangles()[ct].map(|v| coarse.is_interior(v));
            let mut out = [T::zero(); 3];
            if !interior.iter().any(|b| *b) {
                return out;
            }
            let mut visit = |x: Point2<T>, q: T| {
                let b = barycentric(&ctri, x);
                let s: T = (0..3).filter(|&c| interior[c]).map(|c| b[c]).sum();
                if s > T::zero() {
                    let aq = field.evaluate(x) * q / s;
                    for c in 0..3 {
                        if interior[c] {
                            out[c] += aq * b[c];
                        }
                    }
                }
            };
            let tri = fine.coords(t);
            match &quad {
                Some(quad) => quad.for_each_point(&tri, &mut visit),
                None => {
                    let area = fine.area(t);
                    for (p, &w) in base.points.iter().zip(&base.weights) {
                        visit(crate::quadrature::from_barycentric(&tri, p), w * area);
                    }
                }
            }
            out
        })
        .collect())
}

/// The constrained problem on one patch `ω_{v,k}`.
#[derive(Debug, Clone)]
pub struct PatchSystem<T> {
    pub patch: Patch,
    /// Fine nodes strictly inside the patch and inside Ω, sorted.
    pub dofs: Vec<usize>,
    pub matrix: CsrMatrix<T>,
    pub constraints: ConstraintProjector<T>,
}

impl<T: Real> PatchSystem<T> {
    /// `k = None` takes the whole domain.
    pub fn new(hier: &MeshHierarchy<T>, forms: &WeightedForms<T>, v: usize, k: Option<usize>) -> Result<Self> {
        let coarse = hier.coarse();
        let fine = hier.fine();
        let layers = k.unwrap_or(2 * coarse.cells_per_side());
        let patch = patch(coarse, v, layers)?;
        let mut dofs = Vec::new();
        for &ct in &patch.elements {
            for &ft in hier.children(ct) {
                for &n in &fine.triangles()[ft] {
                    if fine.is_interior(n)
                        && fine
                            .elements_of(n)
                            .iter()
                            .all(|&s| patch.contains(hier.element_parent(s)))
                    {
                        dofs.push(n);
                    }
                }
            }
        }
        dofs.sort_unstable();
        dofs.dedup();
        let mut map = vec![None; fine.num_nodes()];
        for (i, &n) in dofs.iter().enumerate() {
            map[n] = Some(i);
        }
        let matrix = forms.stiffness.submatrix(&dofs, &map, dofs.len());
        let op = &forms.interpolation;
        let rows: Vec<SparseRow<T>> = patch
            .constraint_nodes
            .iter()
            .map(|&c| {
                let k = coarse.free_index(c).expect("constraint nodes are interior");
                let r = op.row(k);
                let mut out = SparseRow::default();
                for (i, x) in r.indices.iter().zip(&r.values) {
                    if let Some(l) = map[*i] {
                        out.indices.push(l);
                        out.values.push(*x);
                    }
                }
                out
            })
            .collect();
        let constraints = ConstraintProjector::new(dofs.len(), rows)
            .map_err(|e| e.context(format_args!("patch around coarse node {v}")))?;
        if constraints.rank() == 0 {
            return Err(Error::numerical(format!(
                "patch around coarse node {v} has no constraints left after rank filtering"
            )));
        }
        Ok(Self {
            patch,
            dofs,
            matrix,
            constraints,
        })
    }

    /// Right-hand side `∫_{ω_v} A λ̂_v ∇v_H·∇φ_i d^(2β)` on the patch DOFs;
    /// `v_h` holds coarse nodal values over all coarse nodes.
    pub fn rhs(&self, hier: &MeshHierarchy<T>, forms: &WeightedForms<T>, v_h: &[T]) -> Vec<T> {
        let coarse = hier.coarse();
        let fine = hier.fine();
        let v = self.patch.center;
        let mut b = vec![T::zero(); self.dofs.len()];
        for &ct in coarse.elements_of(v) {
            let ctri = coarse.triangles()[ct];
            let cg = coarse.gradients(ct);
            let grad_vh = cg[0] * v_h[ctri[0]] + cg[1] * v_h[ctri[1]] + cg[2] * v_h[ctri[2]];
            if grad_vh.x == T::zero() && grad_vh.y == T::zero() {
                continue;
            }
            let slot = ctri.iter().position(|&c| c == v).expect("v is a vertex");
            for &ft in hier.children(ct) {
                let s = forms.hat_integrals[ft][slot];
                let fg = fine.gradients(ft);
                for (a, &n) in fine.triangles()[ft].iter().enumerate() {
                    if let Ok(i) = self.dofs.binary_search(&n) {
                        b[i] += grad_vh.dot(fg[a]) * s;
                    }
                }
            }
        }
        b
    }

    /// Solves for the corrector and returns it as a sparse fine vector.
    pub fn solve_rhs(&self, rhs: &[T], opts: &CgOptions) -> Result<SparseRow<T>> {
        let x = constrained_solve_with(&self.matrix, &self.constraints, rhs, opts)
            .map_err(|e| e.context(format_args!("corrector on patch around coarse node {}", self.patch.center)))?
            .x;
        Ok(SparseRow {
            indices: self.dofs.clone(),
            values: x,
        })
    }
}

/// `Q_{v,k}^β(v_H)` extended by zero, over all fine nodes.
pub fn solve_patch_corrector<T: Real>(
    hier: &MeshHierarchy<T>,
    forms: &WeightedForms<T>,
    v: usize,
    k: Option<usize>,
    v_h: &[T],
    opts: &CgOptions,
) -> Result<Vec<T>> {
    let sys = PatchSystem::new(hier, forms, v, k)?;
    let rhs = sys.rhs(hier, forms, v_h);
    let q = sys.solve_rhs(&rhs, opts)?;
    let mut full = vec![T::zero(); hier.fine().num_nodes()];
    for (i, x) in q.indices.iter().zip(&q.values) {
        full[*i] = *x;
    }
    Ok(full)
}

/// Corrections `Q_k^β(λ_j)` and multiscale functions `λ_j - Q_k^β(λ_j)` for
/// every interior coarse node `j`, as sparse vectors over all fine nodes.
#[derive(Debug, Clone)]
pub struct CorrectorBasis<T> {
    pub beta: T,
    /// Patch layers; `None` for the global corrector.
    pub k: Option<usize>,
    pub coarse_level: u32,
    pub fine_level: u32,
    /// Interior coarse nodes, one per column.
    pub nodes: Vec<usize>,
    pub corrections: Vec<SparseRow<T>>,
    pub ms_basis: Vec<SparseRow<T>>,
}

impl<T: Real> CorrectorBasis<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn hat_coarse<T: Real>(n: usize, j: usize) -> Vec<T> {
    let mut e = vec![T::zero(); n];
    e[j] = T::one();
    e
}

/// Dense scratch space for summing sparse vectors.
struct Accumulator<T> {
    values: Vec<T>,
    marked: Vec<bool>,
    touched: Vec<usize>,
}

impl<T: Real> Accumulator<T> {
    fn new(n: usize) -> Self {
        Self {
            values: vec![T::zero(); n],
            marked: vec![false; n],
            touched: Vec::new(),
        }
    }

    fn sum(&mut self, parts: &[(T, &SparseRow<T>)]) -> SparseRow<T> {
        for (s, p) in parts {
            for (i, x) in p.indices.iter().zip(&p.values) {
                if !self.marked[*i] {
                    self.marked[*i] = true;
                    self.touched.push(*i);
                }
                self.values[*i] += *s * *x;
            }
        }
        self.touched.sort_unstable();
        let mut out = SparseRow::default();
        for &i in &self.touched {
            if self.values[i] != T::zero() {
                out.indices.push(i);
                out.values.push(self.values[i]);
            }
            self.values[i] = T::zero();
            self.marked[i] = false;
        }
        self.touched.clear();
        out
    }
}

/// One patch solve per interior coarse node `v`, with one right-hand side
/// per interior coarse node `j` adjacent to `v` (`v_H = λ_j`).
pub fn build_corrector_basis<T: Real>(
    hier: &MeshHierarchy<T>,
    forms: &WeightedForms<T>,
    k: Option<usize>,
    opts: &CgOptions,
) -> Result<CorrectorBasis<T>> {
    let coarse = hier.coarse();
    let nc = coarse.num_nodes();
    let per_patch: Vec<Vec<(usize, SparseRow<T>)>> = coarse
        .interior_nodes()
        .par_iter()
        .map(|&v| -> Result<Vec<(usize, SparseRow<T>)>> {
            let sys = PatchSystem::new(hier, forms, v, k)?;
            let mut js: Vec<usize> = coarse
                .elements_of(v)
                .iter()
                .flat_map(|&t| coarse.triangles()[t])
                .filter(|&j| coarse.is_interior(j))
                .collect();
            js.sort_unstable();
            js.dedup();
            js.into_iter()
                .map(|j| {
                    let rhs = sys.rhs(hier, forms, &hat_coarse(nc, j));
                    sys.solve_rhs(&rhs, opts)
                        .map(|q| (j, q))
                        .map_err(|e| e.context(format_args!("right-hand side of coarse hat {j}")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut by_node: Vec<Vec<&SparseRow<T>>> = vec![Vec::new(); nc];
    for list in &per_patch {
        for (j, q) in list {
            by_node[*j].push(q);
        }
    }
    let nf = hier.fine().num_nodes();
    let mut acc = Accumulator::new(nf);
    let mut corrections = Vec::with_capacity(coarse.interior_nodes().len());
    let mut ms_basis = Vec::with_capacity(coarse.interior_nodes().len());
    for &j in coarse.interior_nodes() {
        let parts: Vec<(T, &SparseRow<T>)> = by_node[j].iter().map(|q| (T::one(), *q)).collect();
        let corr = acc.sum(&parts);
        let hat = SparseRow::from_dense(&hier.prolong_hat(j));
        let ms = acc.sum(&[(T::one(), &hat), (-T::one(), &corr)]);
        corrections.push(corr);
        ms_basis.push(ms);
    }
    Ok(CorrectorBasis {
        beta: forms.beta(),
        k,
        coarse_level: coarse.level(),
        fine_level: hier.fine().level(),
        nodes: coarse.interior_nodes().to_vec(),
        corrections,
        ms_basis,
    })
}

fn global_system<T: Real>(hier: &MeshHierarchy<T>, forms: &WeightedForms<T>) -> Result<PatchSystem<T>> {
    let Some(&any) = hier.coarse().interior_nodes().first() else {
        return Err(Error::config("coarse mesh has no interior nodes"));
    };
    PatchSystem::new(hier, forms, any, None)
}

fn solve_global<T: Real>(
    sys: &PatchSystem<T>,
    hier: &MeshHierarchy<T>,
    forms: &WeightedForms<T>,
    v_h: &[T],
    opts: &CgOptions,
) -> Result<SparseRow<T>> {
    // the full-domain right-hand side is the sum over all partition-of-unity pieces
    let mut rhs = vec![T::zero(); sys.dofs.len()];
    let mut shifted = sys.clone();
    for &v in hier.coarse().interior_nodes() {
        shifted.patch.center = v;
        for (r, x) in rhs.iter_mut().zip(shifted.rhs(hier, forms, v_h)) {
            *r += x;
        }
    }
    sys.solve_rhs(&rhs, opts)
}

/// Ideal corrector `Q_Ω^β(v_H)` from a single solve on the whole domain.
pub fn global_corrector<T: Real>(
    hier: &MeshHierarchy<T>,
    forms: &WeightedForms<T>,
    v_h: &[T],
    opts: &CgOptions,
) -> Result<Vec<T>> {
    let sys = global_system(hier, forms)?;
    let q = solve_global(&sys, hier, forms, v_h, opts)?;
    let mut full = vec![T::zero(); hier.fine().num_nodes()];
    for (i, x) in q.indices.iter().zip(&q.values) {
        full[*i] = *x;
    }
    Ok(full)
}

/// Basis of the ideal multiscale space, one global solve per coarse hat.
pub fn build_global_basis<T: Real>(
    hier: &MeshHierarchy<T>,
    forms: &WeightedForms<T>,
    opts: &CgOptions,
) -> Result<CorrectorBasis<T>> {
    let coarse = hier.coarse();
    let sys = global_system(hier, forms)?;
    let corrections = coarse
        .interior_nodes()
        .par_iter()
        .map(|&j| solve_global(&sys, hier, forms, &hat_coarse(coarse.num_nodes(), j), opts))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = Accumulator::new(hier.fine().num_nodes());
    let ms_basis = coarse
        .interior_nodes()
        .iter()
        .zip(&corrections)
        .map(|(&j, corr)| {
            let hat = SparseRow::from_dense(&hier.prolong_hat(j));
            acc.sum(&[(T::one(), &hat), (-T::one(), corr)])
        })
        .collect();
    Ok(CorrectorBasis {
        beta: forms.beta(),
        k: None,
        coarse_level: coarse.level(),
        fine_level: hier.fine().level(),
        nodes: coarse.interior_nodes().to_vec(),
        corrections,
        ms_basis,
    })
}

/// Row of the decay table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow<T> {
    pub k: usize,
    pub error: T,
    /// `error(k) / error(k_prev)`; `None` for the first row.
    pub ratio: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayTable<T> {
    pub rows: Vec<DecayRow<T>>,
    /// Geometric mean of the consecutive ratios.
    pub theta: Option<T>,
}

/// Weighted energy `sqrt(xᵀ K_β x)` of a fine vector.
pub fn weighted_energy<T: Real>(forms: &WeightedForms<T>, x: &[T]) -> T {
    let kx = forms.stiffness.mul_vec(x);
    crate::linalg::dot(x, &kx).max(T::zero()).sqrt()
}

/// `Q_k^β(λ_v) = Σ_{v'} Q_{v',k}^β(λ_v)` over all patches whose centre sees `λ_v`.
pub fn truncated_correction<T: Real>(
    hier: &MeshHierarchy<T>,
    forms: &WeightedForms<T>,
    v: usize,
    k: usize,
    opts: &CgOptions,
) -> Result<Vec<T>> {
    let coarse = hier.coarse();
    let hat = hat_coarse(coarse.num_nodes(), v);
    let mut centres: Vec<usize> = coarse
        .elements_of(v)
        .iter()
        .flat_map(|&t| coarse.triangles()[t])
        .filter(|&c| coarse.is_interior(c))
        .collect();
    centres.sort_unstable();
    centres.dedup();
    let parts = centres
        .par_iter()
        .map(|&c| solve_patch_corrector(hier, forms, c, Some(k), &hat, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = vec![T::zero(); hier.fine().num_nodes()];
    for p in parts {
        for (s, x) in sum.iter_mut().zip(p) {
            *s += x;
        }
    }
    Ok(sum)
}

/// `e_k = ‖∇(Q_Ω^β - Q_k^β) λ_v‖_{L²_β}` for each `k` in `ks`.
pub fn measure_decay<T: Real>(
    hier: &MeshHierarchy<T>,
    forms: &WeightedForms<T>,
    v: usize,
    ks: &[usize],
    opts: &CgOptions,
) -> Result<DecayTable<T>> {
    let ideal = global_corrector(hier, forms, &hat_coarse(hier.coarse().num_nodes(), v), opts)?;
    let mut rows: Vec<DecayRow<T>> = Vec::with_capacity(ks.len());
    for &k in ks {
        let qk = truncated_correction(hier, forms, v, k, opts)?;
        let diff: Vec<T> = ideal.iter().zip(&qk).map(|(a, b)| *a - *b).collect();
        let error = weighted_energy(forms, &diff);
        let ratio = rows.last().map(|r| error / r.error);
        rows.push(DecayRow { k, error, ratio });
    }
    let ratios: Vec<T> = rows.iter().filter_map(|r| r.ratio).filter(|r| *r > T::zero()).collect();
    let theta = if ratios.is_empty() {
        None
    } else {
        let mean_log = ratios.iter().map(|r| r.ln()).sum::<T>() / T::from_usize_lossy(ratios.len());
        Some(mean_log.exp())
    };
    Ok(DecayTable { rows, theta })
}

const DUMP_MAGIC: &[u8; 8] = b"WLODCORR";
const DUMP_VERSION: u32 = 1;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Writes the basis in a little-endian binary format with a versioned header
/// (mesh levels, β, k) and a trailing FNV-1a checksum.
pub fn write_dump<T: Real>(basis: &CorrectorBasis<T>, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(DUMP_MAGIC);
    buf.extend_from_slice(&DUMP_VERSION.to_le_bytes());
    buf.extend_from_slice(&basis.coarse_level.to_le_bytes());
    buf.extend_from_slice(&basis.fine_level.to_le_bytes());
    buf.extend_from_slice(&basis.beta.as_f64().to_le_bytes());
    buf.extend_from_slice(&basis.k.map_or(u64::MAX, |k| k as u64).to_le_bytes());
    buf.extend_from_slice(&(basis.nodes.len() as u64).to_le_bytes());
    for (col, (&node, corr)) in basis.nodes.iter().zip(&basis.corrections).enumerate() {
        let ms = &basis.ms_basis[col];
        buf.extend_from_slice(&(node as u64).to_le_bytes());
        for row in [corr, ms] {
            buf.extend_from_slice(&(row.indices.len() as u64).to_le_bytes());
            for i in &row.indices {
                buf.extend_from_slice(&(*i as u64).to_le_bytes());
            }
            for x in &row.values {
                buf.extend_from_slice(&x.as_f64().to_le_bytes());
            }
        }
    }
    let sum = fnv1a(&buf);
    buf.extend_from_slice(&sum.to_le_bytes());
    let tmp = path.with_extension("tmp");
    let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(&buf).map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> std::result::Result<[u8; N], String> {
        let end = self.pos + N;
        let s = self.bytes.get(self.pos..end).ok_or("truncated corrector dump")?;
        self.pos = end;
        Ok(s.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_le_bytes(self.take()?))
    }

    fn row<T: Real>(&mut self) -> std::result::Result<SparseRow<T>, String> {
        let n = usize::try_from(self.u64()?).map_err(|e| e.to_string())?;
        if n > self.bytes.len() {
            return Err("corrupt column length".into());
        }
        let indices = (0..n).map(|_| self.u64().map(|i| i as usize)).collect::<std::result::Result<_, _>>()?;
        let values = (0..n).map(|_| self.f64().map(T::lit)).collect::<std::result::Result<_, _>>()?;
        Ok(SparseRow { indices, values })
    }
}

pub fn read_dump<T: Real>(path: &Path) -> Result<CorrectorBasis<T>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let parse = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    if bytes.len() < 8 + 8 || &bytes[..8] != DUMP_MAGIC {
        return Err(parse("not a corrector dump".into()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(tail.try_into().expect("8 bytes"));
    if fnv1a(body) != stored {
        return Err(parse("checksum mismatch".into()));
    }
    let mut c = Cursor { bytes: body, pos: 8 };
    let mut inner = || -> std::result::Result<CorrectorBasis<T>, String> {
        let version = c.u32()?;
        if version != DUMP_VERSION {
            return Err(format!("unsupported dump version {version}"));
        }
        let coarse_level = c.u32()?;
        let fine_level = c.u32()?;
        let beta = T::lit(c.f64()?);
        let k = match c.u64()? {
            u64::MAX => None,
            k => Some(k as usize),
        };
        let n = c.u64()? as usize;
        let mut basis = CorrectorBasis {
            beta,
            k,
            coarse_level,
            fine_level,
            nodes: Vec::new(),
            corrections: Vec::new(),
            ms_basis: Vec::new(),
        };
        for _ in 0..n {
            basis.nodes.push(c.u64()? as usize);
            basis.corrections.push(c.row()?);
            basis.ms_basis.push(c.row()?);
        }
        if c.pos != c.bytes.len() {
            return Err("trailing bytes in corrector dump".into());
        }
        Ok(basis)
    };
    inner().map_err(parse)
}
