//! Quadrature for integrands carrying the singular weight `dist(x, Λ)^(2β)`.
//!
//! Triangles at distance less than `near_factor · diam` from Λ are split
//! 4-way recursively up to `depth` levels. Triangles touching Λ are cut so
//! that Λ meets every piece in a vertex or an edge, and each piece is
//! integrated with a collapsed (Duffy) tensor rule whose radial factor is a
//! Gauss–Jacobi rule absorbing the power of the distance. Remaining leaves use
//! a positive symmetric triangle rule.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::{signed_area, Point2, SingularGeometry, SingularSet, WeightSpec};
use crate::scalar::Real;

/// A rule on a triangle in barycentric coordinates.
#[derive(Debug, Clone)]
pub struct QuadratureRule<T> {
    pub points: Vec<[T; 3]>,
    /// Sum to one; scale by the triangle area.
    pub weights: Vec<T>,
    /// Total polynomial degree integrated exactly.
    pub order: usize,
}

fn orbit3(a: f64, b: f64) -> [[f64; 3]; 3] {
    [[a, b, b], [b, a, b], [b, b, a]]
}

fn orbit6(a: f64, b: f64, c: f64) -> [[f64; 3]; 6] {
    [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ]
}

impl<T: Real> QuadratureRule<T> {
    fn from_f64(points: Vec<[f64; 3]>, weights: Vec<f64>, order: usize) -> Self {
        let total: f64 = weights.iter().sum();
        Self {
            points: points
                .into_iter()
                .map(|p| [T::lit(p[0]), T::lit(p[1]), T::lit(p[2])])
                .collect(),
            weights: weights.into_iter().map(|w| T::lit(w / total)).collect(),
            order,
        }
    }

    pub fn centroid() -> Self {
        Self::from_f64(vec![[1.0 / 3.0; 3]], vec![1.0], 1)
    }

    /// Six-point rule, degree 4 (Dunavant).
    pub fn degree4() -> Self {
        let mut pts = Vec::new();
        let mut wts = Vec::new();
        for (a, b, w) in [
            (0.108_103_018_168_070, 0.445_948_490_915_965, 0.223_381_589_678_011),
            (0.816_847_572_980_459, 0.091_576_213_509_771, 0.109_951_743_655_322),
        ] {
            pts.extend(orbit3(a, b));
            wts.extend([w; 3]);
        }
        Self::from_f64(pts, wts, 4)
    }

    /// Twelve-point rule, degree 6 (Dunavant).
    pub fn degree6() -> Self {
        let mut pts = Vec::new();
        let mut wts = Vec::new();
        for (a, b, w) in [
            (0.501_426_509_658_179, 0.249_286_745_170_910, 0.116_786_275_726_379),
            (0.873_821_971_016_996, 0.063_089_014_491_502, 0.050_844_906_370_207),
        ] {
            pts.extend(orbit3(a, b));
            wts.extend([w; 3]);
        }
        pts.extend(orbit6(
            0.053_145_049_844_817,
            0.310_352_451_033_784,
            0.636_502_499_121_399,
        ));
        wts.extend([0.082_851_075_618_374; 6]);
        Self::from_f64(pts, wts, 6)
    }

    pub fn integrate(&self, tri: &[Point2<T>; 3], mut g: impl FnMut(Point2<T>) -> T) -> T {
        let area = signed_area(tri[0], tri[1], tri[2]).abs();
        let mut s = T::zero();
        for (b, w) in self.points.iter().zip(&self.weights) {
            s += *w * g(from_barycentric(tri, b));
        }
        s * area
    }
}

pub fn from_barycentric<T: Real>(tri: &[Point2<T>; 3], b: &[T; 3]) -> Point2<T> {
    Point2::new(
        b[0] * tri[0].x + b[1] * tri[1].x + b[2] * tri[2].x,
        b[0] * tri[0].y + b[1] * tri[1].y + b[2] * tri[2].y,
    )
}

/// Barycentric coordinates of `x` with respect to `tri`.
pub fn barycentric<T: Real>(tri: &[Point2<T>; 3], x: Point2<T>) -> [T; 3] {
    let det = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
    let l1 = (x - tri[0]).cross(tri[2] - tri[0]) / det;
    let l2 = (tri[1] - tri[0]).cross(x - tri[0]) / det;
    [T::one() - l1 - l2, l1, l2]
}

/// Gauss–Jacobi rule on `[0, 1]` for the weight `s^a (1-s)^b`, computed in
/// double precision by the Golub–Welsch eigenvalue method.
pub fn gauss_jacobi_unit(n: usize, a: f64, b: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::config("Gauss-Jacobi rule needs at least one node"));
    }
    if !(a > -1.0) {
        return Err(Error::config(format!(
            "Gauss-Jacobi exponent {a} is not integrable (must exceed -1)"
        )));
    }
    // s^a (1-s)^b under x = 2s - 1 is (1+x)^a (1-x)^b: Jacobi (alpha, beta) = (b, a).
    let al = f64::from(b);
    let be = a;
    let ab = al + be;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        jm[(k, k)] = if k == 0 {
            (be - al) / (ab + 2.0)
        } else {
            (be * be - al * al) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        if k + 1 < n {
            let m = (k + 1) as f64;
            let bm = if m == 1.0 {
                4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * m * (m + al) * (m + be) * (m + ab)
                    / ((2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0))
            };
            jm[(k, k + 1)] = bm.sqrt();
            jm[(k + 1, k)] = bm.sqrt();
        }
    }
    // ∫_0^1 s^a (1-s)^b ds for integer b
    let mut mu0 = 0.0;
    let mut binom = 1.0;
    for i in 0..=b {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        mu0 += sign * binom / (a + f64::from(i) + 1.0);
        binom = binom * f64::from(b - i) / f64::from(i + 1);
    }
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (eig.eigenvalues[i] + 1.0), mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(pairs.into_iter().unzip())
}

pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi_unit(n, 0.0, 0).expect("Legendre weight is integrable")
}

/// Composite two-point Gauss–Legendre approximation of `∫_Λ g ds` over a
/// segment split into `n` equal pieces.
pub fn segment_line_integral<T: Real>(
    g: impl FnMut(Point2<T>) -> T,
    lambda: &SingularSet<T>,
    n: usize,
) -> Result<T> {
    let SingularGeometry::Segment(a, b) = *lambda.geometry() else {
        return Err(Error::config("line integral requires a segment singular set"));
    };
    if n < 1 {
        return Err(Error::config("segment line integral needs n >= 1 subdivisions"));
    }
    let breaks: Vec<T> = (0..=n)
        .map(|i| T::from_usize_lossy(i) / T::from_usize_lossy(n))
        .collect();
    Ok(integrate_segment_pieces(g, a, b, &breaks))
}

/// Two-point Gauss on each piece `[t_i, t_{i+1}]` of the parametrization
/// `a + t (b - a)`, `t ∈ [0, 1]`. Exact for integrands linear on each piece.
pub fn integrate_segment_pieces<T: Real>(
    mut g: impl FnMut(Point2<T>) -> T,
    a: Point2<T>,
    b: Point2<T>,
    breaks: &[T],
) -> T {
    let len = a.dist(b);
    let half = T::lit(0.5);
    let off = T::lit(0.5 / 3f64.sqrt());
    let mut s = T::zero();
    for w in breaks.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let mid = (t0 + t1) * half;
        let h = t1 - t0;
        for q in [mid - off * h, mid + off * h] {
            s += g(a.lerp(b, q)) * h * half;
        }
    }
    s * len
}

/// Resolution parameters of the graded weighted quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadParams {
    /// Maximum number of 4-way refinements toward Λ.
    pub depth: usize,
    /// Refine while `dist(T, Λ) < near_factor · diam(T)`.
    pub near_factor: f64,
    /// Points per direction of the collapsed rules on pieces touching Λ.
    pub singular_order: usize,
}

impl Default for QuadParams {
    fn default() -> Self {
        Self {
            depth: 8,
            near_factor: 1.0,
            singular_order: 8,
        }
    }
}

#[derive(Debug, Clone)]
struct TensorRule<T> {
    radial: Vec<(T, T)>,
    along: Vec<(T, T)>,
}

fn to_t<T: Real>(xs: (Vec<f64>, Vec<f64>)) -> Vec<(T, T)> {
    xs.0.into_iter()
        .zip(xs.1)
        .map(|(x, w)| (T::lit(x), T::lit(w)))
        .collect()
}

/// Graded quadrature for `∫_T g(x) dist(x, Λ)^(2β) dx`.
#[derive(Debug, Clone)]
pub struct WeightedQuadrature<T> {
    weight: WeightSpec<T>,
    params: QuadParams,
    base: QuadratureRule<T>,
    /// Collapsed rule with the singularity at a vertex: weight `u^(1+2β)`.
    vertex: Option<TensorRule<T>>,
    /// Collapsed rule with the singularity along an edge: weight `s^(2β) (1-s)`.
    edge: Option<TensorRule<T>>,
}

impl<T: Real> WeightedQuadrature<T> {
    pub fn new(weight: WeightSpec<T>, params: QuadParams) -> Result<Self> {
        if params.singular_order == 0 {
            return Err(Error::config("singular_order must be positive"));
        }
        let two_beta = 2.0 * weight.beta().as_f64();
        let n = params.singular_order;
        let along = to_t(gauss_legendre_unit(n));
        // Exponents at the endpoint of the admissible range are not
        // integrable; those fall back to the plain graded rule.
        let vertex = gauss_jacobi_unit(n, 1.0 + two_beta, 0).ok().map(|r| TensorRule {
            radial: to_t(r),
            along: along.clone(),
        });
        let edge = gauss_jacobi_unit(n, two_beta, 1).ok().map(|r| TensorRule {
            radial: to_t(r),
            along: along.clone(),
        });
        Ok(Self {
            weight,
            params,
            base: QuadratureRule::degree6(),
            vertex,
            edge,
        })
    }

    pub fn weight(&self) -> &WeightSpec<T> {
        &self.weight
    }

    pub fn params(&self) -> &QuadParams {
        &self.params
    }

    pub fn integrate(&self, tri: &[Point2<T>; 3], mut g: impl FnMut(Point2<T>) -> T) -> T {
        let mut s = T::zero();
        self.for_each_point(tri, &mut |x, w| s += w * g(x));
        s
    }

    /// Visits quadrature points `x` with weights that already include the
    /// area element and `dist(x, Λ)^(2β)`.
    pub fn for_each_point(&self, tri: &[Point2<T>; 3], f: &mut impl FnMut(Point2<T>, T)) {
        if self.weight.beta() == T::zero() {
            self.base_rule(tri, f);
            return;
        }
        self.recurse(tri, 0, f);
    }

    fn recurse(&self, tri: &[Point2<T>; 3], level: usize, f: &mut impl FnMut(Point2<T>, T)) {
        let lambda = self.weight.lambda();
        let diam = (0..3)
            .map(|i| tri[i].dist(tri[(i + 1) % 3]))
            .fold(T::zero(), T::max);
        let dist = lambda.triangle_distance(tri);
        let touch_tol = T::lit(1e-12) * diam;
        if dist <= touch_tol {
            if touching_components(lambda, tri, touch_tol) == 1 && self.has_singular_rules() {
                self.singular_rule(tri, diam, f);
                return;
            }
            if level < self.params.depth {
                self.split(tri, level, f);
            } else {
                self.base_rule(tri, f);
            }
            return;
        }
        if dist < T::lit(self.params.near_factor) * diam && level < self.params.depth {
            self.split(tri, level, f);
        } else {
            self.base_rule(tri, f);
        }
    }

    fn has_singular_rules(&self) -> bool {
        match self.weight.lambda().geometry() {
            SingularGeometry::Segment(..) => self.vertex.is_some() && self.edge.is_some(),
            _ => self.vertex.is_some(),
        }
    }

    fn split(&self, tri: &[Point2<T>; 3], level: usize, f: &mut impl FnMut(Point2<T>, T)) {
        let h = T::lit(0.5);
        let m01 = tri[0].lerp(tri[1], h);
        let m12 = tri[1].lerp(tri[2], h);
        let m20 = tri[2].lerp(tri[0], h);
        for child in [
            [tri[0], m01, m20],
            [m01, tri[1], m12],
            [m20, m12, tri[2]],
            [m01, m12, m20],
        ] {
            self.recurse(&child, level + 1, f);
        }
    }

    fn weight_at(&self, x: Point2<T>) -> T {
        let d = self.weight.lambda().distance(x).max(T::min_positive_value());
        d.powf(self.weight.beta() + self.weight.beta())
    }

    fn base_rule(&self, tri: &[Point2<T>; 3], f: &mut impl FnMut(Point2<T>, T)) {
        let area = signed_area(tri[0], tri[1], tri[2]).abs();
        for (b, w) in self.base.points.iter().zip(&self.base.weights) {
            let x = from_barycentric(tri, b);
            f(x, *w * area * self.weight_at(x));
        }
    }

    /// Pieces of a triangle touching exactly one component of Λ, each meeting
    /// Λ in at most a vertex or an edge.
    fn singular_rule(&self, tri: &[Point2<T>; 3], diam: T, f: &mut impl FnMut(Point2<T>, T)) {
        let tol = T::lit(1e-12) * diam;
        match self.weight.lambda().geometry() {
            SingularGeometry::Point(p) => self.point_pieces(tri, *p, tol, f),
            SingularGeometry::PointPair(ps) => {
                let p = if crate::geometry::triangle_point_distance(tri, ps[0]) <= tol {
                    ps[0]
                } else {
                    ps[1]
                };
                self.point_pieces(tri, p, tol, f)
            }
            SingularGeometry::Segment(a, b) => self.segment_pieces(tri, *a, *b, tol, f),
        }
    }

    fn point_pieces(&self, tri: &[Point2<T>; 3], p: Point2<T>, tol: T, f: &mut impl FnMut(Point2<T>, T)) {
        let area_tol = tol * tol;
        for i in 0..3 {
            let (b, c) = (tri[i], tri[(i + 1) % 3]);
            let piece = [p, b, c];
            if signed_area(p, b, c).abs() > area_tol {
                self.vertex_rule(&piece, f);
            }
        }
    }

    fn segment_pieces(
        &self,
        tri: &[Point2<T>; 3],
        a: Point2<T>,
        b: Point2<T>,
        tol: T,
        f: &mut impl FnMut(Point2<T>, T),
    ) {
        let len = a.dist(b);
        let t_hat = (b - a) * (T::one() / len);
        let n_hat = Point2::new(-t_hat.y, t_hat.x);
        let mut polys = vec![tri.to_vec()];
        let cuts: [(Point2<T>, T); 3] = [
            (n_hat, n_hat.dot(a)),
            (t_hat, t_hat.dot(a)),
            (t_hat, t_hat.dot(b)),
        ];
        for (dir, off) in cuts {
            let mut next = Vec::with_capacity(polys.len() * 2);
            for poly in &polys {
                let (lo, hi) = clip_polygon(poly, dir, off, tol);
                next.extend(lo);
                next.extend(hi);
            }
            polys = next;
        }
        let area_tol = tol * tol;
        for poly in polys {
            for k in 1..poly.len().saturating_sub(1) {
                let piece = [poly[0], poly[k], poly[k + 1]];
                if signed_area(piece[0], piece[1], piece[2]).abs() <= area_tol {
                    continue;
                }
                let c = from_barycentric(&piece, &[T::lit(1.0 / 3.0); 3]);
                let s = t_hat.dot(c - a);
                let singular: Vec<usize> = if s < T::zero() || s > len {
                    let e = if s < T::zero() { a } else { b };
                    (0..3).filter(|&i| piece[i].dist(e) <= tol).collect()
                } else {
                    (0..3).filter(|&i| n_hat.dot(piece[i] - a).abs() <= tol).collect()
                };
                match singular.as_slice() {
                    [] => self.base_rule(&piece, f),
                    [i] => {
                        let i = *i;
                        self.vertex_rule(&[piece[i], piece[(i + 1) % 3], piece[(i + 2) % 3]], f)
                    }
                    [i, j] => {
                        let apex = 3 - i - j;
                        self.edge_rule(&[piece[*i], piece[*j], piece[apex]], f)
                    }
                    _ => {}
                }
            }
        }
    }

    /// Collapsed rule for a triangle whose first vertex is on Λ.
    fn vertex_rule(&self, tri: &[Point2<T>; 3], f: &mut impl FnMut(Point2<T>, T)) {
        let rule = self.vertex.as_ref().expect("vertex rule available");
        let two_area = signed_area(tri[0], tri[1], tri[2]).abs() * T::lit(2.0);
        let two_beta = self.weight.beta() + self.weight.beta();
        let (p, b, c) = (tri[0], tri[1], tri[2]);
        for &(v, wv) in &rule.along {
            let e = (b - p) + (c - b) * v;
            for &(u, wu) in &rule.radial {
                let x = p + e * u;
                let d = self.weight.lambda().distance(x);
                let ratio = (d / u).max(T::min_positive_value());
                f(x, wu * wv * two_area * ratio.powf(two_beta));
            }
        }
    }

    /// Collapsed rule for a triangle whose first edge lies on Λ.
    fn edge_rule(&self, tri: &[Point2<T>; 3], f: &mut impl FnMut(Point2<T>, T)) {
        let rule = self.edge.as_ref().expect("edge rule available");
        let two_area = signed_area(tri[0], tri[1], tri[2]).abs() * T::lit(2.0);
        let two_beta = self.weight.beta() + self.weight.beta();
        let (a, b, c) = (tri[0], tri[1], tri[2]);
        for &(v, wv) in &rule.along {
            let e = a.lerp(b, v);
            for &(s, ws) in &rule.radial {
                let x = e.lerp(c, s);
                let d = self.weight.lambda().distance(x);
                let ratio = (d / s).max(T::min_positive_value());
                f(x, ws * wv * two_area * ratio.powf(two_beta));
            }
        }
    }
}

fn touching_components<T: Real>(lambda: &SingularSet<T>, tri: &[Point2<T>; 3], tol: T) -> usize {
    match lambda.geometry() {
        SingularGeometry::PointPair(ps) => ps
            .iter()
            .filter(|p| crate::geometry::triangle_point_distance(tri, **p) <= tol)
            .count(),
        _ => 1,
    }
}

type Polygon<T> = Vec<Point2<T>>;

/// Splits a convex polygon by the line `dir · x = off` into the parts with
/// `dir · x <= off` and `dir · x >= off`. Vertices within `tol` of the line
/// are snapped onto both parts.
fn clip_polygon<T: Real>(
    poly: &[Point2<T>],
    dir: Point2<T>,
    off: T,
    tol: T,
) -> (Option<Polygon<T>>, Option<Polygon<T>>) {
    let side: Vec<T> = poly
        .iter()
        .map(|p| {
            let s = dir.dot(*p) - off;
            if s.abs() <= tol {
                T::zero()
            } else {
                s
            }
        })
        .collect();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let n = poly.len();
    for i in 0..n {
        let j = (i + 1) % n;
        let (si, sj) = (side[i], side[j]);
        if si <= T::zero() {
            lo.push(poly[i]);
        }
        if si >= T::zero() {
            hi.push(poly[i]);
        }
        if (si < T::zero() && sj > T::zero()) || (si > T::zero() && sj < T::zero()) {
            let t = si / (si - sj);
            let x = poly[i].lerp(poly[j], t);
            lo.push(x);
            hi.push(x);
        }
    }
    let keep = |v: Vec<Point2<T>>| if v.len() >= 3 { Some(v) } else { None };
    (keep(lo), keep(hi))
}

/// Convenience wrapper around [`WeightedQuadrature::integrate`].
pub fn weighted_element_integral<T: Real>(
    tri: &[Point2<T>; 3],
    g: impl FnMut(Point2<T>) -> T,
    weight: &WeightSpec<T>,
    params: &QuadParams,
) -> Result<T> {
    let q = WeightedQuadrature::new(weight.clone(), params.clone())?;
    Ok(q.integrate(tri, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    fn reference() -> [Point2<f64>; 3] {
        [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]
    }

    /// ∫ x^i y^j over the reference triangle = i! j! / (i + j + 2)!
    fn monomial_exact(i: u32, j: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        fact(i) * fact(j) / fact(i + j + 2)
    }

    #[test]
    fn triangle_rules_are_positive_and_exact() {
        for rule in [
            QuadratureRule::<f64>::centroid(),
            QuadratureRule::degree4(),
            QuadratureRule::degree6(),
        ] {
            assert!(rule.weights.iter().all(|w| *w > 0.0));
            assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            for deg in 0..=rule.order as u32 {
                for i in 0..=deg {
                    let j = deg - i;
                    let got = rule.integrate(&reference(), |x| x.x.powi(i as i32) * x.y.powi(j as i32));
                    let want = monomial_exact(i, j);
                    assert!((got - want).abs() < 1e-13, "order {} x^{i} y^{j}: {got} vs {want}", rule.order);
                }
            }
        }
    }

    #[test]
    fn gauss_jacobi_exact_on_weighted_monomials() {
        for &(a, b) in &[(0.0, 0u32), (-0.5, 0), (0.1, 1), (-0.9, 1), (1.5, 0), (0.5, 2)] {
            let n = 6;
            let (x, w) = gauss_jacobi_unit(n, a, b).unwrap();
            for k in 0..(2 * n) as i32 {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
                // ∫ s^(a+k) (1-s)^b by expanding (1-s)^b
                let mut want = 0.0;
                let mut binom = 1.0;
                for i in 0..=b {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    want += sign * binom / (a + f64::from(k) + f64::from(i) + 1.0);
                    binom = binom * f64::from(b - i) / f64::from(i + 1);
                }
                assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "a={a} b={b} k={k}");
            }
        }
        assert!(gauss_jacobi_unit(4, -1.0, 0).is_err());
    }

    #[test]
    fn segment_integrals() {
        let seg = SingularSet::segment(p(0.375, 0.5), p(0.625, 0.5), 1.0).unwrap();
        for n in [1, 3, 8] {
            assert!((segment_line_integral(|_| 1.0, &seg, n).unwrap() - 0.25).abs() < 1e-15);
            assert!((segment_line_integral(|x| x.x, &seg, n).unwrap() - 0.125).abs() < 1e-15);
        }
        assert!(segment_line_integral(|_| 1.0, &seg, 0).is_err());
        let pt = SingularSet::point(p(0.5, 0.5), 1.0).unwrap();
        assert!(segment_line_integral(|_| 1.0, &pt, 2).is_err());
    }

    #[test]
    fn unit_weight_gives_area() {
        let lambda = SingularSet::point(p(0.5, 0.5), 1.0).unwrap();
        let w = WeightSpec::new(lambda, 0.0).unwrap();
        let tri = [p(0.1, 0.2), p(0.7, 0.25), p(0.3, 0.9)];
        let area = signed_area(tri[0], tri[1], tri[2]);
        let got = weighted_element_integral(&tri, |_| 1.0, &w, &QuadParams::default()).unwrap();
        assert!((got - area).abs() < 1e-14 * area);
    }

    #[test]
    fn point_on_edge_and_interior_are_resolved() {
        // Λ strictly inside: compare with splitting the triangle at Λ by hand.
        let lambda = SingularSet::point(p(0.25, 0.25), 1.0).unwrap();
        let w = WeightSpec::new(lambda, -0.3).unwrap();
        let q = WeightedQuadrature::new(w, QuadParams::default()).unwrap();
        let whole = q.integrate(&reference(), |x| 1.0 + x.x);
        let c = p(0.25, 0.25);
        let parts: f64 = [
            [c, p(0.0, 0.0), p(1.0, 0.0)],
            [c, p(1.0, 0.0), p(0.0, 1.0)],
            [c, p(0.0, 1.0), p(0.0, 0.0)],
        ]
        .iter()
        .map(|t| q.integrate(t, |x| 1.0 + x.x))
        .sum();
        assert!((whole - parts).abs() < 1e-12 * whole);
    }

    #[test]
    fn segment_weight_matches_strip_integral() {
        // Unit square split in two, Λ a horizontal segment crossing it fully:
        // ∫_0^1 ∫_0^1 |y - 1/2|^(2β) dy dx = 2 (1/2)^(2β+1) / (2β+1).
        let lambda = SingularSet::segment(p(-0.5, 0.5), p(1.5, 0.5), 1.0);
        // endpoints outside the unit square are rejected; use one within a
        // scaled copy instead
        assert!(lambda.is_err());
        let lambda = SingularSet::segment(p(0.0, 0.5), p(1.0, 0.5), 1.0).unwrap();
        for beta in [-0.4, -0.25, 0.25] {
            let q = WeightedQuadrature::new(WeightSpec::new(lambda.clone(), beta).unwrap(), QuadParams::default())
                .unwrap();
            let lower = [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)];
            let upper = [p(0.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];
            let got = q.integrate(&lower, |_| 1.0) + q.integrate(&upper, |_| 1.0);
            let want = 2.0 * 0.5f64.powf(2.0 * beta + 1.0) / (2.0 * beta + 1.0);
            assert!((got - want).abs() < 1e-10 * want, "beta={beta}: {got} vs {want}");
        }
    }

    #[test]
    fn barycentric_round_trip() {
        let tri = [p(0.1, 0.2), p(0.7, 0.25), p(0.3, 0.9)];
        let b = barycentric(&tri, p(0.35, 0.4));
        let x = from_barycentric(&tri, &b);
        assert!((x.x - 0.35).abs() < 1e-15 && (x.y - 0.4).abs() < 1e-15);
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
