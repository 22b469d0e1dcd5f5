//! Singular sets, exact distance evaluation and the admissibility
//! intervals of the distance weight `dist(x, Λ)^(2β)`.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }
}

impl<T: Real> Add for Point2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

/// Signed area of the triangle `(a, b, c)`; positive when counterclockwise.
pub fn signed_area<T: Real>(a: Point2<T>, b: Point2<T>, c: Point2<T>) -> T {
    (b - a).cross(c - a) * T::lit(0.5)
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance<T: Real>(p: Point2<T>, a: Point2<T>, b: Point2<T>) -> T {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 <= T::zero() {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).max(T::zero()).min(T::one());
    p.dist(a + ab * t)
}

fn orient<T: Real>(a: Point2<T>, b: Point2<T>, c: Point2<T>) -> T {
    (b - a).cross(c - a)
}

/// Whether `p` lies in the closed triangle `tri` (either orientation).
pub fn point_in_triangle<T: Real>(p: Point2<T>, tri: &[Point2<T>; 3]) -> bool {
    let d0 = orient(tri[0], tri[1], p);
    let d1 = orient(tri[1], tri[2], p);
    let d2 = orient(tri[2], tri[0], p);
    let z = T::zero();
    let has_neg = d0 < z || d1 < z || d2 < z;
    let has_pos = d0 > z || d1 > z || d2 > z;
    !(has_neg && has_pos)
}

fn segments_intersect<T: Real>(p1: Point2<T>, p2: Point2<T>, q1: Point2<T>, q2: Point2<T>) -> bool {
    let z = T::zero();
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z)) {
        return true;
    }
    let on = |a: Point2<T>, b: Point2<T>, c: Point2<T>, d: T| {
        d == z
            && c.x >= a.x.min(b.x)
            && c.x <= a.x.max(b.x)
            && c.y >= a.y.min(b.y)
            && c.y <= a.y.max(b.y)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// Distance between the closed triangle and the point `p`.
pub fn triangle_point_distance<T: Real>(tri: &[Point2<T>; 3], p: Point2<T>) -> T {
    if point_in_triangle(p, tri) {
        return T::zero();
    }
    (0..3)
        .map(|i| point_segment_distance(p, tri[i], tri[(i + 1) % 3]))
        .fold(T::infinity(), T::min)
}

/// Distance between the closed triangle and the closed segment `[a, b]`.
pub fn triangle_segment_distance<T: Real>(tri: &[Point2<T>; 3], a: Point2<T>, b: Point2<T>) -> T {
    if point_in_triangle(a, tri) || point_in_triangle(b, tri) {
        return T::zero();
    }
    for i in 0..3 {
        if segments_intersect(tri[i], tri[(i + 1) % 3], a, b) {
            return T::zero();
        }
    }
    let mut d = T::infinity();
    for i in 0..3 {
        let (p, q) = (tri[i], tri[(i + 1) % 3]);
        d = d.min(point_segment_distance(a, p, q));
        d = d.min(point_segment_distance(b, p, q));
        d = d.min(point_segment_distance(tri[i], a, b));
    }
    d
}

/// Geometry of the singular set Λ.
#[derive(Debug, Clone, PartialEq)]
pub enum SingularGeometry<T> {
    Point(Point2<T>),
    PointPair([Point2<T>; 2]),
    Segment(Point2<T>, Point2<T>),
}

/// The support Λ of the Dirac source together with its source density.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSet<T> {
    geometry: SingularGeometry<T>,
    /// One density per point component, or the constant line density.
    density: Vec<T>,
}

fn check_inside<T: Real>(p: Point2<T>) -> Result<()> {
    let ok = |c: T| c >= T::zero() && c <= T::one() && c.is_finite();
    if ok(p.x) && ok(p.y) {
        Ok(())
    } else {
        Err(Error::config(format!(
            "singular set point ({}, {}) lies outside the closed unit square",
            p.x, p.y
        )))
    }
}

impl<T: Real> SingularSet<T> {
    pub fn point(p: Point2<T>, f: T) -> Result<Self> {
        check_inside(p)?;
        Ok(Self {
            geometry: SingularGeometry::Point(p),
            density: vec![f],
        })
    }

    pub fn point_pair(p: Point2<T>, fp: T, q: Point2<T>, fq: T) -> Result<Self> {
        check_inside(p)?;
        check_inside(q)?;
        if p == q {
            return Err(Error::config("point pair must consist of two distinct points"));
        }
        Ok(Self {
            geometry: SingularGeometry::PointPair([p, q]),
            density: vec![fp, fq],
        })
    }

    pub fn segment(a: Point2<T>, b: Point2<T>, f: T) -> Result<Self> {
        check_inside(a)?;
        check_inside(b)?;
        if !(a.dist(b) > T::zero()) {
            return Err(Error::config("segment must have positive length"));
        }
        Ok(Self {
            geometry: SingularGeometry::Segment(a, b),
            density: vec![f],
        })
    }

    pub fn geometry(&self) -> &SingularGeometry<T> {
        &self.geometry
    }

    pub fn density(&self) -> &[T] {
        &self.density
    }

    /// Dimension ℓ of Λ: 0 for points, 1 for segments.
    pub fn ell(&self) -> u32 {
        match self.geometry {
            SingularGeometry::Segment(..) => 1,
            _ => 0,
        }
    }

    /// Segment length, or 0 for point sets.
    pub fn measure(&self) -> T {
        match self.geometry {
            SingularGeometry::Segment(a, b) => a.dist(b),
            _ => T::zero(),
        }
    }

    /// Exact Euclidean distance from `x` to Λ.
    pub fn distance(&self, x: Point2<T>) -> T {
        match &self.geometry {
            SingularGeometry::Point(p) => x.dist(*p),
            SingularGeometry::PointPair([p, q]) => x.dist(*p).min(x.dist(*q)),
            SingularGeometry::Segment(a, b) => point_segment_distance(x, *a, *b),
        }
    }

    /// Distance between the closed triangle and Λ.
    pub fn triangle_distance(&self, tri: &[Point2<T>; 3]) -> T {
        match &self.geometry {
            SingularGeometry::Point(p) => triangle_point_distance(tri, *p),
            SingularGeometry::PointPair([p, q]) => {
                triangle_point_distance(tri, *p).min(triangle_point_distance(tri, *q))
            }
            SingularGeometry::Segment(a, b) => triangle_segment_distance(tri, *a, *b),
        }
    }

    /// Total source strength: Σf for points, f·|Λ| for a segment.
    pub fn total_mass(&self) -> T {
        match self.geometry {
            SingularGeometry::Segment(..) => self.density[0] * self.measure(),
            _ => self.density.iter().copied().sum(),
        }
    }
}

/// An open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenInterval {
    pub lo: f64,
    pub hi: f64,
}

impl OpenInterval {
    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn contains_closed(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

impl std::fmt::Display for OpenInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Admissible exponent intervals for a singular set of dimension `ell` in
/// `d` space dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibleIntervals {
    /// Exponents β for which `d_Λ^(2β)` is a Muckenhoupt A₂ weight.
    pub muckenhoupt: OpenInterval,
    /// Exponents α usable for the trial space of a singular-source solve.
    pub source: OpenInterval,
}

pub fn admissible_intervals(d: u32, ell: u32) -> Result<AdmissibleIntervals> {
    if d != 2 || ell > 1 {
        return Err(Error::config(format!(
            "unsupported dimensions d={d}, ell={ell}; only d=2 with ell in {{0, 1}}"
        )));
    }
    let half = f64::from(d - ell) / 2.0;
    Ok(AdmissibleIntervals {
        muckenhoupt: OpenInterval { lo: -half, hi: half },
        source: OpenInterval {
            lo: half - 1.0,
            hi: half,
        },
    })
}

/// Distance weight `d_Λ^(2β)` together with the singular set.
#[derive(Debug, Clone)]
pub struct WeightSpec<T> {
    lambda: SingularSet<T>,
    beta: T,
}

impl<T: Real> WeightSpec<T> {
    /// Builds a weight, rejecting exponents outside the open Muckenhoupt
    /// interval.
    pub fn new(lambda: SingularSet<T>, beta: T) -> Result<Self> {
        let iv = admissible_intervals(2, lambda.ell())?.muckenhoupt;
        if !iv.contains(beta.as_f64()) {
            return Err(Error::config(format!(
                "weight exponent beta={} outside the Muckenhoupt interval {iv} for ell={}",
                beta,
                lambda.ell()
            )));
        }
        Ok(Self { lambda, beta })
    }

    /// Builds a weight accepting the closed Muckenhoupt interval. Endpoint
    /// weights may fail to be locally integrable; integrals then depend on
    /// the quadrature resolution.
    pub fn new_allow_endpoint(lambda: SingularSet<T>, beta: T) -> Result<Self> {
        let iv = admissible_intervals(2, lambda.ell())?.muckenhoupt;
        if !iv.contains_closed(beta.as_f64()) {
            return Err(Error::config(format!(
                "weight exponent beta={} outside the closed Muckenhoupt interval [{}, {}]",
                beta, iv.lo, iv.hi
            )));
        }
        Ok(Self { lambda, beta })
    }

    /// The unit weight (β = 0).
    pub fn unweighted(lambda: SingularSet<T>) -> Self {
        Self {
            lambda,
            beta: T::zero(),
        }
    }

    pub fn lambda(&self) -> &SingularSet<T> {
        &self.lambda
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn ell(&self) -> u32 {
        self.lambda.ell()
    }

    /// Same singular set with exponent `-β`.
    pub fn negated(&self) -> Self {
        Self {
            lambda: self.lambda.clone(),
            beta: -self.beta,
        }
    }

    pub fn eval(&self, x: Point2<T>) -> T {
        if self.beta == T::zero() {
            return T::one();
        }
        self.lambda.distance(x).powf(self.beta + self.beta)
    }
}

/// Validates a source exponent α against the source interval. Endpoints are
/// accepted only with `allow_endpoint`.
pub fn check_source_exponent(alpha: f64, ell: u32, allow_endpoint: bool) -> Result<()> {
    let iv = admissible_intervals(2, ell)?.source;
    if iv.contains(alpha) || (allow_endpoint && iv.contains_closed(alpha)) {
        return Ok(());
    }
    let hint = if iv.contains_closed(alpha) {
        " (endpoint values require --allow-endpoint)"
    } else {
        ""
    };
    Err(Error::config(format!(
        "alpha={alpha} outside the source-admissible interval {iv} for ell={ell}{hint}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    #[test]
    fn intervals_for_points_and_lines() {
        let pt = admissible_intervals(2, 0).unwrap();
        assert_eq!(pt.muckenhoupt, OpenInterval { lo: -1.0, hi: 1.0 });
        assert_eq!(pt.source, OpenInterval { lo: 0.0, hi: 1.0 });
        let ln = admissible_intervals(2, 1).unwrap();
        assert_eq!(ln.muckenhoupt, OpenInterval { lo: -0.5, hi: 0.5 });
        assert_eq!(ln.source, OpenInterval { lo: -0.5, hi: 0.5 });
        assert!(!pt.source.contains(0.0));
        assert!(admissible_intervals(3, 0).is_err());
        assert!(admissible_intervals(2, 2).is_err());
    }

    #[test]
    fn source_exponent_gating() {
        assert!(check_source_exponent(0.0, 0, false).is_err());
        assert!(check_source_exponent(0.5, 0, false).is_ok());
        assert!(check_source_exponent(1.0, 0, false).is_err());
        assert!(check_source_exponent(1.0, 0, true).is_ok());
        assert!(check_source_exponent(1.2, 0, true).is_err());
        assert!(check_source_exponent(-0.25, 1, false).is_ok());
        let msg = check_source_exponent(1.0, 0, false).unwrap_err().to_string();
        assert!(msg.contains("(0, 1)"), "{msg}");
    }

    #[test]
    fn distances() {
        let pt = SingularSet::point(p(0.5, 0.5), 1.0).unwrap();
        assert!((pt.distance(p(0.0, 0.0)) - 0.5f64.sqrt()).abs() < 1e-15);
        let seg = SingularSet::segment(p(0.375, 0.5), p(0.625, 0.5), 1.0).unwrap();
        assert_eq!(seg.distance(p(0.5, 0.75)), 0.25);
        assert_eq!(seg.distance(p(0.75, 0.5)), 0.125);
        let pair = SingularSet::point_pair(p(0.75, 0.25), -1.0, p(0.25, 0.75), 1.0).unwrap();
        assert_eq!(pair.distance(p(0.75, 0.5)), 0.25);
        assert_eq!(pair.total_mass(), 0.0);
        assert_eq!(seg.total_mass(), 0.25);
    }

    #[test]
    fn triangle_distances() {
        let tri = [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)];
        assert_eq!(triangle_point_distance(&tri, p(0.2, 0.2)), 0.0);
        assert_eq!(triangle_point_distance(&tri, p(0.0, 0.0)), 0.0);
        assert!((triangle_point_distance(&tri, p(1.0, 1.0)) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(triangle_segment_distance(&tri, p(-1.0, 0.5), p(2.0, 0.5)), 0.0);
        assert_eq!(triangle_segment_distance(&tri, p(0.0, 2.0), p(0.0, 3.0)), 1.0);
        // segment touching the hypotenuse only at a point
        assert_eq!(triangle_segment_distance(&tri, p(0.5, 0.5), p(1.0, 1.0)), 0.0);
    }

    #[test]
    fn rejects_bad_geometry_and_exponents() {
        assert!(SingularSet::point(p(1.5, 0.5), 1.0).is_err());
        assert!(SingularSet::segment(p(0.5, 0.5), p(0.5, 0.5), 1.0).is_err());
        let pt = SingularSet::point(p(0.5, 0.5), 1.0).unwrap();
        assert!(WeightSpec::new(pt.clone(), 1.0).is_err());
        assert!(WeightSpec::new(pt.clone(), -0.99).is_ok());
        assert!(WeightSpec::new_allow_endpoint(pt, -1.0).is_ok());
    }
}
