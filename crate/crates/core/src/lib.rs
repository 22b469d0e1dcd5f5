//! Localized orthogonal decomposition in distance-weighted Sobolev spaces for
//! `-div(A∇u) = f δ_Λ` on the unit square, with `Λ` a point, a pair of points
//! or a line segment.
//!
//! The numerical core is generic over [`scalar::Real`]; the aliases below fix
//! it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod coefficients;
pub mod correctors;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod multiscale;
pub mod quadrature;
pub mod quasi_interp;
pub mod scalar;

pub use error::{Error, Result};

pub type Point = geometry::Point2<f64>;
pub type Mesh = mesh::MeshLevel<f64>;
pub type Hierarchy = mesh::MeshHierarchy<f64>;
pub type Singular = geometry::SingularSet<f64>;
pub type Weight = geometry::WeightSpec<f64>;
pub type Coefficient = coefficients::CoefficientField<f64>;
pub type Forms = correctors::WeightedForms<f64>;
pub type Basis = correctors::CorrectorBasis<f64>;
pub type Solution = multiscale::MultiscaleSolution<f64>;
pub type SparseMatrix = linalg::CsrMatrix<f64>;
