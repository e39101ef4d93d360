//! Exact symbolic tensor calculus on framed almost contact metric manifolds.
//!
//! Coefficients live in a ring of polynomials in coordinate and parameter
//! symbols times exponentials of linear forms, with rational coefficients.
//! Everything downstream (connection, curvature, contact identities, soliton
//! residuals) is computed in this ring without floating point.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod connection;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod linalg;
pub mod manifold;
pub mod numeric;
pub mod soliton;
pub mod tensor;
pub mod verify;

pub use analysis::Geometry;
pub use error::Error;
pub use expr::{CoeffExpr, Monomial, Rational, Term};
pub use manifold::{
    build_manifold, build_manifold_relaxed, CoordinateVectorField, FrameAxis, FrameSpec,
    FrameVectorField, FramedManifold, ManifoldSpec,
};
