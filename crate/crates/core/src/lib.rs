//! Exact computation of ½-derivations and transposed Poisson structures on
//! finite-dimensional Lie algebras, with builders for the upper triangular
//! (`T_n`), full (`M_n`) and special linear (`sl_n`) matrix Lie algebras.

pub mod automorphism;
pub mod classify;
pub mod error;
pub mod half_deriv;
pub mod json;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod product;
pub mod rational;
pub mod reproduce;

pub use error::{Error, Result};
pub use half_deriv::{DerivationSpace, DerivationWeight, LinearMap};
pub use lie::{AlgebraKind, BasisLabel, LieAlgebra, Subspace};
pub use linalg::{Echelon, ExactMatrix};
pub use product::{BilinearProduct, CatalogEntry, StructureReport, T2Structure, TpChecker};
pub use rational::Rational;
