//! Exact-arithmetic lattice representation.

pub mod basis;
pub mod gso;
pub mod linalg;
pub mod reduce;
pub mod sublattice;
pub mod tower;

pub use basis::{Basis, BasisId};
pub use gso::{dual_basis, gram_schmidt, GramSchmidt, GsoF64};
pub use linalg::Rational;
pub use reduce::{reduce_basis, ReductionProfile, Reduced};
pub use sublattice::{coset_label, sublattice_index, sublattice_transform, CosetLabel, Quotient};
pub use tower::{make_tower, random_superlattice, Tower};
