//! Planar quantum LDPC codes built from pairs of bivariate Laurent
//! polynomials over GF(2).
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and parallel drivers live in the companion `planar-qldpc-cli` crate.
#![no_std]

extern crate alloc;

pub mod code;
pub mod distance;
pub mod f2;
pub mod fractal;
pub mod graft;
pub mod groebner;
pub mod lattice;
pub mod poly;
pub mod search;

pub use code::{metric, Certainty, CodeParams, CssCode, LogicalClass, Pauli, QubitLabel};
pub use f2::{BitMatrix, BitVec};
pub use lattice::{build_open_code, family_registry, EdgeId, FamilySpec, LatticeCode, LatticeSpec, MaskRule, PauliOp};
pub use poly::{quotient_dimension, torus_dimension, FamilyPoly, LaurentPoly2, QuotientDim};
