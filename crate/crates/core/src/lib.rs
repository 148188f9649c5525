//! Exact-arithmetic construction of the semisimple bicrossed-product Hopf
//! algebras of dimension p^3 and pq^2, with verification of all cocycle
//! and Hopf axioms, and enumeration of their right Galois objects by
//! counting fiber-functor pairs (L, beta) on the associated
//! group-theoretical fusion categories up to conjugacy.
//!
//! All arithmetic is exact: root-of-unity scalars are carried as
//! exponents in Z/M, linear problems are solved by Howell-style
//! elimination over Z/p^k glued by CRT, and antipodes are computed over
//! the cyclotomic field Q(zeta_M).

pub mod error;
pub mod modular;
pub mod group;
pub mod cochain;
pub mod cyclotomic;
pub mod bicrossed;
pub mod families;
pub mod fiber;

pub use error::{Error, Result};
pub use group::{build_group, FiniteGroup, GroupAction, Subgroup};
