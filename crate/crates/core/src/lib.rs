//! 3-designs from GL₂(F_q)-invariant spaces of binary forms.
//!
//! Blocks are zero sets on the projective line of nonzero forms in an
//! invariant subspace `W ⊂ F_q[X,Y]_k` that vanish at exactly `k` points.
//! The crate covers finite-field arithmetic, the projective line and PGL₂,
//! forms and their Lucas subspaces, block enumeration and design
//! verification, the unit-circle model over F_{q²}, and the projective
//! Reed–Solomon subcodes (including the Melas code) whose supports carry
//! the same designs.

pub mod error;
pub mod gf;
pub mod linalg;
pub mod polyspace;
pub mod projline;
pub mod subsets;
pub mod cayley;
pub mod codes;
pub mod designs;

pub use error::{Error, Result};
pub use gf::{Elem, ExtElem, ExtField, Field, FieldOps};
pub use polyspace::{HomPoly, Subspace};
pub use projline::{Matrix2, Pgl2Element, ProjPoint};
