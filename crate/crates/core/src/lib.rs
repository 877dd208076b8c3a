//! Exact computations for maximal Sp(4,R)-Higgs bundles on a closed surface.
//!
//! The crate is layered bottom-up:
//!
//! * [`numfield`]: exact arithmetic in Q(i, √2, √3).
//! * [`matalg`]: 2x2 and 4x4 matrices over that field, symplectic forms and
//!   the fixed change-of-frame matrices.
//! * [`liegroup`]: the irreducible and reducible embeddings of SL(2) into
//!   Sp(4), their differentials and Cartan decompositions.
//! * [`higgs`]: explicit Higgs-bundle shapes, stability, Cayley partners and
//!   Stiefel–Whitney invariants.
//! * [`moduli`]: connected-component labels, counts, reduction verdicts and
//!   the F2 surjectivity scan.
//! * [`verify`]: named identity suites producing machine-readable reports.

pub mod error;
pub mod exec;
pub mod f2;
pub mod higgs;
pub mod liegroup;
pub mod matalg;
pub mod moduli;
pub mod numfield;
pub mod verify;

pub use error::{Error, Result};
pub use f2::F2Vec;
pub use matalg::SqMatrix;
pub use numfield::{FieldElem, Rational};
