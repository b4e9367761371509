//! Classification of self-dual codes over `Z_k` through k-frames of
//! unimodular lattices.
//!
//! The pipeline enumerates k-frames of each unimodular lattice `L` of
//! dimension `n <= 9` (up to the automorphisms of `L`), projects every frame
//! to a self-dual code `C` with `A_k(C) ≅ L`, and keeps one canonical
//! representative per monomial equivalence class.

pub mod classify;
pub mod code;
pub mod db;
pub mod equivalence;
pub mod error;
pub mod frames;
pub mod lattice;
pub mod linalg;
pub mod reference;

pub use classify::{classify, classify_length, table_n4, ClassificationResult, ClassifyOptions, Tier};
pub use code::{allowed_length, brute_force_classify, euclidean_weight, BruteForceBudget, CodeType, ZkCode};
pub use equivalence::{apply, are_equivalent, canonical_form, dedupe, MonomialMap};
pub use error::{Result, ZkError};
pub use frames::{enumerate_frames, frame_cover, project_frame, Frame, OdKind, OdMatrix};
pub use lattice::{construction_a, standard_lattice, LatticeClass, ScaledLattice};
pub use linalg::{howell_form, kernel_mod_k, mat_mul_mod_k, row_span_cardinality, ZkMatrix};
