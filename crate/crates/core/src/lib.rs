//! Meta-ranks, meta-diagrams and signed barcodes of two-parameter
//! persistence modules.
//!
//! The input is a bifiltered simplicial complex: each simplex carries a real
//! bigrade, and the sublevel sets form a family of complexes monotone in both
//! coordinates. After refining the grades to a simplex-wise grid
//! ([`bifiltration`]), a single staircase sweep maintains a `D = R·U`
//! decomposition across the grid ([`reduction`], [`vineyard`]) and fills the
//! triangular meta-rank table in O(n³) time for a complex of `n` simplices
//! ([`table`]). Möbius inversion of the table yields the meta-diagram and,
//! expanded into rectangles, the signed barcode / rank decomposition of the
//! module ([`signed`]). Erosion distances between these invariants live in
//! [`metrics`], and [`oracle`] re-derives everything by brute force for
//! exact cross-checking.
//!
//! # Example
//!
//! ```
//! use metarank::bifiltration::{parse_bifiltration, refine_to_simplexwise};
//! use metarank::signed::mobius_invert;
//! use metarank::table::compute_metarank;
//! use metarank::vineyard::CheckLevel;
//!
//! let text = "0 ; 0.0 0.0\n1 ; 1.0 0.5\n0 1 ; 1.5 2.0";
//! let raw = parse_bifiltration(text).unwrap();
//! let (complex, _grades) = refine_to_simplexwise(&raw).unwrap();
//! let table = compute_metarank(&complex, CheckLevel::None);
//! let mdgm = mobius_invert(&table);
//! // The everlasting component plus the hook left by the merged vertex,
//! // which needs one negative bar.
//! assert_eq!(mdgm.signed_bar_count(), (3, 1));
//! ```

pub mod bench;
pub mod bifiltration;
mod cascade;
pub mod cli;
pub mod generators;
pub mod json;
pub mod metrics;
pub mod oracle;
pub mod reduction;
pub mod signed;
pub mod svg;
pub mod table;
pub mod vineyard;
