//! Exact order-pattern analysis for one-dimensional dynamics and shift systems.
//!
//! An order pattern of length `L` records the relative order of `L` consecutive
//! iterates `x, T(x), ..., T^{L-1}(x)` as a permutation. Piecewise monotone
//! interval maps and finite-alphabet shifts realize only some of the `L!`
//! patterns; the rest are *forbidden*, and their absence cascades into all
//! longer lengths. This crate provides:
//!
//! - [`perm`] — patterns as permutations: consecutive containment, outgrowth
//!   sets, elementary extensions and predecessors, counting bounds;
//! - [`shift`] — one- and two-sided N-symbol shifts: exact lexicographic order
//!   on eventually periodic sequences, spiralling patterns and their
//!   forbidden/allowed classification, witnesses, forbidden root patterns;
//! - [`plmap`] — exact rational arithmetic for piecewise-affine self-maps of
//!   `[0,1]`: iteration, the order-pattern census with exact realizing
//!   interval unions, coding words, digit/value conversion, the tent-to-
//!   logistic conjugacy;
//! - [`series`] — ordinal analysis of finite float series: sliding-window
//!   censuses, missing-pattern statistics against an i.i.d. null model, and
//!   reproducible sequence/orbit generators.
//!
//! All combinatorial and interval results are exact (arbitrary-precision
//! rationals); floating point appears only where a series is itself float
//! data or where endpoints are reported through the non-rational conjugacy.

pub mod perm;
pub mod plmap;
pub mod rng;
pub mod series;
pub mod shift;

pub use perm::Pattern;
pub use plmap::{PatternCensus, PlMap, Rational, RationalMap};
pub use series::Series;
pub use shift::{Bisequence, SegmentPartition, SymbolSequence};
