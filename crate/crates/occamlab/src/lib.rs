//! occamlab: a desk-scale laboratory for description-language-relative induction.
//!
//! The crate is organized in four layers:
//!
//! * [`udl`] — the universal description language: a tiny total tape machine
//!   (`R0`) plus wrappers that re-encode it, all driven by plain bitstrings.
//! * [`enumeration`] — exhaustive sweeps over all descriptions up to a length
//!   bound, grouped into hypothesis classes by emitted prefix, with MDL and
//!   prior construction and an on-disk cache format.
//! * [`inference`] — filter-and-renormalize Bayesian updating over enumerated
//!   classes, with correspondence/alignment/entropy metrics, reweighting, and
//!   submodel chains.
//! * [`relativity`] — executable demonstrations that the induced ordering of
//!   hypotheses is a property of the description language, not of the data.

pub mod enumeration;
pub mod inference;
pub mod relativity;
pub mod udl;
