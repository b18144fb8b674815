//! Exact finite-field machinery for deciding when Reed-Solomon fingerprinting
//! codes fail to be (w1,w2)-separating.
//!
//! The crate is organized around the pipeline the `rsc` CLI exposes:
//!
//! * [`field`] — arithmetic in GF(p^m) with a deterministic polynomial
//!   registry, discrete logs, spans and sumsets/product-sets;
//! * [`rs`] — Reed-Solomon codes by evaluation, polynomial images, and the
//!   critical dimension threshold;
//! * [`separability`] — witnesses that a subset of a field is covered by a
//!   small sumset E+F or product set EF, plus an exhaustive search;
//! * [`collusion`] — ground-truth brute-force verifiers for separating / IPP /
//!   TA properties of explicit codes, and the linear-code non-separation
//!   witness built from a separable codeword image;
//! * [`ssrs`] — cyclotomic cosets, the L(k,v) lower bound and an exact
//!   GF(2)-rank computation of subspace-subcode dimensions;
//! * [`classifier`] — the rule chain that labels a parameter cell (q,w1,w2)
//!   as trivial, resolved (with the responsible rule and a verified witness
//!   when one materializes) or pending, and the table renderers.

pub mod bits;
pub mod classifier;
pub mod collusion;
pub mod field;
pub mod rs;
pub mod separability;
pub mod ssrs;

pub use field::{make_field, Field, FieldElement, FieldError};
pub use rs::{threshold_k, Codeword, Poly, RsSpec};
