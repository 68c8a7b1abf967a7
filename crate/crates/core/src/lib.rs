//! Substitution calculus, recursive blow-up limits and motif densities for
//! finite canonical relational structures.

pub mod blowup;
pub mod canon;
pub mod dimension;
pub mod embed;
pub mod enumerate;
pub mod error;
pub mod families;
pub mod graph6;
pub mod logic;
pub mod registry;
pub mod structure;
pub mod substitution;
pub mod verify;

pub use canon::{are_isomorphic, canonical_form, CanonicalCode};
pub use embed::{count_embeddings, densities, DensityReport};
pub use error::{Error, Result};
pub use structure::{validate_structure, Graph, Language, Predicate, RawStructure, Structure};

use num::BigRational;

pub(crate) fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}
