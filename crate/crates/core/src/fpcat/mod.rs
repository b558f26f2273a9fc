//! Finitely presented linear categories, word growth and growth classification.

mod classify;
mod growth;
mod ideal;
mod lincat;
mod presentation;

pub(crate) use classify::least_squares;
pub use classify::{classify_growth, classify_log_samples, GrowthClassification, Verdict, DEGREE_DRIFT, RATE_FLOOR};
pub use growth::{
    category_to_object_bound, path_identities, span_growth, word_growth, word_growth_at_object, word_growth_at_object_with,
    word_growth_with, Composer, DecompositionRow, GrowthOptions, GrowthTable, QuotientComposer, SpanLayers,
};
pub use ideal::{ideal_basis_up_to, IdealTruncation};
#[allow(unused_imports)]
pub(crate) use lincat::parity;
pub use lincat::{is_nonzero, retract_transport, BasisMorphism, LinCat, Morphism, Retract, RetractReport};
pub use presentation::{max_len, min_len, multiply, Generator, MorphismExpr, Path, PathPoly, Presentation, Quiver, SigmaSet, Term};
