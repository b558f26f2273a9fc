//! Explicit finite A∞ categories and twisted complexes over them.
//!
//! Operations are stored in path order: `μ^k(x_1, ..., x_k)` takes
//! `x_i: X_{i-1} → X_i`. The relations read
//! `Σ (-1)^{✠_i} μ(x_1..x_i, μ(x_{i+1}..x_{i+j}), ..., x_d) = 0` with
//! `✠_i = Σ_{p ≤ i} (|x_p| - 1)`, and strict units satisfy `μ²(e, x) = x`,
//! `μ²(x, e) = (-1)^{|x|} x`.

mod category;
mod check;
mod cohomology;
mod twisted;

pub use category::{
    mu_linear, reduce_degree, AInfCategory, AInfFile, AInfStructure, BasisElement, BasisEntry, Element, HomBlock, Memo, MuEntry, OutTerm,
};
pub(crate) use check::for_each_tuple;
pub use check::{check_ainf, check_strict_units, relation_residual, RelationReport, RelationViolation};
pub use cohomology::{cohomology_category, Cohomology, CohomologyClass};
pub use twisted::{
    hom_complex, maurer_cartan_residual, tw_hom_complex, tw_mu, validate_twisted_complex, DeltaEntry, HomComplex, ShiftedObject,
    SummandEntry, TwBasis, TwCategory, TwistedComplex, TwistedComplexFile,
};
