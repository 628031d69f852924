//! Moment polytopes: facet data, validation, examples, and monomial valuations.

mod examples;
mod monomial;
mod polytope;
mod validate;

pub use examples::{
    build_example, cp1, cpn, k_point_blowup, one_point_blowup_monotone, two_point_blowup, EXAMPLE_NAMES,
};
pub use monomial::{monomial_min_valuation, monomial_to_z, Monomial, ZExpression};
pub use polytope::{Facet, MomentPolytope};
pub use validate::{validate, vertices, ValidationFailure, ValidationReport, Vertex};
