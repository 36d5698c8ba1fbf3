//! Exact-arithmetic model of smooth simply connected 4-manifolds: intersection
//! forms, a catalog of building blocks, Bauer–Furuta monopole classes, and
//! curvature obstructions to Einstein metrics on connected sums.

pub mod catalog;
pub mod classes;
pub mod expr;
pub mod geography;
pub mod lattice;
pub mod manifolds;
pub mod monopole;
pub mod obstruction;
pub mod reproduce;

pub use catalog::{Catalog, CatalogRecord};
pub use classes::{CohClass, GeneratorBasis};
pub use expr::{parse_expression, SumExpression};
pub use lattice::UnimodularForm;
pub use manifolds::ManifoldSpec;
pub use monopole::MonopoleSet;
pub use obstruction::{assess, HtStatus, Verdict};
