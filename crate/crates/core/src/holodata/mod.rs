//! Exact algebra connecting monomial holomorphic data p_i = c_i z^{k_i} to
//! asymptotic data (gamma0, gamma1): the ten-row block case table, the
//! closed-form and first-principles gamma maps, the gamma -> exponents
//! inversion, homogeneity exponents, the worked-example catalog, and the
//! real-form matrix checks.
//!
//! Exponent arithmetic is exact (arbitrary-precision rationals); coefficient
//! expressions are kept symbolic as products of c_i to rational powers and
//! only evaluated to floating point on demand.

mod case;
mod catalog;
mod gamma;
mod monomial;
mod structure;

pub use case::{case_spec, CaseSpec, CASES};
pub use catalog::{admissibility, catalog, Admissibility, CatalogEntry};
pub use gamma::{
    change_of_variable, derive_gamma, exponents_from_gamma, gamma_from_exponents,
    homogeneity_exponents, ChangeOfVariable,
};
pub use monomial::{parse_rational, rat, rat_to_f64, CoeffProduct, GammaPair, Monomial, MonomialData, Rat};
pub use structure::{verify_structure, StructureReport};
