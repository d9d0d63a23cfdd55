//! Exact invariants of orders in products of number fields, and
//! verification of the analytic class number formula for their zeta
//! functions.

// indexed loops over rows/columns are clearer than iterator chains in the
// dense linear-algebra code
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod arith;
pub mod error;
pub mod invariants;
pub mod matrix;
pub mod oracle;
pub mod order;
pub mod quadratic;
pub mod quotient;

pub use algebra::{build_algebra, build_field, EtaleAlgebra, FieldSpec, SuppliedFieldData};
pub use error::{Error, Result};
pub use invariants::{
    analyze, leading_term_lhs, leading_term_rhs, maximal_invariants, verify_acnf, zeta_correction,
    zeta_partial, LeadingTerm, OrderAnalysis, OrderInvariants, VerificationReport,
};
pub use oracle::{direct_regulator, fiber_product_order, form_class_number, log_embedding};
pub use order::{
    conductor, order_from_generators, ConductorIdeal, OrderLattice, SingularPrimeData,
};
pub use quotient::{
    global_unit_index, local_unit_index, quotient_ring, roots_of_unity, unit_count_brute,
    FiniteQuotientRing,
};
