//! Exact scalars: cyclotomic numbers, Laurent polynomials and rational
//! functions in `v`, the normalizing group 𝐌, and factored functions on tori.

pub mod cyclotomic;
pub mod factored;
pub mod laurent;
pub mod normalizing;
pub mod ratfunc;

pub use cyclotomic::{Cyclotomic, BQ};
pub use factored::{FactoredFn, MonomialMap, SymConst};
pub use laurent::LaurentPoly;
pub use normalizing::{factor_into_m, NormalizingElement};
pub use ratfunc::RationalFunctionV;

/// Evaluates a rational function at a rational point.
pub fn eval_at(f: &RationalFunctionV, v0: &BQ) -> crate::Result<BQ> {
    f.eval(v0)
}
