//! Exact arithmetic for (partial) Latin squares and their generalized quotients.
//!
//! The crate decides when a 3-indexed nonnegative matrix is a quotient of a
//! (partial) Latin square and constructs a witness square, together with the
//! 2-indexed margin-class decomposition machinery, line-hypergraph invariants
//! (`rho`, `alpha_bar`, `alpha_star`) and a desk-scale search harness for two
//! conjectures relating the two.
//!
//! Core grid types are generic over the scalar; the concrete aliases used by
//! the rest of the crate fix arbitrary-precision integers ([`Nat`]) and exact
//! rationals ([`Rat`]).
//!
//! ```
//! use glsq::lift::{lift_partial, QuotientInstance};
//! use glsq::tensor::{mat3, PairSet};
//!
//! // A 1x1x1 matrix holding 4 is the quotient of an order-2 Latin square
//! // by the partition with a single block of size 2; reconstruct one.
//! let inst = QuotientInstance::new(mat3(&[&[&[4]]]), vec![2], PairSet::full(1))?;
//! let lift = lift_partial(&inst)?;
//! assert!(lift.square.is_latin()?);
//! assert_eq!(lift.square.triple_quotient(&lift.sigma)?, *inst.matrix());
//! # Ok::<(), glsq::Error>(())
//! ```

pub mod error;
pub mod explore;
pub mod hyper;
pub mod latin;
pub mod lift;
pub mod margin;
pub mod ratlp;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Nonnegative arbitrary-precision integer entry.
pub type Nat = num_bigint::BigUint;
/// Exact rational entry.
pub type Rat = num_rational::BigRational;

/// Dense 2-indexed matrix over nonnegative integers.
pub type Matrix2 = tensor::Grid2<Nat>;
/// Dense 3-indexed matrix over nonnegative integers.
pub type Matrix3 = tensor::Grid3<Nat>;
/// Dense 3-indexed matrix over exact rationals.
pub type RationalMatrix3 = tensor::Grid3<Rat>;

/// Shorthand for `Nat::from(v)`, used pervasively in construction code.
pub fn nat(v: u64) -> Nat {
    Nat::from(v)
}

/// Shorthand for the exact rational `p/q`. Panics when `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(p.into(), q.into())
}
