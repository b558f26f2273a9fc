//! Exact sparse linear algebra over the rationals.
//!
//! Everything downstream (ideal truncation, word growth, cohomology, persistence
//! ranks) reduces to the three primitives here: incremental echelon bases,
//! subspace intersections and the image of a subcomplex's cohomology.

mod complex;
mod echelon;
mod sparse;

pub use complex::{image_in_cohomology_dim, ChainComplex};
pub use echelon::{echelonize, left_kernel, subspace_intersection, subspace_intersection_dim, EchelonBasis, Expresser};
pub use sparse::{SparseMatrix, SparseVec};

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

use crate::error::{Error, Result};

/// The ground field. Always in lowest terms with a positive denominator.
pub type Scalar = BigRational;

/// Minimal field interface the echelon machinery needs. Rationals are the
/// supported instance; a prime-field type could implement this as well.
pub trait Field: Clone + PartialEq + Debug + Num + Neg<Output = Self> {}

impl<T> Field for T where T: Clone + PartialEq + Debug + Num + Neg<Output = T> {}

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Scalar {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let bad = || Error::validation(format!("not an exact rational: {s:?}"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_scalar(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// `(-1)^n` as a scalar.
pub fn sign(n: i64) -> Scalar {
    if n.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

pub fn is_negative(x: &Scalar) -> bool {
    x.is_negative()
}
