//! Exact arithmetic: the prime field, dual numbers over it, and dense
//! homogeneous polynomials with coefficients in either.

pub mod dual;
pub mod field;
pub mod poly;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

pub use dual::DualElement;
pub use field::{field_inv, is_prime, FieldElement, Prime, MERSENNE_31};
pub use poly::{poly_linear_combination, poly_mul, poly_pow, HomPoly, MonomialBasis};

/// Coefficient ring for polynomials and network weights.
///
/// Implemented by [`FieldElement`] and [`DualElement`]; every value knows its
/// modulus, so constants can be produced from any existing element.
pub trait Scalar:
    Copy
    + PartialEq
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_field(x: FieldElement) -> Self;
    fn prime(&self) -> Prime;
    fn is_zero(&self) -> bool;

    fn zero(p: Prime) -> Self {
        Self::from_field(FieldElement::zero(p))
    }

    fn one(p: Prime) -> Self {
        Self::from_field(FieldElement::one(p))
    }
}

impl Scalar for FieldElement {
    #[inline]
    fn from_field(x: FieldElement) -> Self {
        x
    }

    #[inline]
    fn prime(&self) -> Prime {
        FieldElement::prime(*self)
    }

    #[inline]
    fn is_zero(&self) -> bool {
        FieldElement::is_zero(*self)
    }
}
