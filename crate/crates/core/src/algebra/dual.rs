//! Dual numbers `a + bε` with `ε² = 0` over `F_p`.
//!
//! Evaluating a polynomial map on `w + ε` yields the map's value in the real
//! part and its derivative in the direction of `w` in the infinitesimal part.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{FieldElement, Prime};
use super::Scalar;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct DualElement {
    pub real: FieldElement,
    pub infinitesimal: FieldElement,
}

impl DualElement {
    pub fn new(real: FieldElement, infinitesimal: FieldElement) -> Self {
        DualElement {
            real,
            infinitesimal,
        }
    }

    /// `a + ε`, the seed for differentiating with respect to one parameter.
    pub fn variable(real: FieldElement) -> Self {
        DualElement::new(real, FieldElement::one(real.prime()))
    }

    pub fn constant(real: FieldElement) -> Self {
        DualElement::new(real, FieldElement::zero(real.prime()))
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = DualElement::one(self.prime());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }
}

impl fmt::Debug for DualElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}+{:?}ε", self.real, self.infinitesimal)
    }
}

impl Add for DualElement {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        DualElement::new(self.real + rhs.real, self.infinitesimal + rhs.infinitesimal)
    }
}

impl Sub for DualElement {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        DualElement::new(self.real - rhs.real, self.infinitesimal - rhs.infinitesimal)
    }
}

impl Neg for DualElement {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DualElement::new(-self.real, -self.infinitesimal)
    }
}

impl Mul for DualElement {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        DualElement::new(
            self.real * rhs.real,
            self.real * rhs.infinitesimal + self.infinitesimal * rhs.real,
        )
    }
}

impl Scalar for DualElement {
    #[inline]
    fn from_field(x: FieldElement) -> Self {
        DualElement::constant(x)
    }

    #[inline]
    fn prime(&self) -> Prime {
        self.real.prime()
    }

    #[inline]
    fn is_zero(&self) -> bool {
        self.real.is_zero() && self.infinitesimal.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn product_rule() {
        let p = Prime::new(101).unwrap();
        let f = |v| FieldElement::new(v, p);
        let x = DualElement::new(f(3), f(4));
        let y = DualElement::new(f(5), f(6));
        // (3+4ε)(5+6ε) = 15 + (18+20)ε
        assert_eq!(x * y, DualElement::new(f(15), f(38)));
    }

    proptest! {
        #[test]
        fn power_law(a in any::<u64>(), b in any::<u64>(), r in 1u64..=16) {
            let p = Prime::mersenne31();
            let (a, b) = (FieldElement::new(a, p), FieldElement::new(b, p));
            let d = DualElement::new(a, b).pow(r);
            prop_assert_eq!(d.real, a.pow(r));
            prop_assert_eq!(d.infinitesimal, FieldElement::new(r, p) * a.pow(r - 1) * b);
        }
    }
}
