//! The prime field `F_p` for primes below `2^32`.
//!
//! Elements carry their modulus so that arithmetic needs no external context.
//! Products of two residues fit in a `u64`, which keeps multiplication to a
//! single widening multiply and one reduction.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The Mersenne prime `2^31 - 1`, the default modulus for rank computations.
pub const MERSENNE_31: u32 = 2_147_483_647;

/// A validated prime modulus `p < 2^32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u32);

impl Prime {
    /// Checks primality deterministically and wraps `p`.
    pub fn new(p: u64) -> Result<Self> {
        if p > u64::from(u32::MAX) {
            return Err(Error::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p as u32))
    }

    pub const fn mersenne31() -> Self {
        Prime(MERSENNE_31)
    }

    #[inline]
    pub const fn get(self) -> u32 {
        self.0
    }

    /// Whether binomial coefficients up to `degree` may vanish mod `p`.
    ///
    /// Such primes still give valid rank lower bounds, but the estimate is
    /// more likely to undershoot the characteristic-zero rank.
    pub fn is_small_for_degree(self, degree: u64) -> bool {
        u64::from(self.0) <= degree
    }
}

impl Default for Prime {
    fn default() -> Self {
        Prime::mersenne31()
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        u64::from(p.0)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `n < 3.3 * 10^24`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A residue in `[0, p)` together with its modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    prime: Prime,
}

impl FieldElement {
    /// Reduces an arbitrary integer into `F_p`.
    #[inline]
    pub fn new(value: u64, prime: Prime) -> Self {
        FieldElement {
            value: (value % u64::from(prime.0)) as u32,
            prime,
        }
    }

    /// Reduces a signed integer into `F_p`.
    pub fn from_i64(value: i64, prime: Prime) -> Self {
        let p = i64::from(prime.0);
        FieldElement {
            value: value.rem_euclid(p) as u32,
            prime,
        }
    }

    #[inline]
    pub fn zero(prime: Prime) -> Self {
        FieldElement { value: 0, prime }
    }

    #[inline]
    pub fn one(prime: Prime) -> Self {
        FieldElement::new(1, prime)
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn prime(self) -> Prime {
        self.prime
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = FieldElement::one(self.prime);
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= base;
            }
            base *= base;
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::DivisionByZero(self.prime.0));
        }
        let p = i64::from(self.prime.0);
        let (mut old_r, mut r) = (i64::from(self.value), p);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(FieldElement::from_i64(old_s, self.prime))
    }

    #[inline]
    fn check(self, other: Self) {
        debug_assert_eq!(self.prime, other.prime, "mixed moduli");
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self.check(rhs);
        let p = u64::from(self.prime.0);
        let s = u64::from(self.value) + u64::from(rhs.value);
        FieldElement {
            value: if s >= p { (s - p) as u32 } else { s as u32 },
            prime: self.prime,
        }
    }
}

impl Sub for FieldElement {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for FieldElement {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        FieldElement {
            value: if self.value == 0 { 0 } else { self.prime.0 - self.value },
            prime: self.prime,
        }
    }
}

impl Mul for FieldElement {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self.check(rhs);
        let prod = u64::from(self.value) * u64::from(rhs.value);
        FieldElement {
            value: (prod % u64::from(self.prime.0)) as u32,
            prime: self.prime,
        }
    }
}

impl AddAssign for FieldElement {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for FieldElement {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for FieldElement {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

/// Free-function form of [`FieldElement::inv`].
pub fn field_inv(a: FieldElement) -> Result<FieldElement> {
    a.inv()
}
