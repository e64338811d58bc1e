//! Dense homogeneous polynomials in a fixed monomial order.
//!
//! A homogeneous polynomial of degree `D` in `n` variables is stored as one
//! coefficient per monomial of that degree, `binom(n + D - 1, D)` in total.
//! Monomials are listed in descending graded reverse-lexicographic order with
//! `x1 > x2 > ... > xn`; for two variables this is `x1^D, x1^(D-1) x2, ...,
//! x2^D`, so the index of a monomial is simply its `x2` exponent.

use super::field::{FieldElement, Prime};
use super::Scalar;
use crate::error::{Error, Result};

/// `binom(n, k)` with overflow detection.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) / (i + 1) = binom(n, i + 1)
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    u64::try_from(acc).ok()
}

/// Number of monomials of degree `degree` in `num_vars` variables.
pub fn monomial_count(num_vars: usize, degree: u64) -> Option<u64> {
    if num_vars == 0 {
        return Some(u64::from(degree == 0));
    }
    binomial(num_vars as u64 - 1 + degree, degree)
}

/// The degree-`D` monomials in `n` variables, in descending grevlex order.
///
/// The list itself is never materialized; indices and exponent vectors are
/// converted on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonomialBasis {
    num_vars: usize,
    degree: u64,
    len: usize,
}

impl MonomialBasis {
    pub fn new(num_vars: usize, degree: u64) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::BasisMismatch("a basis needs at least one variable".into()));
        }
        let len = monomial_count(num_vars, degree)
            .and_then(|l| usize::try_from(l).ok())
            .ok_or_else(|| {
                Error::DegreeOverflow(format!("{num_vars} variables in degree {degree}"))
            })?;
        Ok(MonomialBasis {
            num_vars,
            degree,
            len,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Position of an exponent vector; `None` if it is not in this basis.
    pub fn index_of(&self, exponents: &[u64]) -> Option<usize> {
        if exponents.len() != self.num_vars || exponents.iter().sum::<u64>() != self.degree {
            return None;
        }
        let mut idx: u64 = 0;
        let mut remaining = self.degree;
        // lexicographic rank of (e_n, e_{n-1}, ..., e_2)
        for v in (1..self.num_vars).rev() {
            let m = v as u64 + 1;
            let k = exponents[v];
            // #{monomials in m variables of degree `remaining` with e_v < k}
            idx += binomial(m - 1 + remaining, m - 1)? - binomial(m - 1 + remaining - k, m - 1)?;
            remaining -= k;
        }
        Some(idx as usize)
    }

    /// Exponent vector at `index`.
    pub fn exponent(&self, index: usize) -> Option<Vec<u64>> {
        if index >= self.len {
            return None;
        }
        let mut exps = vec![0u64; self.num_vars];
        let mut rest = index as u64;
        let mut remaining = self.degree;
        for v in (1..self.num_vars).rev() {
            let m = v as u64;
            let mut k = 0;
            loop {
                // monomials in the lower m variables once e_v = k is fixed
                let block = binomial(m - 1 + remaining - k, m - 1)?;
                if rest < block {
                    break;
                }
                rest -= block;
                k += 1;
            }
            exps[v] = k;
            remaining -= k;
        }
        exps[0] = remaining;
        Some(exps)
    }

    /// All exponent vectors in basis order.
    pub fn exponents(&self) -> Vec<Vec<u64>> {
        let mut out = Vec::with_capacity(self.len);
        let mut current = vec![0u64; self.num_vars];
        fill_exponents(self.num_vars - 1, self.degree, &mut current, &mut out);
        out
    }
}

fn fill_exponents(var: usize, remaining: u64, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if var == 0 {
        current[0] = remaining;
        out.push(current.clone());
        return;
    }
    for k in 0..=remaining {
        current[var] = k;
        fill_exponents(var - 1, remaining - k, current, out);
    }
    current[var] = 0;
}

/// A homogeneous polynomial with coefficients in `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomPoly<S> {
    basis: MonomialBasis,
    coeffs: Vec<S>,
}

impl<S: Scalar> HomPoly<S> {
    pub fn from_coeffs(basis: MonomialBasis, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::BasisMismatch(format!(
                "{} coefficients for a basis of size {}",
                coeffs.len(),
                basis.len()
            )));
        }
        Ok(HomPoly { basis, coeffs })
    }

    pub fn zero(basis: MonomialBasis, prime: Prime) -> Self {
        HomPoly {
            basis,
            coeffs: vec![S::zero(prime); basis.len()],
        }
    }

    /// The degree-0 polynomial `c`.
    pub fn constant(num_vars: usize, c: S) -> Result<Self> {
        HomPoly::from_coeffs(MonomialBasis::new(num_vars, 0)?, vec![c])
    }

    /// The coordinate `x_{var+1}` (zero-based `var`).
    pub fn variable(num_vars: usize, var: usize, prime: Prime) -> Result<Self> {
        if var >= num_vars {
            return Err(Error::BasisMismatch(format!(
                "variable {var} out of range for {num_vars} variables"
            )));
        }
        let basis = MonomialBasis::new(num_vars, 1)?;
        let mut exps = vec![0; num_vars];
        exps[var] = 1;
        let mut poly = HomPoly::zero(basis, prime);
        let idx = basis.index_of(&exps).expect("unit exponent lies in the degree-1 basis");
        poly.coeffs[idx] = S::one(prime);
        Ok(poly)
    }

    pub fn basis(&self) -> MonomialBasis {
        self.basis
    }

    pub fn degree(&self) -> u64 {
        self.basis.degree()
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn prime(&self) -> Prime {
        self.coeffs[0].prime()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, c: S) -> Self {
        HomPoly {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    /// `self += c * other` in place.
    pub fn add_scaled(&mut self, c: S, other: &HomPoly<S>) -> Result<()> {
        if self.basis != other.basis {
            return Err(basis_mismatch(&self.basis, &other.basis));
        }
        if c.is_zero() {
            return Ok(());
        }
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = *a + c * b;
        }
        Ok(())
    }

    pub fn mul(&self, other: &HomPoly<S>) -> Result<Self> {
        if self.basis.num_vars() != other.basis.num_vars() {
            return Err(Error::BasisMismatch(format!(
                "cannot multiply polynomials in {} and {} variables",
                self.basis.num_vars(),
                other.basis.num_vars()
            )));
        }
        let basis = MonomialBasis::new(self.basis.num_vars(), self.degree() + other.degree())?;
        let prime = self.prime();
        let mut out = vec![S::zero(prime); basis.len()];
        if basis.num_vars() == 1 {
            out[0] = self.coeffs[0] * other.coeffs[0];
        } else if basis.num_vars() == 2 {
            // the x2 exponent is the index, so multiplication is convolution
            for (i, &a) in self.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (o, &b) in out[i..].iter_mut().zip(&other.coeffs) {
                    *o = *o + a * b;
                }
            }
        } else {
            let lhs = self.basis.exponents();
            let rhs = other.basis.exponents();
            let mut sum = vec![0u64; basis.num_vars()];
            for (ea, &a) in lhs.iter().zip(&self.coeffs) {
                if a.is_zero() {
                    continue;
                }
                for (eb, &b) in rhs.iter().zip(&other.coeffs) {
                    for (s, (x, y)) in sum.iter_mut().zip(ea.iter().zip(eb)) {
                        *s = x + y;
                    }
                    let k = basis.index_of(&sum).expect("sum of exponents lies in product basis");
                    out[k] = out[k] + a * b;
                }
            }
        }
        Ok(HomPoly { basis, coeffs: out })
    }

    /// `self * self`, using each cross term once.
    pub fn square(&self) -> Self {
        if self.basis.num_vars() != 2 {
            return self.mul(self).expect("a polynomial shares its own basis");
        }
        let basis = MonomialBasis::new(2, 2 * self.degree())
            .expect("degree was representable before squaring");
        let prime = self.prime();
        let mut out = vec![S::zero(prime); basis.len()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            out[2 * i] = out[2 * i] + a * a;
            let twice = a + a;
            for (o, &b) in out[2 * i + 1..].iter_mut().zip(&self.coeffs[i + 1..]) {
                *o = *o + twice * b;
            }
        }
        HomPoly { basis, coeffs: out }
    }

    /// `self^exp` by square-and-multiply; `exp = 0` gives the constant 1.
    pub(crate) fn pow_unchecked(&self, exp: u64) -> Self {
        let prime = self.prime();
        let n = self.basis.num_vars();
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base).expect("powers share variables"),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc.unwrap_or_else(|| {
            HomPoly::constant(n, S::one(prime)).expect("n is a valid variable count")
        })
    }

    pub fn pow(&self, exp: u64) -> Result<Self> {
        if exp == 0 {
            return Err(Error::ZeroExponent);
        }
        // reject before allocating if the result cannot be represented
        self.degree()
            .checked_mul(exp)
            .and_then(|d| monomial_count(self.basis.num_vars(), d))
            .ok_or_else(|| Error::DegreeOverflow(format!("power {exp} of degree {}", self.degree())))?;
        Ok(self.pow_unchecked(exp))
    }
}

impl HomPoly<FieldElement> {
    /// Convenience constructor from integer coefficients.
    pub fn from_u64s(basis: MonomialBasis, coeffs: &[u64], prime: Prime) -> Result<Self> {
        HomPoly::from_coeffs(
            basis,
            coeffs.iter().map(|&c| FieldElement::new(c, prime)).collect(),
        )
    }

    pub fn values(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.value()).collect()
    }
}

fn basis_mismatch(a: &MonomialBasis, b: &MonomialBasis) -> Error {
    Error::BasisMismatch(format!(
        "({} vars, degree {}) vs ({} vars, degree {})",
        a.num_vars(),
        a.degree(),
        b.num_vars(),
        b.degree()
    ))
}

/// `Σ weights[i] * polys[i]` over a shared basis.
pub fn poly_linear_combination<S: Scalar>(polys: &[HomPoly<S>], weights: &[S]) -> Result<HomPoly<S>> {
    if polys.len() != weights.len() {
        return Err(Error::BasisMismatch(format!(
            "{} polynomials but {} weights",
            polys.len(),
            weights.len()
        )));
    }
    let first = polys
        .first()
        .ok_or_else(|| Error::BasisMismatch("empty linear combination".into()))?;
    let mut out = HomPoly::zero(first.basis, first.prime());
    for (p, &w) in polys.iter().zip(weights) {
        out.add_scaled(w, p)?;
    }
    Ok(out)
}

pub fn poly_mul<S: Scalar>(a: &HomPoly<S>, b: &HomPoly<S>) -> Result<HomPoly<S>> {
    a.mul(b)
}

pub fn poly_pow<S: Scalar>(a: &HomPoly<S>, r: u64) -> Result<HomPoly<S>> {
    a.pow(r)
}
