//! Exact integer, modular and rational arithmetic.
//!
//! Residues are always reported in the balanced range `(-n/2, n/2]` so that
//! Chinese remaindering can recover negative integers. Hot loops over a
//! small prime use [`PrimeField`], which keeps canonical `u64`
//! representatives in `[0, p)`.

use std::fmt;

pub use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(BigInt),
    #[error("{value} is not a unit modulo {modulus} (gcd {gcd})")]
    NotAUnit {
        value: BigInt,
        modulus: BigInt,
        gcd: BigInt,
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a prime below 2^32")]
    UnsupportedPrime(u64),
}

fn check_modulus(n: &BigInt) -> Result<(), ArithError> {
    if *n < BigInt::from(2) {
        return Err(ArithError::InvalidModulus(n.clone()));
    }
    Ok(())
}

/// Returns the representative of `x mod n` in `(-n/2, n/2]`.
///
/// For even `n` the tie `n/2` stays positive.
pub fn balanced_mod(x: &BigInt, n: &BigInt) -> Result<BigInt, ArithError> {
    check_modulus(n)?;
    Ok(balanced_mod_unchecked(x, n))
}

pub(crate) fn balanced_mod_unchecked(x: &BigInt, n: &BigInt) -> BigInt {
    let r = x.mod_floor(n);
    // r in [0, n); shift down when 2r > n
    if (&r << 1u32) > *n {
        r - n
    } else {
        r
    }
}

/// Extended Euclid: `(g, r, s)` with `a*r + b*s = g` and `g = gcd(a, b) >= 0`.
pub fn extended_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Balanced inverse of `i` modulo `n`.
pub fn inv_mod(i: &BigInt, n: &BigInt) -> Result<BigInt, ArithError> {
    check_modulus(n)?;
    let (g, r, _) = extended_gcd(i, n);
    if !g.is_one() {
        return Err(ArithError::NotAUnit {
            value: i.clone(),
            modulus: n.clone(),
            gcd: g,
        });
    }
    Ok(balanced_mod_unchecked(&r, n))
}

/// `round(sqrt(n))` computed exactly, for `n >= 0`.
pub fn round_sqrt(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    // round up iff n >= (s + 1/2)^2, i.e. 4n >= (2s+1)^2
    let twice = (&s << 1u32) + 1u32;
    if (n << 2u32) >= &twice * &twice {
        s + 1u32
    } else {
        s
    }
}

/// A value together with its modulus, value kept balanced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Residue {
    value: BigInt,
    modulus: BigInt,
}

impl Residue {
    pub fn new(x: &BigInt, modulus: &BigInt) -> Result<Self, ArithError> {
        Ok(Residue {
            value: balanced_mod(x, modulus)?,
            modulus: modulus.clone(),
        })
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// A reduced fraction with positive denominator; the sign lives on the numerator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fraction(BigRational);

impl Fraction {
    pub fn from_integer(n: BigInt) -> Self {
        Fraction(BigRational::from_integer(n))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Parses `"a"` or `"a/b"`.
    pub fn parse(text: &str) -> Option<Fraction> {
        let text = text.trim();
        match text.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().ok()?;
                let d: BigInt = d.trim().parse().ok()?;
                reduce_fraction(&n, &d).ok()
            }
            None => text.parse().ok().map(Fraction::from_integer),
        }
    }
}

impl From<BigRational> for Fraction {
    fn from(r: BigRational) -> Self {
        Fraction(r)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Canonical form of `num/den`.
pub fn reduce_fraction(num: &BigInt, den: &BigInt) -> Result<Fraction, ArithError> {
    if den.is_zero() {
        return Err(ArithError::DivisionByZero);
    }
    Ok(Fraction(BigRational::new(num.clone(), den.clone())))
}

/// Trial-division primality test; inputs here are small sampling primes.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Arithmetic in F_p for a prime `p < 2^32`, on representatives in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub const MAX_PRIME: u64 = 1 << 32;

    pub fn new(p: u64) -> Result<Self, ArithError> {
        if p >= Self::MAX_PRIME || !is_prime(p) {
            return Err(ArithError::UnsupportedPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        // a, b < 2^32 so the product fits in u64
        (a * b) % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a.is_multiple_of(self.p) {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    pub fn from_bigint(&self, x: &BigInt) -> u64 {
        let r = x.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("residue below p fits in u64")
    }

    /// Balanced representative in `(-p/2, p/2]`.
    pub fn balanced(&self, a: u64) -> i64 {
        if 2 * a > self.p {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}
