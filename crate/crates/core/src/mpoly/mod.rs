//! Sparse multivariate polynomials with integer coefficients.
//!
//! A [`Polynomial`] is the universal object of the crate: it is parsed from
//! text, evaluated exactly over ℤ or ℚ, reduced modulo a prime for sampling,
//! and differentiated term-wise for Newton lifting. Terms are kept in a
//! `BTreeMap` keyed by [`Monomial`], whose ordering is graded
//! lexicographic, so iteration from the back gives the print order.

mod interp;
mod parse;
mod random;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use thiserror::Error;

use crate::ffarith::{ArithError, BigInt, PrimeField, Residue};

pub use interp::interpolate;
pub use parse::parse;
pub use random::{random_dense, Homogeneity};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown variable `{name}` at column {column}")]
    UnknownVariable { name: String, column: usize },
    #[error("expected {expected} coordinates, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    VarIndexOutOfRange { index: usize, nvars: usize },
    #[error("coordinate {value} outside [0, {p})")]
    CoordinateOutOfRange { value: u64, p: u64 },
    #[error("polynomials disagree on variable count ({expected} vs {got})")]
    NvarsMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Exponent vector of a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.add_term(Monomial::one(nvars), c.into());
        p
    }

    /// The coordinate function `x_index`.
    pub fn var(nvars: usize, index: usize) -> Result<Self, PolyError> {
        if index >= nvars {
            return Err(PolyError::VarIndexOutOfRange { index, nvars });
        }
        let mut e = vec![0; nvars];
        e[index] = 1;
        let mut p = Polynomial::zero(nvars);
        p.add_term(Monomial(e), BigInt::one());
        Ok(p)
    }

    /// Builds a canonical polynomial, summing duplicate monomials.
    ///
    /// Panics if an exponent vector has the wrong length.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut p = Polynomial::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn coefficient(&self, exponents: &[u32]) -> BigInt {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn pow(&self, mut exp: u32) -> Polynomial {
        let mut acc = Polynomial::constant(self.nvars, 1);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, c: &BigInt) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    /// Coefficients replaced by their balanced residues mod `n`, zeros dropped.
    pub fn reduce_coefficients(&self, n: &BigInt) -> Result<Polynomial, PolyError> {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), crate::ffarith::balanced_mod(c, n)?);
        }
        Ok(out)
    }

    fn check_len(&self, got: usize) -> Result<(), PolyError> {
        if got != self.nvars {
            return Err(PolyError::LengthMismatch {
                expected: self.nvars,
                got,
            });
        }
        Ok(())
    }

    /// Balanced residue of `f(point) mod p`.
    ///
    /// Coefficients and coordinates are reduced first and powers are taken by
    /// square-and-multiply, so no large integers are formed.
    pub fn evaluate_mod(&self, point: &[BigInt], p: &BigInt) -> Result<Residue, PolyError> {
        self.check_len(point.len())?;
        if *p < BigInt::from(2) {
            return Err(ArithError::InvalidModulus(p.clone()).into());
        }
        let coords: Vec<BigInt> = point.iter().map(|x| x.mod_floor(p)).collect();
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.mod_floor(p);
            for (x, &e) in coords.iter().zip(&m.0) {
                if e > 0 {
                    t = (t * x.modpow(&BigInt::from(e), p)) % p;
                }
            }
            acc = (acc + t) % p;
        }
        Ok(Residue::new(&acc, p)?)
    }

    /// Exact value over ℤ.
    pub fn eval_integer(&self, point: &[BigInt]) -> Result<BigInt, PolyError> {
        self.check_len(point.len())?;
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= Pow::pow(x, e);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Exact value over ℚ.
    pub fn eval_rational(&self, point: &[BigRational]) -> Result<BigRational, PolyError> {
        self.check_len(point.len())?;
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= Pow::pow(x, e as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Term-wise power-rule derivative with respect to `x_var`.
    pub fn formal_derivative(&self, var: usize) -> Result<Polynomial, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::VarIndexOutOfRange {
                index: var,
                nvars: self.nvars,
            });
        }
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut dm = m.0.clone();
            dm[var] -= 1;
            out.add_term(Monomial(dm), c * BigInt::from(e));
        }
        Ok(out)
    }

    /// Reduces modulo a word-sized prime for fast repeated evaluation.
    pub fn reduce(&self, field: PrimeField) -> ModPoly {
        let p = BigInt::from(field.modulus());
        let mut max_exp = vec![0u32; self.nvars];
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let c = field.from_bigint(&(c % &p));
            if c == 0 {
                continue;
            }
            let factors: Vec<(usize, u32)> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (i, e))
                .collect();
            for &(i, e) in &factors {
                max_exp[i] = max_exp[i].max(e);
            }
            terms.push(ModTerm { coeff: c, factors });
        }
        ModPoly {
            field,
            nvars: self.nvars,
            max_exp,
            terms,
        }
    }

    /// Prints with the given variable names (graded-lex, highest term first).
    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let negative = c.sign() == num_bigint::Sign::Minus;
            let abs = if negative { -c } else { c.clone() };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.names[i].clone()),
                    _ => factors.push(format!("{}^{}", self.names[i], e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Default variable names `x1, x2, ...`.
pub fn default_names(nvars: usize) -> Vec<String> {
    (1..=nvars).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        write!(f, "{}", self.display(&names))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

/// An ordered list of polynomials in the same variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    nvars: usize,
    polys: Vec<Polynomial>,
}

impl PolySystem {
    pub fn new(nvars: usize, polys: Vec<Polynomial>) -> Result<Self, PolyError> {
        if let Some(bad) = polys.iter().find(|f| f.nvars != nvars) {
            return Err(PolyError::NvarsMismatch {
                expected: nvars,
                got: bad.nvars,
            });
        }
        Ok(PolySystem { nvars, polys })
    }

    /// Parses one polynomial per entry against shared variable names.
    pub fn parse<S: AsRef<str>>(lines: &[S], names: &[String]) -> Result<Self, PolyError> {
        let polys = lines
            .iter()
            .map(|l| parse(l.as_ref(), names))
            .collect::<Result<Vec<_>, _>>()?;
        PolySystem::new(names.len(), polys)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn is_square(&self) -> bool {
        self.polys.len() == self.nvars
    }

    pub fn reduce(&self, field: PrimeField) -> ModSystem {
        ModSystem {
            nvars: self.nvars,
            field,
            polys: self.polys.iter().map(|f| f.reduce(field)).collect(),
        }
    }

    /// Symbolic Jacobian, row `i` holding the partials of `f_i`.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        self.polys
            .iter()
            .map(|f| {
                (0..self.nvars)
                    .map(|j| f.formal_derivative(j).expect("index below nvars"))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ModTerm {
    pub(crate) coeff: u64,
    pub(crate) factors: Vec<(usize, u32)>,
}

/// A polynomial with coefficients reduced into a word-sized prime field.
#[derive(Debug, Clone)]
pub struct ModPoly {
    pub(crate) field: PrimeField,
    pub(crate) nvars: usize,
    pub(crate) max_exp: Vec<u32>,
    pub(crate) terms: Vec<ModTerm>,
}

impl ModPoly {
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Evaluates at a point with coordinates in `[0, p)`.
    pub fn eval(&self, point: &[u64]) -> Result<u64, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::LengthMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        Ok(self.eval_unchecked(point))
    }

    pub(crate) fn eval_unchecked(&self, point: &[u64]) -> u64 {
        let f = self.field;
        let powers: Vec<Vec<u64>> = point
            .iter()
            .zip(&self.max_exp)
            .map(|(&x, &m)| {
                let x = x % f.modulus();
                let mut row = Vec::with_capacity(m as usize + 1);
                let mut acc = 1 % f.modulus();
                row.push(acc);
                for _ in 0..m {
                    acc = f.mul(acc, x);
                    row.push(acc);
                }
                row
            })
            .collect();
        self.terms.iter().fold(0, |sum, t| {
            let v = t
                .factors
                .iter()
                .fold(t.coeff, |acc, &(i, e)| f.mul(acc, powers[i][e as usize]));
            f.add(sum, v)
        })
    }
}

/// A [`PolySystem`] reduced modulo a word-sized prime.
#[derive(Debug, Clone)]
pub struct ModSystem {
    pub(crate) nvars: usize,
    pub(crate) field: PrimeField,
    pub(crate) polys: Vec<ModPoly>,
}

impl ModSystem {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn polys(&self) -> &[ModPoly] {
        &self.polys
    }

    /// True when every member vanishes at `point`.
    pub fn vanishes_at(&self, point: &[u64]) -> bool {
        self.polys.iter().all(|f| f.eval_unchecked(point) == 0)
    }
}
