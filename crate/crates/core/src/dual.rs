//! The ring F_p[ε]/(ε²).
//!
//! Evaluating `f(a + bε)` gives `f(a) + d_b f(a) ε`, so a Jacobian at a point
//! costs `n` forward passes over the polynomial and never materialises the
//! symbolic partial derivatives.

use std::fmt;

use crate::ffarith::PrimeField;
use crate::mpoly::{ModPoly, ModSystem, PolyError, PolySystem, Polynomial};

/// `value + deriv·ε` with both parts in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DualElement {
    pub value: u64,
    pub deriv: u64,
}

impl DualElement {
    pub fn new(value: u64, deriv: u64) -> Self {
        DualElement { value, deriv }
    }

    pub fn constant(value: u64) -> Self {
        DualElement { value, deriv: 0 }
    }

    #[inline]
    pub fn add(self, rhs: Self, f: &PrimeField) -> Self {
        DualElement {
            value: f.add(self.value, rhs.value),
            deriv: f.add(self.deriv, rhs.deriv),
        }
    }

    #[inline]
    pub fn mul(self, rhs: Self, f: &PrimeField) -> Self {
        DualElement {
            value: f.mul(self.value, rhs.value),
            deriv: f.add(f.mul(self.value, rhs.deriv), f.mul(self.deriv, rhs.value)),
        }
    }

    pub fn pow(self, mut exp: u64, f: &PrimeField) -> Self {
        let mut acc = DualElement::constant(1 % f.modulus());
        let mut base = self;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(base, f);
            }
            base = base.mul(base, f);
            exp >>= 1;
        }
        acc
    }
}

impl fmt::Display for DualElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}ε", self.value, self.deriv)
    }
}

impl ModPoly {
    /// `f(a + bε)`.
    pub fn eval_dual(&self, a: &[u64], b: &[u64]) -> Result<DualElement, PolyError> {
        for got in [a.len(), b.len()] {
            if got != self.nvars {
                return Err(PolyError::LengthMismatch {
                    expected: self.nvars,
                    got,
                });
            }
        }
        Ok(self.eval_dual_unchecked(a, b))
    }

    pub(crate) fn eval_dual_unchecked(&self, a: &[u64], b: &[u64]) -> DualElement {
        let f = &self.field;
        let p = f.modulus();
        let powers: Vec<Vec<DualElement>> = a
            .iter()
            .zip(b)
            .zip(&self.max_exp)
            .map(|((&x, &dx), &m)| {
                let base = DualElement::new(x % p, dx % p);
                let mut row = Vec::with_capacity(m as usize + 1);
                let mut acc = DualElement::constant(1 % p);
                row.push(acc);
                for _ in 0..m {
                    acc = acc.mul(base, f);
                    row.push(acc);
                }
                row
            })
            .collect();
        self.terms.iter().fold(DualElement::constant(0), |sum, t| {
            let v = t.factors.iter().fold(DualElement::constant(t.coeff), |acc, &(i, e)| {
                acc.mul(powers[i][e as usize], f)
            });
            sum.add(v, f)
        })
    }
}

impl ModSystem {
    /// Jacobian at `a`, one dual pass per coordinate direction.
    pub fn jacobian_at(&self, a: &[u64]) -> Result<FpMatrix, PolyError> {
        if a.len() != self.nvars {
            return Err(PolyError::LengthMismatch {
                expected: self.nvars,
                got: a.len(),
            });
        }
        Ok(self.jacobian_unchecked(a))
    }

    pub(crate) fn jacobian_unchecked(&self, a: &[u64]) -> FpMatrix {
        let field = self.field;
        let (m, n) = (self.polys.len(), self.nvars);
        let mut entries = vec![0u64; m * n];
        let mut dir = vec![0u64; n];
        for j in 0..n {
            dir[j] = 1;
            for (i, f) in self.polys.iter().enumerate() {
                entries[i * n + j] = f.eval_dual_unchecked(a, &dir).deriv;
            }
            dir[j] = 0;
        }
        FpMatrix {
            rows: m,
            cols: n,
            field,
            entries,
        }
    }
}

/// `(f(a) mod p, d_b f(a) mod p)` by dual-number evaluation.
pub fn eval_dual(f: &Polynomial, a: &[u64], b: &[u64], p: u64) -> Result<DualElement, PolyError> {
    let field = PrimeField::new(p)?;
    f.reduce(field).eval_dual(a, b)
}

/// The `m × n` matrix of partials `∂f_i/∂x_j` at `a`, over F_p.
pub fn jacobian_at(sys: &PolySystem, a: &[u64], p: u64) -> Result<FpMatrix, PolyError> {
    let field = PrimeField::new(p)?;
    sys.reduce(field).jacobian_at(a)
}

/// Dense row-major matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    field: PrimeField,
    entries: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize, field: PrimeField) -> Self {
        FpMatrix {
            rows,
            cols,
            field,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, field: PrimeField) -> Self {
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    /// Entries are reduced into `[0, p)`. Panics on a length mismatch.
    pub fn from_rows(rows: usize, cols: usize, field: PrimeField, entries: Vec<u64>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        let p = field.modulus();
        FpMatrix {
            rows,
            cols,
            field,
            entries: entries.into_iter().map(|e| e % p).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.cols + j] = v % self.field.modulus();
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.cols, self.rows, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    /// Rank over F_p by Gaussian elimination.
    pub fn rank(&self) -> usize {
        rank_in_place(&mut self.entries.clone(), self.rows, self.cols, &self.field)
    }
}

/// Row-reduces `a` (row-major, `rows × cols`) and returns its rank.
/// Pivots on the first nonzero entry of each column.
pub(crate) fn rank_in_place(a: &mut [u64], rows: usize, cols: usize, f: &PrimeField) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for c in 0..cols {
                a.swap(pivot * cols + c, rank * cols + c);
            }
        }
        let inv = f.inv(a[rank * cols + col]).expect("pivot is nonzero");
        for r in rank + 1..rows {
            let factor = a[r * cols + col];
            if factor == 0 {
                continue;
            }
            let scale = f.mul(factor, inv);
            for c in col..cols {
                let sub = f.mul(scale, a[rank * cols + c]);
                a[r * cols + c] = f.sub(a[r * cols + c], sub);
            }
        }
        rank += 1;
    }
    rank
}

pub fn rank_mod_p(m: &FpMatrix) -> usize {
    m.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::parse;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn square_at_one() {
        let f = parse("x^2", &names(&["x"])).unwrap();
        assert_eq!(eval_dual(&f, &[1], &[1], 7).unwrap(), DualElement::new(1, 2));
    }

    #[test]
    fn constant_has_zero_derivative() {
        let f = parse("12", &names(&["x", "y"])).unwrap();
        assert_eq!(eval_dual(&f, &[3, 4], &[1, 5], 7).unwrap(), DualElement::new(5, 0));
    }

    #[test]
    fn jacobian_examples() {
        let v = names(&["x", "y"]);
        let sys = PolySystem::parse(&["x", "y"], &v).unwrap();
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(jacobian_at(&sys, &[3, 5], 7).unwrap(), FpMatrix::identity(2, f7));

        let xy = PolySystem::parse(&["x*y"], &v).unwrap();
        let j = jacobian_at(&xy, &[3, 5], 7).unwrap();
        assert_eq!((j.get(0, 0), j.get(0, 1)), (5, 3));

        assert!(matches!(
            jacobian_at(&xy, &[1], 7),
            Err(PolyError::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn rank_basics() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(FpMatrix::identity(4, f).rank(), 4);
        assert_eq!(FpMatrix::zeros(3, 2, f).rank(), 0);
        // second row is twice the first mod 5
        let m = FpMatrix::from_rows(2, 3, f, vec![1, 2, 3, 2, 4, 1]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.transpose().rank(), 1);
    }
}
