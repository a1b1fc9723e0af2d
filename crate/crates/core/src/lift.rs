//! Recovering characteristic-zero solutions from modular ones.
//!
//! Two routes are provided. The Chinese-remainder route enumerates all
//! F_p-points of a zero-dimensional system for several primes, combines the
//! primes with a unique solution, and then certifies the candidate over ℤ or
//! reconstructs fractions by a truncated extended Euclid. The p-adic route
//! lifts one smooth isolated root mod `p` through Newton steps
//! `mod p^2, p^4, ...`.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ffarith::{
    balanced_mod, balanced_mod_unchecked, extended_gcd, inv_mod, reduce_fraction, round_sqrt,
    ArithError, BigInt, Fraction, PrimeField,
};
use crate::mpoly::{PolyError, PolySystem, Polynomial};
use crate::par::{map_range, Execution};

/// Default cap on `p^n` for exhaustive enumeration.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiftError {
    #[error("enumerating {points} points exceeds the budget of {budget}")]
    BudgetExceeded { points: String, budget: u64 },
    #[error("moduli {n} and {m} are not coprime")]
    NotCoprime { n: BigInt, m: BigInt },
    #[error("nothing to combine")]
    EmptyList,
    #[error("rational reconstruction of {a} mod {n} failed")]
    ReconstructionFailed { a: BigInt, n: BigInt },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquareMatrix { rows: usize, cols: usize },
    #[error("determinant {det} is not a unit modulo {modulus}")]
    NotInvertible { det: BigInt, modulus: BigInt },
    #[error("Newton iteration needs as many equations as unknowns ({equations} vs {unknowns})")]
    NotSquareSystem { equations: usize, unknowns: usize },
    #[error("state is not a root modulo {modulus}: f_{index} = {residual}")]
    NotARoot {
        index: usize,
        residual: BigInt,
        modulus: BigInt,
    },
    #[error("Jacobian is singular modulo {modulus}")]
    SingularJacobian { modulus: BigInt },
    #[error("Newton step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<LiftError>,
    },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// All points of F_p^n where the system vanishes, coordinates in `[0, p)`,
/// in lexicographic order.
pub fn all_points(sys: &PolySystem, p: u64, budget: u64) -> Result<Vec<Vec<u64>>, LiftError> {
    all_points_with(sys, p, budget, Execution::Parallel)
}

pub fn all_points_with(
    sys: &PolySystem,
    p: u64,
    budget: u64,
    exec: Execution,
) -> Result<Vec<Vec<u64>>, LiftError> {
    let field = PrimeField::new(p)?;
    let n = sys.nvars();
    let total = BigInt::from(p).pow(n as u32);
    if total > BigInt::from(budget) {
        return Err(LiftError::BudgetExceeded {
            points: total.to_string(),
            budget,
        });
    }
    if n == 0 {
        let reduced = sys.reduce(field);
        return Ok(if reduced.vanishes_at(&[]) { vec![vec![]] } else { vec![] });
    }
    let reduced = sys.reduce(field);
    let per_first = p.pow(n as u32 - 1);
    // shard on the first coordinate; concatenation keeps lexicographic order
    let shards = map_range(exec, 0..p, |first| {
        let mut found = Vec::new();
        let mut point = vec![0u64; n];
        point[0] = first;
        for idx in 0..per_first {
            let mut rest = idx;
            for c in point[1..].iter_mut().rev() {
                *c = rest % p;
                rest /= p;
            }
            if reduced.vanishes_at(&point) {
                found.push(point.clone());
            }
        }
        found
    });
    Ok(shards.into_iter().flatten().collect())
}

/// Combines `a mod n` and `b mod m` into the balanced residue mod `n·m`.
pub fn crt_pair(a: (&BigInt, &BigInt), b: (&BigInt, &BigInt)) -> Result<(BigInt, BigInt), LiftError> {
    let (n, an) = a;
    let (m, am) = b;
    let (g, r, s) = extended_gcd(n, m);
    if !g.is_one() {
        return Err(LiftError::NotCoprime {
            n: n.clone(),
            m: m.clone(),
        });
    }
    let nm = n * m;
    let value = &s * m * an + &r * n * am;
    let value = balanced_mod(&value, &nm)?;
    Ok((nm, value))
}

/// Left fold of [`crt_pair`] over `(modulus, value)` entries.
pub fn crt_list(entries: &[(BigInt, BigInt)]) -> Result<(BigInt, BigInt), LiftError> {
    let (first, rest) = entries.split_first().ok_or(LiftError::EmptyList)?;
    let mut acc = (first.0.clone(), balanced_mod(&first.1, &first.0)?);
    for (m, v) in rest {
        acc = crt_pair((&acc.0, &acc.1), (m, v))?;
    }
    Ok(acc)
}

/// Output of [`recover_rational`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalRecovery {
    pub fraction: Fraction,
    /// Unreduced remainder `r` with `r ≡ a·s (mod n)`.
    pub raw_numerator: BigInt,
    /// Unreduced cofactor `s`.
    pub raw_denominator: BigInt,
    /// `|r|, |s| <= sqrt(n)/2`, in which case no other small solution exists.
    pub unique: bool,
}

/// Small `r/s` with `r ≡ a·s (mod n)` from the extended Euclidean remainder
/// sequence of `(a, n)`, stopping at the first remainder below `round(sqrt n)`.
pub fn recover_rational(a: &BigInt, n: &BigInt) -> Result<RationalRecovery, LiftError> {
    if *n < BigInt::from(2) {
        return Err(ArithError::InvalidModulus(n.clone()).into());
    }
    let bound = round_sqrt(n);
    let (mut r0, mut s0) = (a.clone(), BigInt::one());
    let (mut r1, mut s1) = (n.clone(), BigInt::zero());
    let (mut r2, mut s2) = (BigInt::zero(), BigInt::zero());
    while bound <= r1 {
        let q = r0.div_floor(&r1);
        r2 = &r0 - &q * &r1;
        s2 = &s0 - &q * &s1;
        r0 = std::mem::replace(&mut r1, r2.clone());
        s0 = std::mem::replace(&mut s1, s2.clone());
    }
    if s2.is_zero() {
        return Err(LiftError::ReconstructionFailed {
            a: a.clone(),
            n: n.clone(),
        });
    }
    // |r|, |s| <= sqrt(n)/2  <=>  4r^2 <= n and 4s^2 <= n
    let unique = ((&r2 * &r2) << 2u32) <= *n && ((&s2 * &s2) << 2u32) <= *n;
    Ok(RationalRecovery {
        fraction: reduce_fraction(&r2, &s2)?,
        raw_numerator: r2,
        raw_denominator: s2,
        unique,
    })
}

/// Square integer matrix, row-major.
pub type IntMatrix = Vec<Vec<BigInt>>;

fn check_square(m: &IntMatrix) -> Result<usize, LiftError> {
    let rows = m.len();
    if let Some(bad) = m.iter().find(|r| r.len() != rows) {
        return Err(LiftError::NotSquareMatrix {
            rows,
            cols: bad.len(),
        });
    }
    Ok(rows)
}

/// Determinant over ℤ by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> Result<BigInt, LiftError> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(sign * &a[n - 1][n - 1])
}

fn minor(m: &IntMatrix, row: usize, col: usize) -> IntMatrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect()
}

/// Balanced `A` with `M·A ≡ I (mod n)`, computed as `det⁻¹ · adj(M)`.
pub fn inv_matrix_mod(m: &IntMatrix, n: &BigInt) -> Result<IntMatrix, LiftError> {
    let size = check_square(m)?;
    let reduced: IntMatrix = m
        .iter()
        .map(|r| r.iter().map(|v| balanced_mod(v, n)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let det = determinant(&reduced)?;
    let det_inv = inv_mod(&det, n).map_err(|e| match e {
        ArithError::NotAUnit { .. } => LiftError::NotInvertible {
            det: det.clone(),
            modulus: n.clone(),
        },
        other => other.into(),
    })?;
    // adjugate is the transposed cofactor matrix
    (0..size)
        .map(|j| {
            (0..size)
                .map(|i| {
                    let cof = determinant(&minor(&reduced, i, j))?;
                    let cof = if (i + j) % 2 == 0 { cof } else { -cof };
                    Ok(balanced_mod_unchecked(&(&det_inv * cof), n))
                })
                .collect()
        })
        .collect()
}

/// Integer coordinates known modulo `modulus`, stored balanced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueVector {
    coords: Vec<BigInt>,
    modulus: BigInt,
}

impl ResidueVector {
    pub fn new(coords: &[BigInt], modulus: &BigInt) -> Result<Self, LiftError> {
        let coords = coords
            .iter()
            .map(|c| balanced_mod(c, modulus))
            .collect::<Result<_, _>>()?;
        Ok(ResidueVector {
            coords,
            modulus: modulus.clone(),
        })
    }

    pub fn from_point(point: &[u64], p: u64) -> Result<Self, LiftError> {
        let coords: Vec<BigInt> = point.iter().map(|&c| BigInt::from(c)).collect();
        Self::new(&coords, &BigInt::from(p))
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }
}

/// Successive Newton states, starting point included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftTrace {
    pub states: Vec<ResidueVector>,
}

impl LiftTrace {
    pub fn last(&self) -> &ResidueVector {
        self.states.last().expect("trace holds the start")
    }

    /// The last two states carry the same integer coordinates.
    pub fn stabilized(&self) -> bool {
        match self.states.as_slice() {
            [.., a, b] => a.coords == b.coords,
            _ => false,
        }
    }
}

struct NewtonContext<'a> {
    sys: &'a PolySystem,
    jacobian: Vec<Vec<Polynomial>>,
}

impl<'a> NewtonContext<'a> {
    fn new(sys: &'a PolySystem) -> Result<Self, LiftError> {
        if !sys.is_square() {
            return Err(LiftError::NotSquareSystem {
                equations: sys.len(),
                unknowns: sys.nvars(),
            });
        }
        Ok(NewtonContext {
            sys,
            jacobian: sys.jacobian(),
        })
    }

    fn step(&self, state: &ResidueVector) -> Result<ResidueVector, LiftError> {
        let eps = &state.modulus;
        let point = &state.coords;
        let values: Vec<BigInt> = self
            .sys
            .polys()
            .iter()
            .map(|f| f.eval_integer(point))
            .collect::<Result<_, _>>()?;
        for (index, v) in values.iter().enumerate() {
            if !v.is_multiple_of(eps) {
                return Err(LiftError::NotARoot {
                    index,
                    residual: balanced_mod_unchecked(v, eps),
                    modulus: eps.clone(),
                });
            }
        }
        let jac: IntMatrix = self
            .jacobian
            .iter()
            .map(|row| row.iter().map(|d| d.eval_integer(point)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        let inv = inv_matrix_mod(&jac, eps).map_err(|e| match e {
            LiftError::NotInvertible { .. } => LiftError::SingularJacobian {
                modulus: eps.clone(),
            },
            other => other,
        })?;
        let eps2 = eps * eps;
        let next: Vec<BigInt> = point
            .iter()
            .zip(&inv)
            .map(|(x, row)| {
                let dot: BigInt = row.iter().zip(&values).map(|(a, f)| a * f).sum();
                // exact: every f_i is divisible by eps
                let quotient = dot.div_floor(eps);
                let correction = eps * balanced_mod_unchecked(&quotient, eps);
                balanced_mod_unchecked(&(x - correction), &eps2)
            })
            .collect();
        Ok(ResidueVector {
            coords: next,
            modulus: eps2,
        })
    }
}

/// One Newton step: a root mod `p^k` becomes a root mod `p^(2k)`.
pub fn newton_step(state: &ResidueVector, sys: &PolySystem) -> Result<ResidueVector, LiftError> {
    NewtonContext::new(sys)?.step(state)
}

/// Iterates [`newton_step`] `steps` times and records every state.
pub fn newton_lift(start: &ResidueVector, sys: &PolySystem, steps: usize) -> Result<LiftTrace, LiftError> {
    let ctx = NewtonContext::new(sys)?;
    let mut states = vec![start.clone()];
    for step in 0..steps {
        let next = ctx
            .step(states.last().expect("non-empty"))
            .map_err(|e| LiftError::AtStep {
                step: step + 1,
                source: Box::new(e),
            })?;
        states.push(next);
    }
    Ok(LiftTrace { states })
}

/// Exact values of every polynomial at an integer point.
pub fn integer_residuals(candidate: &[BigInt], sys: &PolySystem) -> Result<Vec<BigInt>, LiftError> {
    Ok(sys
        .polys()
        .iter()
        .map(|f| f.eval_integer(candidate))
        .collect::<Result<_, _>>()?)
}

/// True iff every polynomial vanishes exactly at `candidate` (false on a
/// length mismatch).
pub fn certify_integer_solution(candidate: &[BigInt], sys: &PolySystem) -> bool {
    integer_residuals(candidate, sys).is_ok_and(|r| r.iter().all(Zero::is_zero))
}

/// True iff every polynomial vanishes exactly at the rational `candidate`.
pub fn certify_rational_solution(candidate: &[Fraction], sys: &PolySystem) -> bool {
    let point: Vec<BigRational> = candidate.iter().map(|f| f.as_ratio().clone()).collect();
    sys.polys()
        .iter()
        .all(|f| f.eval_rational(&point).is_ok_and(|v| v.is_zero()))
}

/// A point of the system over F_p with its tangent-space verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularRoot {
    pub point: Vec<u64>,
    /// Jacobian has full column rank mod p, so the root is smooth and isolated.
    pub smooth: bool,
}

/// [`all_points`] annotated with the Jacobian rank test.
pub fn modular_roots(sys: &PolySystem, p: u64, budget: u64) -> Result<Vec<ModularRoot>, LiftError> {
    let field = PrimeField::new(p)?;
    let reduced = sys.reduce(field);
    Ok(all_points(sys, p, budget)?
        .into_iter()
        .map(|point| {
            let rank = reduced.jacobian_at(&point).map(|j| j.rank()).unwrap_or(0);
            ModularRoot {
                smooth: rank == sys.nvars(),
                point,
            }
        })
        .collect())
}

/// Size of an integer, for reports.
pub fn bit_length(x: &BigInt) -> u64 {
    x.abs().bits()
}
