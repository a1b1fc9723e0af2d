use std::collections::BTreeMap;

use super::{PolyError, Polynomial};
use crate::ffarith::{BigInt, PrimeField};

/// Polynomial over F_p (balanced integer coefficients) that takes the value
/// `table[a]` at every key `a`.
///
/// Built as `Σ table(a) · Π_i (1 - (x_i - a_i)^(p-1))`; each product is the
/// indicator of `a` on F_p^n.
pub fn interpolate(
    table: &BTreeMap<Vec<u64>, u64>,
    p: u64,
    nvars: usize,
) -> Result<Polynomial, PolyError> {
    let field = PrimeField::new(p)?;
    let modulus = BigInt::from(p);
    let one = Polynomial::constant(nvars, 1);
    let mut acc = Polynomial::zero(nvars);
    for (point, &value) in table {
        if point.len() != nvars {
            return Err(PolyError::LengthMismatch {
                expected: nvars,
                got: point.len(),
            });
        }
        if let Some(&bad) = point.iter().find(|&&c| c >= p) {
            return Err(PolyError::CoordinateOutOfRange { value: bad, p });
        }
        if value >= p {
            return Err(PolyError::CoordinateOutOfRange { value, p });
        }
        if value == 0 {
            continue;
        }
        let mut indicator = one.clone();
        for (i, &a) in point.iter().enumerate() {
            let shifted = &Polynomial::var(nvars, i)? - &Polynomial::constant(nvars, a);
            let factor = &one - &shifted.pow((p - 1) as u32);
            indicator = (&indicator * &factor).reduce_coefficients(&modulus)?;
        }
        let weighted = indicator.scale(&BigInt::from(field.balanced(value)));
        acc = (&acc + &weighted).reduce_coefficients(&modulus)?;
    }
    Ok(acc)
}
