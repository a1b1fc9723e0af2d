use rand::Rng;

use super::Polynomial;
use crate::ffarith::{BigInt, PrimeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    /// Every monomial of degree exactly `d`.
    Homogeneous,
    /// Sum of random homogeneous pieces of degrees `0..=d`.
    Inhomogeneous,
}

/// All exponent vectors of total degree `d` in `nvars` variables.
pub(crate) fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(nvars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == nvars {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(nvars, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(nvars, d, &mut Vec::with_capacity(nvars), &mut out);
    out
}

/// Random polynomial with every coefficient drawn uniformly from the `p`
/// balanced residues (zero included).
pub fn random_dense<R: Rng + ?Sized>(
    d: u32,
    nvars: usize,
    field: PrimeField,
    mode: Homogeneity,
    rng: &mut R,
) -> Polynomial {
    let degrees = match mode {
        Homogeneity::Homogeneous => d..=d,
        Homogeneity::Inhomogeneous => 0..=d,
    };
    let mut terms = Vec::new();
    for k in degrees {
        for e in monomials_of_degree(nvars, k) {
            let c = field.balanced(rng.random_range(0..field.modulus()));
            terms.push((e, BigInt::from(c)));
        }
    }
    Polynomial::from_terms(nvars, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn monomial_counts() {
        // C(d + n - 1, n - 1)
        assert_eq!(monomials_of_degree(4, 2).len(), 10);
        assert_eq!(monomials_of_degree(6, 7).len(), 792);
        assert_eq!(monomials_of_degree(0, 0).len(), 1);
        assert!(monomials_of_degree(0, 3).is_empty());
    }

    #[test]
    fn degree_zero_is_constant() {
        let f = PrimeField::new(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let g = random_dense(0, 3, f, Homogeneity::Inhomogeneous, &mut rng);
            assert!(g.terms().all(|(m, _)| m.degree() == 0));
        }
    }

    #[test]
    fn homogeneous_degree() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_dense(2, 4, f, Homogeneity::Homogeneous, &mut rng);
        assert!(!g.is_zero());
        assert!(g.terms().all(|(m, _)| m.degree() == 2));
    }

    #[test]
    fn coefficient_frequencies_look_uniform() {
        // chi-square against uniform over 7 residues, 6 degrees of freedom;
        // 16.81 is the 99% quantile.
        let f = PrimeField::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0u64; 7];
        let mut total = 0u64;
        for _ in 0..200 {
            let g = random_dense(3, 4, f, Homogeneity::Inhomogeneous, &mut rng);
            let nonzero = g.num_terms() as u64;
            for (_, c) in g.terms() {
                counts[f.from_bigint(c) as usize] += 1;
            }
            counts[0] += 35 - nonzero;
            total += 35;
        }
        let expected = total as f64 / 7.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 16.81, "chi2 = {chi2}, counts = {counts:?}");
    }
}
