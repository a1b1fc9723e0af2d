mod common;

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use common::{big, load_system};
use fieldprobe::dual::{eval_dual, jacobian_at, FpMatrix};
use fieldprobe::ffarith::{balanced_mod, extended_gcd, inv_mod};
use fieldprobe::lift::{
    all_points, crt_list, crt_pair, newton_lift, newton_step, recover_rational, ResidueVector,
};
use fieldprobe::mpoly::{default_names, interpolate, parse};
use fieldprobe::stats::codim_component_estimate;
use fieldprobe::{BigInt, PolySystem, Polynomial, PrimeField};

const SMALL_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 31, 65_521];

fn poly_strategy(nvars: usize) -> impl Strategy<Value = Polynomial> {
    let term = (prop::collection::vec(0u32..5, nvars), -1000i64..=1000);
    prop::collection::vec(term, 0..6).prop_map(move |terms| {
        Polynomial::from_terms(nvars, terms.into_iter().map(|(e, c)| (e, BigInt::from(c))).collect::<Vec<_>>())
    })
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(SMALL_PRIMES.to_vec())
}

fn big_points(a: &[u64]) -> Vec<BigInt> {
    a.iter().map(|&x| BigInt::from(x)).collect()
}

fn residue(f: &Polynomial, a: &[u64], p: u64) -> u64 {
    let field = PrimeField::new(p).unwrap();
    field.from_bigint(f.evaluate_mod(&big_points(a), &BigInt::from(p)).unwrap().value())
}

proptest! {
    #[test]
    fn balanced_mod_range_and_congruence(x in any::<i64>(), n in 1i64..1_000_000) {
        let (x, n) = (big(x), big(n));
        let r = balanced_mod(&x, &n).unwrap();
        prop_assert!(-&n < &r * 2 && &r * 2 <= n);
        prop_assert!((&x - &r).is_multiple_of(&n));
    }

    #[test]
    fn bezout_identity(a in any::<i64>(), b in any::<i64>()) {
        let (a, b) = (big(a), big(b));
        let (g, r, s) = extended_gcd(&a, &b);
        prop_assert!(!g.is_negative());
        prop_assert_eq!(&r * &a + &s * &b, g.clone());
        prop_assert_eq!(g, a.gcd(&b));
    }

    #[test]
    fn inverse_times_value_is_one(i in any::<i64>(), n in 2i64..1_000_000) {
        let (i, n) = (big(i), big(n));
        match inv_mod(&i, &n) {
            Ok(inv) => prop_assert!((inv * &i - BigInt::one()).is_multiple_of(&n)),
            Err(_) => prop_assert!(!i.gcd(&n).is_one()),
        }
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(
        f in poly_strategy(3), g in poly_strategy(3), p in prime(), a in prop::collection::vec(0u64..65_521, 3)
    ) {
        let a: Vec<u64> = a.iter().map(|x| x % p).collect();
        let field = PrimeField::new(p).unwrap();
        let (fa, ga) = (residue(&f, &a, p), residue(&g, &a, p));
        prop_assert_eq!(residue(&(&f + &g), &a, p), field.add(fa, ga));
        prop_assert_eq!(residue(&(&f * &g), &a, p), field.mul(fa, ga));
        prop_assert_eq!(f.reduce(field).eval(&a).unwrap(), fa);
    }

    #[test]
    fn product_rule(f in poly_strategy(2), g in poly_strategy(2), var in 0usize..2) {
        let lhs = (&f * &g).formal_derivative(var).unwrap();
        let rhs = &(&f.formal_derivative(var).unwrap() * &g) + &(&f * &g.formal_derivative(var).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn print_then_parse_is_identity(f in poly_strategy(3)) {
        let names = default_names(3);
        let text = f.display(&names).to_string();
        prop_assert_eq!(parse(&text, &names).unwrap(), f);
    }

    #[test]
    fn dual_evaluation_is_linear_in_direction(
        f in poly_strategy(3), p in prime(),
        a in prop::collection::vec(any::<u64>(), 3),
        b in prop::collection::vec(any::<u64>(), 3),
        c in prop::collection::vec(any::<u64>(), 3),
    ) {
        let field = PrimeField::new(p).unwrap();
        let red = |v: &[u64]| v.iter().map(|x| x % p).collect::<Vec<_>>();
        let (a, b, c) = (red(&a), red(&b), red(&c));
        let bc: Vec<u64> = b.iter().zip(&c).map(|(x, y)| field.add(*x, *y)).collect();
        let db = eval_dual(&f, &a, &b, p).unwrap();
        let dc = eval_dual(&f, &a, &c, p).unwrap();
        let dbc = eval_dual(&f, &a, &bc, p).unwrap();
        prop_assert_eq!(dbc.deriv, field.add(db.deriv, dc.deriv));
        prop_assert_eq!(db.value, residue(&f, &a, p));
    }

    #[test]
    fn dual_product_rule(
        f in poly_strategy(2), g in poly_strategy(2), p in prime(),
        a in prop::collection::vec(any::<u64>(), 2), b in prop::collection::vec(any::<u64>(), 2),
    ) {
        let field = PrimeField::new(p).unwrap();
        let a: Vec<u64> = a.iter().map(|x| x % p).collect();
        let b: Vec<u64> = b.iter().map(|x| x % p).collect();
        let df = eval_dual(&f, &a, &b, p).unwrap();
        let dg = eval_dual(&g, &a, &b, p).unwrap();
        let dfg = eval_dual(&(&f * &g), &a, &b, p).unwrap();
        prop_assert_eq!(dfg, df.mul(dg, &field));
    }

    #[test]
    fn rank_is_transpose_invariant(
        rows in 1usize..6, cols in 1usize..6, p in prime(), seed in prop::collection::vec(any::<u64>(), 36)
    ) {
        let field = PrimeField::new(p).unwrap();
        let m = FpMatrix::from_rows(rows, cols, field, seed[..rows * cols].to_vec());
        let r = m.rank();
        prop_assert_eq!(r, m.transpose().rank());
        prop_assert!(r <= rows.min(cols));
    }

    #[test]
    fn rank_matches_largest_nonzero_minor(entries in prop::collection::vec(0u64..5, 9)) {
        let field = PrimeField::new(5).unwrap();
        let m = FpMatrix::from_rows(3, 3, field, entries.clone());
        let e = |i: usize, j: usize| entries[i * 3 + j] as i64;
        let det3 = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
            - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
        let mut some_minor2 = false;
        for (r0, r1) in [(0, 1), (0, 2), (1, 2)] {
            for (c0, c1) in [(0, 1), (0, 2), (1, 2)] {
                if (e(r0, c0) * e(r1, c1) - e(r0, c1) * e(r1, c0)).rem_euclid(5) != 0 {
                    some_minor2 = true;
                }
            }
        }
        let oracle = if det3.rem_euclid(5) != 0 {
            3
        } else if some_minor2 {
            2
        } else if entries.iter().any(|&x| x != 0) {
            1
        } else {
            0
        };
        prop_assert_eq!(m.rank(), oracle);
    }

    #[test]
    fn crt_reduces_to_each_input(a in any::<i32>(), b in any::<i32>(), i in 0usize..8, j in 0usize..8) {
        prop_assume!(i != j);
        let moduli = [3i64, 4, 5, 7, 11, 13, 17, 1_000_003];
        let (n, m) = (big(moduli[i]), big(moduli[j]));
        let (nm, x) = crt_pair((&n, &big(a.into())), (&m, &big(b.into()))).unwrap();
        prop_assert_eq!(&nm, &(&n * &m));
        prop_assert!((&x - big(a.into())).is_multiple_of(&n));
        prop_assert!((&x - big(b.into())).is_multiple_of(&m));
        prop_assert!(-&nm < &x * 2 && &x * 2 <= nm);
    }

    #[test]
    fn crt_list_reproduces_small_integers(x in -500_000i64..500_000) {
        let entries: Vec<(BigInt, BigInt)> =
            [101i64, 103, 107].iter().map(|&p| (big(p), big(x.rem_euclid(p)))).collect();
        prop_assert_eq!(crt_list(&entries).unwrap(), (big(101 * 103 * 107), big(x)));
    }

    #[test]
    fn planted_fractions_are_recovered(r in -300i64..=300, s in 1i64..=300) {
        // n > 4·300², so |r|, |s| <= sqrt(n)/2
        let n = big(1_000_003);
        prop_assume!(big(r).gcd(&big(s)).is_one());
        let a = (big(r) * inv_mod(&big(s), &n).unwrap()).mod_floor(&n);
        let rec = recover_rational(&a, &n).unwrap();
        prop_assert_eq!(rec.fraction.numerator(), &big(r));
        prop_assert_eq!(rec.fraction.denominator(), &big(s));
        prop_assert!(rec.unique);
        prop_assert!((&rec.raw_numerator - &a * &rec.raw_denominator).is_multiple_of(&n));
    }

    #[test]
    fn all_points_matches_nested_loops(
        f in poly_strategy(2), g in poly_strategy(2), p in prop::sample::select(vec![2u64, 3, 5])
    ) {
        let sys = PolySystem::new(2, vec![f.clone(), g.clone()]).unwrap();
        let mut expected = Vec::new();
        for x in 0..p {
            for y in 0..p {
                if residue(&f, &[x, y], p) == 0 && residue(&g, &[x, y], p) == 0 {
                    expected.push(vec![x, y]);
                }
            }
        }
        prop_assert_eq!(all_points(&sys, p, 1000).unwrap(), expected);
    }

    #[test]
    fn doubling_data_narrows_bands(k1 in 1u64..500, k2 in 1u64..500, m in 700u64..5000) {
        let once = codim_component_estimate(&BTreeMap::from([(1, k1), (2, k2)]), 7, m).unwrap();
        let twice = codim_component_estimate(&BTreeMap::from([(1, 2 * k1), (2, 2 * k2)]), 7, 2 * m).unwrap();
        for c in [1, 2] {
            prop_assert!((once[&c].value - twice[&c].value).abs() < 1e-12);
            let ratio = once[&c].halfwidth99 / twice[&c].halfwidth99;
            prop_assert!((ratio - 2f64.sqrt()).abs() < 1e-9);
        }
    }
}

#[test]
fn three_variable_enumeration_matches_nested_loops() {
    let names = default_names(3);
    let sys = PolySystem::parse(&["x1*x2 - x3", "x1 + x2 + x3 - 1"], &names).unwrap();
    for p in [2u64, 3, 5] {
        let mut expected = Vec::new();
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    let (a2, b2, c2) = (a as i64, b as i64, c as i64);
                    if (a2 * b2 - c2).rem_euclid(p as i64) == 0 && (a2 + b2 + c2 - 1).rem_euclid(p as i64) == 0 {
                        expected.push(vec![a, b, c]);
                    }
                }
            }
        }
        assert_eq!(all_points(&sys, p, 1000).unwrap(), expected, "p = {p}");
    }
}

#[test]
fn tables_interpolate_on_tiny_spaces() {
    // exhaustive except for F_3^2, where every 20th of the 3^9 tables is checked
    for (p, nvars, stride) in [(2u64, 1usize, 1), (2, 2, 1), (3, 1, 1), (3, 2, 20)] {
        let points: Vec<Vec<u64>> = (0..p.pow(nvars as u32))
            .map(|mut i| {
                (0..nvars)
                    .map(|_| {
                        let d = i % p;
                        i /= p;
                        d
                    })
                    .collect()
            })
            .collect();
        let ntables = p.pow(points.len() as u32);
        for code in (0..ntables).step_by(stride) {
            let mut c = code;
            let table: BTreeMap<Vec<u64>, u64> = points
                .iter()
                .map(|pt| {
                    let v = c % p;
                    c /= p;
                    (pt.clone(), v)
                })
                .collect();
            let f = interpolate(&table, p, nvars).unwrap();
            for (pt, &v) in &table {
                assert_eq!(residue(&f, pt, p), v, "p = {p}, table {code}, point {pt:?}");
            }
            // degree in each variable stays below p
            for (mono, _) in f.terms() {
                assert!(mono.exponents().iter().all(|&e| (e as u64) < p));
            }
        }
    }
}

#[test]
fn newton_contact_order_doubles() {
    let sys = load_system("lift_zz.sys");
    let start = ResidueVector::from_point(&[2, 3], 7).unwrap();
    let trace = newton_lift(&start, &sys, 4).unwrap();
    for pair in trace.states.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        assert_eq!(next.modulus(), &(prev.modulus() * prev.modulus()));
        // each state reduces to its predecessor
        for (a, b) in prev.coords().iter().zip(next.coords()) {
            assert!((a - b).is_multiple_of(prev.modulus()));
        }
        // and is a root modulo its own modulus
        for f in sys.polys() {
            assert!(f.evaluate_mod(next.coords(), next.modulus()).unwrap().value().is_zero());
        }
    }
    // a state already at the integer root is a fixed point
    let last = trace.last();
    assert_eq!(newton_step(last, &sys).unwrap().coords(), last.coords());
}

#[test]
fn dual_jacobian_matches_formal_derivatives() {
    let sys = load_system("lift_zz.sys");
    let j = jacobian_at(&sys, &[2, 3], 7).unwrap();
    let symbolic = sys.jacobian();
    for (i, row) in symbolic.iter().enumerate() {
        for (k, d) in row.iter().enumerate() {
            assert_eq!(j.get(i, k), residue(d, &[2, 3], 7), "entry ({i}, {k})");
        }
    }
    assert_eq!(j.rank(), 2);
}

#[test]
fn product_system_rank_two_off_the_common_factor() {
    // I = (F·G, F·H): away from V(F) the Jacobian at a point of V(G, H) has full rank 2
    let names = default_names(2);
    let f = parse("x1 - 3", &names).unwrap();
    let g = parse("x2 - x1^2", &names).unwrap();
    let h = parse("x2 + x1 - 2", &names).unwrap();
    let sys = PolySystem::new(2, vec![&f * &g, &f * &h]).unwrap();
    let p = 11;
    for x in 0..p {
        for y in 0..p {
            let on_gh = residue(&g, &[x, y], p) == 0 && residue(&h, &[x, y], p) == 0;
            let on_f = residue(&f, &[x, y], p) == 0;
            let j = jacobian_at(&sys, &[x, y], p).unwrap();
            if on_gh && !on_f {
                assert_eq!(j.rank(), 2, "({x}, {y})");
            } else if on_f && !on_gh {
                assert_eq!(j.rank(), 1, "({x}, {y})");
            }
        }
    }
}
