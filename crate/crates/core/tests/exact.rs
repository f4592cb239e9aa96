use orbidr_core::exact::{
    bernoulli_eval, bernoulli_number, bernoulli_polynomial, binomial, constant_term, lagrange_interpolate,
    power_sum_polynomial, rational_mod, UniPoly,
};
use orbidr_core::{Error, Rational};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn poly(cs: &[&str]) -> UniPoly {
    UniPoly::from_coeffs(cs.iter().map(|c| q(c)).collect())
}

#[test]
fn rational_mod_examples() {
    assert_eq!(rational_mod(&q("7/2"), 3), q("1/2"));
    assert_eq!(rational_mod(&q("-2"), 5), q("3"));
    assert_eq!(rational_mod(&q("6"), 3), q("0"));
}

#[test]
fn low_bernoulli_polynomials() {
    assert_eq!(bernoulli_polynomial(0), poly(&["1"]));
    assert_eq!(bernoulli_polynomial(1), poly(&["-1/2", "1"]));
    assert_eq!(bernoulli_polynomial(2), poly(&["1/6", "-1", "1"]));
    assert_eq!(bernoulli_number(0), q("1"));
    assert_eq!(bernoulli_number(1), q("-1/2"));
    assert_eq!(bernoulli_number(2), q("1/6"));
    assert_eq!(bernoulli_number(12), q("-691/2730"));
    assert_eq!(bernoulli_number(13), q("0"));
}

fn random_rational(rng: &mut StdRng) -> Rational {
    Rational::new(rng.gen_range(-200i64..=200), rng.gen_range(1i64..=60))
}

#[test]
fn bernoulli_addition_formula() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..50 {
        let (x, y) = (random_rational(&mut rng), random_rational(&mut rng));
        for m in 0..=8usize {
            let rhs: Rational = (0..=m)
                .map(|k| Rational::from(binomial(m as u64, k as u64)) * bernoulli_eval(k, &x) * y.pow((m - k) as u32))
                .sum();
            assert_eq!(bernoulli_eval(m, &(&x + &y)), rhs, "m={m} x={x} y={y}");
        }
    }
}

#[test]
fn bernoulli_difference_and_reflection() {
    // B_k(x + 1) - B_k(x) = k x^{k-1}; B_k(1 - x) = (-1)^k B_k(x).
    for k in 1..=10usize {
        for x in ["0", "1/3", "-5/7", "2"] {
            let x = q(x);
            let diff = bernoulli_eval(k, &(&x + &Rational::one())) - bernoulli_eval(k, &x);
            assert_eq!(diff, Rational::from(k as i64) * x.pow(k as u32 - 1));
            let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
            assert_eq!(bernoulli_eval(k, &(Rational::one() - &x)), sign * bernoulli_eval(k, &x));
        }
    }
}

#[test]
fn power_sums() {
    for k in 0..=6usize {
        let p = power_sum_polynomial(k);
        for n in 0..=12i64 {
            let direct: Rational = (0..n).map(|i| Rational::from(i).pow(k as u32)).sum();
            assert_eq!(p.eval(&Rational::from(n)), direct, "k={k} n={n}");
        }
    }
}

#[test]
fn interpolation_examples() {
    let sq: Vec<(i64, Rational)> = (1..=4).map(|x| (x, Rational::from(x * x))).collect();
    assert_eq!(lagrange_interpolate(&sq, 2).unwrap(), poly(&["0", "0", "1"]));
    let c = q("-3/7");
    let flat: Vec<(i64, Rational)> = (5..=7).map(|x| (x, c.clone())).collect();
    assert_eq!(lagrange_interpolate(&flat, 0).unwrap(), UniPoly::constant(c));
    let bad = vec![(1, q("1")), (2, q("2")), (3, q("4"))];
    assert!(matches!(lagrange_interpolate(&bad, 1), Err(Error::NotPolynomial { .. })));
}

#[test]
fn constant_term_examples() {
    assert_eq!(constant_term(&poly(&["1/2", "-1/2", "1/12"])), q("1/2"));
    assert_eq!(constant_term(&UniPoly::zero()), q("0"));
    assert_eq!(constant_term(&poly(&["-1/24"])), q("-1/24"));
}

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..100).prop_map(|(n, d)| Rational::new(n, d))
}

proptest! {
    #[test]
    fn rational_mod_range(a in arb_rational(), r in 1u64..50) {
        let m = rational_mod(&a, r);
        prop_assert!(!m.is_negative() && m < Rational::from(r as i64));
        prop_assert!(((&a - &m) / Rational::from(r as i64)).is_integer());
    }

    #[test]
    fn interpolation_recovers_polynomials(
        cs in proptest::collection::vec(arb_rational(), 1..6),
        start in -20i64..20,
        extra in 0usize..3,
    ) {
        let p = UniPoly::from_coeffs(cs);
        let bound = 5;
        let samples: Vec<(i64, Rational)> =
            (0..(bound + 1 + extra) as i64).map(|i| (start + i, p.eval(&Rational::from(start + i)))).collect();
        prop_assert_eq!(lagrange_interpolate(&samples, bound).unwrap(), p);
    }

    #[test]
    fn rational_serialization_round_trip(a in arb_rational()) {
        let s = serde_json::to_string(&a).unwrap();
        let back: Rational = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn poly_ring_laws(a in proptest::collection::vec(arb_rational(), 0..4),
                      b in proptest::collection::vec(arb_rational(), 0..4),
                      x in arb_rational()) {
        let (p, r) = (UniPoly::from_coeffs(a), UniPoly::from_coeffs(b));
        prop_assert_eq!((&p * &r).eval(&x), p.eval(&x) * r.eval(&x));
        prop_assert_eq!((&p + &r).eval(&x), p.eval(&x) + r.eval(&x));
        prop_assert_eq!(p.compose(&r).eval(&x), p.eval(&r.eval(&x)));
    }
}
