//! Bernoulli numbers and polynomials.
//!
//! Convention: `B_1 = -1/2`, i.e. `t e^{tx} / (e^t - 1) = sum_k B_k(x) t^k / k!`
//! and `B_k = B_k(0)`. This is the convention of the dual Todd class
//! `psi / (e^psi - 1)`; the `B_1 = +1/2` convention flips the sign of every
//! odd edge and leg term downstream.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::One;

use super::{Rational, UniPoly};

fn number_cache() -> &'static Mutex<Vec<Rational>> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![Rational::one()]))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `B_k = B_k(0)`, with `B_1 = -1/2`.
pub fn bernoulli_number(k: usize) -> Rational {
    let mut cache = number_cache().lock().unwrap_or_else(|e| e.into_inner());
    while cache.len() <= k {
        // sum_{j=0}^{n} C(n+1, j) B_j = 0
        let n = cache.len();
        let s: Rational = cache
            .iter()
            .enumerate()
            .map(|(j, b)| b * Rational::from_int(binomial(n as u64 + 1, j as u64)))
            .sum();
        cache.push(-s / Rational::from(n as i64 + 1));
    }
    cache[k].clone()
}

fn polynomial_cache() -> &'static Mutex<Vec<UniPoly>> {
    static CACHE: OnceLock<Mutex<Vec<UniPoly>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

/// `B_k(x) = sum_j C(k, j) B_j x^{k-j}`.
pub fn bernoulli_polynomial(k: usize) -> UniPoly {
    {
        let cache = polynomial_cache().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(p) = cache.get(k) {
            return p.clone();
        }
    }
    let computed: Vec<UniPoly> = (0..=k)
        .map(|j| {
            let coeffs = (0..=j)
                .map(|deg| bernoulli_number(j - deg) * Rational::from_int(binomial(j as u64, deg as u64)))
                .collect();
            UniPoly::from_coeffs(coeffs)
        })
        .collect();
    let mut cache = polynomial_cache().lock().unwrap_or_else(|e| e.into_inner());
    if cache.len() < computed.len() {
        *cache = computed;
    }
    cache[k].clone()
}

/// Exact value `B_k(x)`.
pub fn bernoulli_eval(k: usize, x: &Rational) -> Rational {
    bernoulli_polynomial(k).eval(x)
}

/// Polynomial `F_k(N) = sum_{j=0}^{N-1} j^k`, valid for integer `N >= 0`.
pub fn power_sum_polynomial(k: usize) -> UniPoly {
    let b = bernoulli_polynomial(k + 1);
    let shifted = &b - &UniPoly::constant(bernoulli_number(k + 1));
    shifted.scale(&Rational::new(1, k as i64 + 1))
}
