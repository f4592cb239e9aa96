//! ψ-intersection numbers on moduli of stable curves and evaluation of
//! tautological classes against ψ monomials.
//!
//! Numbers come from the DVV recursion, with the string and dilaton
//! equations used as shortcuts. κ classes are removed one at a time by
//! adding a marking: `kappa_a = pi_*(psi_{n+1}^{a+1})` together with
//! `pi^* kappa_b = kappa_b - psi_{n+1}^b`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::taut::{TautClass, TermKey};

/// Genus and sorted ψ exponents of an intersection number.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntersectionKey {
    pub g: u32,
    pub exponents: Vec<u32>,
}

impl IntersectionKey {
    pub fn new(g: u32, exponents: &[u32]) -> Self {
        let mut exponents = exponents.to_vec();
        exponents.sort_unstable();
        IntersectionKey { g, exponents }
    }

    pub fn n(&self) -> usize {
        self.exponents.len()
    }

    /// True when the exponents fill the dimension `3g - 3 + n`.
    pub fn is_dimensional(&self) -> bool {
        let sum: i64 = self.exponents.iter().map(|&k| k as i64).sum();
        sum == 3 * self.g as i64 - 3 + self.n() as i64
    }
}

fn memo() -> &'static Mutex<HashMap<IntersectionKey, Rational>> {
    static MEMO: OnceLock<Mutex<HashMap<IntersectionKey, Rational>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `<tau_{k_1} ... tau_{k_n}>_g`. Zero when the exponents do not sum to the
/// dimension.
pub fn psi_integral(g: u32, exponents: &[u32]) -> Result<Rational> {
    let chi = 2 * g as i64 - 2 + exponents.len() as i64;
    if chi <= 0 {
        return Err(Error::Unstable(chi));
    }
    let key = IntersectionKey::new(g, exponents);
    if !key.is_dimensional() {
        return Ok(Rational::zero());
    }
    Ok(lookup(&key))
}

fn lookup(key: &IntersectionKey) -> Rational {
    if let Some(v) = memo().lock().expect("memo lock").get(key) {
        return v.clone();
    }
    let v = compute(key);
    memo().lock().expect("memo lock").insert(key.clone(), v.clone());
    v
}

/// Value for any stable `(g, exponents)`, zero off dimension.
fn value(g: u32, exponents: Vec<u32>) -> Rational {
    let key = IntersectionKey::new(g, &exponents);
    if !key.is_dimensional() {
        return Rational::zero();
    }
    lookup(&key)
}

fn double_factorial(k: i64) -> Rational {
    let mut acc = Rational::one();
    let mut i = k;
    while i > 1 {
        acc *= &Rational::from(i);
        i -= 2;
    }
    acc
}

fn compute(key: &IntersectionKey) -> Rational {
    let g = key.g;
    let ks = &key.exponents;
    let n = ks.len();
    match (g, ks.as_slice()) {
        (0, [0, 0, 0]) => return Rational::one(),
        (1, [1]) => return Rational::new(1, 24),
        _ => {}
    }
    if n == 0 {
        // dilaton in reverse
        return value(g, vec![1]) / Rational::from(2 * g as i64 - 2);
    }
    // String equation.
    if ks[0] == 0 {
        let rest = &ks[1..];
        let mut total = Rational::zero();
        for i in 0..rest.len() {
            if rest[i] > 0 {
                let mut e = rest.to_vec();
                e[i] -= 1;
                total += value(g, e);
            }
        }
        return total;
    }
    // Dilaton equation.
    if ks[0] == 1 {
        let rest = ks[1..].to_vec();
        let chi = 2 * g as i64 - 2 + rest.len() as i64;
        return value(g, rest) * Rational::from(chi);
    }
    dvv(g, ks)
}

/// DVV recursion on the last (largest) exponent `k + 1`.
fn dvv(g: u32, ks: &[u32]) -> Rational {
    let k = ks[ks.len() - 1] as i64 - 1;
    let rest: Vec<u32> = ks[..ks.len() - 1].to_vec();
    let mut total = Rational::zero();

    for j in 0..rest.len() {
        let kj = rest[j] as i64;
        let mut e = rest.clone();
        e[j] = (k + kj) as u32;
        let c = double_factorial(2 * k + 2 * kj + 1) / double_factorial(2 * kj - 1);
        total += c * value(g, e);
    }

    let mut quad = Rational::zero();
    for a in 0..k {
        let b = k - 1 - a;
        let c = double_factorial(2 * a + 1) * double_factorial(2 * b + 1);
        let mut inner = Rational::zero();
        if g >= 1 {
            let mut e = rest.clone();
            e.push(a as u32);
            e.push(b as u32);
            inner += value(g - 1, e);
        }
        let m = rest.len();
        for mask in 0u64..(1 << m) {
            let left: Vec<u32> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| rest[i]).collect();
            let right: Vec<u32> = (0..m).filter(|i| mask >> i & 1 == 0).map(|i| rest[i]).collect();
            for g1 in 0..=g {
                let g2 = g - g1;
                // both factors need 2g_i - 2 + n_i > 0
                if 2 * g1 as usize + left.len() < 2 || 2 * g2 as usize + right.len() < 2 {
                    continue;
                }
                let mut l = left.clone();
                l.push(a as u32);
                let mut r = right.clone();
                r.push(b as u32);
                let x = value(g1, l);
                if x.is_zero() {
                    continue;
                }
                inner += x * value(g2, r);
            }
        }
        quad += c * inner;
    }
    total += quad / Rational::from(2);
    total / double_factorial(2 * k + 3)
}

/// `int psi^exponents prod kappa_{kappa[j]}` over `Mbar_{g,n}`.
pub fn psi_kappa_integral(g: u32, exponents: &[u32], kappa: &[u32]) -> Result<Rational> {
    let chi = 2 * g as i64 - 2 + exponents.len() as i64;
    if chi <= 0 {
        return Err(Error::Unstable(chi));
    }
    let Some((&a, rest)) = kappa.split_first() else {
        return psi_integral(g, exponents);
    };
    let mut total = Rational::zero();
    for mask in 0u64..(1 << rest.len()) {
        let mut extra = a + 1;
        let mut remaining = Vec::new();
        for (i, &b) in rest.iter().enumerate() {
            if mask >> i & 1 == 1 {
                extra += b;
            } else {
                remaining.push(b);
            }
        }
        let mut e = exponents.to_vec();
        e.push(extra);
        let v = psi_kappa_integral(g, &e, &remaining)?;
        if mask.count_ones() % 2 == 1 {
            total -= &v;
        } else {
            total += &v;
        }
    }
    Ok(total)
}

/// Conventions for pairing a class with a ψ monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// For `m > 1`, multiply each vertex integral by `m^{2g(v) - 1}`.
    pub cover_factor: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { cover_factor: true }
    }
}

pub fn evaluate_class_integral(c: &TautClass, insertions: &BTreeMap<usize, u32>) -> Result<Rational> {
    evaluate_class_integral_with(c, insertions, &EvalOptions::default())
}

/// `int c * prod_i psi_i^{insertions[i]}`. Each term is the product over
/// vertices of the local integrals times its coefficient.
pub fn evaluate_class_integral_with(
    c: &TautClass,
    insertions: &BTreeMap<usize, u32>,
    options: &EvalOptions,
) -> Result<Rational> {
    let amb = c.ambient();
    if let Some(&i) = insertions.keys().find(|&&i| i >= amb.n) {
        return Err(Error::InvalidInput(format!("insertion on leg {i}, but n = {}", amb.n)));
    }
    let ins: u32 = insertions.values().sum();
    let dim = 3 * amb.g + amb.n as u32 - 3;
    let mut total = Rational::zero();
    for (key, coeff) in c.terms() {
        if key.degree() + ins != dim {
            return Err(Error::DimensionMismatch { class: key.degree(), insertions: ins, dim });
        }
        total += coeff * &term_integral(key, insertions, amb.m, options)?;
    }
    Ok(total)
}

fn term_integral(key: &TermKey, insertions: &BTreeMap<usize, u32>, m: u32, options: &EvalOptions) -> Result<Rational> {
    let graph = &key.graph;
    let mut prod = Rational::one();
    for v in 0..graph.num_vertices() {
        let gv = graph.genera()[v];
        let exps: Vec<u32> = graph
            .half_edges_at(v)
            .iter()
            .map(|&h| key.psi[h] + insertions.get(&h).copied().unwrap_or(0))
            .collect();
        prod *= &psi_kappa_integral(gv, &exps, &key.kappa[v])?;
        if prod.is_zero() {
            return Ok(prod);
        }
        if options.cover_factor && m > 1 {
            let e = 2 * gv as i64 - 1;
            let mq = Rational::from(m as i64);
            prod *= &if e >= 0 { mq.pow(e as u32) } else { mq.recip() };
        }
    }
    Ok(prod)
}
