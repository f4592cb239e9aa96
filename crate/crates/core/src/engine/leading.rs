//! The direct formula for the `r^0` coefficient: legs carry `exp(a^2/2 psi)`,
//! an edge with lifted weights `y+`, `y-` carries
//! `(1 - exp(-y+ y- (psi+ + psi-)/2)) / (psi+ + psi-)`, and the weight sum
//! enters through the `r^{h1}` coefficient of a polynomial in `r`.
//!
//! Writing `y(h) = w(h) + age(chi(h))`, the weight conditions say that `y`
//! sums to `0 mod r` at every vertex and `y- = [-y+]_r` on every edge, so an
//! edge contributes `P = y (r - y)` with `y` either of its lifted weights.
//! Weights on edges outside a spanning tree are free; a tree edge gets
//! `y = [t - sum sigma_f w_f]_r` with `sigma_f` in `{-1, 0, 1}`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::at_r::{decorated_graphs, Layout};
use super::{working_bound, EngineConfig, TopData};
use crate::error::Result;
use crate::exact::{factorial, lagrange_interpolate, power_sum_polynomial, Rational, UniPoly};
use crate::orbifold::age;
use crate::taut::{exp_truncated, Series, TautClass, TermKey};
use crate::weights::Decoration;

/// How the weight sums are turned into polynomials in `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightSumMethod {
    /// Closed-form power sums when `h1 <= 1`, exact sampling otherwise.
    Auto,
    /// Always sample and interpolate.
    Sampled,
}

/// Polynomial in `w` with coefficients polynomial in `r`.
#[derive(Debug, Clone)]
struct WPoly(Vec<UniPoly>);

impl WPoly {
    fn constant(c: UniPoly) -> Self {
        WPoly(vec![c])
    }

    /// `c0 + c1 w`.
    fn linear(c0: UniPoly, c1: Rational) -> Self {
        WPoly(vec![c0, UniPoly::constant(c1)])
    }

    fn mul(&self, other: &WPoly) -> WPoly {
        let mut out = vec![UniPoly::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        WPoly(out)
    }

    fn pow(&self, e: u32) -> WPoly {
        (0..e).fold(WPoly::constant(UniPoly::constant(Rational::one())), |acc, _| acc.mul(self))
    }

    /// `r - y` for `y = self`.
    fn complement(&self) -> WPoly {
        let mut out: Vec<UniPoly> = self.0.iter().map(|c| -c).collect();
        out[0] = &out[0] + &UniPoly::x();
        WPoly(out)
    }

    /// `sum_{w = lo}^{hi - 1} self(w)`.
    fn sum_range(&self, lo: &UniPoly, hi: &UniPoly) -> UniPoly {
        let mut total = UniPoly::zero();
        for (k, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let f = power_sum_polynomial(k);
            total = &total + &(c * &(&f.compose(hi) - &f.compose(lo)));
        }
        total
    }
}

/// `[t]_r` as a polynomial in `r`, valid once `r > |t|`.
fn lifted_constant(t: &Rational) -> UniPoly {
    if t.is_negative() {
        UniPoly::from_coeffs(vec![t.clone(), Rational::one()])
    } else {
        UniPoly::constant(t.clone())
    }
}

/// Tree data for one decoration.
struct EdgeForms {
    /// Free edges and their ages.
    free: Vec<(usize, Rational)>,
    /// Tree edges: `(edge, t, sigma per free edge)`.
    tree: Vec<(usize, Rational, Vec<i64>)>,
}

fn edge_forms(data: &TopData, dec: &Decoration) -> EdgeForms {
    let g = dec.graph();
    let nv = g.num_vertices();
    let mut seen = vec![false; nv];
    let mut parent_edge = vec![usize::MAX; nv];
    let mut in_tree = vec![false; g.num_edges()];
    let mut order = vec![0usize];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    in_tree[e] = true;
                    parent_edge[y] = e;
                    order.push(y);
                }
            }
        }
    }
    let free: Vec<(usize, Rational)> = (0..g.num_edges())
        .filter(|&e| !in_tree[e])
        .map(|e| (e, age(data.rep, dec.chi()[g.edge_halves(e).0])))
        .collect();
    let mut tree = Vec::new();
    for &c in order.iter().skip(1) {
        // subtree of c
        let mut inside = vec![false; nv];
        inside[c] = true;
        for &v in &order {
            if v != c && parent_edge[v] != usize::MAX {
                let (a, b) = g.edges()[parent_edge[v]];
                let p = if a == v { b } else { a };
                if inside[p] {
                    inside[v] = true;
                }
            }
        }
        let mut t = Rational::zero();
        for (leg, &v) in g.legs().iter().enumerate() {
            if inside[v] {
                t -= &data.lifts[leg];
            }
        }
        let mut sigma = Vec::new();
        for (f, af) in &free {
            let (a, b) = g.edges()[*f];
            let s = inside[a] as i64 - inside[b] as i64;
            t -= &(af * Rational::from(s));
            sigma.push(s);
        }
        tree.push((parent_edge[c], t, sigma));
    }
    EdgeForms { free, tree }
}

/// `S_J(r) = sum_w prod_e (y_e (r - y_e))^{J_e + 1}` as a polynomial in `r`
/// for large `r`, where `J` is indexed by edge. Zero when the weight system
/// has no solutions.
pub fn weight_power_sum(data: &TopData, dec: &Decoration, j: &[u32], method: WeightSumMethod) -> UniPoly {
    let total: Rational = data.lifts.iter().sum();
    if !total.is_zero() {
        return UniPoly::zero();
    }
    let forms = edge_forms(data, dec);
    match (method, forms.free.len()) {
        (WeightSumMethod::Auto, 0) => symbolic_tree(&forms, j),
        (WeightSumMethod::Auto, 1) => symbolic_one_loop(&forms, j),
        _ => sampled(data, &forms, j),
    }
}

fn symbolic_tree(forms: &EdgeForms, j: &[u32]) -> UniPoly {
    let mut prod = UniPoly::constant(Rational::one());
    for (e, t, _) in &forms.tree {
        let y = lifted_constant(t);
        let p = &y * &(&UniPoly::x() - &y);
        prod = &prod * &p.pow(j[*e] + 1);
    }
    prod
}

fn symbolic_one_loop(forms: &EdgeForms, j: &[u32]) -> UniPoly {
    // Breakpoints alpha r + beta in (0, r) where some tree weight wraps.
    let mut cuts: Vec<(i64, i64)> = vec![(0, 0), (1, 0)];
    for (_, t, sigma) in &forms.tree {
        let ft = i64::try_from(t.floor()).expect("small");
        let candidates = match sigma[0] {
            1 => vec![(0, ft + 1), (1, ft + 1)],
            -1 => vec![(0, -ft), (1, -ft)],
            _ => vec![],
        };
        for (a, b) in candidates {
            if (a == 0 && b > 0) || (a == 1 && b < 0) {
                cuts.push((a, b));
            }
        }
    }
    cuts.sort_unstable();
    cuts.dedup();
    let affine = |(a, b): (i64, i64)| UniPoly::from_coeffs(vec![Rational::from(b), Rational::from(a)]);

    let (f_edge, f_age) = &forms.free[0];
    let y_free = WPoly::linear(UniPoly::constant(f_age.clone()), Rational::one());
    let free_factor = y_free.mul(&y_free.complement()).pow(j[*f_edge] + 1);

    let mut total = UniPoly::zero();
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let mut integrand = free_factor.clone();
        for (e, t, sigma) in &forms.tree {
            let s = sigma[0];
            let y = if s == 0 {
                WPoly::constant(lifted_constant(t))
            } else {
                let rest = t - &Rational::from(s * lo.1);
                let q = -s * lo.0 + if rest.is_negative() { -1 } else { 0 };
                // y = t - s w - q r
                WPoly::linear(UniPoly::from_coeffs(vec![t.clone(), Rational::from(-q)]), Rational::from(-s))
            };
            integrand = integrand.mul(&y.mul(&y.complement()).pow(j[*e] + 1));
        }
        total = &total + &integrand.sum_range(&affine(lo), &affine(hi));
    }
    total
}

/// Exact sums at consecutive `r`, interpolated and checked on two extra points.
fn sampled(data: &TopData, forms: &EdgeForms, j: &[u32]) -> UniPoly {
    let h1 = forms.free.len();
    let degree = 2 * j.iter().map(|&x| x as usize + 1).sum::<usize>() + h1;
    let sum_abs: Rational = data.lifts.iter().map(Rational::abs).sum();
    let start = working_bound(data, &EngineConfig::default())
        .max(u64::try_from(sum_abs.floor()).expect("small") + 2 * j.len() as u64 + 2);
    let samples: Vec<(i64, Rational)> = (start..start + degree as u64 + 3)
        .into_par_iter()
        .map(|r| (r as i64, sampled_value(data.rep.m, forms, j, r)))
        .collect();
    lagrange_interpolate(&samples, degree).expect("weight sums are polynomial in r for large r")
}

/// Exact `S_J(r)` by enumeration, in integers: with `Y = m y` and `M = m r`
/// every factor is `Y (M - Y) / m^2`.
fn sampled_value(m: u32, forms: &EdgeForms, j: &[u32], r: u64) -> Rational {
    let m_i = m as i128;
    let big_m = m_i * r as i128;
    let scaled = |x: &Rational| -> i128 {
        (x * Rational::from(m as i64)).to_i64().expect("m-scaled lifts are integers") as i128
    };
    let free: Vec<(usize, i128)> = forms.free.iter().map(|(e, a)| (*e, scaled(a))).collect();
    let tree: Vec<(usize, i128, &[i64])> =
        forms.tree.iter().map(|(e, t, s)| (*e, scaled(t), s.as_slice())).collect();
    let factor = |y: i128, e: usize| BigInt::from(y * (big_m - y)).pow(j[e] + 1);
    let h1 = free.len();
    let mut w = vec![0i128; h1];
    let mut total = BigInt::zero();
    loop {
        let mut prod = BigInt::one();
        for (k, &(e, a)) in free.iter().enumerate() {
            prod *= factor(m_i * w[k] + a, e);
        }
        for &(e, t, sigma) in &tree {
            let shift: i128 = sigma.iter().zip(&w).map(|(&s, &x)| s as i128 * x).sum();
            prod *= factor((t - m_i * shift).rem_euclid(big_m), e);
        }
        total += prod;
        let mut i = h1;
        loop {
            if i == 0 {
                let power: u32 = 2 * j.iter().map(|&x| x + 1).sum::<u32>();
                return Rational::new(total, BigInt::from(m).pow(power));
            }
            i -= 1;
            w[i] += 1;
            if w[i] < r as i128 {
                break;
            }
            w[i] = 0;
        }
    }
}

/// Constant term in `r` of the normalized class, computed directly.
pub fn leading_term_class(data: &TopData, d: u32) -> Result<TautClass> {
    leading_term_class_with(data, d, WeightSumMethod::Auto)
}

pub fn leading_term_class_with(data: &TopData, d: u32, method: WeightSumMethod) -> Result<TautClass> {
    data.validate()?;
    data.check_degree(d)?;
    let decs = decorated_graphs(data, d)?;
    let parts = decs
        .par_iter()
        .map(|dec| contribution(data, dec, d, method))
        .collect::<Result<Vec<_>>>()?;
    let mut class = TautClass::zero(data.ambient());
    for part in parts {
        for (k, c) in part {
            class.add_term(k, c);
        }
    }
    Ok(class)
}

fn contribution(
    data: &TopData,
    dec: &Decoration,
    d: u32,
    method: WeightSumMethod,
) -> Result<Vec<(TermKey, Rational)>> {
    let graph = dec.graph();
    let ne = graph.num_edges();
    let budget = d - ne as u32;
    let layout = Layout::new(graph, 0);
    let weights = layout.weights();
    let h1 = graph.h1();

    let mut gen = Series::zero(weights.clone());
    for (i, a) in data.lifts.iter().enumerate() {
        let mut e = vec![0; weights.len()];
        e[layout.psi_var(i)] = 1;
        gen.add_monomial(e, a * a / Rational::from(2));
    }
    let legs = exp_truncated(&gen, budget)?;

    // Edge part: sum over J of prod_e c_{j_e} (psi+ + psi-)^{j_e} times the
    // r^{h1} coefficient of S_J.
    let mut sums: HashMap<Vec<u32>, Rational> = HashMap::new();
    let mut edges = Series::zero(weights.clone());
    let mut j = vec![0u32; ne];
    loop {
        if j.iter().sum::<u32>() <= budget {
            let s = sums
                .entry(j.clone())
                .or_insert_with(|| weight_power_sum(data, dec, &j, method).coeff(h1))
                .clone();
            if !s.is_zero() {
                let mut term = Series::one(weights.clone()).scale(&s);
                for (e, &je) in j.iter().enumerate() {
                    let sign = if je % 2 == 0 { 1 } else { -1 };
                    let denom = Rational::from_int(factorial(je as u64 + 1)) * Rational::from(2).pow(je + 1);
                    let c = Rational::from(sign) / denom;
                    let (hp, hm) = graph.edge_halves(e);
                    let mut binom = Series::zero(weights.clone());
                    for i in 0..=je {
                        let mut x = vec![0; weights.len()];
                        x[hp] = i;
                        x[hm] = je - i;
                        binom.add_monomial(x, &c * Rational::from_int(crate::exact::binomial(je as u64, i as u64)));
                    }
                    term = term.mul_filtered(&binom, budget, |x| layout.keep(x));
                }
                edges.add_assign(&term);
            }
        }
        // odometer over J with entries <= budget
        let mut i = ne;
        loop {
            if i == 0 {
                let total = legs.mul_filtered(&edges, budget, |x| layout.keep(x));
                let aut = Rational::from(graph.automorphism_order() as i64);
                return Ok(total.terms().map(|(x, c)| (layout.key(dec.chi(), x), c / &aut)).collect());
            }
            i -= 1;
            j[i] += 1;
            if j[i] <= budget {
                break;
            }
            j[i] = 0;
        }
    }
}
