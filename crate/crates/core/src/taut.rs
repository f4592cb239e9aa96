//! Formal tautological classes: rational combinations of decorated stable
//! graphs carrying ψ powers on half-edges and κ classes on vertices.
//!
//! A term stands for the pushforward along the gluing map of its graph of the
//! ψ/κ monomial; no automorphism factor is implied beyond the stored
//! coefficient. Complex degree is `sum psi + sum kappa indices + |E|`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factorial, Rational};
use crate::graphs::StableGraph;
use crate::orbifold::Sector;

/// Moduli data a class lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ambient {
    pub g: u32,
    pub n: usize,
    pub m: u32,
}

/// Graph, decoration and monomial of a term. `kappa[v]` is a sorted list of
/// κ indices at vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermKey {
    pub graph: Arc<StableGraph>,
    pub chi: Vec<Sector>,
    pub psi: Vec<u32>,
    pub kappa: Vec<Vec<u32>>,
}

impl TermKey {
    /// Bare graph stratum with no ψ or κ insertions.
    pub fn stratum(graph: Arc<StableGraph>, chi: Vec<Sector>) -> Self {
        let psi = vec![0; graph.num_half_edges()];
        let kappa = vec![Vec::new(); graph.num_vertices()];
        TermKey { graph, chi, psi, kappa }
    }

    pub fn degree(&self) -> u32 {
        self.psi.iter().sum::<u32>()
            + self.kappa.iter().flatten().sum::<u32>()
            + self.graph.num_edges() as u32
    }

    /// Degree of the insertions at `v`.
    pub fn vertex_degree(&self, v: usize) -> u32 {
        let psi: u32 = self.graph.half_edges_at(v).iter().map(|&h| self.psi[h]).sum();
        psi + self.kappa[v].iter().sum::<u32>()
    }

    /// False when some vertex carries more than its dimension; such a term
    /// is zero.
    pub fn within_dimension(&self) -> bool {
        (0..self.graph.num_vertices()).all(|v| self.vertex_degree(v) <= self.graph.vertex_dim(v))
    }

    /// Smallest image of the key under the automorphisms of its graph.
    pub fn canonical(mut self) -> Self {
        let auts = self.graph.automorphisms();
        if auts.len() <= 1 {
            for k in &mut self.kappa {
                k.sort_unstable();
            }
            return self;
        }
        let mut best: Option<(Vec<Sector>, Vec<u32>, Vec<Vec<u32>>)> = None;
        for a in auts {
            let mut chi = self.chi.clone();
            let mut psi = self.psi.clone();
            for (h, &t) in a.half_edge_perm.iter().enumerate() {
                chi[t] = self.chi[h];
                psi[t] = self.psi[h];
            }
            let mut kappa = self.kappa.clone();
            for (v, &t) in a.vertex_perm.iter().enumerate() {
                kappa[t] = self.kappa[v].clone();
                kappa[t].sort_unstable();
            }
            let cand = (chi, psi, kappa);
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
        let (chi, psi, kappa) = best.expect("identity automorphism");
        TermKey { graph: self.graph, chi, psi, kappa }
    }
}

impl fmt::Display for TermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.graph)?;
        let chi: Vec<String> = self.chi.iter().map(|s| s.0.to_string()).collect();
        write!(f, " chi=({})", chi.join(","))?;
        for (h, &e) in self.psi.iter().enumerate() {
            if e > 0 {
                write!(f, " psi_h{h}^{e}")?;
            }
        }
        for (v, ks) in self.kappa.iter().enumerate() {
            for k in ks {
                write!(f, " kappa_{k}@v{v}")?;
            }
        }
        Ok(())
    }
}

/// A term with its coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphTerm {
    pub key: TermKey,
    pub coeff: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TautClass {
    ambient: Ambient,
    terms: BTreeMap<TermKey, Rational>,
}

impl TautClass {
    pub fn zero(ambient: Ambient) -> Self {
        TautClass { ambient, terms: BTreeMap::new() }
    }

    /// Fundamental class of the component with the given leg sectors.
    pub fn fundamental(ambient: Ambient, leg_sectors: &[Sector]) -> Self {
        let graph = Arc::new(StableGraph::smooth(ambient.g, ambient.n));
        let mut c = TautClass::zero(ambient);
        c.add_term(TermKey::stratum(graph, leg_sectors.to_vec()), Rational::one());
        c
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    /// Adds `coeff` times the term; the key is canonicalized and terms beyond
    /// a vertex dimension are dropped.
    pub fn add_term(&mut self, key: TermKey, coeff: Rational) {
        if coeff.is_zero() || !key.within_dimension() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key.canonical()) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Rational)> {
        self.terms.iter()
    }

    pub fn graph_terms(&self) -> Vec<GraphTerm> {
        self.terms.iter().map(|(k, c)| GraphTerm { key: k.clone(), coeff: c.clone() }).collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a (not necessarily canonical) key.
    pub fn coefficient(&self, key: &TermKey) -> Rational {
        self.terms.get(&key.clone().canonical()).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &TautClass) -> Result<TautClass> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch(format!("{:?} vs {:?}", self.ambient, other.ambient)));
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rational) -> TautClass {
        let mut out = TautClass::zero(self.ambient);
        if factor.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(k, c)| (k.clone(), c * factor)).collect();
        out
    }

    /// Terms of degree at most `degree`.
    pub fn truncate(&self, degree: u32) -> TautClass {
        self.filter(|k| k.degree() <= degree)
    }

    /// Terms of degree exactly `degree`.
    pub fn homogeneous_part(&self, degree: u32) -> TautClass {
        self.filter(|k| k.degree() == degree)
    }

    fn filter(&self, keep: impl Fn(&TermKey) -> bool) -> TautClass {
        TautClass {
            ambient: self.ambient,
            terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms.iter().map(|(k, c)| TermJson::new(k, c.clone())).collect()
    }
}

impl fmt::Display for TautClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for (k, c) in &self.terms {
            writeln!(f, "{c} * {k}")?;
        }
        Ok(())
    }
}

/// JSON form of a term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub graph: String,
    pub chi: Vec<Sector>,
    pub psi: BTreeMap<usize, u32>,
    pub kappa: BTreeMap<usize, Vec<u32>>,
    pub coeff: Rational,
}

impl TermJson {
    pub fn new(key: &TermKey, coeff: Rational) -> Self {
        TermJson {
            graph: key.graph.encoding(),
            chi: key.chi.clone(),
            psi: key.psi.iter().enumerate().filter(|(_, &e)| e > 0).map(|(h, &e)| (h, e)).collect(),
            kappa: key
                .kappa
                .iter()
                .enumerate()
                .filter(|(_, k)| !k.is_empty())
                .map(|(v, k)| (v, k.clone()))
                .collect(),
            coeff,
        }
    }
}

/// Truncated power series in weighted commuting variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    weights: Vec<u32>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Series {
    pub fn zero(weights: Vec<u32>) -> Self {
        Series { weights, terms: BTreeMap::new() }
    }

    pub fn one(weights: Vec<u32>) -> Self {
        let mut s = Series::zero(weights);
        s.add_monomial(vec![0; s.weights.len()], Rational::one());
        s
    }

    pub fn variable(weights: Vec<u32>, i: usize, coeff: Rational) -> Self {
        let mut s = Series::zero(weights);
        let mut e = vec![0; s.weights.len()];
        e[i] = 1;
        s.add_monomial(e, coeff);
        s
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_of(&self, exps: &[u32]) -> u32 {
        exps.iter().zip(&self.weights).map(|(e, w)| e * w).sum()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    pub fn constant(&self) -> Rational {
        self.coeff(&vec![0; self.weights.len()])
    }

    pub fn add_monomial(&mut self, exps: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
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

    pub fn add_assign(&mut self, other: &Series) {
        for (e, c) in &other.terms {
            self.add_monomial(e.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &Rational) -> Series {
        let mut out = Series::zero(self.weights.clone());
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect();
        }
        out
    }

    pub fn truncate(&self, max_degree: u32) -> Series {
        let mut out = Series::zero(self.weights.clone());
        out.terms = self
            .terms
            .iter()
            .filter(|(e, _)| self.degree_of(e) <= max_degree)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        out
    }

    /// Product, keeping monomials of degree `<= max_degree` accepted by `keep`.
    pub fn mul_filtered(&self, other: &Series, max_degree: u32, keep: impl Fn(&[u32]) -> bool) -> Series {
        let mut out = Series::zero(self.weights.clone());
        for (ea, ca) in &self.terms {
            let da = self.degree_of(ea);
            if da > max_degree {
                continue;
            }
            for (eb, cb) in &other.terms {
                if da + self.degree_of(eb) > max_degree {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if keep(&e) {
                    out.add_monomial(e, ca * cb);
                }
            }
        }
        out
    }

    pub fn mul_truncated(&self, other: &Series, max_degree: u32) -> Series {
        self.mul_filtered(other, max_degree, |_| true)
    }
}

/// `exp(generator)` up to `max_degree`. The generator must have no constant
/// term and all variable weights must be positive.
pub fn exp_truncated(generator: &Series, max_degree: u32) -> Result<Series> {
    if !generator.constant().is_zero() || generator.weights.iter().any(|&w| w == 0) {
        return Err(Error::NonNilpotentInput);
    }
    let gen = generator.truncate(max_degree);
    let mut total = Series::one(generator.weights.clone());
    let mut power = total.clone();
    for k in 1..=max_degree as u64 {
        power = power.mul_truncated(&gen, max_degree);
        if power.is_zero() {
            break;
        }
        total.add_assign(&power.scale(&Rational::from_int(factorial(k)).recip()));
    }
    Ok(total)
}

/// Exact quotient of a series in `(u, v)` by `u + v`.
pub fn divide_by_sum(p: &Series) -> Result<Series> {
    if p.weights != [1, 1] {
        return Err(Error::InvalidInput("expected two weight-one variables".into()));
    }
    let mut by_degree: BTreeMap<u32, BTreeMap<u32, Rational>> = BTreeMap::new();
    for (e, c) in &p.terms {
        by_degree.entry(e[0] + e[1]).or_default().insert(e[0], c.clone());
    }
    let mut out = Series::zero(vec![1, 1]);
    for (deg, coeffs) in by_degree {
        if deg == 0 {
            return Err(Error::NotDivisible);
        }
        // p_i = q_{i-1} + q_i for the coefficient of u^i v^{deg-i}
        let mut prev = Rational::zero();
        for i in 0..deg {
            let q = coeffs.get(&i).cloned().unwrap_or_default() - &prev;
            out.add_monomial(vec![i, deg - 1 - i], q.clone());
            prev = q;
        }
        if coeffs.get(&deg).cloned().unwrap_or_default() != prev {
            return Err(Error::NotDivisible);
        }
    }
    Ok(out)
}

/// `(1 - exp(S)) / (psi+ + psi-)` up to `max_degree`, for the exponent
/// `S = sum_k c_k (psi+^k - (-psi-)^k)` with `c_k = exponent_coefficients[k-1]`.
/// Variables of the result are `(psi+, psi-)`.
pub fn edge_series(exponent_coefficients: &[Rational], max_degree: u32) -> Result<Series> {
    let mut s = Series::zero(vec![1, 1]);
    for (i, c) in exponent_coefficients.iter().enumerate().take(max_degree as usize + 1) {
        let k = i as u32 + 1;
        s.add_monomial(vec![k, 0], c.clone());
        let sign = if k % 2 == 0 { -1 } else { 1 };
        s.add_monomial(vec![0, k], c * Rational::from(sign));
    }
    edge_series_general(&s, max_degree)
}

/// `(1 - exp(S)) / (psi+ + psi-)` for an arbitrary exponent series `S`.
pub fn edge_series_general(exponent: &Series, max_degree: u32) -> Result<Series> {
    let e = exp_truncated(exponent, max_degree + 1)?;
    let mut num = Series::one(vec![1, 1]);
    num.add_assign(&e.scale(&Rational::from(-1)));
    divide_by_sum(&num)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn amb(g: u32, n: usize) -> Ambient {
        Ambient { g, n, m: 1 }
    }

    #[test]
    fn exp_examples() {
        let x = Series::variable(vec![1], 0, q("1"));
        let e = exp_truncated(&x, 2).unwrap();
        assert_eq!(e.coeff(&[0]), q("1"));
        assert_eq!(e.coeff(&[1]), q("1"));
        assert_eq!(e.coeff(&[2]), q("1/2"));
        assert_eq!(e.coeff(&[3]), q("0"));
        assert_eq!(exp_truncated(&Series::zero(vec![1]), 4).unwrap(), Series::one(vec![1]));
        assert_eq!(exp_truncated(&Series::one(vec![1]), 2), Err(Error::NonNilpotentInput));
    }

    #[test]
    fn edge_series_examples() {
        let x = q("3/7");
        let s = edge_series(&[-&x], 1).unwrap();
        assert_eq!(s.coeff(&[0, 0]), x);
        assert_eq!(s.coeff(&[1, 0]), -(&x * &x) / Rational::from(2));
        assert_eq!(s.coeff(&[0, 1]), -(&x * &x) / Rational::from(2));
        assert!(edge_series(&[], 3).unwrap().is_zero());
        // a lone psi+ is not divisible by the sum
        let bad = Series::variable(vec![1, 1], 0, q("1"));
        assert_eq!(edge_series_general(&bad, 2), Err(Error::NotDivisible));
    }

    #[test]
    fn edge_series_higher_terms_divide() {
        let cs = [q("1/3"), q("-2/5"), q("7/11"), q("1/13")];
        let s = edge_series(&cs, 3).unwrap();
        // multiply back and compare with 1 - exp(S)
        let mut sum = Series::zero(vec![1, 1]);
        sum.add_monomial(vec![1, 0], q("1"));
        sum.add_monomial(vec![0, 1], q("1"));
        let back = s.mul_truncated(&sum, 4);
        let mut expo = Series::zero(vec![1, 1]);
        for (i, c) in cs.iter().enumerate() {
            let k = i as u32 + 1;
            expo.add_monomial(vec![k, 0], c.clone());
            expo.add_monomial(vec![0, k], c * Rational::from(if k % 2 == 0 { -1 } else { 1 }));
        }
        let mut num = Series::one(vec![1, 1]);
        num.add_assign(&exp_truncated(&expo, 4).unwrap().scale(&q("-1")));
        assert_eq!(back, num);
    }

    #[test]
    fn class_algebra() {
        let a = amb(1, 1);
        let g = Arc::new(StableGraph::smooth(1, 1));
        let mut c = TautClass::zero(a);
        let mut k = TermKey::stratum(g.clone(), vec![Sector(0)]);
        k.psi[0] = 1;
        c.add_term(k.clone(), q("2/3"));
        c.add_term(TermKey::stratum(g, vec![Sector(0)]), q("1"));
        assert_eq!(c.scale(&q("1")), c);
        assert!(c.add(&c.scale(&q("-1"))).unwrap().is_empty());
        assert_eq!(c.truncate(0).len(), 1);
        assert_eq!(c.truncate(1).truncate(0), c.truncate(0));
        assert!(matches!(c.add(&TautClass::zero(amb(0, 3))), Err(Error::AmbientMismatch(_))));
        // psi^2 on Mbar_{1,1} is beyond dimension and dropped
        let mut k2 = k;
        k2.psi[0] = 2;
        let mut d = TautClass::zero(a);
        d.add_term(k2, q("5"));
        assert!(d.is_empty());
    }

    #[test]
    fn canonical_keys_merge_symmetric_terms() {
        let lp = Arc::new(StableGraph::new(vec![0], vec![0, 0], vec![(0, 0)]).unwrap());
        let mut c = TautClass::zero(amb(1, 2));
        let mut k1 = TermKey::stratum(lp.clone(), vec![Sector(0); 4]);
        k1.psi[2] = 1;
        let mut k2 = TermKey::stratum(lp, vec![Sector(0); 4]);
        k2.psi[3] = 1;
        c.add_term(k1, q("1"));
        c.add_term(k2, q("1"));
        assert_eq!(c.len(), 1);
        assert_eq!(c.terms().next().unwrap().1, &q("2"));
        let json = serde_json::to_string(&c.to_json()).unwrap();
        assert_eq!(
            json,
            r#"[{"graph":"v0:g=0|L0@v0;L1@v0|h2@v0-h3@v0","chi":[0,0,0,0],"psi":{"3":1},"kappa":{},"coeff":"2"}]"#
        );
    }
}
