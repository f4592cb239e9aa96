//! The graph sum at a fixed root order `r`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::TopData;
use crate::error::{Error, Result};
use crate::exact::{bernoulli_eval, bernoulli_number, rational_mod, Rational};
use crate::graphs::{enumerate_graphs_max_edges, StableGraph};
use crate::orbifold::age;
use crate::taut::{edge_series, exp_truncated, Series, TautClass, TermKey};
use crate::weights::{enumerate_decorations, Decoration, WeightSystem};

/// Variable layout for the monomials of one graph: a ψ variable per
/// half-edge, then `kappa_1 .. kappa_kmax` per vertex.
pub(super) struct Layout {
    graph: Arc<StableGraph>,
    kmax: usize,
    var_vertex: Vec<usize>,
    weights: Vec<u32>,
    dims: Vec<u32>,
}

impl Layout {
    pub(super) fn new(graph: &Arc<StableGraph>, kmax: u32) -> Self {
        let kmax = kmax as usize;
        let nh = graph.num_half_edges();
        let nv = graph.num_vertices();
        let mut var_vertex: Vec<usize> = (0..nh).map(|h| graph.vertex_of(h)).collect();
        let mut weights = vec![1; nh];
        for v in 0..nv {
            for k in 1..=kmax {
                var_vertex.push(v);
                weights.push(k as u32);
            }
        }
        let dims = (0..nv).map(|v| graph.vertex_dim(v)).collect();
        Layout { graph: graph.clone(), kmax, var_vertex, weights, dims }
    }

    pub(super) fn weights(&self) -> Vec<u32> {
        self.weights.clone()
    }

    pub(super) fn psi_var(&self, h: usize) -> usize {
        h
    }

    pub(super) fn kappa_var(&self, v: usize, k: usize) -> usize {
        self.graph.num_half_edges() + v * self.kmax + (k - 1)
    }

    /// Per-vertex dimension bound.
    pub(super) fn keep(&self, exps: &[u32]) -> bool {
        let mut load = vec![0u32; self.dims.len()];
        for (i, &e) in exps.iter().enumerate() {
            load[self.var_vertex[i]] += e * self.weights[i];
        }
        load.iter().zip(&self.dims).all(|(l, d)| l <= d)
    }

    pub(super) fn key(&self, chi: &[crate::orbifold::Sector], exps: &[u32]) -> TermKey {
        let nh = self.graph.num_half_edges();
        let psi = exps[..nh].to_vec();
        let kappa = (0..self.graph.num_vertices())
            .map(|v| {
                let mut ks = Vec::new();
                for k in 1..=self.kmax {
                    for _ in 0..exps[self.kappa_var(v, k)] {
                        ks.push(k as u32);
                    }
                }
                ks
            })
            .collect();
        TermKey { graph: self.graph.clone(), chi: chi.to_vec(), psi, kappa }
    }

    /// Places a series in `(psi+, psi-)` on the half-edges `hp`, `hm`.
    pub(super) fn embed_pair(&self, s: &Series, hp: usize, hm: usize) -> Series {
        let mut out = Series::zero(self.weights());
        for (e, c) in s.terms() {
            let mut x = vec![0; self.weights.len()];
            x[hp] += e[0];
            x[hm] += e[1];
            out.add_monomial(x, c.clone());
        }
        out
    }
}

/// `(-1)^{k-1} (k-1)!/(k+1)! B_{k+1}(x)`.
fn ch_coefficient(k: usize, x: &Rational) -> Rational {
    let sign = if k % 2 == 1 { 1 } else { -1 };
    bernoulli_eval(k + 1, x) * Rational::new(sign, (k * (k + 1)) as i64)
}

/// All (graph, decoration) pairs contributing up to degree `d`.
pub(super) fn decorated_graphs(data: &TopData, d: u32) -> Result<Vec<Decoration>> {
    let graphs = enumerate_graphs_max_edges(data.g, data.n(), d as usize)?;
    let mut out = Vec::new();
    for g in graphs.iter() {
        out.extend(enumerate_decorations(g, data.rep, &data.leg_sectors)?);
    }
    Ok(out)
}

/// The degree `<= d` part of the normalized graph sum at root order `r`: a
/// term of degree `d'` carries the factor `r^{2d' - h1} / |Aut|`.
pub fn class_at_r(data: &TopData, d: u32, r: u64) -> Result<TautClass> {
    data.validate()?;
    data.check_degree(d)?;
    if r == 0 {
        return Err(Error::InvalidInput("root order r must be positive".into()));
    }
    let decs = decorated_graphs(data, d)?;
    let parts = decs
        .par_iter()
        .map(|dec| contribution(data, dec, d, r))
        .collect::<Result<Vec<_>>>()?;
    let mut class = TautClass::zero(data.ambient());
    for part in parts {
        for (k, c) in part {
            class.add_term(k, c);
        }
    }
    Ok(class)
}

/// `sum_w prod_e (-c_1(x_e))` with `c_1(x) = B_2(x/r)/2`, in integers: with
/// `X = m x` and `M = m r`, `-c_1 = -(6X^2 - 6XM + M^2) / (12 M^2)`.
fn constant_edge_sum(data: &TopData, dec: &Decoration, sys: &WeightSystem) -> Rational {
    let graph = dec.graph();
    let m = data.rep.m as i128;
    let big_m = m * sys.r() as i128;
    let shifts: Vec<i128> = (0..graph.num_edges())
        .map(|e| {
            let a = age(data.rep, dec.chi()[graph.edge_halves(e).0]) * Rational::from(m as i64);
            a.to_i64().expect("m * age is an integer") as i128
        })
        .collect();
    let mut acc = BigInt::zero();
    sys.for_each(|w| {
        let mut prod = BigInt::one();
        for (e, s) in shifts.iter().enumerate() {
            let x = w[graph.edge_halves(e).0] as i128 * m + s;
            prod *= -(6 * x * x - 6 * x * big_m + big_m * big_m);
        }
        acc += prod;
    });
    let denom = BigInt::from(12 * big_m * big_m).pow(graph.num_edges() as u32);
    Rational::new(acc, denom)
}

fn series_edge_sum(
    layout: &Layout,
    dec: &Decoration,
    sys: &WeightSystem,
    edge_ages: &[Rational],
    budget: u32,
) -> Result<Series> {
    let graph = dec.graph();
    let rq = Rational::from(sys.r() as i64);
    let weights = layout.weights();
    // Embedded edge series per (edge, w(h+)), built on first use.
    let mut table: Vec<Vec<Option<Series>>> = vec![vec![None; sys.r() as usize]; graph.num_edges()];
    let mut edge_sum = Series::zero(weights.clone());
    let mut failure = None;
    sys.for_each(|w| {
        if failure.is_some() {
            return;
        }
        let mut prod = Series::one(weights.clone());
        for e in 0..graph.num_edges() {
            let (hp, hm) = graph.edge_halves(e);
            let slot = &mut table[e][w[hp] as usize];
            if slot.is_none() {
                let x = (Rational::from(w[hp] as i64) + &edge_ages[e]) / &rq;
                let cs: Vec<Rational> = (1..=budget as usize + 1).map(|k| ch_coefficient(k, &x)).collect();
                match edge_series(&cs, budget) {
                    Ok(s) => *slot = Some(layout.embed_pair(&s, hp, hm)),
                    Err(err) => {
                        failure = Some(err);
                        return;
                    }
                }
            }
            prod = prod.mul_filtered(slot.as_ref().expect("filled"), budget, |x| layout.keep(x));
        }
        edge_sum.add_assign(&prod);
    });
    match failure {
        Some(err) => Err(err),
        None => Ok(edge_sum),
    }
}

fn contribution(data: &TopData, dec: &Decoration, d: u32, r: u64) -> Result<Vec<(TermKey, Rational)>> {
    let graph = dec.graph();
    let ne = graph.num_edges() as u32;
    let budget = d - ne;
    let sys = WeightSystem::new(dec, data.rep, &data.lifts, r)?;
    if !sys.is_solvable() {
        return Ok(Vec::new());
    }
    let layout = Layout::new(graph, budget);
    let weights = layout.weights();
    let rq = Rational::from(r as i64);

    // Legs and vertices.
    let mut generator = Series::zero(weights.clone());
    for (i, a) in data.lifts.iter().enumerate() {
        let y = rational_mod(a, r) / &rq;
        for k in 1..=budget as usize {
            let mut e = vec![0; weights.len()];
            e[layout.psi_var(i)] = k as u32;
            generator.add_monomial(e, ch_coefficient(k, &y));
        }
    }
    for v in 0..graph.num_vertices() {
        for k in 1..=budget as usize {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let c = bernoulli_number(k + 1) * Rational::new(sign, (k * (k + 1)) as i64);
            let mut e = vec![0; weights.len()];
            e[layout.kappa_var(v, k)] = 1;
            generator.add_monomial(e, c);
        }
    }
    let local = exp_truncated(&generator, budget)?;

    // Edges, summed over weight functions.
    let edge_ages: Vec<Rational> =
        (0..graph.num_edges()).map(|e| age(data.rep, dec.chi()[graph.edge_halves(e).0])).collect();
    let edge_sum = if budget == 0 {
        Series::one(weights.clone()).scale(&constant_edge_sum(data, dec, &sys))
    } else {
        series_edge_sum(&layout, dec, &sys, &edge_ages, budget)?
    };
    let total = local.mul_filtered(&edge_sum, budget, |x| layout.keep(x));

    let aut = Rational::from(graph.automorphism_order() as i64);
    let h1 = graph.h1() as u32;
    let mut out = Vec::new();
    for (exps, c) in total.terms() {
        let deg = total.degree_of(exps) + ne;
        let scale = rq.pow(2 * deg - h1) / &aut;
        out.push((layout.key(dec.chi(), exps), c * &scale));
    }
    Ok(out)
}
