//! Orbifold decorations of stable graphs and weight functions modulo `r`.
//!
//! A weight function assigns `w(h) in [0, r)` to every half-edge so that
//!
//! 1. a leg carrying the lift `a` has `w = floor([a]_r)`;
//! 2. on an edge, `w(h+) + w(h-)` is `0 mod r` when the sector of `h+` has
//!    age zero and `r - 1 mod r` otherwise;
//! 3. at a vertex, `sum w(h) = A(v) mod r` with `A(v) = -sum age(chi(h))`.
//!
//! Solutions are produced over a spanning tree: weights on edges outside the
//! tree are free, and the tree edges are then forced leaf-first.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::graphs::StableGraph;
use crate::orbifold::{age, leg_weight, BundleRep, Sector};

/// Sector assignment on the half-edges of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decoration {
    graph: Arc<StableGraph>,
    chi: Vec<Sector>,
}

impl Decoration {
    /// Checks the leg count, edge-inverse and vertex-sum conditions.
    pub fn new(graph: Arc<StableGraph>, chi: Vec<Sector>, m: u32) -> Result<Self> {
        if chi.len() != graph.num_half_edges() {
            return Err(Error::InvalidInput(format!(
                "decoration has {} sectors for {} half-edges",
                chi.len(),
                graph.num_half_edges()
            )));
        }
        if chi.iter().any(|s| s.0 >= m) {
            return Err(Error::InvalidInput(format!("sector outside Z_{m}")));
        }
        for e in 0..graph.num_edges() {
            let (hp, hm) = graph.edge_halves(e);
            if chi[hm] != chi[hp].inverse(m) {
                return Err(Error::InvalidInput(format!("edge {e} sectors are not inverse")));
            }
        }
        for v in 0..graph.num_vertices() {
            let total: u64 = graph.half_edges_at(v).iter().map(|&h| chi[h].0 as u64).sum();
            if total % m as u64 != 0 {
                return Err(Error::InvalidInput(format!("sectors at vertex {v} do not sum to 0")));
            }
        }
        Ok(Decoration { graph, chi })
    }

    pub fn graph(&self) -> &Arc<StableGraph> {
        &self.graph
    }

    pub fn chi(&self) -> &[Sector] {
        &self.chi
    }
}

/// All decorations extending the given leg sectors, in lexicographic order of
/// the `+` sectors of the edges.
pub fn enumerate_decorations(
    graph: &Arc<StableGraph>,
    rep: BundleRep,
    leg_sectors: &[Sector],
) -> Result<Vec<Decoration>> {
    rep.validate()?;
    if leg_sectors.len() != graph.num_legs() {
        return Err(Error::InvalidInput(format!(
            "{} leg sectors for {} legs",
            leg_sectors.len(),
            graph.num_legs()
        )));
    }
    for &s in leg_sectors {
        rep.check_sector(s)?;
    }
    let m = rep.m;
    let ne = graph.num_edges();
    let n = graph.num_legs();
    let nv = graph.num_vertices();
    let mut vertex_sum = vec![0u32; nv];
    for (i, s) in leg_sectors.iter().enumerate() {
        vertex_sum[graph.legs()[i]] += s.0;
    }
    let mut out = Vec::new();
    let mut edge_sec = vec![0u32; ne];
    loop {
        let mut sums = vertex_sum.clone();
        for (e, &(a, b)) in graph.edges().iter().enumerate() {
            sums[a] += edge_sec[e];
            sums[b] += (m - edge_sec[e]) % m;
        }
        if sums.iter().all(|s| s % m == 0) {
            let mut chi: Vec<Sector> = leg_sectors.to_vec();
            chi.resize(n + 2 * ne, Sector(0));
            for e in 0..ne {
                chi[n + 2 * e] = Sector(edge_sec[e]);
                chi[n + 2 * e + 1] = Sector(edge_sec[e]).inverse(m);
            }
            out.push(Decoration { graph: graph.clone(), chi });
        }
        // odometer, last edge fastest
        let mut i = ne;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            edge_sec[i] += 1;
            if edge_sec[i] < m {
                break;
            }
            edge_sec[i] = 0;
        }
    }
}

/// `A(v) = -sum_{h at v} age(chi(h))`, an integer for valid decorations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VertexOffset(i64);

impl VertexOffset {
    pub fn new(value: &Rational) -> Result<Self> {
        if !value.is_integer() {
            return Err(Error::NonIntegralOffset(value.clone()));
        }
        Ok(VertexOffset(value.to_i64().expect("small offset")))
    }

    pub fn value(self) -> i64 {
        self.0
    }
}

pub fn vertex_offset(rep: BundleRep, dec: &Decoration, v: usize) -> Result<VertexOffset> {
    let total: Rational = dec.graph.half_edges_at(v).iter().map(|&h| age(rep, dec.chi[h])).sum();
    VertexOffset::new(&-total)
}

/// A weight per half-edge, for the decoration it was produced from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightFunction {
    pub r: u64,
    pub w: Vec<u64>,
}

fn check_lifts(dec: &Decoration, rep: BundleRep, lifts: &[Rational], r: u64) -> Result<Vec<u64>> {
    if lifts.len() != dec.graph.num_legs() {
        return Err(Error::InvalidInput(format!(
            "{} lifts for {} legs",
            lifts.len(),
            dec.graph.num_legs()
        )));
    }
    if r == 0 {
        return Err(Error::InvalidInput("root order r must be positive".into()));
    }
    lifts.iter().enumerate().map(|(i, a)| leg_weight(rep, dec.chi[i], a, r)).collect()
}

/// Precomputed spanning-tree data for solving the weight congruences of one
/// decoration at one `r`.
#[derive(Debug, Clone)]
pub struct WeightSystem {
    r: u64,
    graph: Arc<StableGraph>,
    leg_w: Vec<u64>,
    /// `0` or `r - 1` per edge.
    edge_target: Vec<u64>,
    offset: Vec<u64>,
    at_vertex: Vec<Vec<usize>>,
    free_edges: Vec<usize>,
    /// Non-root vertices, children before parents, with the half-edge of the
    /// parent edge sitting at the vertex.
    solve_order: Vec<(usize, usize)>,
    root_ok: bool,
}

impl WeightSystem {
    pub fn new(dec: &Decoration, rep: BundleRep, lifts: &[Rational], r: u64) -> Result<Self> {
        let leg_w = check_lifts(dec, rep, lifts, r)?;
        let g = dec.graph.clone();
        let nv = g.num_vertices();
        let ri = r as i64;
        let offset = (0..nv)
            .map(|v| vertex_offset(rep, dec, v).map(|o| o.value().rem_euclid(ri) as u64))
            .collect::<Result<Vec<_>>>()?;
        let edge_target = (0..g.num_edges())
            .map(|e| if age(rep, dec.chi[g.edge_halves(e).0]).is_zero() { 0 } else { r - 1 })
            .collect();
        let at_vertex = (0..nv).map(|v| g.half_edges_at(v)).collect();

        // BFS spanning tree from vertex 0.
        let mut parent_half = vec![usize::MAX; nv];
        let mut in_tree = vec![false; g.num_edges()];
        let mut seen = vec![false; nv];
        let mut queue = std::collections::VecDeque::from([0usize]);
        let mut bfs = Vec::new();
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            bfs.push(v);
            for (e, &(a, b)) in g.edges().iter().enumerate() {
                let (hp, hm) = g.edge_halves(e);
                let next = if a == v && !seen[b] {
                    Some((b, hm))
                } else if b == v && !seen[a] {
                    Some((a, hp))
                } else {
                    None
                };
                if let Some((u, h)) = next {
                    seen[u] = true;
                    in_tree[e] = true;
                    parent_half[u] = h;
                    queue.push_back(u);
                }
            }
        }
        let solve_order = bfs.iter().rev().filter(|&&v| v != 0).map(|&v| (v, parent_half[v])).collect();
        let free_edges = (0..g.num_edges()).filter(|&e| !in_tree[e]).collect();

        let mut sys = WeightSystem {
            r,
            graph: g,
            leg_w,
            edge_target,
            offset,
            at_vertex,
            free_edges,
            solve_order,
            root_ok: false,
        };
        let mut w = vec![0; sys.graph.num_half_edges()];
        sys.root_ok = sys.solve(&vec![0; sys.free_edges.len()], &mut w);
        debug_assert_eq!(sys.root_ok, sys.globally_consistent());
        Ok(sys)
    }

    /// Summing the vertex conditions over all vertices must agree with the
    /// leg and edge conditions: `sum A(v) = sum legs + sum edge targets`.
    fn globally_consistent(&self) -> bool {
        let r = self.r as u128;
        let lhs: u128 = self.offset.iter().map(|&x| x as u128).sum::<u128>() % r;
        let rhs: u128 = (self.leg_w.iter().map(|&x| x as u128).sum::<u128>()
            + self.edge_target.iter().map(|&x| x as u128).sum::<u128>())
            % r;
        lhs == rhs
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn h1(&self) -> usize {
        self.free_edges.len()
    }

    pub fn free_edges(&self) -> &[usize] {
        &self.free_edges
    }

    pub fn is_solvable(&self) -> bool {
        self.root_ok
    }

    /// `r^{h1}` when solvable, else 0.
    pub fn count(&self) -> u64 {
        if self.root_ok {
            self.r.pow(self.h1() as u32)
        } else {
            0
        }
    }

    fn partner_value(&self, h: usize, value: u64) -> u64 {
        let e = (h - self.graph.num_legs()) / 2;
        (self.edge_target[e] + self.r - value) % self.r
    }

    /// Fills `w` from the free edge values (`+` side); returns whether the
    /// root vertex condition holds.
    pub fn solve(&self, free: &[u64], w: &mut [u64]) -> bool {
        let r = self.r;
        let g = &self.graph;
        w[..g.num_legs()].copy_from_slice(&self.leg_w);
        for (&e, &val) in self.free_edges.iter().zip(free) {
            let (hp, hm) = g.edge_halves(e);
            w[hp] = val;
            w[hm] = self.partner_value(hp, val);
        }
        for &(v, h) in &self.solve_order {
            let others: u64 =
                self.at_vertex[v].iter().filter(|&&x| x != h).fold(0, |acc, &x| (acc + w[x]) % r);
            w[h] = (self.offset[v] + r - others) % r;
            let p = g.partner(h).expect("tree half-edge");
            w[p] = self.partner_value(h, w[h]);
        }
        let root: u64 = self.at_vertex[0].iter().fold(0, |acc, &x| (acc + w[x]) % r);
        root == self.offset[0]
    }

    /// Calls `f` on every weight function, free edges in lexicographic order.
    pub fn for_each(&self, mut f: impl FnMut(&[u64])) {
        if !self.root_ok {
            return;
        }
        let k = self.free_edges.len();
        let mut free = vec![0u64; k];
        let mut w = vec![0u64; self.graph.num_half_edges()];
        loop {
            let ok = self.solve(&free, &mut w);
            debug_assert!(ok);
            f(&w);
            let mut i = k;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                free[i] += 1;
                if free[i] < self.r {
                    break;
                }
                free[i] = 0;
            }
        }
    }
}

pub fn enumerate_weights(
    dec: &Decoration,
    rep: BundleRep,
    lifts: &[Rational],
    r: u64,
) -> Result<Vec<WeightFunction>> {
    let sys = WeightSystem::new(dec, rep, lifts, r)?;
    let mut out = Vec::new();
    sys.for_each(|w| out.push(WeightFunction { r, w: w.to_vec() }));
    Ok(out)
}

pub fn weight_count(dec: &Decoration, rep: BundleRep, lifts: &[Rational], r: u64) -> Result<u64> {
    Ok(WeightSystem::new(dec, rep, lifts, r)?.count())
}

/// Checks the three weight conditions directly, independent of the solver.
pub fn is_valid_weight(
    dec: &Decoration,
    rep: BundleRep,
    lifts: &[Rational],
    wf: &WeightFunction,
) -> Result<bool> {
    let r = wf.r;
    let leg_w = check_lifts(dec, rep, lifts, r)?;
    let g = &dec.graph;
    if wf.w.len() != g.num_half_edges() || wf.w.iter().any(|&x| x >= r) {
        return Ok(false);
    }
    if wf.w[..g.num_legs()] != leg_w[..] {
        return Ok(false);
    }
    for e in 0..g.num_edges() {
        let (hp, hm) = g.edge_halves(e);
        let target = if age(rep, dec.chi[hp]).is_zero() { 0 } else { r - 1 };
        if (wf.w[hp] + wf.w[hm]) % r != target {
            return Ok(false);
        }
    }
    for v in 0..g.num_vertices() {
        let a = vertex_offset(rep, dec, v)?.value().rem_euclid(r as i64) as u64;
        let s: u64 = g.half_edges_at(v).iter().map(|&h| wf.w[h]).sum();
        if s % r != a {
            return Ok(false);
        }
    }
    Ok(true)
}

impl std::fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.w.iter().enumerate().map(|(h, x)| format!("w(h{h})={x}")).collect();
        write!(f, "r={} {}", self.r, parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn graph(genera: Vec<u32>, legs: Vec<usize>, edges: Vec<(usize, usize)>) -> Arc<StableGraph> {
        Arc::new(StableGraph::new(genera, legs, edges).unwrap())
    }

    #[test]
    fn decoration_examples() {
        let t = BundleRep::trivial();
        for g in crate::graphs::enumerate_graphs(1, 2).unwrap().iter() {
            assert_eq!(enumerate_decorations(g, t, &[Sector(0); 2]).unwrap().len(), 1);
        }
        let rep2 = BundleRep::new(2, 1).unwrap();
        let lp = graph(vec![0], vec![0], vec![(0, 0)]);
        let decs = enumerate_decorations(&lp, rep2, &[Sector(0)]).unwrap();
        assert_eq!(decs.len(), 2);
        assert_eq!(decs[1].chi(), &[Sector(0), Sector(1), Sector(1)]);
        let smooth = Arc::new(StableGraph::smooth(1, 2));
        assert!(enumerate_decorations(&smooth, rep2, &[Sector(1), Sector(0)]).unwrap().is_empty());
    }

    #[test]
    fn offset_examples() {
        let g = Arc::new(StableGraph::smooth(1, 2));
        let t = BundleRep::trivial();
        let d = Decoration::new(g.clone(), vec![Sector(0); 2], 1).unwrap();
        assert_eq!(vertex_offset(t, &d, 0).unwrap().value(), 0);
        let rep = BundleRep::new(2, 1).unwrap();
        let d = Decoration::new(g.clone(), vec![Sector(1), Sector(1)], 2).unwrap();
        assert_eq!(vertex_offset(rep, &d, 0).unwrap().value(), -1);
        let rep = BundleRep::new(3, 1).unwrap();
        let d = Decoration::new(g, vec![Sector(1), Sector(2)], 3).unwrap();
        assert_eq!(vertex_offset(rep, &d, 0).unwrap().value(), -1);
        assert!(VertexOffset::new(&q("1/2")).is_err());
    }

    #[test]
    fn weight_examples() {
        let t = BundleRep::trivial();
        let smooth = Arc::new(StableGraph::smooth(1, 2));
        let d = Decoration::new(smooth, vec![Sector(0); 2], 1).unwrap();
        let ws = enumerate_weights(&d, t, &[q("2"), q("-2")], 7).unwrap();
        assert_eq!(ws, vec![WeightFunction { r: 7, w: vec![2, 5] }]);
        assert_eq!(weight_count(&d, t, &[q("1"), q("-2")], 5).unwrap(), 0);

        let lp = graph(vec![0], vec![0], vec![(0, 0)]);
        let d = Decoration::new(lp, vec![Sector(0); 3], 1).unwrap();
        let ws = enumerate_weights(&d, t, &[q("0")], 5).unwrap();
        assert_eq!(ws.len(), 5);
        for wf in &ws {
            assert_eq!((wf.w[1] + wf.w[2]) % 5, 0);
            assert!(is_valid_weight(&d, t, &[q("0")], wf).unwrap());
        }
    }

    #[test]
    fn counts_are_powers_of_r() {
        let t = BundleRep::trivial();
        let tree = graph(vec![0, 0], vec![0, 0, 1, 1], vec![(0, 1)]);
        let d = Decoration::new(tree, vec![Sector(0); 6], 1).unwrap();
        let lifts = [q("1"), q("2"), q("-1"), q("-2")];
        for r in [5, 7] {
            assert_eq!(weight_count(&d, t, &lifts, r).unwrap(), 1);
        }
        let banana = graph(vec![0, 0], vec![0, 1], vec![(0, 1), (0, 1)]);
        let d = Decoration::new(banana, vec![Sector(0); 6], 1).unwrap();
        assert_eq!(weight_count(&d, t, &[q("3"), q("-3")], 5).unwrap(), 5);
    }
}
