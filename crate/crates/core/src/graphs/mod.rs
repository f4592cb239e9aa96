//! Stable graphs of genus `g` with `n` ordered legs.
//!
//! Half-edges are numbered globally: leg `i` is half-edge `i`, and edge `e`
//! owns half-edges `n + 2e` (the `+` side, at `edges[e].0`) and `n + 2e + 1`
//! (the `-` side, at `edges[e].1`). Self-edges are allowed.
//!
//! Text encoding (stable, used in JSON output):
//!
//! ```text
//! v0:g=0;v1:g=1|L0@v0;L1@v0|h2@v0-h3@v1
//! ```
//!
//! vertices, then legs, then edges as half-edge pairs, `|`-separated.

mod canon;
mod enumerate;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

pub use canon::{automorphisms_brute_force, canonicalize, Automorphism};
pub use enumerate::{enumerate_graphs, enumerate_graphs_max_edges};

use crate::error::{Error, Result};

pub struct StableGraph {
    genera: Vec<u32>,
    legs: Vec<usize>,
    edges: Vec<(usize, usize)>,
    auts: OnceLock<Vec<Automorphism>>,
}

impl Clone for StableGraph {
    fn clone(&self) -> Self {
        StableGraph::raw(self.genera.clone(), self.legs.clone(), self.edges.clone())
    }
}

impl StableGraph {
    pub(crate) fn raw(genera: Vec<u32>, legs: Vec<usize>, edges: Vec<(usize, usize)>) -> Self {
        StableGraph { genera, legs, edges, auts: OnceLock::new() }
    }

    /// Validates the data and returns the canonical representative.
    pub fn new(genera: Vec<u32>, legs: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = StableGraph::raw(genera, legs, edges);
        g.validate()?;
        Ok(canonicalize(&g))
    }

    /// Single vertex of genus `g` carrying all `n` legs.
    pub fn smooth(g: u32, n: usize) -> Self {
        StableGraph::raw(vec![g], vec![0; n], Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        let nv = self.genera.len();
        if nv == 0 {
            return Err(Error::InvalidInput("graph has no vertices".into()));
        }
        if self.legs.iter().chain(self.edges.iter().flat_map(|(a, b)| [a, b])).any(|&v| v >= nv) {
            return Err(Error::InvalidInput("half-edge attached to a missing vertex".into()));
        }
        if !self.is_connected() {
            return Err(Error::InvalidInput("graph is not connected".into()));
        }
        for v in 0..nv {
            if 2 * self.genera[v] as i64 - 2 + self.valence(v) as i64 <= 0 {
                return Err(Error::InvalidInput(format!("vertex {v} is unstable")));
            }
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let nv = self.genera.len();
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.legs.len() + 2 * self.edges.len()
    }

    /// Total genus `sum g(v) + h1`.
    pub fn genus(&self) -> u32 {
        self.genera.iter().sum::<u32>() + self.h1() as u32
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn h1(&self) -> usize {
        self.edges.len() + 1 - self.genera.len()
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        let n = self.legs.len();
        if h < n {
            self.legs[h]
        } else {
            let e = (h - n) / 2;
            if (h - n) % 2 == 0 {
                self.edges[e].0
            } else {
                self.edges[e].1
            }
        }
    }

    /// The other half of an edge half-edge; `None` for legs.
    pub fn partner(&self, h: usize) -> Option<usize> {
        let n = self.legs.len();
        (h >= n).then(|| if (h - n) % 2 == 0 { h + 1 } else { h - 1 })
    }

    pub fn is_leg(&self, h: usize) -> bool {
        h < self.legs.len()
    }

    /// Half-edge ids `(plus, minus)` of edge `e`.
    pub fn edge_halves(&self, e: usize) -> (usize, usize) {
        let n = self.legs.len();
        (n + 2 * e, n + 2 * e + 1)
    }

    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.num_half_edges()).filter(|&h| self.vertex_of(h) == v).collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.legs.iter().filter(|&&x| x == v).count()
            + self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum::<usize>()
    }

    /// `3 g(v) - 3 + n(v)`.
    pub fn vertex_dim(&self, v: usize) -> u32 {
        (3 * self.genera[v] as i64 - 3 + self.valence(v) as i64) as u32
    }

    /// Automorphisms of a canonical graph: vertex and half-edge permutations
    /// fixing legs and preserving genus, incidence and the edge involution.
    pub fn automorphisms(&self) -> &[Automorphism] {
        self.auts.get_or_init(|| canon::automorphisms(self))
    }

    pub fn automorphism_order(&self) -> u64 {
        self.automorphisms().len() as u64
    }

    pub fn encoding(&self) -> String {
        self.to_string()
    }

    fn key(&self) -> (usize, &[u32], &[usize], &[(usize, usize)]) {
        (self.edges.len(), &self.genera, &self.legs, &self.edges)
    }
}

/// `|E| - |V| + 1`.
pub fn h1(graph: &StableGraph) -> usize {
    graph.h1()
}

pub fn automorphism_order(graph: &StableGraph) -> u64 {
    graph.automorphism_order()
}

impl PartialEq for StableGraph {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for StableGraph {}

impl Hash for StableGraph {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

impl PartialOrd for StableGraph {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for StableGraph {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for StableGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verts: Vec<String> =
            self.genera.iter().enumerate().map(|(i, g)| format!("v{i}:g={g}")).collect();
        let legs: Vec<String> =
            self.legs.iter().enumerate().map(|(j, v)| format!("L{j}@v{v}")).collect();
        let edges: Vec<String> = (0..self.edges.len())
            .map(|e| {
                let (hp, hm) = self.edge_halves(e);
                format!("h{hp}@v{}-h{hm}@v{}", self.edges[e].0, self.edges[e].1)
            })
            .collect();
        write!(f, "{}|{}|{}", verts.join(";"), legs.join(";"), edges.join(";"))
    }
}

impl fmt::Debug for StableGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
