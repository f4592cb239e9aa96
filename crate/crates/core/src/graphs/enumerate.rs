//! Enumeration of stable graphs by successive degeneration.
//!
//! Every stable graph with `k + 1` edges contracts to one with `k` edges, so
//! all graphs are reached from the smooth graph by repeatedly either adding a
//! self-edge at a vertex of positive genus or splitting a vertex in two along
//! a new edge.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use super::{canonicalize, StableGraph};
use crate::error::{Error, Result};

pub type GraphList = Arc<[Arc<StableGraph>]>;

type CacheCell = Arc<OnceLock<GraphList>>;

fn cache() -> &'static Mutex<HashMap<(u32, usize, usize), CacheCell>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, usize, usize), CacheCell>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// All stable graphs of genus `g` with `n` legs, canonical and sorted by
/// (number of edges, encoding).
pub fn enumerate_graphs(g: u32, n: usize) -> Result<GraphList> {
    enumerate_graphs_max_edges(g, n, usize::MAX)
}

/// Stable graphs of genus `g` with `n` legs and at most `max_edges` edges.
pub fn enumerate_graphs_max_edges(g: u32, n: usize, max_edges: usize) -> Result<GraphList> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::Unstable(2 * g as i64 - 2 + n as i64));
    }
    // A stable graph has at most 3g - 3 + n edges.
    let cap = max_edges.min(3 * g as usize + n - 3);
    let cell = cache()
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .entry((g, n, cap))
        .or_default()
        .clone();
    Ok(cell.get_or_init(|| build(g, n, cap)).clone())
}

fn build(g: u32, n: usize, cap: usize) -> GraphList {
    let mut level: BTreeSet<StableGraph> = BTreeSet::new();
    level.insert(StableGraph::smooth(g, n));
    let mut all: Vec<Arc<StableGraph>> = Vec::new();
    for _ in 0..=cap {
        let mut next = BTreeSet::new();
        for graph in &level {
            for d in degenerations(graph) {
                next.insert(canonicalize(&d));
            }
        }
        all.extend(std::mem::replace(&mut level, next).into_iter().map(Arc::new));
        if level.is_empty() {
            break;
        }
    }
    all.sort();
    all.into()
}

/// Graphs with one more edge contracting onto `graph` (not deduplicated).
fn degenerations(graph: &StableGraph) -> Vec<StableGraph> {
    let mut out = Vec::new();
    let nv = graph.num_vertices();
    for v in 0..nv {
        let gv = graph.genera()[v];
        if gv > 0 {
            let mut genera = graph.genera().to_vec();
            genera[v] -= 1;
            let mut edges = graph.edges().to_vec();
            edges.push((v, v));
            out.push(StableGraph::raw(genera, graph.legs().to_vec(), edges));
        }

        // Items at v: legs, and edge ends (edge, is_second_end).
        enum Item {
            Leg(usize),
            End(usize, bool),
        }
        let mut items = Vec::new();
        for (i, &x) in graph.legs().iter().enumerate() {
            if x == v {
                items.push(Item::Leg(i));
            }
        }
        for (e, &(a, b)) in graph.edges().iter().enumerate() {
            if a == v {
                items.push(Item::End(e, false));
            }
            if b == v {
                items.push(Item::End(e, true));
            }
        }
        let k = items.len();
        for mask in 0u64..(1u64 << k) {
            let moved = mask.count_ones() as i64;
            for g1 in 0..=gv {
                let g2 = gv - g1;
                // stay side: g1 with k - moved items + new edge end
                if 2 * g1 as i64 - 2 + (k as i64 - moved) + 1 <= 0 || 2 * g2 as i64 - 2 + moved + 1 <= 0 {
                    continue;
                }
                let mut genera = graph.genera().to_vec();
                genera[v] = g1;
                genera.push(g2);
                let mut legs = graph.legs().to_vec();
                let mut edges = graph.edges().to_vec();
                for (i, item) in items.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        match *item {
                            Item::Leg(l) => legs[l] = nv,
                            Item::End(e, false) => edges[e].0 = nv,
                            Item::End(e, true) => edges[e].1 = nv,
                        }
                    }
                }
                edges.push((v, nv));
                out.push(StableGraph::raw(genera, legs, edges));
            }
        }
    }
    out
}
