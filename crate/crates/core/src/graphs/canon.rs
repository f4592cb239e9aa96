//! Canonical labeling and automorphism groups.
//!
//! Vertices are first split into classes by an isomorphism-invariant colour
//! refinement; the canonical form is then the lexicographically smallest
//! encoding among all vertex orderings that respect the colour order.

use std::collections::BTreeMap;

use super::StableGraph;

/// A structure-preserving relabeling: vertex `v` goes to `vertex_perm[v]`,
/// half-edge `h` to `half_edge_perm[h]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    pub vertex_perm: Vec<usize>,
    pub half_edge_perm: Vec<usize>,
}

type Encoding = (Vec<usize>, Vec<(usize, usize)>);

/// Stable colour classes of the vertices, as a colour index per vertex.
fn refine_colours(g: &StableGraph) -> Vec<usize> {
    let nv = g.num_vertices();
    let mut adj = vec![vec![0usize; nv]; nv];
    for &(a, b) in g.edges() {
        adj[a][b] += 1;
        if a != b {
            adj[b][a] += 1;
        }
    }
    let base: Vec<(u32, Vec<usize>, usize, usize)> = (0..nv)
        .map(|v| {
            let legs: Vec<usize> = (0..g.num_legs()).filter(|&i| g.legs()[i] == v).collect();
            (g.genera()[v], legs, adj[v][v], g.valence(v))
        })
        .collect();
    let mut colour = rank(&base);
    loop {
        let sig: Vec<(usize, Vec<(usize, usize)>)> = (0..nv)
            .map(|v| {
                let mut nb: Vec<(usize, usize)> = (0..nv)
                    .filter(|&u| u != v && adj[v][u] > 0)
                    .map(|u| (colour[u], adj[v][u]))
                    .collect();
                nb.sort_unstable();
                (colour[v], nb)
            })
            .collect();
        let next = rank(&sig);
        let classes = |c: &[usize]| c.iter().max().map_or(0, |m| m + 1);
        if classes(&next) == classes(&colour) {
            return next;
        }
        colour = next;
    }
}

fn rank<T: Ord + Clone>(items: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = items.to_vec();
    sorted.sort();
    sorted.dedup();
    items.iter().map(|x| sorted.binary_search(x).expect("present")).collect()
}

/// Calls `f` with every vertex ordering (`order[new] = old`) that lists the
/// colour classes in increasing colour order.
fn for_each_ordering(colour: &[usize], mut f: impl FnMut(&[usize])) {
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colour.iter().enumerate() {
        blocks.entry(c).or_default().push(v);
    }
    let blocks: Vec<Vec<usize>> = blocks.into_values().collect();
    let mut order = Vec::with_capacity(colour.len());
    fn run(blocks: &[Vec<usize>], order: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        fn go(blocks: &[Vec<usize>], bi: usize, order: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
            if bi == blocks.len() {
                f(order);
                return;
            }
            let mut used = vec![false; blocks[bi].len()];
            perm_block(blocks, bi, &mut used, order, f);
        }
        fn perm_block(
            blocks: &[Vec<usize>],
            bi: usize,
            used: &mut Vec<bool>,
            order: &mut Vec<usize>,
            f: &mut dyn FnMut(&[usize]),
        ) {
            if used.iter().all(|&u| u) {
                go(blocks, bi + 1, order, f);
                return;
            }
            for i in 0..used.len() {
                if !used[i] {
                    used[i] = true;
                    order.push(blocks[bi][i]);
                    perm_block(blocks, bi, used, order, f);
                    order.pop();
                    used[i] = false;
                }
            }
        }
        go(blocks, 0, order, f);
    }
    run(&blocks, &mut order, &mut f);
}

fn encode(g: &StableGraph, new_of_old: &[usize]) -> Encoding {
    let legs = g.legs().iter().map(|&v| new_of_old[v]).collect();
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (new_of_old[a], new_of_old[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    edges.sort_unstable();
    (legs, edges)
}

fn inverse(order: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        inv[old] = new;
    }
    inv
}

/// Canonical representative of the isomorphism class of `graph`.
pub fn canonicalize(graph: &StableGraph) -> StableGraph {
    let colour = refine_colours(graph);
    let mut best: Option<(Encoding, Vec<usize>)> = None;
    for_each_ordering(&colour, |order| {
        let new_of_old = inverse(order);
        let enc = encode(graph, &new_of_old);
        if best.as_ref().map_or(true, |(b, _)| enc < *b) {
            best = Some((enc, order.to_vec()));
        }
    });
    let ((legs, edges), order) = best.expect("at least one ordering");
    let genera = order.iter().map(|&old| graph.genera()[old]).collect();
    StableGraph::raw(genera, legs, edges)
}

/// All automorphisms of `graph`, which must be in canonical form (edges
/// stored with `a <= b` and sorted).
pub(super) fn automorphisms(graph: &StableGraph) -> Vec<Automorphism> {
    let colour = refine_colours(graph);
    let own = encode(graph, &(0..graph.num_vertices()).collect::<Vec<_>>());
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (e, &(a, b)) in graph.edges().iter().enumerate() {
        groups.entry((a.min(b), a.max(b))).or_default().push(e);
    }
    let mut out = Vec::new();
    for_each_ordering(&colour, |order| {
        let pi = inverse(order);
        if encode(graph, &pi) != own || order.iter().enumerate().any(|(i, &o)| graph.genera()[i] != graph.genera()[o]) {
            return;
        }
        // Per edge group: the target group and the list of edge-level choices.
        let mut choices: Vec<Vec<Vec<(usize, usize, bool)>>> = Vec::new();
        for (&(u, v), src) in &groups {
            let key = (pi[u].min(pi[v]), pi[u].max(pi[v]));
            let dst = &groups[&key];
            let mut options = Vec::new();
            permutations(dst.len(), &mut |p| {
                let base: Vec<(usize, usize)> = src.iter().zip(p).map(|(&e, &j)| (e, dst[j])).collect();
                if u == v {
                    for flips in 0..(1u32 << base.len()) {
                        options.push(
                            base.iter()
                                .enumerate()
                                .map(|(i, &(e, f))| (e, f, flips >> i & 1 == 1))
                                .collect(),
                        );
                    }
                } else {
                    options.push(
                        base.iter()
                            .map(|&(e, f)| (e, f, pi[graph.edges()[e].0] != graph.edges()[f].0))
                            .collect(),
                    );
                }
            });
            choices.push(options);
        }
        let n = graph.num_legs();
        let mut pick = vec![0usize; choices.len()];
        loop {
            let mut hperm: Vec<usize> = (0..graph.num_half_edges()).collect();
            for (gi, &c) in pick.iter().enumerate() {
                for &(e, f, swap) in &choices[gi][c] {
                    let (ep, em) = (n + 2 * e, n + 2 * e + 1);
                    let (fp, fm) = (n + 2 * f, n + 2 * f + 1);
                    if swap {
                        hperm[ep] = fm;
                        hperm[em] = fp;
                    } else {
                        hperm[ep] = fp;
                        hperm[em] = fm;
                    }
                }
            }
            out.push(Automorphism { vertex_perm: pi.clone(), half_edge_perm: hperm });
            // odometer increment
            let mut i = 0;
            loop {
                if i == pick.len() {
                    return;
                }
                pick[i] += 1;
                if pick[i] < choices[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    });
    out
}

fn permutations(k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(k: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for j in 0..k {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(k, cur, used, f);
                cur.pop();
                used[j] = false;
            }
        }
    }
    rec(k, &mut Vec::with_capacity(k), &mut vec![false; k], f);
}

/// Reference automorphism count: tries every permutation of the non-leg
/// half-edges. Only practical for small graphs.
pub fn automorphisms_brute_force(graph: &StableGraph) -> u64 {
    let n = graph.num_legs();
    let h = graph.num_half_edges();
    let nv = graph.num_vertices();
    let mut count = 0u64;
    permutations(h - n, &mut |p| {
        let sigma = |x: usize| if x < n { x } else { n + p[x - n] };
        for x in n..h {
            if graph.partner(sigma(x)) != graph.partner(x).map(sigma) {
                return;
            }
        }
        let mut vmap = vec![usize::MAX; nv];
        for x in 0..h {
            let (a, b) = (graph.vertex_of(x), graph.vertex_of(sigma(x)));
            if vmap[a] == usize::MAX {
                vmap[a] = b;
            } else if vmap[a] != b {
                return;
            }
        }
        for v in 0..nv {
            if vmap[v] == usize::MAX {
                vmap[v] = v;
            }
        }
        let mut seen = vec![false; nv];
        for v in 0..nv {
            if seen[vmap[v]] || graph.genera()[v] != graph.genera()[vmap[v]] {
                return;
            }
            seen[vmap[v]] = true;
        }
        count += 1;
    });
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabeled_copies_agree() {
        let a = StableGraph::raw(vec![0, 1, 0], vec![0, 2, 2], vec![(0, 1), (1, 2), (0, 2)]);
        let b = StableGraph::raw(vec![0, 0, 1], vec![1, 0, 0], vec![(2, 0), (1, 2), (1, 0)]);
        let ca = canonicalize(&a);
        assert_eq!(ca.encoding(), canonicalize(&b).encoding());
        assert_eq!(canonicalize(&ca).encoding(), ca.encoding());
    }

    #[test]
    fn distinct_splits_of_four_legs() {
        let a = StableGraph::raw(vec![0, 0], vec![0, 0, 1, 1], vec![(0, 1)]);
        let b = StableGraph::raw(vec![0, 0], vec![0, 1, 0, 1], vec![(0, 1)]);
        assert_ne!(canonicalize(&a).encoding(), canonicalize(&b).encoding());
    }

    #[test]
    fn fast_and_brute_force_agree() {
        let cases = [
            StableGraph::raw(vec![0], vec![0], vec![(0, 0)]),
            StableGraph::raw(vec![0, 0], vec![0, 1], vec![(0, 1), (0, 1)]),
            StableGraph::raw(vec![0, 0], vec![], vec![(0, 1), (0, 1), (0, 1)]),
            StableGraph::raw(vec![0], vec![0], vec![(0, 0), (0, 0)]),
            StableGraph::raw(vec![0, 0], vec![], vec![(0, 0), (0, 1), (1, 1)]),
            StableGraph::raw(vec![1, 1], vec![], vec![(0, 1)]),
        ];
        for g in cases {
            let c = canonicalize(&g);
            assert_eq!(c.automorphism_order(), automorphisms_brute_force(&c), "{c}");
        }
    }
}
