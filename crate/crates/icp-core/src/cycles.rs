//! Minimum-weight non-facial simple cycles under the positive edge weights
//! `w(e) = π − Θ(e)`.
//!
//! The search is exact: for an edge `e = uv` with incident faces `f1` (and
//! `f2`), any non-facial simple cycle through `e` must omit at least one
//! other edge of each incident face, and conversely any cycle through `e`
//! that omits such edges is automatically non-facial because `f1`, `f2` are
//! the only faces containing `e`. So the minimum over shortest `u`–`v` paths
//! in `G − {e, e1, e2}`, taken over all pairs `(e1, e2)` of co-facial edges,
//! is the minimum non-facial cycle weight through `e`; minimizing over all
//! edges gives the global minimum. Boundary edges of a disk patch have one
//! incident face, so their candidates always include the outer boundary.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::angle::AngleAssignment;
use crate::map::{EdgeId, PlanarMap, VertexId};

/// A simple cycle with its `Σ (π − Θ)` weight.
#[derive(Debug, Clone)]
pub struct CycleWitness {
    pub weight: f64,
    /// Vertices in cycle order.
    pub vertices: Vec<VertexId>,
    pub edge_ids: Vec<EdgeId>,
}

struct HeapEntry {
    dist: f64,
    vertex: VertexId,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.vertex == other.vertex
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for a min-heap.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Shortest `src`–`dst` path avoiding `forbidden` edges, with an optional
/// upper bound for pruning and an optional cap on the number of path edges.
/// Returns the vertex sequence from `src` to `dst` and its weight.
fn shortest_path(
    map: &PlanarMap,
    weights: &[f64],
    src: VertexId,
    dst: VertexId,
    forbidden: &[EdgeId],
    bound: f64,
    max_edges: Option<usize>,
) -> Option<(f64, Vec<VertexId>)> {
    match max_edges {
        None => {
            let n = map.vertex_count();
            let mut dist = vec![f64::INFINITY; n];
            let mut parent = vec![usize::MAX; n];
            let mut heap = BinaryHeap::new();
            dist[src] = 0.0;
            heap.push(HeapEntry {
                dist: 0.0,
                vertex: src,
            });
            while let Some(HeapEntry { dist: d, vertex: v }) = heap.pop() {
                if d > dist[v] || d >= bound {
                    continue;
                }
                if v == dst {
                    break;
                }
                for &w in map.neighbors(v) {
                    let e = map.edge_between(v, w).expect("adjacent");
                    if forbidden.contains(&e) {
                        continue;
                    }
                    let nd = d + weights[e];
                    if nd < dist[w] && nd < bound {
                        dist[w] = nd;
                        parent[w] = v;
                        heap.push(HeapEntry {
                            dist: nd,
                            vertex: w,
                        });
                    }
                }
            }
            if !dist[dst].is_finite() {
                return None;
            }
            let mut path = vec![dst];
            let mut cur = dst;
            while cur != src {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            Some((dist[dst], path))
        }
        Some(cap) => {
            // Hop-bounded dynamic program: dist[k][v] is the least weight of
            // a walk with at most k edges. Positive weights make the optimum
            // a simple path.
            let n = map.vertex_count();
            let mut dist = vec![f64::INFINITY; n];
            dist[src] = 0.0;
            let mut parents_by_level: Vec<Vec<VertexId>> = vec![vec![usize::MAX; n]];
            let mut best: Vec<Vec<f64>> = vec![dist.clone()];
            for _k in 1..=cap {
                let prev = best.last().unwrap().clone();
                let mut next = prev.clone();
                let mut par = parents_by_level.last().unwrap().clone();
                for (e, &(a, b)) in map.edges().iter().enumerate() {
                    if forbidden.contains(&e) {
                        continue;
                    }
                    if prev[a] + weights[e] < next[b] {
                        next[b] = prev[a] + weights[e];
                        par[b] = a;
                    }
                    if prev[b] + weights[e] < next[a] {
                        next[a] = prev[b] + weights[e];
                        par[a] = b;
                    }
                }
                best.push(next);
                parents_by_level.push(par);
            }
            let total = best[cap][dst];
            if !total.is_finite() || total >= bound {
                return None;
            }
            // Reconstruct by walking levels backward.
            let mut path = vec![dst];
            let mut cur = dst;
            let mut level = cap;
            while cur != src {
                // Find the level where cur's value was set.
                while level > 0 && best[level - 1][cur] == best[level][cur] {
                    level -= 1;
                }
                let p = parents_by_level[level][cur];
                path.push(p);
                cur = p;
                level -= 1;
            }
            path.reverse();
            // The DP may revisit vertices only in degenerate ties; reject.
            let mut seen = path.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return None;
            }
            Some((total, path))
        }
    }
}

/// Minimum of `Σ_{e ∈ γ} (π − Θ(e))` over simple cycles `γ` that do not
/// bound a face; `None` when no non-facial cycle exists (minimum +∞).
///
/// `max_cycle_len` caps the number of edges of the cycles considered; with
/// the cap the result is the minimum over non-facial cycles of at most that
/// length.
pub fn min_nonfacial_cycle_weight(
    map: &PlanarMap,
    theta: &AngleAssignment,
    max_cycle_len: Option<usize>,
) -> Option<CycleWitness> {
    let weights: Vec<f64> = (0..map.edge_count()).map(|e| PI - theta.get(e)).collect();
    let mut best: Option<CycleWitness> = None;
    let mut bound = f64::INFINITY;
    for (e, &(u, v)) in map.edges().iter().enumerate() {
        let incident = map.edge_face_ids(e);
        // Pairs of co-facial edges to remove; a singleton list when e lies on
        // one face only.
        let first: Vec<Option<EdgeId>> = exclusions(map, incident.first().copied(), e);
        let second: Vec<Option<EdgeId>> = exclusions(map, incident.get(1).copied(), e);
        for &e1 in &first {
            for &e2 in &second {
                let mut forbidden = vec![e];
                forbidden.extend(e1);
                forbidden.extend(e2);
                let cap = max_cycle_len.map(|c| c.saturating_sub(1));
                if cap == Some(0) {
                    continue;
                }
                if let Some((d, path)) =
                    shortest_path(map, &weights, u, v, &forbidden, bound - weights[e], cap)
                {
                    let weight = d + weights[e];
                    if best.as_ref().is_none_or(|b| weight < b.weight) {
                        bound = weight;
                        let edge_ids: Vec<EdgeId> = (0..path.len())
                            .map(|i| {
                                let (a, b) = (path[i], path[(i + 1) % path.len()]);
                                map.edge_between(a, b).expect("path edge")
                            })
                            .collect();
                        best = Some(CycleWitness {
                            weight,
                            vertices: path,
                            edge_ids,
                        });
                    }
                }
            }
        }
    }
    best
}

fn exclusions(map: &PlanarMap, face: Option<usize>, e: EdgeId) -> Vec<Option<EdgeId>> {
    match face {
        None => vec![None],
        Some(f) => map
            .face_edges(f)
            .iter()
            .copied()
            .filter(|&x| x != e)
            .map(Some)
            .collect(),
    }
}
