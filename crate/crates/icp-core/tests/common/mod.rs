//! Shared helpers for the integration suites: an exhaustive simple-cycle
//! enumerator (the independent oracle for the cycle search), a chi-squared
//! tail probability, and small custom maps.

#![allow(dead_code)]

use icp_core::angle::AngleAssignment;
use icp_core::map::{EdgeId, PlanarMap, Topology, VertexId};

/// Every simple cycle of the graph, as vertex sequences. Each cycle is
/// produced once: it starts at its smallest vertex and its second vertex is
/// smaller than its last. Exponential; intended for maps with <= 12 vertices.
pub fn enumerate_simple_cycles(map: &PlanarMap) -> Vec<Vec<VertexId>> {
    let n = map.vertex_count();
    let mut cycles = Vec::new();
    let mut path: Vec<VertexId> = Vec::new();
    let mut on_path = vec![false; n];

    fn dfs(
        map: &PlanarMap,
        start: VertexId,
        path: &mut Vec<VertexId>,
        on_path: &mut Vec<bool>,
        cycles: &mut Vec<Vec<VertexId>>,
    ) {
        let cur = *path.last().unwrap();
        for &next in map.neighbors(cur) {
            if next == start && path.len() >= 3 {
                if path[1] < *path.last().unwrap() {
                    cycles.push(path.clone());
                }
            } else if next > start && !on_path[next] {
                path.push(next);
                on_path[next] = true;
                dfs(map, start, path, on_path, cycles);
                on_path[next] = false;
                path.pop();
            }
        }
    }

    for start in 0..n {
        path.push(start);
        on_path[start] = true;
        dfs(map, start, &mut path, &mut on_path, &mut cycles);
        on_path[start] = false;
        path.pop();
    }
    cycles
}

pub fn cycle_edge_ids(map: &PlanarMap, cycle: &[VertexId]) -> Vec<EdgeId> {
    (0..cycle.len())
        .map(|i| {
            map.edge_between(cycle[i], cycle[(i + 1) % cycle.len()])
                .expect("cycle edge")
        })
        .collect()
}

pub fn cycle_weight(map: &PlanarMap, theta: &AngleAssignment, cycle: &[VertexId]) -> f64 {
    cycle_edge_ids(map, cycle)
        .iter()
        .map(|&e| std::f64::consts::PI - theta.get(e))
        .sum()
}

/// Whether the cycle bounds a face (same edge set as some face).
pub fn is_facial(map: &PlanarMap, cycle: &[VertexId]) -> bool {
    let mut edges = cycle_edge_ids(map, cycle);
    edges.sort_unstable();
    (0..map.face_count()).any(|f| {
        let mut fe = map.face_edges(f).to_vec();
        fe.sort_unstable();
        fe == edges
    })
}

/// Minimum non-facial simple cycle weight by exhaustion (`None` if no
/// non-facial cycle exists), with an optional length cap.
pub fn brute_force_min_nonfacial(
    map: &PlanarMap,
    theta: &AngleAssignment,
    max_len: Option<usize>,
) -> Option<f64> {
    enumerate_simple_cycles(map)
        .into_iter()
        .filter(|c| max_len.is_none_or(|cap| c.len() <= cap))
        .filter(|c| !is_facial(map, c))
        .map(|c| cycle_weight(map, theta, &c))
        .min_by(f64::total_cmp)
}

/// Upper tail probability of the chi-squared distribution.
pub fn chi2_p_value(stat: f64, dof: f64) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

/// An `n x m` square-grid torus (vertex-transitive, degree 4).
pub fn torus_grid(n: usize, m: usize) -> PlanarMap {
    let id = |i: usize, j: usize| (i % n) * m + (j % m);
    let faces: Vec<Vec<VertexId>> = (0..n)
        .flat_map(|i| {
            (0..m).map(move |j| vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)])
        })
        .collect();
    PlanarMap::build_from_faces(&faces, 0, Topology::Torus).unwrap()
}
