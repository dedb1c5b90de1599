//! Finite disk cellular decompositions and torus quotients.
//!
//! A [`PlanarMap`] stores faces as explicit oriented boundary cycles over a
//! dense vertex set `0..n`. Construction validates the invariants expected of
//! a disk cellular decomposition: the graph is simple, each face boundary is
//! a simple cycle, every edge lies on one or two faces, and the Euler
//! characteristic matches the declared topology (1 for a disk patch with the
//! outer region excluded, 0 for a torus). Face cycles are re-oriented during
//! construction so that the two faces of any interior edge traverse it in
//! opposite directions; this consistent orientation is what the layout engine
//! and the dual-point construction rely on.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;

/// Depth value assigned to every vertex of a torus map (no boundary).
pub const DEPTH_UNBOUNDED: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    DiskPatch,
    Torus,
}

#[derive(Debug, Clone)]
pub struct PlanarMap {
    topology: Topology,
    root: VertexId,
    vertex_count: usize,
    /// Endpoints normalized so `u < v`.
    edges: Vec<(VertexId, VertexId)>,
    edge_lookup: HashMap<(VertexId, VertexId), EdgeId>,
    /// Consistently oriented simple boundary cycles.
    faces: Vec<Vec<VertexId>>,
    /// `face_edge_ids[f][i]` joins `faces[f][i]` to `faces[f][i+1]`.
    face_edge_ids: Vec<Vec<EdgeId>>,
    /// One or two incident faces per edge.
    edge_faces: Vec<Vec<FaceId>>,
    /// Neighbors in rotation order. Interior vertices: a full cyclic order;
    /// boundary vertices: the open fan from one boundary edge to the other.
    rotation: Vec<Vec<VertexId>>,
    is_boundary: Vec<bool>,
    /// Outer boundary cycle of a disk patch (empty for torus maps).
    boundary_cycle: Vec<VertexId>,
    /// Combinatorial distance to the boundary; `DEPTH_UNBOUNDED` on a torus.
    depth: Vec<usize>,
}

impl PlanarMap {
    /// Builds a validated map from face boundary cycles.
    ///
    /// Vertex ids must form the dense range `0..n`. Face cycles may be given
    /// in arbitrary orientation; they are flipped as needed to make the
    /// orientation globally consistent.
    pub fn build_from_faces(
        face_cycles: &[Vec<VertexId>],
        root: VertexId,
        topology: Topology,
    ) -> Result<PlanarMap> {
        if face_cycles.is_empty() {
            return Err(Error::InconsistentIncidence("no faces given".into()));
        }
        let mut max_v = 0;
        for cycle in face_cycles {
            if cycle.len() < 3 {
                return Err(Error::InconsistentIncidence(format!(
                    "face cycle of length {} (need >= 3)",
                    cycle.len()
                )));
            }
            let mut sorted = cycle.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InconsistentIncidence(
                    "face cycle repeats a vertex".into(),
                ));
            }
            max_v = max_v.max(*sorted.last().unwrap());
        }
        let vertex_count = max_v + 1;
        let mut seen = vec![false; vertex_count];
        for cycle in face_cycles {
            for &v in cycle {
                seen[v] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidInput(format!(
                "vertex ids are not dense: {missing} unused"
            )));
        }
        if root >= vertex_count {
            return Err(Error::UnknownVertex(root));
        }

        // Edge set from unordered endpoint pairs, in first-seen order.
        let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
        let mut edge_lookup: HashMap<(VertexId, VertexId), EdgeId> = HashMap::new();
        let mut edge_faces: Vec<Vec<FaceId>> = Vec::new();
        let mut face_edge_ids: Vec<Vec<EdgeId>> = Vec::with_capacity(face_cycles.len());
        for (f, cycle) in face_cycles.iter().enumerate() {
            let mut ids = Vec::with_capacity(cycle.len());
            for i in 0..cycle.len() {
                let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
                let key = (a.min(b), a.max(b));
                let e = *edge_lookup.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_faces.push(Vec::new());
                    edges.len() - 1
                });
                if edge_faces[e].len() == 2 {
                    return Err(Error::InconsistentIncidence(format!(
                        "edge ({}, {}) lies on more than two faces",
                        key.0, key.1
                    )));
                }
                edge_faces[e].push(f);
                ids.push(e);
            }
            face_edge_ids.push(ids);
        }

        let mut map = PlanarMap {
            topology,
            root,
            vertex_count,
            edges,
            edge_lookup,
            faces: face_cycles.to_vec(),
            face_edge_ids,
            edge_faces,
            rotation: Vec::new(),
            is_boundary: Vec::new(),
            boundary_cycle: Vec::new(),
            depth: Vec::new(),
        };
        map.orient_faces()?;
        map.check_euler()?;
        map.build_boundary()?;
        map.build_rotation()?;
        map.build_depth();
        Ok(map)
    }

    /// Flips face cycles so that every interior edge is traversed in opposite
    /// directions by its two faces.
    fn orient_faces(&mut self) -> Result<()> {
        let nf = self.faces.len();
        let mut oriented = vec![false; nf];
        let mut flip = vec![false; nf];
        for start in 0..nf {
            if oriented[start] {
                continue;
            }
            oriented[start] = true;
            let mut queue = vec![start];
            while let Some(f) = queue.pop() {
                for (i, &e) in self.face_edge_ids[f].iter().enumerate() {
                    let cycle = &self.faces[f];
                    let (mut a, mut b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
                    if flip[f] {
                        std::mem::swap(&mut a, &mut b);
                    }
                    for &g in &self.edge_faces[e] {
                        if g == f {
                            continue;
                        }
                        // Locate the traversal direction of e in g.
                        let gc = &self.faces[g];
                        let j = (0..gc.len())
                            .find(|&j| {
                                let (x, y) = (gc[j], gc[(j + 1) % gc.len()]);
                                (x.min(y), x.max(y)) == (a.min(b), a.max(b))
                            })
                            .expect("edge incidence is consistent");
                        let (mut x, mut y) = (gc[j], gc[(j + 1) % gc.len()]);
                        if flip[g] {
                            std::mem::swap(&mut x, &mut y);
                        }
                        let needs_flip = (x, y) == (a, b);
                        if !oriented[g] {
                            oriented[g] = true;
                            flip[g] = needs_flip != flip[g];
                            queue.push(g);
                        } else if needs_flip {
                            return Err(Error::InconsistentIncidence(
                                "face cycles cannot be oriented consistently".into(),
                            ));
                        }
                    }
                }
            }
        }
        for (f, do_flip) in flip.iter().enumerate() {
            if *do_flip {
                self.faces[f].reverse();
                self.faces[f].rotate_right(1); // keep the same starting vertex
                self.face_edge_ids[f].reverse();
            }
        }
        Ok(())
    }

    fn check_euler(&self) -> Result<()> {
        let v = self.vertex_count as i64;
        let e = self.edges.len() as i64;
        let f = self.faces.len() as i64;
        let expected = match self.topology {
            Topology::DiskPatch => 1,
            Topology::Torus => 0,
        };
        if v - e + f != expected {
            return Err(Error::EulerMismatch {
                expected,
                got: v - e + f,
            });
        }
        Ok(())
    }

    fn build_boundary(&mut self) -> Result<()> {
        let single: Vec<EdgeId> = (0..self.edges.len())
            .filter(|&e| self.edge_faces[e].len() == 1)
            .collect();
        match self.topology {
            Topology::Torus => {
                if !single.is_empty() {
                    return Err(Error::InconsistentIncidence(
                        "torus map has an edge on only one face".into(),
                    ));
                }
                self.is_boundary = vec![false; self.vertex_count];
                self.boundary_cycle = Vec::new();
            }
            Topology::DiskPatch => {
                if single.is_empty() {
                    return Err(Error::InconsistentIncidence(
                        "disk patch has no boundary edges".into(),
                    ));
                }
                // The boundary traverses each single-face edge opposite to
                // its unique face.
                let mut next: HashMap<VertexId, VertexId> = HashMap::new();
                for &e in &single {
                    let f = self.edge_faces[e][0];
                    let cycle = &self.faces[f];
                    let i = self.face_edge_ids[f]
                        .iter()
                        .position(|&x| x == e)
                        .unwrap();
                    let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
                    if next.insert(b, a).is_some() {
                        return Err(Error::InconsistentIncidence(
                            "boundary is not a simple cycle".into(),
                        ));
                    }
                }
                let start = *next.keys().min().unwrap();
                let mut cycle = vec![start];
                let mut cur = next[&start];
                while cur != start {
                    cycle.push(cur);
                    cur = *next.get(&cur).ok_or_else(|| {
                        Error::InconsistentIncidence("boundary walk is broken".into())
                    })?;
                    if cycle.len() > single.len() {
                        return Err(Error::InconsistentIncidence(
                            "boundary walk does not close".into(),
                        ));
                    }
                }
                if cycle.len() != single.len() {
                    return Err(Error::InconsistentIncidence(
                        "boundary is not a single cycle".into(),
                    ));
                }
                self.is_boundary = vec![false; self.vertex_count];
                for &v in &cycle {
                    self.is_boundary[v] = true;
                }
                self.boundary_cycle = cycle;
            }
        }
        Ok(())
    }

    /// Derives the rotation order of neighbors around each vertex from the
    /// oriented face corners. Fails if the corners around some vertex do not
    /// chain into a single fan (the decomposition would be pinched there).
    fn build_rotation(&mut self) -> Result<()> {
        let n = self.vertex_count;
        // corner_next[v]: incoming neighbor -> outgoing neighbor, one entry
        // per oriented corner a -> v -> b.
        let mut corner_next: Vec<HashMap<VertexId, VertexId>> = vec![HashMap::new(); n];
        for cycle in &self.faces {
            let d = cycle.len();
            for i in 0..d {
                let a = cycle[(i + d - 1) % d];
                let v = cycle[i];
                let b = cycle[(i + 1) % d];
                if corner_next[v].insert(a, b).is_some() {
                    return Err(Error::InconsistentIncidence(format!(
                        "two faces share the corner ({a}, {v})"
                    )));
                }
            }
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in &self.edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut rotation = Vec::with_capacity(n);
        for v in 0..n {
            let map = &corner_next[v];
            let start = if self.is_boundary[v] {
                // The fan starts at the neighbor no corner points to.
                let mut incoming: Vec<VertexId> = map.values().copied().collect();
                incoming.sort_unstable();
                let mut starts: Vec<VertexId> = map
                    .keys()
                    .filter(|k| incoming.binary_search(k).is_err())
                    .copied()
                    .collect();
                // A degree-d boundary vertex has d-1 corners over d edges;
                // exactly one key lacks an incoming corner.
                if map.len() + 1 != degree[v] || starts.len() != 1 {
                    return Err(Error::InconsistentIncidence(format!(
                        "boundary vertex {v} has a pinched face fan"
                    )));
                }
                starts.pop().unwrap()
            } else {
                if map.len() != degree[v] {
                    return Err(Error::InconsistentIncidence(format!(
                        "interior vertex {v} has a pinched face fan"
                    )));
                }
                *map.keys().min().unwrap()
            };
            let mut order = vec![start];
            let mut cur = start;
            while let Some(&nxt) = map.get(&cur) {
                if nxt == start {
                    break;
                }
                order.push(nxt);
                cur = nxt;
                if order.len() > degree[v] {
                    return Err(Error::InconsistentIncidence(format!(
                        "rotation around vertex {v} does not close"
                    )));
                }
            }
            if order.len() != degree[v] {
                return Err(Error::InconsistentIncidence(format!(
                    "rotation around vertex {v} misses neighbors"
                )));
            }
            rotation.push(order);
        }
        self.rotation = rotation;
        Ok(())
    }

    fn build_depth(&mut self) {
        match self.topology {
            Topology::Torus => {
                self.depth = vec![DEPTH_UNBOUNDED; self.vertex_count];
            }
            Topology::DiskPatch => {
                let mut depth = vec![usize::MAX; self.vertex_count];
                let mut queue: std::collections::VecDeque<VertexId> =
                    self.boundary_cycle.iter().copied().collect();
                for &v in &self.boundary_cycle {
                    depth[v] = 0;
                }
                while let Some(v) = queue.pop_front() {
                    for &w in &self.rotation[v] {
                        if depth[w] == usize::MAX {
                            depth[w] = depth[v] + 1;
                            queue.push_back(w);
                        }
                    }
                }
                self.depth = depth;
            }
        }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge_endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.edge_lookup.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Oriented boundary cycle of face `f`.
    pub fn face_cycle(&self, f: FaceId) -> &[VertexId] {
        &self.faces[f]
    }

    /// Edge ids along the boundary of face `f`; entry `i` joins
    /// `face_cycle(f)[i]` to the cyclically next vertex.
    pub fn face_edges(&self, f: FaceId) -> &[EdgeId] {
        &self.face_edge_ids[f]
    }

    pub fn face_degree(&self, f: FaceId) -> usize {
        self.faces[f].len()
    }

    /// Faces incident to edge `e` (one for boundary edges of a disk patch).
    pub fn edge_face_ids(&self, e: EdgeId) -> &[FaceId] {
        &self.edge_faces[e]
    }

    /// Neighbors of `v` in rotation order (cyclic for interior vertices,
    /// an open fan for boundary vertices).
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.rotation[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.rotation[v].len()
    }

    /// Flower degree `S(v)`: the sum of the degrees of the neighbors of `v`.
    pub fn flower_degree(&self, v: VertexId) -> Result<usize> {
        if v >= self.vertex_count {
            return Err(Error::UnknownVertex(v));
        }
        Ok(self.rotation[v].iter().map(|&w| self.degree(w)).sum())
    }

    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        self.is_boundary[v]
    }

    pub fn is_interior_vertex(&self, v: VertexId) -> bool {
        !self.is_boundary[v]
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_count).filter(|&v| !self.is_boundary[v])
    }

    /// Outer boundary cycle of a disk patch (empty for torus maps).
    pub fn boundary_cycle(&self) -> &[VertexId] {
        &self.boundary_cycle
    }

    /// Combinatorial distance from `v` to the boundary (0 on the boundary,
    /// [`DEPTH_UNBOUNDED`] on a torus).
    pub fn interior_depth(&self, v: VertexId) -> usize {
        self.depth[v]
    }

    /// The faces `f` adjacent to the corner between consecutive rotation
    /// neighbors of `v`: entry `i` is the face containing the corner from
    /// edge `(v, rot[i])` to `(v, rot[i+1])`.
    ///
    /// Interior vertices have `deg(v)` corner faces; boundary vertices have
    /// `deg(v) - 1`.
    pub fn corner_faces(&self, v: VertexId) -> Vec<FaceId> {
        let rot = &self.rotation[v];
        let count = if self.is_boundary[v] {
            rot.len() - 1
        } else {
            rot.len()
        };
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            let a = rot[i];
            let b = rot[(i + 1) % rot.len()];
            // The face whose oriented cycle contains a -> v -> b.
            let e = self.edge_between(v, a).expect("rotation edge exists");
            let f = self.edge_faces[e]
                .iter()
                .copied()
                .find(|&f| {
                    let c = &self.faces[f];
                    let d = c.len();
                    (0..d).any(|j| c[j] == a && c[(j + 1) % d] == v && c[(j + 2) % d] == b)
                })
                .expect("corner face exists");
            out.push(f);
        }
        out
    }

    /// The dual 1-skeleton: one vertex per face, one edge per source edge
    /// with two incident faces.
    pub fn dual_skeleton(&self) -> DualSkeleton {
        let mut dual_edges = Vec::new();
        for (e, faces) in self.edge_faces.iter().enumerate() {
            if let [f, g] = faces[..] {
                dual_edges.push(DualEdge {
                    faces: (f, g),
                    source_edge: e,
                });
            }
        }
        // Root at the lowest-numbered face incident to the root vertex.
        let root_face = (0..self.faces.len())
            .find(|&f| self.faces[f].contains(&self.root))
            .unwrap_or(0);
        DualSkeleton {
            face_count: self.faces.len(),
            edges: dual_edges,
            root_face,
        }
    }

    /// Full dual of a torus map: faces become vertices and the face fan
    /// around each source vertex becomes a face.
    pub fn dual_map(&self) -> Result<PlanarMap> {
        if self.topology != Topology::Torus {
            return Err(Error::NotTorus);
        }
        let cycles: Vec<Vec<VertexId>> = self.vertices().map(|v| self.corner_faces(v)).collect();
        let root_face = self.dual_skeleton().root_face;
        PlanarMap::build_from_faces(&cycles, root_face, Topology::Torus)
    }

    /// Canonical code of the rooted map under rotation-preserving (or
    /// reversing) isomorphism; two maps are isomorphic as maps iff their
    /// codes over all root choices agree.
    ///
    /// The code is a BFS labeling: starting at (root, first neighbor), each
    /// vertex's rotation is emitted relative to the edge it was discovered
    /// from. Intended for small maps (the double-dual test); cost is
    /// O(V * deg * E).
    pub fn canonical_code(&self) -> Vec<Vec<usize>> {
        let mut best: Option<Vec<Vec<usize>>> = None;
        for root in 0..self.vertex_count {
            for start_idx in 0..self.rotation[root].len() {
                for reversed in [false, true] {
                    let code = self.bfs_code(root, start_idx, reversed);
                    if best.as_ref().is_none_or(|b| code < *b) {
                        best = Some(code);
                    }
                }
            }
        }
        best.unwrap_or_default()
    }

    fn bfs_code(&self, root: VertexId, start_idx: usize, reversed: bool) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut order: Vec<(VertexId, VertexId)> = Vec::new(); // (vertex, reference neighbor)
        label[root] = 0;
        order.push((root, self.rotation[root][start_idx]));
        let mut next_label = 1;
        let mut code = Vec::with_capacity(self.vertex_count);
        let mut qi = 0;
        while qi < order.len() {
            let (v, reference) = order[qi];
            qi += 1;
            let rot = &self.rotation[v];
            let d = rot.len();
            let ref_pos = rot.iter().position(|&w| w == reference).unwrap();
            let mut row = Vec::with_capacity(d);
            for k in 0..d {
                let idx = if reversed {
                    (ref_pos + d - k % d) % d
                } else {
                    (ref_pos + k) % d
                };
                let w = rot[idx];
                if label[w] == usize::MAX {
                    label[w] = next_label;
                    next_label += 1;
                    order.push((w, v));
                }
                row.push(label[w]);
            }
            code.push(row);
        }
        code
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DualEdge {
    /// The two faces joined by this dual edge.
    pub faces: (FaceId, FaceId),
    /// The source edge `e` with `e* <-> e`.
    pub source_edge: EdgeId,
}

/// Dual 1-skeleton of a map: vertices are source faces, edges are labeled by
/// the source edge they cross.
#[derive(Debug, Clone)]
pub struct DualSkeleton {
    pub face_count: usize,
    pub edges: Vec<DualEdge>,
    pub root_face: FaceId,
}

impl DualSkeleton {
    pub fn degree(&self, f: FaceId) -> usize {
        self.edges
            .iter()
            .filter(|d| d.faces.0 == f || d.faces.1 == f)
            .count()
    }
}
