//! Generators for the regular `{p,q}` test families: BFS-grown disk patches
//! and vertex-transitive torus quotients.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::map::{PlanarMap, Topology, VertexId};

/// Grows a `{p,q}` patch around a central root vertex.
///
/// Generation 1 is the closed star of the root (all `q` faces around it);
/// each further generation completes the face fan of every current boundary
/// vertex. All interior vertices end up with degree `q` and all faces are
/// `p`-gons. Output is deterministic: ids are assigned in creation order.
pub fn generate_regular_patch(p: usize, q: usize, generations: usize) -> Result<PlanarMap> {
    if p < 3 || q < 3 {
        return Err(Error::UnsupportedParameters(format!(
            "need p >= 3 and q >= 3, got ({p}, {q})"
        )));
    }
    if generations < 1 {
        return Err(Error::UnsupportedParameters(
            "need at least one generation".into(),
        ));
    }
    let mut builder = PatchBuilder::new(p, q);
    builder.complete_vertex(0)?;
    for _ in 1..generations {
        let ring = builder.boundary_in_order();
        for v in ring {
            builder.complete_vertex(v)?;
        }
    }
    PlanarMap::build_from_faces(&builder.faces, 0, Topology::DiskPatch)
}

/// Flat vertex-transitive torus quotients of the Euclidean tessellations
/// `{3,6}`, `{4,4}` and `{6,3}`, with period `n >= 3` in both directions.
pub fn generate_torus_quotient(p: usize, q: usize, n: usize) -> Result<PlanarMap> {
    if n < 3 {
        return Err(Error::UnsupportedParameters(format!(
            "period {n} too small for a simple quotient (need n >= 3)"
        )));
    }
    let faces: Vec<Vec<VertexId>> = match (p, q) {
        (4, 4) => {
            let id = |i: usize, j: usize| (i % n) * n + (j % n);
            (0..n)
                .flat_map(|i| {
                    (0..n).map(move |j| vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)])
                })
                .collect()
        }
        (3, 6) => {
            let id = |i: usize, j: usize| (i % n) * n + (j % n);
            let mut faces = Vec::with_capacity(2 * n * n);
            for i in 0..n {
                for j in 0..n {
                    faces.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                    faces.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                }
            }
            faces
        }
        (6, 3) => {
            // Honeycomb: two vertices per cell, A = 2*(i*n+j), B = A+1;
            // B(i,j) is adjacent to A(i,j), A(i+1,j) and A(i,j+1).
            let a = |i: usize, j: usize| 2 * ((i % n) * n + (j % n));
            let b = |i: usize, j: usize| a(i, j) + 1;
            let mut faces = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    faces.push(vec![
                        a(i + 1, j),
                        b(i + 1, j),
                        a(i + 1, j + 1),
                        b(i, j + 1),
                        a(i, j + 1),
                        b(i, j),
                    ]);
                }
            }
            faces
        }
        _ => {
            return Err(Error::UnsupportedParameters(format!(
                "no flat torus quotient for ({p}, {q})"
            )))
        }
    };
    PlanarMap::build_from_faces(&faces, 0, Topology::Torus)
}

/// Incremental `{p,q}` patch under construction. Faces are stored as
/// consistently oriented cycles; the live outer boundary is a cyclic linked
/// list over vertex ids (each vertex occurs at most once on the boundary).
struct PatchBuilder {
    p: usize,
    q: usize,
    faces: Vec<Vec<VertexId>>,
    face_count_at: Vec<usize>,
    bnext: HashMap<VertexId, VertexId>,
    bprev: HashMap<VertexId, VertexId>,
    next_vertex: VertexId,
}

impl PatchBuilder {
    /// Starts from a single `p`-gon `0, 1, .., p-1` rooted at vertex 0. The
    /// boundary cycle runs opposite to the face cycle, so that every boundary
    /// step `x -> y` has its unique face traversing `y -> x`.
    fn new(p: usize, q: usize) -> Self {
        let first: Vec<VertexId> = (0..p).collect();
        let mut bnext = HashMap::new();
        let mut bprev = HashMap::new();
        for i in 0..p {
            bnext.insert((i + 1) % p, i);
            bprev.insert(i, (i + 1) % p);
        }
        PatchBuilder {
            p,
            q,
            faces: vec![first],
            face_count_at: vec![1; p],
            bnext,
            bprev,
            next_vertex: p,
        }
    }

    fn fresh(&mut self) -> VertexId {
        let v = self.next_vertex;
        self.next_vertex += 1;
        self.face_count_at.push(0);
        v
    }

    /// Current boundary cycle starting from its smallest vertex id.
    fn boundary_in_order(&self) -> Vec<VertexId> {
        let start = *self.bnext.keys().min().expect("boundary nonempty");
        let mut out = vec![start];
        let mut cur = self.bnext[&start];
        while cur != start {
            out.push(cur);
            cur = self.bnext[&cur];
        }
        out
    }

    fn overflow(&self) -> Error {
        Error::UnsupportedParameters(format!(
            "({}, {}) tessellation closes up; generations exceed the finite sphere",
            self.p, self.q
        ))
    }

    /// Attaches faces around `v` until it has `q` of them.
    ///
    /// `v` may already have been finished (and removed from the boundary)
    /// while completing an earlier vertex of the same ring; that is a no-op.
    fn complete_vertex(&mut self, v: VertexId) -> Result<()> {
        if !self.bnext.contains_key(&v) {
            return if self.face_count_at[v] == self.q {
                Ok(())
            } else {
                Err(self.overflow())
            };
        }
        while self.face_count_at[v] < self.q {
            self.add_face_at(v)?;
        }
        Ok(())
    }

    /// Adds one `p`-gon in the outer corner at `v` on its predecessor side.
    ///
    /// The face walks backward along the boundary through every consecutive
    /// vertex that it saturates (a vertex with `q-1` faces gets its fan
    /// closed by this face, so the face must continue through its other
    /// boundary edge), and likewise forward when this face is the last one
    /// at `v`. Saturated vertices become interior and leave the boundary;
    /// the remaining sides are fresh vertices.
    fn add_face_at(&mut self, v: VertexId) -> Result<()> {
        // Backward chain v, a0 = bprev(v), a1, ..: extend past saturated ones.
        let mut back = vec![v, self.bprev[&v]];
        while self.face_count_at[*back.last().unwrap()] == self.q - 1 {
            if back.len() > self.p {
                return Err(self.overflow());
            }
            let nxt = self.bprev[back.last().unwrap()];
            back.push(nxt);
        }
        // Forward chain s0 = bnext(v), ..: only when this face closes v.
        let mut front: Vec<VertexId> = Vec::new();
        if self.face_count_at[v] == self.q - 1 {
            front.push(self.bnext[&v]);
            while self.face_count_at[*front.last().unwrap()] == self.q - 1 {
                if front.len() > self.p {
                    return Err(self.overflow());
                }
                let nxt = self.bnext[front.last().unwrap()];
                front.push(nxt);
            }
        }
        let spine = back.len() + front.len();
        if spine > self.p
            || front.contains(&v)
            || back[1..].iter().any(|x| front.contains(x))
        {
            // The face would wrap around the whole remaining boundary.
            return Err(self.overflow());
        }

        // Face cycle in orientation-consistent order: it traverses each
        // consumed boundary edge in the boundary direction,
        // aB -> .. -> a0 -> v -> s0 -> .. -> sF, then fresh vertices.
        let mut cycle: Vec<VertexId> = back.iter().rev().copied().collect();
        cycle.extend(front.iter().copied());
        let fresh: Vec<VertexId> = (0..self.p - spine).map(|_| self.fresh()).collect();
        cycle.extend(fresh.iter().copied());

        for &x in &cycle {
            self.face_count_at[x] += 1;
            if self.face_count_at[x] > self.q {
                return Err(self.overflow());
            }
        }
        // Saturated chain vertices (all but the outermost on each side, and
        // v itself when closing) are now interior.
        let closing = !front.is_empty();
        for &x in &back[1..back.len() - 1] {
            self.unlink(x);
        }
        if closing {
            self.unlink(v);
            for &x in &front[..front.len() - 1] {
                self.unlink(x);
            }
        }
        // New boundary detour from the back anchor to the front anchor,
        // opposite to the face's traversal of the fresh path.
        let back_anchor = *back.last().unwrap();
        let front_anchor = if closing { *front.last().unwrap() } else { v };
        let mut prev = back_anchor;
        for &w in fresh.iter().rev() {
            self.link(prev, w);
            prev = w;
        }
        self.link(prev, front_anchor);
        self.faces.push(cycle);
        Ok(())
    }

    fn link(&mut self, from: VertexId, to: VertexId) {
        self.bnext.insert(from, to);
        self.bprev.insert(to, from);
    }

    fn unlink(&mut self, v: VertexId) {
        self.bnext.remove(&v);
        self.bprev.remove(&v);
    }
}
