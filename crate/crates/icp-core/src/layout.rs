//! Planar realization of a flat circle packing metric.
//!
//! The root circle is placed at the origin with its first rotation neighbor
//! on the positive horizontal axis; a BFS over vertices then places each new
//! circle at the edge-kite center distance, turning by half-wedge sums
//! between consecutive rotation neighbors. Oriented face cycles realize
//! counterclockwise, so the dual point of a face lies to the left of each of
//! its directed edges and is recovered as a circle-circle intersection.

use std::collections::VecDeque;

use serde::Serialize;

use crate::angle::AngleAssignment;
use crate::error::{Error, Result};
use crate::geom::{circle_intersections, triangle_intersection_area, Point};
use crate::hyperbolic::hyperbolic_center;
use crate::map::{FaceId, PlanarMap, Topology, VertexId};
use crate::packing::{alpha_wedge, edge_length, PackingMetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    Plane,
    UnitDisk,
}

#[derive(Debug, Clone)]
pub struct Layout {
    pub frame: Frame,
    pub root: VertexId,
    pub center: Vec<Point>,
    pub radius: Vec<f64>,
    /// One dual point per face, computed from the face's first oriented edge.
    pub dual_point: Vec<Point>,
}

impl Layout {
    /// Hyperbolic centers of all circles; unit-disk frame only.
    pub fn hyp_centers(&self) -> Result<Vec<Point>> {
        if self.frame != Frame::UnitDisk {
            return Err(Error::FrameMismatch("hyperbolic centers need the unit-disk frame"));
        }
        self.center
            .iter()
            .zip(&self.radius)
            .map(|(&z, &r)| hyperbolic_center(z, r))
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LayoutOptions {
    /// A revisited vertex may land at most `holonomy_tol * r(v)` away from
    /// its first placement.
    pub holonomy_tol: f64,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions { holonomy_tol: 1e-6 }
    }
}

pub fn layout_embed(
    map: &PlanarMap,
    theta: &AngleAssignment,
    metric: &PackingMetric,
) -> Result<Layout> {
    layout_embed_with(map, theta, metric, &LayoutOptions::default())
}

pub fn layout_embed_with(
    map: &PlanarMap,
    theta: &AngleAssignment,
    metric: &PackingMetric,
    opts: &LayoutOptions,
) -> Result<Layout> {
    if map.topology() != Topology::DiskPatch {
        return Err(Error::NotDiskPatch);
    }
    let n = map.vertex_count();
    let root = map.root();
    let mut center: Vec<Option<Point>> = vec![None; n];
    let mut reference: Vec<VertexId> = vec![usize::MAX; n];

    let w0 = map.neighbors(root)[0];
    let l0 = edge_between_length(map, theta, metric, root, w0)?;
    center[root] = Some(Point::ORIGIN);
    center[w0] = Some(Point::new(l0, 0.0));
    reference[root] = w0;
    reference[w0] = root;

    let place = |center: &mut Vec<Option<Point>>,
                 reference: &mut Vec<VertexId>,
                 queue: &mut VecDeque<VertexId>,
                 v: VertexId,
                 b: VertexId,
                 pos: Point|
     -> Result<()> {
        match center[b] {
            None => {
                center[b] = Some(pos);
                reference[b] = v;
                queue.push_back(b);
                Ok(())
            }
            Some(old) => {
                let deviation = pos.dist(old);
                if deviation > opts.holonomy_tol * metric.get(b) {
                    Err(Error::InconsistentHolonomy {
                        vertex: b,
                        deviation,
                    })
                } else {
                    Ok(())
                }
            }
        }
    };

    let mut queue: VecDeque<VertexId> = VecDeque::new();
    queue.push_back(root);
    queue.push_back(w0);
    while let Some(v) = queue.pop_front() {
        let zv = center[v].expect("queued vertices are placed");
        let rot = map.neighbors(v);
        let deg = rot.len();
        let w_ref = reference[v];
        let idx = rot
            .iter()
            .position(|&w| w == w_ref)
            .expect("reference is a neighbor");
        let phi_ref = (center[w_ref].expect("reference placed") - zv).arg();
        let half = |w: VertexId| -> Result<f64> {
            let e = map.edge_between(v, w).expect("adjacent");
            Ok(alpha_wedge(metric.get(v), metric.get(w), theta.get(e))? / 2.0)
        };

        if map.is_interior_vertex(v) {
            // Full cyclic walk: each rotation step turns clockwise by the
            // two half-wedges of the shared corner.
            let mut phi = phi_ref;
            for s in 1..deg {
                let prev = rot[(idx + s - 1) % deg];
                let cur = rot[(idx + s) % deg];
                phi -= half(prev)? + half(cur)?;
                let l = edge_between_length(map, theta, metric, v, cur)?;
                place(
                    &mut center,
                    &mut reference,
                    &mut queue,
                    v,
                    cur,
                    zv + Point::from_angle(phi).scale(l),
                )?;
            }
        } else {
            // Open fan: walk forward to the chain end, then backward.
            let mut phi = phi_ref;
            for i in idx + 1..deg {
                phi -= half(rot[i - 1])? + half(rot[i])?;
                let l = edge_between_length(map, theta, metric, v, rot[i])?;
                place(
                    &mut center,
                    &mut reference,
                    &mut queue,
                    v,
                    rot[i],
                    zv + Point::from_angle(phi).scale(l),
                )?;
            }
            let mut phi = phi_ref;
            for i in (0..idx).rev() {
                phi += half(rot[i])? + half(rot[i + 1])?;
                let l = edge_between_length(map, theta, metric, v, rot[i])?;
                place(
                    &mut center,
                    &mut reference,
                    &mut queue,
                    v,
                    rot[i],
                    zv + Point::from_angle(phi).scale(l),
                )?;
            }
        }
    }
    let center: Vec<Point> = center
        .into_iter()
        .map(|c| c.ok_or_else(|| Error::InvalidInput("map is not connected".into())))
        .collect::<Result<_>>()?;
    let radius: Vec<f64> = metric.values().to_vec();

    let mut dual_point = Vec::with_capacity(map.face_count());
    for f in 0..map.face_count() {
        dual_point.push(dual_point_from_edge(map, &center, &radius, f, 0)?);
    }
    Ok(Layout {
        frame: Frame::Plane,
        root,
        center,
        radius,
        dual_point,
    })
}

fn edge_between_length(
    map: &PlanarMap,
    theta: &AngleAssignment,
    metric: &PackingMetric,
    u: VertexId,
    v: VertexId,
) -> Result<f64> {
    let e = map.edge_between(u, v).expect("adjacent");
    edge_length(metric.get(u), metric.get(v), theta.get(e))
}

/// Dual point candidate of face `f` from its `i`-th oriented boundary edge:
/// the circle intersection to the left of the directed edge.
fn dual_point_from_edge(
    map: &PlanarMap,
    center: &[Point],
    radius: &[f64],
    f: FaceId,
    i: usize,
) -> Result<Point> {
    let cycle = map.face_cycle(f);
    let (u, v) = (cycle[i], cycle[(i + 1) % cycle.len()]);
    let (left, _right) = circle_intersections(center[u], radius[u], center[v], radius[v])
        .ok_or_else(|| {
            Error::DomainError(format!(
                "circles of edge ({u}, {v}) do not intersect in the layout"
            ))
        })?;
    Ok(left)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    /// `max_e | |z(u)-z(v)| - ℓ(e) | / ℓ(e)`.
    pub max_edge_deviation_rel: f64,
    /// Largest distance between dual-point candidates of the same face.
    pub max_dual_spread_abs: f64,
    /// At interior vertices, deviation of the placed wedge sum from 2π.
    pub max_wedge_tiling_dev: f64,
    /// Edges whose realized length deviates beyond 1e-6 relative.
    pub flagged_edges: Vec<(VertexId, VertexId, f64)>,
    /// Overlapping kite interiors among the pairs examined.
    pub overlap_count: usize,
    pub overlap_pairs_checked: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ConsistencyOptions {
    /// Check every pair of edge kites for overlap (quadratic; intended for
    /// maps with at most ~10^3 edges). Default samples nearby pairs only.
    pub full_overlap_check: bool,
}

pub fn consistency_check(
    layout: &Layout,
    map: &PlanarMap,
    theta: &AngleAssignment,
    opts: &ConsistencyOptions,
) -> Result<ConsistencyReport> {
    let z = &layout.center;
    let r = &layout.radius;

    let mut max_edge_dev = 0.0f64;
    let mut flagged = Vec::new();
    for (e, &(u, v)) in map.edges().iter().enumerate() {
        let l = edge_length(r[u], r[v], theta.get(e))?;
        let dev = (z[u].dist(z[v]) - l).abs() / l;
        if dev > 1e-6 {
            flagged.push((u, v, dev));
        }
        max_edge_dev = max_edge_dev.max(dev);
    }

    let mut max_spread = 0.0f64;
    for f in 0..map.face_count() {
        let d = map.face_degree(f);
        let mut candidates = Vec::with_capacity(d);
        for i in 0..d {
            candidates.push(dual_point_from_edge(map, z, r, f, i)?);
        }
        for i in 0..d {
            for j in i + 1..d {
                max_spread = max_spread.max(candidates[i].dist(candidates[j]));
            }
        }
    }

    let mut max_wedge_dev = 0.0f64;
    for v in map.interior_vertices() {
        let rot = map.neighbors(v);
        let mut total = 0.0;
        for i in 0..rot.len() {
            let a = z[rot[i]] - z[v];
            let b = z[rot[(i + 1) % rot.len()]] - z[v];
            // Clockwise gap from a to b in (0, 2π].
            let gap = (a.arg() - b.arg()).rem_euclid(std::f64::consts::TAU);
            total += gap;
        }
        max_wedge_dev = max_wedge_dev.max((total - std::f64::consts::TAU).abs());
    }

    let (overlap_count, overlap_pairs_checked) = overlap_check(layout, map, opts);

    Ok(ConsistencyReport {
        max_edge_deviation_rel: max_edge_dev,
        max_dual_spread_abs: max_spread,
        max_wedge_tiling_dev: max_wedge_dev,
        flagged_edges: flagged,
        overlap_count,
        overlap_pairs_checked,
    })
}

/// Edge kite `(v, v_f1, w, v_f2)` split along the `vw` diagonal.
fn kite_triangles(layout: &Layout, map: &PlanarMap, e: usize) -> Vec<[Point; 3]> {
    let (u, v) = map.edge_endpoints(e);
    let faces = map.edge_face_ids(e);
    faces
        .iter()
        .map(|&f| [layout.center[u], layout.dual_point[f], layout.center[v]])
        .collect()
}

/// Counts pairs of edge kites with interior overlap. Pairs are either all
/// (full mode) or those whose centroids fall in nearby grid cells.
fn overlap_check(
    layout: &Layout,
    map: &PlanarMap,
    opts: &ConsistencyOptions,
) -> (usize, usize) {
    let ne = map.edge_count();
    let tris: Vec<Vec<[Point; 3]>> = (0..ne).map(|e| kite_triangles(layout, map, e)).collect();
    let area = |t: &[Point; 3]| crate::geom::polygon_signed_area(t).abs();
    let overlapping = |a: usize, b: usize| -> bool {
        for t1 in &tris[a] {
            for t2 in &tris[b] {
                let inter = triangle_intersection_area(*t1, *t2);
                if inter > 1e-9 * area(t1).min(area(t2)) {
                    return true;
                }
            }
        }
        false
    };

    let mut count = 0;
    let mut checked = 0;
    if opts.full_overlap_check || ne <= 128 {
        for a in 0..ne {
            for b in a + 1..ne {
                checked += 1;
                if overlapping(a, b) {
                    count += 1;
                }
            }
        }
    } else {
        // Bucket kites by centroid; only nearby pairs can overlap.
        let centroid = |e: usize| -> Point {
            let ts = &tris[e];
            let mut acc = Point::ORIGIN;
            let mut k = 0.0;
            for t in ts {
                for p in t {
                    acc = acc + *p;
                    k += 1.0;
                }
            }
            acc.scale(1.0 / k)
        };
        let diam = (0..ne)
            .map(|e| {
                let (u, v) = map.edge_endpoints(e);
                layout.center[u].dist(layout.center[v])
                    + layout.radius[u].max(layout.radius[v])
            })
            .fold(0.0f64, f64::max);
        let cell = diam.max(1e-12);
        let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> =
            std::collections::HashMap::new();
        for e in 0..ne {
            let c = centroid(e);
            grid.entry(((c.x / cell).floor() as i64, (c.y / cell).floor() as i64))
                .or_default()
                .push(e);
        }
        let budget = 200_000usize;
        let mut cells: Vec<(i64, i64)> = grid.keys().copied().collect();
        cells.sort_unstable();
        'outer: for (gx, gy) in cells {
            let edges = &grid[&(gx, gy)];
            for &a in edges {
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        if let Some(others) = grid.get(&(gx + dx, gy + dy)) {
                            for &b in others {
                                if b <= a {
                                    continue;
                                }
                                checked += 1;
                                if overlapping(a, b) {
                                    count += 1;
                                }
                                if checked >= budget {
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    (count, checked)
}

/// Translates the root circle to the origin and rescales so the farthest
/// circle reaches `1 − 1e−9`; idempotent.
pub fn normalize_to_disk(layout: &Layout) -> Layout {
    let shift = layout.center[layout.root];
    let centers: Vec<Point> = layout.center.iter().map(|&z| z - shift).collect();
    let reach = centers
        .iter()
        .zip(&layout.radius)
        .map(|(z, r)| z.norm() + r)
        .fold(0.0f64, f64::max);
    let s = (1.0 - 1e-9) / reach;
    Layout {
        frame: Frame::UnitDisk,
        root: layout.root,
        center: centers.iter().map(|z| z.scale(s)).collect(),
        radius: layout.radius.iter().map(|r| r * s).collect(),
        dual_point: layout
            .dual_point
            .iter()
            .map(|&p| (p - shift).scale(s))
            .collect(),
    }
}

#[derive(Debug, Clone)]
pub struct SvgOptions {
    /// Canvas width/height in pixels.
    pub size: u32,
    pub draw_edges: bool,
    pub draw_dual_points: bool,
    /// Overlay polyline through these points (e.g. a walk trace).
    pub overlay_path: Vec<Point>,
    pub circle_color: String,
    pub highlight_root: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            size: 800,
            draw_edges: false,
            draw_dual_points: false,
            overlay_path: Vec::new(),
            circle_color: "#2a6f97".to_string(),
            highlight_root: true,
        }
    }
}

/// Renders the layout as standalone SVG 1.1; output bytes are deterministic
/// for fixed inputs and options.
pub fn export_svg(layout: &Layout, map: &PlanarMap, opts: &SvgOptions) -> String {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut extend = |p: Point, r: f64| {
        lo.x = lo.x.min(p.x - r);
        lo.y = lo.y.min(p.y - r);
        hi.x = hi.x.max(p.x + r);
        hi.y = hi.y.max(p.y + r);
    };
    for (z, r) in layout.center.iter().zip(&layout.radius) {
        extend(*z, *r);
    }
    if layout.frame == Frame::UnitDisk {
        extend(Point::ORIGIN, 1.0);
    }
    if !layout.center.is_empty() {
        let w = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
        let pad = 0.02 * w;
        lo = lo - Point::new(pad, pad);
        hi = hi + Point::new(pad, pad);
    } else {
        lo = Point::new(-1.0, -1.0);
        hi = Point::new(1.0, 1.0);
    }
    let span = Point::new(hi.x - lo.x, hi.y - lo.y);
    let stroke = span.x.max(span.y) / 400.0;

    // SVG y grows downward; emit with y negated.
    let fy = |p: Point| Point::new(p.x, -p.y);
    let vb_y = -hi.y;
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{:.8} {:.8} {:.8} {:.8}\">\n",
        opts.size, opts.size, lo.x, vb_y, span.x, span.y
    ));
    if layout.frame == Frame::UnitDisk {
        s.push_str(&format!(
            "  <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#888888\" stroke-width=\"{:.8}\" stroke-dasharray=\"{:.8} {:.8}\"/>\n",
            stroke, 4.0 * stroke, 4.0 * stroke
        ));
    }
    if opts.draw_edges {
        for &(u, v) in map.edges() {
            let a = fy(layout.center[u]);
            let b = fy(layout.center[v]);
            s.push_str(&format!(
                "  <line x1=\"{:.8}\" y1=\"{:.8}\" x2=\"{:.8}\" y2=\"{:.8}\" stroke=\"#bbbbbb\" stroke-width=\"{:.8}\"/>\n",
                a.x, a.y, b.x, b.y, 0.6 * stroke
            ));
        }
    }
    for v in 0..layout.center.len() {
        let c = fy(layout.center[v]);
        let emphasized = opts.highlight_root && v == layout.root;
        s.push_str(&format!(
            "  <circle cx=\"{:.8}\" cy=\"{:.8}\" r=\"{:.8}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{:.8}\"/>\n",
            c.x,
            c.y,
            layout.radius[v],
            if emphasized { "#d1495b" } else { &opts.circle_color },
            if emphasized { 1.6 * stroke } else { stroke }
        ));
    }
    if opts.draw_dual_points {
        for &p in &layout.dual_point {
            let c = fy(p);
            s.push_str(&format!(
                "  <circle cx=\"{:.8}\" cy=\"{:.8}\" r=\"{:.8}\" fill=\"#e09f3e\" stroke=\"none\"/>\n",
                c.x, c.y, 1.5 * stroke
            ));
        }
    }
    if opts.overlay_path.len() > 1 {
        s.push_str("  <polyline points=\"");
        for (i, &p) in opts.overlay_path.iter().enumerate() {
            let c = fy(p);
            if i > 0 {
                s.push(' ');
            }
            s.push_str(&format!("{:.8},{:.8}", c.x, c.y));
        }
        s.push_str(&format!(
            "\" fill=\"none\" stroke=\"#d1495b\" stroke-width=\"{:.8}\" stroke-linejoin=\"round\"/>\n",
            1.2 * stroke
        ));
        let end = fy(*opts.overlay_path.last().unwrap());
        s.push_str(&format!(
            "  <circle cx=\"{:.8}\" cy=\"{:.8}\" r=\"{:.8}\" fill=\"#d1495b\"/>\n",
            end.x, end.y, 2.0 * stroke
        ));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tessellation::generate_regular_patch;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid_layout(generations: usize) -> (PlanarMap, AngleAssignment, Layout) {
        let m = generate_regular_patch(4, 4, generations).unwrap();
        let theta = AngleAssignment::uniform(&m, PI / 2.0).unwrap();
        let metric = PackingMetric::uniform(&m, 1.0).unwrap();
        let layout = layout_embed(&m, &theta, &metric).unwrap();
        (m, theta, layout)
    }

    #[test]
    fn square_grid_realizes_sqrt2_lattice() {
        let (m, _, layout) = grid_layout(2);
        let s = 2.0f64.sqrt();
        for v in m.vertices() {
            let gx = layout.center[v].x / s;
            let gy = layout.center[v].y / s;
            assert!(
                (gx - gx.round()).abs() < 1e-9 && (gy - gy.round()).abs() < 1e-9,
                "vertex {v} off-lattice: ({gx}, {gy})"
            );
        }
        for &(u, v) in m.edges() {
            assert_relative_eq!(layout.center[u].dist(layout.center[v]), s, epsilon = 1e-9);
        }
        // Dual points sit at the face centers: half-integer lattice points.
        for f in 0..m.face_count() {
            let p = layout.dual_point[f];
            let gx = p.x / s - 0.5;
            let gy = p.y / s - 0.5;
            assert!(
                (gx - gx.round()).abs() < 1e-9 && (gy - gy.round()).abs() < 1e-9,
                "dual {f} off-center: {p:?}"
            );
        }
    }

    #[test]
    fn triangular_patch_realizes_sqrt3_lattice() {
        let m = generate_regular_patch(3, 6, 2).unwrap();
        let theta = AngleAssignment::uniform(&m, PI / 3.0).unwrap();
        let metric = PackingMetric::uniform(&m, 1.0).unwrap();
        let layout = layout_embed(&m, &theta, &metric).unwrap();
        let s = 3.0f64.sqrt();
        for v in m.vertices() {
            // Coordinates in the basis (1,0), (1/2, sqrt(3)/2).
            let c = layout.center[v].scale(1.0 / s);
            let b = c.y / (3.0f64.sqrt() / 2.0);
            let a = c.x - b / 2.0;
            assert!(
                (a - a.round()).abs() < 1e-9 && (b - b.round()).abs() < 1e-9,
                "vertex {v} off-lattice: a={a} b={b}"
            );
        }
    }

    #[test]
    fn layout_is_deterministic() {
        let (_, _, l1) = grid_layout(3);
        let (_, _, l2) = grid_layout(3);
        for (a, b) in l1.center.iter().zip(&l2.center) {
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.y.to_bits(), b.y.to_bits());
        }
    }

    #[test]
    fn gauge_fixing() {
        let (m, _, layout) = grid_layout(1);
        assert_eq!(layout.center[m.root()], Point::ORIGIN);
        let w0 = m.neighbors(m.root())[0];
        assert!(layout.center[w0].y.abs() < 1e-12 && layout.center[w0].x > 0.0);
    }

    #[test]
    fn consistency_on_exact_grid() {
        let (m, theta, layout) = grid_layout(2);
        let report =
            consistency_check(&layout, &m, &theta, &ConsistencyOptions::default()).unwrap();
        assert!(report.max_edge_deviation_rel < 1e-12);
        assert!(report.max_dual_spread_abs < 1e-12);
        assert!(report.max_wedge_tiling_dev < 1e-12);
        assert_eq!(report.overlap_count, 0);
        assert!(report.flagged_edges.is_empty());
    }

    #[test]
    fn corrupted_layout_is_flagged() {
        let (m, theta, mut layout) = grid_layout(2);
        let victim = m.root();
        layout.center[victim] = layout.center[victim] + Point::new(0.1, 0.0);
        let report =
            consistency_check(&layout, &m, &theta, &ConsistencyOptions::default()).unwrap();
        assert!(!report.flagged_edges.is_empty());
        assert!(report
            .flagged_edges
            .iter()
            .all(|&(u, v, _)| u == victim || v == victim));
        assert!(report.max_edge_deviation_rel > 1e-3);
    }

    #[test]
    fn non_flat_metric_fails_holonomy() {
        let m = generate_regular_patch(3, 7, 2).unwrap();
        let theta = AngleAssignment::uniform(&m, PI / 3.0).unwrap();
        let metric = PackingMetric::uniform(&m, 1.0).unwrap();
        assert!(matches!(
            layout_embed(&m, &theta, &metric),
            Err(Error::InconsistentHolonomy { .. })
        ));
    }

    #[test]
    fn normalize_reaches_unit_circle_and_is_idempotent() {
        let (_, _, layout) = grid_layout(2);
        let disk = normalize_to_disk(&layout);
        assert_eq!(disk.frame, Frame::UnitDisk);
        let reach = disk
            .center
            .iter()
            .zip(&disk.radius)
            .map(|(z, r)| z.norm() + r)
            .fold(0.0f64, f64::max);
        assert_relative_eq!(reach, 1.0 - 1e-9, epsilon = 1e-12);
        let again = normalize_to_disk(&disk);
        for (a, b) in disk.center.iter().zip(&again.center) {
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.y.to_bits(), b.y.to_bits());
        }
        for (a, b) in disk.radius.iter().zip(&again.radius) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn hyperbolic_centers_stay_inside_circles() {
        let (_, _, layout) = grid_layout(2);
        let disk = normalize_to_disk(&layout);
        let zh = disk.hyp_centers().unwrap();
        for (v, (&z, &r)) in disk.center.iter().zip(&disk.radius).enumerate() {
            assert!(zh[v].dist(z) <= r, "vertex {v}");
        }
        // Plane frames have no hyperbolic centers.
        assert!(layout.hyp_centers().is_err());
    }

    #[test]
    fn hyperbolic_quadrangulation_layout_is_consistent() {
        // {4,5}: pentavalent squares, kites with a free vertex on each side.
        use crate::packing::{solve, SolverConfig, SolverMethod};
        let m = generate_regular_patch(4, 5, 3).unwrap();
        let theta = AngleAssignment::uniform(&m, PI / 2.0).unwrap();
        let r0 = PackingMetric::uniform(&m, 1.0).unwrap();
        let out = solve(
            &m,
            &theta,
            &r0,
            &SolverConfig {
                method: SolverMethod::FixedPoint,
                tol: 1e-11,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(out.converged);
        let layout = layout_embed(&m, &theta, &out.metric).unwrap();
        let report =
            consistency_check(&layout, &m, &theta, &ConsistencyOptions::default()).unwrap();
        assert!(report.max_edge_deviation_rel < 1e-8);
        assert!(report.max_dual_spread_abs < 1e-6);
        assert_eq!(report.overlap_count, 0);
    }

    #[test]
    fn svg_output_is_deterministic_and_well_formed() {
        let (m, _, layout) = grid_layout(1);
        let disk = normalize_to_disk(&layout);
        let opts = SvgOptions {
            draw_edges: true,
            draw_dual_points: true,
            ..Default::default()
        };
        let a = export_svg(&disk, &m, &opts);
        let b = export_svg(&disk, &m, &opts);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        // 9 vertex circles + 1 unit circle + 4 dual markers.
        assert_eq!(a.matches("<circle").count(), 14);
        assert_eq!(a.matches("<line").count(), m.edge_count());
    }
}
