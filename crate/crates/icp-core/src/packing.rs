//! Circle packing metrics and the zero-curvature solvers.
//!
//! Each edge `e = vw` carries a Euclidean kite built from the two circle
//! radii and the intersection angle: the apex angles at the two dual points
//! are `π − Θ(e)`, the sides at `v` have length `r(v)`, and the wedge angle
//! of the kite at `v` is
//!
//! ```text
//! α_v^w = 2 arccos[ (r(v) + r(w) cos Θ) / sqrt(r(v)² + r(w)² + 2 r(v) r(w) cos Θ) ]
//! ```
//!
//! which depends only on the ratio `r(v)/r(w)`. Gluing the kites around an
//! interior vertex yields the cone angle `α_v = Σ_w α_v^w` and the discrete
//! Gauss curvature `K_v = 2π − α_v`; a flat metric (`K ≡ 0` at interior
//! vertices) is what the layout engine develops into the plane.
//!
//! Two solvers drive `K` to zero: the combinatorial Ricci flow
//! `dr_i/dt = −K_i sinh(r_i)`, integrated in `u = log r` with adaptive
//! explicit steps, and a Gauss-Seidel fixed-point sweep that repeatedly
//! re-solves each vertex radius by bisection (the cone angle is strictly
//! decreasing in the central radius).

use std::f64::consts::PI;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::angle::{check_c1, AngleAssignment};
use crate::error::{Error, Result};
use crate::map::{PlanarMap, VertexId};

/// Per-vertex positive radii; the global scale is arbitrary.
#[derive(Debug, Clone)]
pub struct PackingMetric {
    r: Vec<f64>,
}

impl PackingMetric {
    pub fn from_values(map: &PlanarMap, r: Vec<f64>) -> Result<Self> {
        if r.len() != map.vertex_count() {
            return Err(Error::InvalidInput(format!(
                "metric has {} radii for {} vertices",
                r.len(),
                map.vertex_count()
            )));
        }
        if let Some(&bad) = r.iter().find(|&&x| x <= 0.0 || !x.is_finite()) {
            return Err(Error::DomainError(format!("nonpositive radius {bad}")));
        }
        Ok(PackingMetric { r })
    }

    pub fn uniform(map: &PlanarMap, radius: f64) -> Result<Self> {
        Self::from_values(map, vec![radius; map.vertex_count()])
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.r[v]
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Rescales so that `r(v) = 1`; wedge angles are unchanged.
    pub fn normalized_at(&self, v: VertexId) -> PackingMetric {
        let s = 1.0 / self.r[v];
        PackingMetric {
            r: self.r.iter().map(|x| x * s).collect(),
        }
    }
}

/// Wedge angle of the edge kite at the vertex with radius `r_v`.
pub fn alpha_wedge(r_v: f64, r_w: f64, theta: f64) -> Result<f64> {
    check_wedge_domain(r_v, r_w, theta)?;
    let c = theta.cos();
    let num = r_v + r_w * c;
    let den = (r_v * r_v + r_w * r_w + 2.0 * r_v * r_w * c).sqrt();
    Ok(2.0 * (num / den).clamp(-1.0, 1.0).acos())
}

/// Analytic derivative `dα/dr_v = −2 r_w sin Θ / ℓ²` with `ℓ` the center
/// distance; strictly negative (the bisection solver relies on this).
pub fn alpha_wedge_dr(r_v: f64, r_w: f64, theta: f64) -> Result<f64> {
    check_wedge_domain(r_v, r_w, theta)?;
    let l2 = r_v * r_v + r_w * r_w + 2.0 * r_v * r_w * theta.cos();
    Ok(-2.0 * r_w * theta.sin() / l2)
}

/// Euclidean distance between the circle centers of an edge:
/// `sqrt(r_v² + r_w² + 2 r_v r_w cos Θ)`.
pub fn edge_length(r_v: f64, r_w: f64, theta: f64) -> Result<f64> {
    check_wedge_domain(r_v, r_w, theta)?;
    Ok((r_v * r_v + r_w * r_w + 2.0 * r_v * r_w * theta.cos()).sqrt())
}

fn check_wedge_domain(r_v: f64, r_w: f64, theta: f64) -> Result<()> {
    if !(r_v > 0.0 && r_w > 0.0) || !r_v.is_finite() || !r_w.is_finite() {
        return Err(Error::DomainError(format!(
            "radii must be positive, got ({r_v}, {r_w})"
        )));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::DomainError(format!(
            "intersection angle {theta} outside (0, pi)"
        )));
    }
    Ok(())
}

/// Cone angle `α_v = Σ_{w ~ v} α_v^w`, summed in rotation order.
pub fn cone_angle(
    map: &PlanarMap,
    theta: &AngleAssignment,
    metric: &PackingMetric,
    v: VertexId,
) -> Result<f64> {
    if v >= map.vertex_count() {
        return Err(Error::UnknownVertex(v));
    }
    if map.is_boundary_vertex(v) {
        return Err(Error::BoundaryVertex(v));
    }
    let r_v = metric.get(v);
    let mut total = 0.0;
    for &w in map.neighbors(v) {
        let e = map.edge_between(v, w).expect("adjacent");
        total += alpha_wedge(r_v, metric.get(w), theta.get(e))?;
    }
    Ok(total)
}

/// Cone angles and curvatures at interior vertices (`None` on the boundary).
#[derive(Debug, Clone)]
pub struct CurvatureField {
    pub alpha: Vec<Option<f64>>,
    pub k: Vec<Option<f64>>,
}

impl CurvatureField {
    pub fn max_abs_k(&self) -> f64 {
        self.k.iter().flatten().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    pub fn sum_k(&self) -> f64 {
        self.k.iter().flatten().sum()
    }
}

pub fn curvature(
    map: &PlanarMap,
    theta: &AngleAssignment,
    metric: &PackingMetric,
) -> Result<CurvatureField> {
    let n = map.vertex_count();
    let mut alpha = vec![None; n];
    let mut k = vec![None; n];
    for v in map.interior_vertices() {
        let a = cone_angle(map, theta, metric, v)?;
        alpha[v] = Some(a);
        k[v] = Some(2.0 * PI - a);
    }
    Ok(CurvatureField { alpha, k })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMethod {
    RicciFlow,
    FixedPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    /// Boundary radii of a disk patch are held at their initial values.
    FixedRadii,
    /// Every vertex with a defined curvature evolves. On a disk patch this
    /// coincides with `FixedRadii` (boundary vertices have no cone angle);
    /// on a torus all vertices evolve either way.
    Free,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: SolverMethod,
    /// Initial step size for the Ricci flow.
    pub step: f64,
    /// Target on `max |K|` over interior vertices.
    pub tol: f64,
    pub max_iters: usize,
    pub boundary_mode: BoundaryMode,
    /// Tolerance for the C1 precondition check.
    pub c1_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: SolverMethod::RicciFlow,
            step: 0.1,
            tol: 1e-9,
            max_iters: 100_000,
            boundary_mode: BoundaryMode::FixedRadii,
            c1_tol: crate::angle::DEFAULT_C1_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub max_abs_k: f64,
    pub step: f64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Best metric found, normalized so `r(root) = 1`.
    pub metric: PackingMetric,
    pub curvature: CurvatureField,
    pub log: Vec<IterationRecord>,
    pub converged: bool,
    pub iterations: usize,
}

/// Drives the interior curvature to zero.
///
/// Returns `Ok` with `converged = false` when the iteration budget runs out
/// (the best iterate and log are still returned); hard input errors
/// (C1 violation, nonpositive radii) fail outright.
pub fn solve(
    map: &PlanarMap,
    theta: &AngleAssignment,
    r0: &PackingMetric,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    let c1 = check_c1(map, theta, cfg.c1_tol);
    if !c1.pass {
        return Err(Error::C1Violated(c1.max_abs_residual));
    }
    if r0.len() != map.vertex_count() {
        return Err(Error::InvalidInput("metric size mismatch".into()));
    }
    let free: Vec<VertexId> = map.interior_vertices().collect();
    if free.is_empty() {
        return Err(Error::EmptyInterior);
    }
    match cfg.method {
        SolverMethod::RicciFlow => ricci_flow(map, theta, r0, cfg, &free),
        SolverMethod::FixedPoint => fixed_point(map, theta, r0, cfg, &free),
    }
}

fn ricci_flow(
    map: &PlanarMap,
    theta: &AngleAssignment,
    r0: &PackingMetric,
    cfg: &SolverConfig,
    free: &[VertexId],
) -> Result<SolveResult> {
    let start = Instant::now();
    let mut metric = r0.clone();
    let mut field = curvature(map, theta, &metric)?;
    let mut max_k = field.max_abs_k();
    let mut step = cfg.step;
    let mut log = vec![IterationRecord {
        iteration: 0,
        max_abs_k: max_k,
        step,
        elapsed_ms: ms_since(start),
    }];
    let mut iterations = 0;
    let mut accepted_streak = 0;
    while max_k > cfg.tol && iterations < cfg.max_iters {
        iterations += 1;
        let mut trial = metric.clone();
        for &v in free {
            let r = metric.get(v);
            let k = field.k[v].expect("free vertices are interior");
            // du/dt = -K sinh(r)/r in u = log r; clamp the sinh argument so
            // absurdly large radii slow down instead of overflowing.
            let rate = -k * r.min(30.0).sinh() / r.min(30.0);
            trial.r[v] = (r.ln() + step * rate).exp();
        }
        match curvature(map, theta, &trial) {
            Ok(f2) => {
                let m2 = f2.max_abs_k();
                if m2.is_finite() && m2 <= 1.5 * max_k {
                    metric = trial;
                    field = f2;
                    max_k = m2;
                    accepted_streak += 1;
                    if accepted_streak >= 10 {
                        step *= 2.0;
                        accepted_streak = 0;
                    }
                    log.push(IterationRecord {
                        iteration: iterations,
                        max_abs_k: max_k,
                        step,
                        elapsed_ms: ms_since(start),
                    });
                } else {
                    step *= 0.5;
                    accepted_streak = 0;
                }
            }
            Err(_) => {
                step *= 0.5;
                accepted_streak = 0;
            }
        }
        if step < 1e-18 {
            break;
        }
    }
    let converged = max_k <= cfg.tol;
    Ok(SolveResult {
        metric: metric.normalized_at(map.root()),
        curvature: field,
        log,
        converged,
        iterations,
    })
}

/// Radius at which the cone angle of `v` equals 2π with neighbors frozen,
/// found by bisection on the strictly decreasing angle.
fn solve_vertex_radius(
    map: &PlanarMap,
    theta: &AngleAssignment,
    metric: &PackingMetric,
    v: VertexId,
) -> Option<f64> {
    let angle_at = |r: f64| -> f64 {
        let mut total = 0.0;
        for &w in map.neighbors(v) {
            let e = map.edge_between(v, w).expect("adjacent");
            let c = theta.get(e).cos();
            let rw = metric.get(w);
            let num = r + rw * c;
            let den = (r * r + rw * rw + 2.0 * r * rw * c).sqrt();
            total += 2.0 * (num / den).clamp(-1.0, 1.0).acos();
        }
        total
    };
    let target = 2.0 * PI;
    let mut lo = metric.get(v);
    let mut hi = lo;
    if angle_at(lo) > target {
        // Angle too large: radius must grow.
        for _ in 0..400 {
            hi *= 2.0;
            if angle_at(hi) <= target {
                break;
            }
        }
        if angle_at(hi) > target {
            return None;
        }
    } else {
        for _ in 0..400 {
            lo *= 0.5;
            if angle_at(lo) >= target {
                break;
            }
        }
        if angle_at(lo) < target {
            return None;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if angle_at(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

fn fixed_point(
    map: &PlanarMap,
    theta: &AngleAssignment,
    r0: &PackingMetric,
    cfg: &SolverConfig,
    free: &[VertexId],
) -> Result<SolveResult> {
    let start = Instant::now();
    let mut metric = r0.clone();
    let mut field = curvature(map, theta, &metric)?;
    let mut max_k = field.max_abs_k();
    let mut log = vec![IterationRecord {
        iteration: 0,
        max_abs_k: max_k,
        step: 0.0,
        elapsed_ms: ms_since(start),
    }];
    // Gauss-Seidel sweeps in BFS order from the root: boundary information
    // propagates inward one layer per sweep.
    let order = bfs_order(map, free);
    let mut iterations = 0;
    while max_k > cfg.tol && iterations < cfg.max_iters {
        iterations += 1;
        for &v in &order {
            if let Some(r) = solve_vertex_radius(map, theta, &metric, v) {
                metric.r[v] = r;
            }
        }
        field = curvature(map, theta, &metric)?;
        max_k = field.max_abs_k();
        log.push(IterationRecord {
            iteration: iterations,
            max_abs_k: max_k,
            step: 0.0,
            elapsed_ms: ms_since(start),
        });
    }
    let converged = max_k <= cfg.tol;
    Ok(SolveResult {
        metric: metric.normalized_at(map.root()),
        curvature: field,
        log,
        converged,
        iterations,
    })
}

fn bfs_order(map: &PlanarMap, free: &[VertexId]) -> Vec<VertexId> {
    let mut is_free = vec![false; map.vertex_count()];
    for &v in free {
        is_free[v] = true;
    }
    let mut seen = vec![false; map.vertex_count()];
    let mut queue = std::collections::VecDeque::new();
    let mut order = Vec::with_capacity(free.len());
    seen[map.root()] = true;
    queue.push_back(map.root());
    while let Some(v) = queue.pop_front() {
        if is_free[v] {
            order.push(v);
        }
        for &w in map.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    order
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
