//! Edge angle assignments, Rivin's conditions, and the vertex statistics
//! `T`, `θ`, `k`, `L` together with the mass-transport identity relating
//! them on torus quotients.
//!
//! For a face `f`, condition (C1) requires `Σ_{e ∈ ∂f} (π − Θ(e)) = 2π`.
//! Condition (C2') requires every closed cycle that does not bound a face to
//! carry weight `Σ (π − Θ(e)) > 2π + ε₀` for a uniform `ε₀ > 0`; the cycle
//! search lives in [`crate::cycles`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cycles::{min_nonfacial_cycle_weight, CycleWitness};
use crate::error::{Error, Result};
use crate::map::{PlanarMap, Topology, VertexId};

/// Default tolerance for C1 residuals (inputs are finite-precision decimals).
pub const DEFAULT_C1_TOL: f64 = 1e-9;

/// Per-edge intersection angles, strictly inside `(0, π)`.
#[derive(Debug, Clone)]
pub struct AngleAssignment {
    theta: Vec<f64>,
}

impl AngleAssignment {
    pub fn from_values(map: &PlanarMap, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != map.edge_count() {
            let (u, v) = map.edge_endpoints(theta.len().min(map.edge_count() - 1));
            return Err(Error::MissingAngle(u, v));
        }
        for &t in &theta {
            if !(t > 0.0 && t < PI) {
                return Err(Error::RangeViolated(t));
            }
        }
        Ok(AngleAssignment { theta })
    }

    pub fn uniform(map: &PlanarMap, angle: f64) -> Result<Self> {
        Self::from_values(map, vec![angle; map.edge_count()])
    }

    /// The constant angle satisfying (C1) on `p`-gonal faces:
    /// `Θ = (p-2)π/p` (π/3 on triangles, π/2 on squares).
    pub fn regular_angle(p: usize) -> f64 {
        (p as f64 - 2.0) * PI / p as f64
    }

    pub fn get(&self, e: usize) -> f64 {
        self.theta[e]
    }

    pub fn values(&self) -> &[f64] {
        &self.theta
    }

    /// Slack of the angle pinch `Θ ≤ π − ε`: `ε = π − max_e Θ(e)`.
    pub fn epsilon_pinch(&self) -> f64 {
        PI - self.theta.iter().copied().fold(0.0, f64::max)
    }
}

/// Residual table for condition (C1).
#[derive(Debug, Clone, Serialize)]
pub struct C1Report {
    /// `Σ_{e ∈ ∂f} (π − Θ(e)) − 2π` per face.
    pub residuals: Vec<f64>,
    pub max_abs_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Combined report for Rivin's conditions on a finite map.
#[derive(Debug, Clone, Serialize)]
pub struct RivinReport {
    pub c1: C1Report,
    /// Minimum weight over simple non-facial cycles; `None` when no
    /// non-facial cycle exists (the minimum is +∞ and (C2') holds trivially).
    pub c2_min_weight: Option<f64>,
    pub c2_witness: Option<Vec<VertexId>>,
    /// `c2_min_weight − 2π`.
    pub epsilon0: Option<f64>,
    pub c2_pass: bool,
    pub notes: Vec<String>,
}

pub fn check_c1(map: &PlanarMap, theta: &AngleAssignment, tol: f64) -> C1Report {
    let mut residuals = Vec::with_capacity(map.face_count());
    let mut max_abs: f64 = 0.0;
    for f in 0..map.face_count() {
        let sum: f64 = map.face_edges(f).iter().map(|&e| PI - theta.get(e)).sum();
        let r = sum - 2.0 * PI;
        max_abs = max_abs.max(r.abs());
        residuals.push(r);
    }
    C1Report {
        residuals,
        max_abs_residual: max_abs,
        tol,
        pass: max_abs <= tol,
    }
}

/// Runs both condition checks and assembles the report.
///
/// (C2) is checked over *simple* non-facial cycles: edge weights `π − Θ` are
/// positive, so any non-facial closed walk contains a simple cycle of no
/// larger weight, and a walk tracing k ≥ 2 facial cycles weighs at least 4π
/// under (C1). On disk patches the outer boundary counts as non-facial.
pub fn rivin_report(
    map: &PlanarMap,
    theta: &AngleAssignment,
    tol: f64,
    max_cycle_len: Option<usize>,
) -> RivinReport {
    let c1 = check_c1(map, theta, tol);
    let witness = min_nonfacial_cycle_weight(map, theta, max_cycle_len);
    let (c2_min_weight, c2_witness, epsilon0) = match &witness {
        Some(CycleWitness {
            weight, vertices, ..
        }) => (
            Some(*weight),
            Some(vertices.clone()),
            Some(weight - 2.0 * PI),
        ),
        None => (None, None, None),
    };
    let c2_pass = epsilon0.is_none_or(|e| e > 0.0);
    let mut notes = vec![
        "C2 checked over simple non-facial cycles; non-simple closed walks \
         carry at least as much weight"
            .to_string(),
    ];
    if map.topology() == Topology::DiskPatch {
        notes.push("outer boundary cycle counted as non-facial".to_string());
        notes.push(
            "epsilon0 is patch-restricted; it does not certify the infinite limit".to_string(),
        );
    }
    if let Some(cap) = max_cycle_len {
        notes.push(format!("cycle search capped at {cap} edges"));
    }
    RivinReport {
        c1,
        c2_min_weight,
        c2_witness,
        epsilon0,
        c2_pass,
        notes,
    }
}

/// Angle character `T(v) = Σ_{e ∋ v} Θ(e)`.
pub fn character_t(map: &PlanarMap, theta: &AngleAssignment, v: VertexId) -> Result<f64> {
    if v >= map.vertex_count() {
        return Err(Error::UnknownVertex(v));
    }
    Ok(map
        .neighbors(v)
        .iter()
        .map(|&w| theta.get(map.edge_between(v, w).expect("adjacent")))
        .sum())
}

/// Combinatorial angle `θ(v) = Σ_{f ∋ v} (deg(f) − 2)π / deg(f)`.
///
/// Defined at interior vertices only: boundary vertices of a disk patch have
/// the outer region among their incident corners.
pub fn comb_angle_theta(map: &PlanarMap, v: VertexId) -> Result<f64> {
    if v >= map.vertex_count() {
        return Err(Error::UnknownVertex(v));
    }
    if map.is_boundary_vertex(v) {
        return Err(Error::BoundaryVertex(v));
    }
    Ok(map
        .corner_faces(v)
        .iter()
        .map(|&f| {
            let d = map.face_degree(f) as f64;
            (d - 2.0) * PI / d
        })
        .sum())
}

/// Discrete curvature `k(v) = 2π − θ(v)`.
pub fn curvature_k(map: &PlanarMap, v: VertexId) -> Result<f64> {
    Ok(2.0 * PI - comb_angle_theta(map, v)?)
}

/// Normalized character excess `L(v) = (T(v) − 2π) / deg(v)`.
pub fn character_l(map: &PlanarMap, theta: &AngleAssignment, v: VertexId) -> Result<f64> {
    Ok((character_t(map, theta, v)? - 2.0 * PI) / map.degree(v) as f64)
}

/// Verification report for the mass-transport identity.
#[derive(Debug, Clone, Serialize)]
pub struct MtpReport {
    /// `max_u |Σ_v m(u,v) − T(u)|`.
    pub max_outgoing_deviation: f64,
    /// `max_v |Σ_u m(u,v) − θ(v)|`.
    pub max_incoming_deviation: f64,
    pub sum_t: f64,
    pub sum_theta: f64,
    /// `|Σ_v T(v) − Σ_v θ(v)|`.
    pub global_deviation: f64,
    pub mean_t: f64,
    pub mean_theta: f64,
}

/// Verifies the transport identity on a torus quotient.
///
/// The transport sends, for each face `f` and each boundary edge `e ∈ ∂f`,
/// mass `Θ(e) / (2 deg f)` from each endpoint of `e` to each boundary vertex
/// of `f`. Summing one way recovers `T(u)`; summing the other way recovers
/// `θ(v)` whenever (C1) holds. A uniform root on a vertex-transitive quotient
/// satisfies the mass-transport principle exactly, so the two totals agree.
pub fn mass_transport_check(
    map: &PlanarMap,
    theta: &AngleAssignment,
    c1_tol: f64,
) -> Result<MtpReport> {
    if map.topology() != Topology::Torus {
        return Err(Error::NotTorus);
    }
    let c1 = check_c1(map, theta, c1_tol);
    if !c1.pass {
        return Err(Error::C1Violated(c1.max_abs_residual));
    }

    let n = map.vertex_count();
    let mut transport: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
    for f in 0..map.face_count() {
        let d = map.face_degree(f) as f64;
        for &e in map.face_edges(f) {
            let (x, y) = map.edge_endpoints(e);
            let w = theta.get(e) / (2.0 * d);
            for &v in map.face_cycle(f) {
                *transport.entry((x, v)).or_insert(0.0) += w;
                *transport.entry((y, v)).or_insert(0.0) += w;
            }
        }
    }
    let mut outgoing = vec![0.0f64; n];
    let mut incoming = vec![0.0f64; n];
    for (&(u, v), &m) in &transport {
        outgoing[u] += m;
        incoming[v] += m;
    }

    let mut max_out: f64 = 0.0;
    let mut max_in: f64 = 0.0;
    let mut sum_t = 0.0;
    let mut sum_theta = 0.0;
    for v in map.vertices() {
        let t = character_t(map, theta, v)?;
        let th = comb_angle_theta(map, v)?;
        max_out = max_out.max((outgoing[v] - t).abs());
        max_in = max_in.max((incoming[v] - th).abs());
        sum_t += t;
        sum_theta += th;
    }
    Ok(MtpReport {
        max_outgoing_deviation: max_out,
        max_incoming_deviation: max_in,
        sum_t,
        sum_theta,
        global_deviation: (sum_t - sum_theta).abs(),
        mean_t: sum_t / n as f64,
        mean_theta: sum_theta / n as f64,
    })
}

/// Adds a seeded random vector from the null space of the face-sum
/// constraints, rescaled to the requested sup-norm, leaving all C1 residuals
/// unchanged.
pub fn perturb_theta_on_c1(
    map: &PlanarMap,
    theta: &AngleAssignment,
    magnitude: f64,
    seed: u64,
) -> Result<AngleAssignment> {
    if magnitude == 0.0 {
        return Ok(theta.clone());
    }
    if magnitude < 0.0 {
        return Err(Error::InvalidInput(
            "negative perturbation magnitude".into(),
        ));
    }
    let ne = map.edge_count();

    // Orthonormal basis of the face-constraint row space (each row is the
    // 0/1 indicator of the edges of a face), by modified Gram-Schmidt with
    // one re-orthogonalization pass.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for f in 0..map.face_count() {
        let mut row = vec![0.0f64; ne];
        for &e in map.face_edges(f) {
            row[e] = 1.0;
        }
        for _ in 0..2 {
            for q in &basis {
                let dot: f64 = q.iter().zip(&row).map(|(a, b)| a * b).sum();
                for (r, &qv) in row.iter_mut().zip(q) {
                    *r -= dot * qv;
                }
            }
        }
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-10 * (map.face_degree(f) as f64).sqrt() {
            for r in &mut row {
                *r /= norm;
            }
            basis.push(row);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..16 {
        let mut dir: Vec<f64> = (0..ne).map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for q in &basis {
                let dot: f64 = q.iter().zip(&dir).map(|(a, b)| a * b).sum();
                for (d, &qv) in dir.iter_mut().zip(q) {
                    *d -= dot * qv;
                }
            }
        }
        let sup = dir.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if sup < 1e-8 {
            continue;
        }
        let scale = magnitude / sup;
        let perturbed: Vec<f64> = theta
            .values()
            .iter()
            .zip(&dir)
            .map(|(&t, &d)| t + d * scale)
            .collect();
        if let Some(&bad) = perturbed.iter().find(|&&t| !(t > 0.0 && t < PI)) {
            return Err(Error::RangeViolated(bad));
        }
        return AngleAssignment::from_values(map, perturbed);
    }
    Err(Error::EmptyNullSpace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tessellation::{generate_regular_patch, generate_torus_quotient};
    use approx::assert_relative_eq;

    #[test]
    fn c1_residuals_on_regular_families() {
        let tri = generate_regular_patch(3, 6, 2).unwrap();
        let theta = AngleAssignment::uniform(&tri, PI / 3.0).unwrap();
        let report = check_c1(&tri, &theta, DEFAULT_C1_TOL);
        assert!(report.pass);
        assert!(report.max_abs_residual < 1e-12);

        let sq = generate_regular_patch(4, 4, 1).unwrap();
        let theta = AngleAssignment::uniform(&sq, PI / 2.0).unwrap();
        assert!(check_c1(&sq, &theta, DEFAULT_C1_TOL).pass);
    }

    #[test]
    fn c1_detects_bad_triangle() {
        // One triangle with angles (π/3, π/3, π/2): residual 11π/6 − 2π.
        let m = PlanarMap::build_from_faces(&[vec![0, 1, 2]], 0, Topology::DiskPatch).unwrap();
        let mut vals = vec![PI / 3.0; 3];
        vals[m.edge_between(0, 1).unwrap()] = PI / 2.0;
        let theta = AngleAssignment::from_values(&m, vals).unwrap();
        let report = check_c1(&m, &theta, DEFAULT_C1_TOL);
        assert!(!report.pass);
        assert_relative_eq!(report.residuals[0], -PI / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn angle_range_is_enforced() {
        let m = generate_regular_patch(3, 6, 1).unwrap();
        assert!(matches!(
            AngleAssignment::uniform(&m, PI),
            Err(Error::RangeViolated(_))
        ));
        assert!(matches!(
            AngleAssignment::uniform(&m, 0.0),
            Err(Error::RangeViolated(_))
        ));
    }

    #[test]
    fn characters_on_regular_vertices() {
        let hex = generate_regular_patch(3, 6, 2).unwrap();
        let theta = AngleAssignment::uniform(&hex, PI / 3.0).unwrap();
        let root = hex.root();
        assert_relative_eq!(character_t(&hex, &theta, root).unwrap(), 2.0 * PI, epsilon = 1e-12);
        assert_relative_eq!(comb_angle_theta(&hex, root).unwrap(), 2.0 * PI, epsilon = 1e-12);
        assert_relative_eq!(curvature_k(&hex, root).unwrap(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(character_l(&hex, &theta, root).unwrap(), 0.0, epsilon = 1e-12);

        let sept = generate_regular_patch(3, 7, 2).unwrap();
        let theta = AngleAssignment::uniform(&sept, PI / 3.0).unwrap();
        let root = sept.root();
        assert_relative_eq!(
            character_t(&sept, &theta, root).unwrap(),
            7.0 * PI / 3.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            comb_angle_theta(&sept, root).unwrap(),
            7.0 * PI / 3.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            curvature_k(&sept, root).unwrap(),
            -PI / 3.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            character_l(&sept, &theta, root).unwrap(),
            PI / 21.0,
            epsilon = 1e-12
        );

        let grid = generate_regular_patch(4, 4, 2).unwrap();
        let theta = AngleAssignment::uniform(&grid, PI / 2.0).unwrap();
        assert_relative_eq!(character_t(&grid, &theta, grid.root()).unwrap(), 2.0 * PI, epsilon = 1e-12);
        assert_relative_eq!(character_l(&grid, &theta, grid.root()).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn theta_rejects_boundary_vertices() {
        let hex = generate_regular_patch(3, 6, 1).unwrap();
        let boundary = hex.boundary_cycle()[0];
        assert!(matches!(
            comb_angle_theta(&hex, boundary),
            Err(Error::BoundaryVertex(_))
        ));
    }

    #[test]
    fn character_bounds() {
        // T(v) ≤ π deg(v) and θ(v) < π deg(v) at interior vertices.
        let m = generate_regular_patch(3, 7, 3).unwrap();
        let theta = AngleAssignment::uniform(&m, PI / 3.0).unwrap();
        for v in m.interior_vertices() {
            let d = m.degree(v) as f64;
            assert!(character_t(&m, &theta, v).unwrap() <= PI * d + 1e-12);
            assert!(comb_angle_theta(&m, v).unwrap() < PI * d);
        }
    }

    #[test]
    fn mtp_identities_on_square_torus() {
        let m = generate_torus_quotient(4, 4, 3).unwrap();
        let theta = AngleAssignment::uniform(&m, PI / 2.0).unwrap();
        let report = mass_transport_check(&m, &theta, DEFAULT_C1_TOL).unwrap();
        assert!(report.max_outgoing_deviation < 1e-12);
        assert!(report.max_incoming_deviation < 1e-12);
        assert_relative_eq!(report.sum_t, 9.0 * 2.0 * PI, epsilon = 1e-10);
        assert_relative_eq!(report.sum_theta, 9.0 * 2.0 * PI, epsilon = 1e-10);
    }

    #[test]
    fn mtp_identities_on_triangular_torus() {
        let m = generate_torus_quotient(3, 6, 3).unwrap();
        let theta = AngleAssignment::uniform(&m, PI / 3.0).unwrap();
        let report = mass_transport_check(&m, &theta, DEFAULT_C1_TOL).unwrap();
        assert!(report.max_outgoing_deviation < 1e-12);
        assert!(report.max_incoming_deviation < 1e-12);
        assert_relative_eq!(report.mean_t, 2.0 * PI, epsilon = 1e-12);
        assert_relative_eq!(report.mean_theta, 2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn mtp_requires_torus() {
        let m = generate_regular_patch(3, 6, 2).unwrap();
        let theta = AngleAssignment::uniform(&m, PI / 3.0).unwrap();
        assert!(matches!(
            mass_transport_check(&m, &theta, DEFAULT_C1_TOL),
            Err(Error::NotTorus)
        ));
    }

    #[test]
    fn perturbation_preserves_c1() {
        let m = generate_torus_quotient(4, 4, 3).unwrap();
        let theta = AngleAssignment::uniform(&m, PI / 2.0).unwrap();
        let perturbed = perturb_theta_on_c1(&m, &theta, 0.1, 7).unwrap();
        let report = check_c1(&m, &perturbed, 1e-12);
        assert!(report.pass, "residual {}", report.max_abs_residual);
        let moved = perturbed
            .values()
            .iter()
            .any(|&t| (t - PI / 2.0).abs() > 0.01);
        assert!(moved, "perturbation should change some angles");

        // The perturbed assignment still satisfies the transport identity.
        let mtp = mass_transport_check(&m, &perturbed, 1e-10).unwrap();
        assert!(mtp.max_outgoing_deviation < 1e-12);
        assert!(mtp.max_incoming_deviation < 1e-12);
        assert!(mtp.global_deviation < 1e-10);
    }

    #[test]
    fn perturbation_magnitude_zero_is_identity() {
        let m = generate_torus_quotient(3, 6, 3).unwrap();
        let theta = AngleAssignment::uniform(&m, PI / 3.0).unwrap();
        let same = perturb_theta_on_c1(&m, &theta, 0.0, 1).unwrap();
        assert_eq!(theta.values(), same.values());
    }

    #[test]
    fn perturbation_range_violation() {
        let m = generate_torus_quotient(4, 4, 3).unwrap();
        let theta = AngleAssignment::uniform(&m, PI / 2.0).unwrap();
        assert!(matches!(
            perturb_theta_on_c1(&m, &theta, 10.0, 1),
            Err(Error::RangeViolated(_))
        ));
    }
}
