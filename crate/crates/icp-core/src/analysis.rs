//! Desk-scale verification suites: type dichotomy by boundary-radius decay,
//! ring-lemma ratio bounds, the dyadic counting bound, and unimodular
//! averages of vertex statistics on torus quotients.

use std::f64::consts::PI;

use serde::Serialize;

use crate::angle::{character_l, character_t, check_c1, comb_angle_theta, AngleAssignment};
use crate::error::{Error, Result};
use crate::layout::{Frame, Layout};
use crate::map::{PlanarMap, Topology, VertexId};
use crate::packing::{solve, PackingMetric, SolverConfig, SolverMethod};
use crate::tessellation::generate_regular_patch;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeDiagnosis {
    ParabolicLike,
    HyperbolicLike,
    Inconclusive,
}

/// Classification thresholds, tuned for generation ≤ 6 patches. These are
/// configuration, not constants of nature: the underlying statements are
/// asymptotic.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DichotomyThresholds {
    /// Hyperbolic-like needs a per-generation log-decay rate below this.
    pub hyperbolic_rate: f64,
    /// Parabolic-like needs |rate| below this.
    pub parabolic_rate_band: f64,
    /// Parabolic-like needs |mean_T − 2π| below this; hyperbolic-like needs
    /// mean_T − 2π above it.
    pub mean_t_band: f64,
}

impl Default for DichotomyThresholds {
    fn default() -> Self {
        DichotomyThresholds {
            hyperbolic_rate: -0.1,
            parabolic_rate_band: 0.02,
            mean_t_band: 0.01,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DichotomyConfig {
    pub solver: SolverConfig,
    pub thresholds: DichotomyThresholds,
}

impl Default for DichotomyConfig {
    fn default() -> Self {
        DichotomyConfig {
            solver: SolverConfig {
                method: SolverMethod::FixedPoint,
                tol: 1e-10,
                ..Default::default()
            },
            thresholds: DichotomyThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerationDecay {
    pub generation: usize,
    /// Mean boundary radius after `r(root) = 1` normalization.
    pub mean_boundary_radius: f64,
    pub solver_iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport {
    /// Interior-vertex means on the largest examined generation.
    pub mean_t: f64,
    pub mean_theta: f64,
    pub mean_deg: f64,
    pub decay: Vec<GenerationDecay>,
    /// Least-squares slope of `ln(mean boundary radius)` per generation.
    pub decay_rate: f64,
    /// Consecutive-generation differences of `ln(mean boundary radius)`.
    pub per_step_rates: Vec<f64>,
    pub diagnosis: TypeDiagnosis,
}

/// Solves the `{p,q}` family with constant angles across the listed
/// generations (unit boundary radii held fixed) and classifies the family by
/// the decay of the root-normalized boundary radius.
pub fn dichotomy_experiment(
    p: usize,
    q: usize,
    theta_value: f64,
    generations: &[usize],
    cfg: &DichotomyConfig,
) -> Result<DichotomyReport> {
    if generations.is_empty() {
        return Err(Error::InvalidInput("no generations listed".into()));
    }
    let mut decay = Vec::with_capacity(generations.len());
    let mut stats = None;
    for &g in generations {
        let map = generate_regular_patch(p, q, g)?;
        let theta = AngleAssignment::uniform(&map, theta_value)?;
        let c1 = check_c1(&map, &theta, cfg.solver.c1_tol);
        if !c1.pass {
            return Err(Error::C1Violated(c1.max_abs_residual));
        }
        let r0 = PackingMetric::uniform(&map, 1.0)?;
        let out = solve(&map, &theta, &r0, &cfg.solver)?;
        if !out.converged {
            return Err(Error::NoConvergence {
                iters: out.iterations,
                max_k: out.curvature.max_abs_k(),
            });
        }
        let boundary = map.boundary_cycle();
        let mean_boundary = boundary
            .iter()
            .map(|&v| out.metric.get(v))
            .sum::<f64>()
            / boundary.len() as f64;
        decay.push(GenerationDecay {
            generation: g,
            mean_boundary_radius: mean_boundary,
            solver_iterations: out.iterations,
        });
        if Some(&g) == generations.iter().max() {
            let interior: Vec<VertexId> = map.interior_vertices().collect();
            let n = interior.len() as f64;
            let mean_t = interior
                .iter()
                .map(|&v| character_t(&map, &theta, v))
                .sum::<Result<f64>>()?
                / n;
            let mean_theta = interior
                .iter()
                .map(|&v| comb_angle_theta(&map, v))
                .sum::<Result<f64>>()?
                / n;
            let mean_deg = interior.iter().map(|&v| map.degree(v) as f64).sum::<f64>() / n;
            stats = Some((mean_t, mean_theta, mean_deg));
        }
    }
    let (mean_t, mean_theta, mean_deg) = stats.expect("largest generation processed");

    let logs: Vec<(f64, f64)> = decay
        .iter()
        .map(|d| (d.generation as f64, d.mean_boundary_radius.ln()))
        .collect();
    let decay_rate = slope(&logs);
    let per_step_rates: Vec<f64> = decay
        .windows(2)
        .map(|w| {
            (w[1].mean_boundary_radius.ln() - w[0].mean_boundary_radius.ln())
                / (w[1].generation as f64 - w[0].generation as f64)
        })
        .collect();

    let th = &cfg.thresholds;
    let diagnosis = if decay_rate < th.hyperbolic_rate && mean_t > 2.0 * PI + th.mean_t_band {
        TypeDiagnosis::HyperbolicLike
    } else if decay_rate.abs() < th.parabolic_rate_band
        && (mean_t - 2.0 * PI).abs() < th.mean_t_band
    {
        TypeDiagnosis::ParabolicLike
    } else {
        TypeDiagnosis::Inconclusive
    };
    Ok(DichotomyReport {
        mean_t,
        mean_theta,
        mean_deg,
        decay,
        decay_rate,
        per_step_rates,
        diagnosis,
    })
}

fn slope(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let n = points.len() as f64;
    let xbar = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ybar = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - xbar) * (p.0 - xbar)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct RingReport {
    /// `max −log(r(v)/r(u)) / S(u)` over qualified ordered edge pairs.
    pub empirical_c: f64,
    pub max_abs_log_ratio: f64,
    pub qualified_pairs: usize,
    pub min_depth: usize,
    /// Subtracted lemma margin `min_u (Σ_{v~u} r(v) − max_{v~u} r(v)) / r(u)`
    /// over the qualified vertices.
    pub lemma2_margin: f64,
}

/// Ring-lemma statistics `r(v)/r(u) > exp(−C·S(u))`, evaluated at flower
/// vertices `u` of interior depth at least `min_depth` against their
/// interior neighbors. The depth restriction keeps the statistic away from
/// boundary effects: the bound is about vertices whose neighborhood looks
/// like the infinite tessellation.
pub fn ring_check(map: &PlanarMap, metric: &PackingMetric, min_depth: usize) -> Result<RingReport> {
    let qualified: Vec<VertexId> = map
        .vertices()
        .filter(|&v| map.interior_depth(v) >= min_depth)
        .collect();
    if qualified.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let mut empirical_c = 0.0f64;
    let mut max_abs = 0.0f64;
    let mut pairs = 0;
    for &u in &qualified {
        let s_u = map.flower_degree(u)? as f64;
        for &v in map.neighbors(u) {
            if !map.is_interior_vertex(v) {
                continue;
            }
            let log_ratio = (metric.get(v) / metric.get(u)).ln();
            empirical_c = empirical_c.max(-log_ratio / s_u);
            max_abs = max_abs.max(log_ratio.abs());
            pairs += 1;
        }
    }
    let mut lemma2 = f64::INFINITY;
    for &u in &qualified {
        let radii: Vec<f64> = map.neighbors(u).iter().map(|&v| metric.get(v)).collect();
        let sum: f64 = radii.iter().sum();
        let max = radii.iter().copied().fold(0.0f64, f64::max);
        lemma2 = lemma2.min((sum - max) / metric.get(u));
    }
    Ok(RingReport {
        empirical_c,
        max_abs_log_ratio: max_abs,
        qualified_pairs: pairs,
        min_depth,
        lemma2_margin: lemma2,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma2Report {
    /// `min_u (Σ_{v~u} r(v) − max_{v~u} r(v)) / r(u)` over interior vertices.
    pub margin_subtracted: f64,
    /// `min_u Σ_{v~u} r(v) / r(u)`: the form the covering argument actually
    /// bounds from below by `2ε₁/π`.
    pub margin_full: f64,
    /// `2 ε₁ / π` with `ε₁ = π − max Θ`.
    pub two_eps1_over_pi: f64,
    pub vertices_checked: usize,
}

/// Neighbor-radius covering margins at interior vertices.
pub fn lemma2_check(
    map: &PlanarMap,
    theta: &AngleAssignment,
    metric: &PackingMetric,
) -> Result<Lemma2Report> {
    let mut subtracted = f64::INFINITY;
    let mut full = f64::INFINITY;
    let mut checked = 0;
    for u in map.interior_vertices() {
        let radii: Vec<f64> = map.neighbors(u).iter().map(|&v| metric.get(v)).collect();
        let sum: f64 = radii.iter().sum();
        let max = radii.iter().copied().fold(0.0f64, f64::max);
        subtracted = subtracted.min((sum - max) / metric.get(u));
        full = full.min(sum / metric.get(u));
        checked += 1;
    }
    if checked == 0 {
        return Err(Error::EmptyInterior);
    }
    Ok(Lemma2Report {
        margin_subtracted: subtracted,
        margin_full: full,
        two_eps1_over_pi: 2.0 * theta.epsilon_pinch() / PI,
        vertices_checked: checked,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CountingRow {
    pub tau: f64,
    /// `N(τ)`: circles with radius at least τ.
    pub count: usize,
    /// `N(τ) · τ²`.
    pub product: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountingReport {
    pub rows: Vec<CountingRow>,
    pub max_product: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Checks the dyadic counting bound `N(τ) · τ² ≤ 100` on a unit-disk layout.
/// The bound is a conservative instance of the area argument: disjoint disks
/// of one dyadic layer cannot outnumber the disk area available.
pub fn count_radii_check(layout: &Layout) -> Result<CountingReport> {
    if layout.frame != Frame::UnitDisk {
        return Err(Error::FrameMismatch("counting bound needs the unit-disk frame"));
    }
    let bound = 100.0;
    let min_r = layout.radius.iter().copied().fold(f64::INFINITY, f64::min);
    let max_k = (-min_r.log2()).ceil() as i32 + 1;
    let mut rows = Vec::new();
    let mut max_product = 0.0f64;
    for k in 0..=max_k.max(1) {
        let tau = 2.0f64.powi(-k);
        let count = layout.radius.iter().filter(|&&r| r >= tau).count();
        let product = count as f64 * tau * tau;
        max_product = max_product.max(product);
        rows.push(CountingRow {
            tau,
            count,
            product,
        });
    }
    Ok(CountingReport {
        rows,
        max_product,
        bound,
        pass: max_product <= bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexStatistic {
    CharacterT,
    CombAngle,
    Degree,
    CharacterL,
}

/// Arithmetic mean of a vertex statistic over all vertices of a torus
/// quotient: the expectation under a uniform root, which satisfies the
/// mass-transport principle exactly on a vertex-transitive quotient.
pub fn unimodular_average(
    map: &PlanarMap,
    theta: &AngleAssignment,
    stat: VertexStatistic,
) -> Result<f64> {
    if map.topology() != Topology::Torus {
        return Err(Error::NotTorus);
    }
    let n = map.vertex_count() as f64;
    let mut total = 0.0;
    for v in map.vertices() {
        total += match stat {
            VertexStatistic::CharacterT => character_t(map, theta, v)?,
            VertexStatistic::CombAngle => comb_angle_theta(map, v)?,
            VertexStatistic::Degree => map.degree(v) as f64,
            VertexStatistic::CharacterL => character_l(map, theta, v)?,
        };
    }
    Ok(total / n)
}
