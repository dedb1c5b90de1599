//! Seeded simple random walks with the geometric observables used by the
//! radius-decay and speed experiments.
//!
//! All randomness flows from a 64-bit seed through ChaCha8; independent
//! samples of an ensemble use the same seed with the sample index as the
//! stream. Walks on disk patches stop on first contact with the boundary.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::d_hyp;
use crate::layout::{Frame, Layout};
use crate::map::{PlanarMap, VertexId};
use crate::packing::PackingMetric;

/// Identifier of the generator recorded in output metadata.
pub const RNG_ALGORITHM: &str = "chacha8/seed64/stream=sample-index";

#[derive(Debug, Clone)]
pub struct WalkTrace {
    pub seed: u64,
    pub stream: u64,
    /// Visited vertices `X_0 .. X_n`.
    pub steps: Vec<VertexId>,
    pub stopped_at_boundary: bool,
    /// `r(X_i)` when observed against a layout or metric.
    pub radii: Option<Vec<f64>>,
    /// `|z(X_i)|` (unit-disk layout).
    pub abs_z: Option<Vec<f64>>,
    /// `d_hyp(z_h(X_0), z_h(X_i))` (unit-disk layout).
    pub hyp_dist: Option<Vec<f64>>,
}

impl WalkTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Records radii from a bare metric (no layout required).
    pub fn observe_metric(&mut self, metric: &PackingMetric) {
        self.radii = Some(self.steps.iter().map(|&v| metric.get(v)).collect());
    }

    /// Records radii, center moduli and hyperbolic displacement against a
    /// unit-disk layout.
    pub fn observe_layout(&mut self, layout: &Layout) -> Result<()> {
        if layout.frame != Frame::UnitDisk {
            return Err(Error::FrameMismatch("walk observables need a unit-disk layout"));
        }
        let zh = layout.hyp_centers()?;
        let base = zh[self.steps[0]];
        self.radii = Some(self.steps.iter().map(|&v| layout.radius[v]).collect());
        self.abs_z = Some(self.steps.iter().map(|&v| layout.center[v].norm()).collect());
        let mut hyp = Vec::with_capacity(self.steps.len());
        for &v in &self.steps {
            hyp.push(d_hyp(base, zh[v])?);
        }
        self.hyp_dist = Some(hyp);
        Ok(())
    }
}

/// Simple random walk from `start`, stopping at the first boundary vertex or
/// after `n` steps. Deterministic in `(map, start, n, seed)`.
pub fn srw_walk(map: &PlanarMap, start: VertexId, n: usize, seed: u64) -> Result<WalkTrace> {
    srw_walk_stream(map, start, n, seed, 0)
}

/// Ensemble variant: same seed, per-sample stream.
pub fn srw_walk_stream(
    map: &PlanarMap,
    start: VertexId,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<WalkTrace> {
    if start >= map.vertex_count() {
        return Err(Error::UnknownVertex(start));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut steps = Vec::with_capacity(n + 1);
    let mut cur = start;
    steps.push(cur);
    let mut stopped = map.is_boundary_vertex(cur);
    while !stopped && steps.len() <= n {
        let nbrs = map.neighbors(cur);
        cur = nbrs[rng.random_range(0..nbrs.len())];
        steps.push(cur);
        stopped = map.is_boundary_vertex(cur);
    }
    Ok(WalkTrace {
        seed,
        stream,
        steps,
        stopped_at_boundary: stopped,
        radii: None,
        abs_z: None,
        hyp_dist: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpeedEstimate {
    /// Slope of `−log r(X_i)` against `i` over the window.
    pub lambda_radius: f64,
    pub stderr_radius: f64,
    /// Slope of `d_hyp(z_h(X_0), z_h(X_i))` against `i`, when available.
    pub lambda_hyp: Option<f64>,
    pub stderr_hyp: Option<f64>,
    /// Fitted step range (inclusive).
    pub window: (usize, usize),
}

/// Ordinary least-squares slope and its standard error.
fn ols_slope(ys: &[f64]) -> (f64, f64) {
    let m = ys.len() as f64;
    let xbar = (m - 1.0) / 2.0;
    let ybar: f64 = ys.iter().sum::<f64>() / m;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (i, &y) in ys.iter().enumerate() {
        let dx = i as f64 - xbar;
        sxx += dx * dx;
        sxy += dx * (y - ybar);
    }
    let slope = sxy / sxx;
    let mut ss_res = 0.0;
    for (i, &y) in ys.iter().enumerate() {
        let pred = ybar + slope * (i as f64 - xbar);
        ss_res += (y - pred) * (y - pred);
    }
    let stderr = if m > 2.0 {
        (ss_res / (m - 2.0) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    (slope, stderr)
}

/// Window `[n/4, 0.9 n]` (the trailing 10% is dropped only for walks that
/// were absorbed at the boundary, to reduce truncation bias).
fn fit_window(trace: &WalkTrace) -> (usize, usize) {
    let n = trace.len() - 1;
    let start = n / 4;
    let end = if trace.stopped_at_boundary {
        ((n as f64) * 0.9).floor() as usize
    } else {
        n
    };
    (start, end.max(start))
}

/// Least-squares slopes of the radius and hyperbolic observables over the
/// window `[n/4, stop]`; requires at least 50 usable steps.
pub fn estimate_speed(trace: &WalkTrace) -> Result<SpeedEstimate> {
    let radii = trace
        .radii
        .as_ref()
        .ok_or(Error::InvalidInput("trace has no radius observable".into()))?;
    let (start, end) = fit_window(trace);
    let usable = end + 1 - start;
    if usable < 50 {
        return Err(Error::TooShort(usable));
    }
    let neg_log_r: Vec<f64> = radii[start..=end].iter().map(|r| -r.ln()).collect();
    let (lambda_radius, stderr_radius) = ols_slope(&neg_log_r);
    let (lambda_hyp, stderr_hyp) = match &trace.hyp_dist {
        Some(h) => {
            let (s, e) = ols_slope(&h[start..=end]);
            (Some(s), Some(e))
        }
        None => (None, None),
    };
    Ok(SpeedEstimate {
        lambda_radius,
        stderr_radius,
        lambda_hyp,
        stderr_hyp,
        window: (start, end),
    })
}

/// Pooled ensemble speed over many traces: increment sums over each trace's
/// fit window, robust to individually short traces.
pub fn ensemble_speed(traces: &[WalkTrace]) -> Result<SpeedEstimate> {
    let mut dy_r = 0.0;
    let mut dy_h = 0.0;
    let mut dn = 0.0;
    let mut have_hyp = true;
    let mut min_start = usize::MAX;
    let mut max_end = 0;
    for trace in traces {
        let radii = match &trace.radii {
            Some(r) => r,
            None => continue,
        };
        let (start, end) = fit_window(trace);
        if end <= start {
            continue;
        }
        dy_r += -radii[end].ln() + radii[start].ln();
        match &trace.hyp_dist {
            Some(h) => dy_h += h[end] - h[start],
            None => have_hyp = false,
        }
        dn += (end - start) as f64;
        min_start = min_start.min(start);
        max_end = max_end.max(end);
    }
    if dn < 50.0 {
        return Err(Error::TooShort(dn as usize));
    }
    Ok(SpeedEstimate {
        lambda_radius: dy_r / dn,
        stderr_radius: f64::NAN,
        lambda_hyp: have_hyp.then_some(dy_h / dn),
        stderr_hyp: None,
        window: (min_start, max_end),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExitHistogram {
    /// Counts per uniform angular bin of `arg z` at stopping.
    pub bins: Vec<u64>,
    pub bin_count: usize,
    pub sample_count: usize,
    /// How many walks actually reached the boundary (the rest were cut off
    /// at the step cap).
    pub absorbed_count: usize,
    pub rng: &'static str,
}

/// Runs `samples` independent walks from the root and bins the angular
/// position of the final circle center.
pub fn exit_histogram(
    map: &PlanarMap,
    layout: &Layout,
    samples: usize,
    n_max: usize,
    bins: usize,
    seed: u64,
) -> Result<ExitHistogram> {
    if layout.frame != Frame::UnitDisk {
        return Err(Error::FrameMismatch("exit angles need a unit-disk layout"));
    }
    if bins == 0 {
        return Err(Error::InvalidInput("need at least one bin".into()));
    }
    let mut hist = vec![0u64; bins];
    let mut absorbed = 0;
    for s in 0..samples {
        let trace = srw_walk_stream(map, map.root(), n_max, seed, s as u64)?;
        if trace.stopped_at_boundary {
            absorbed += 1;
        }
        let z = layout.center[*trace.steps.last().unwrap()];
        let angle = z.arg().rem_euclid(std::f64::consts::TAU);
        let mut b = (angle / std::f64::consts::TAU * bins as f64) as usize;
        if b >= bins {
            b = bins - 1;
        }
        hist[b] += 1;
    }
    Ok(ExitHistogram {
        bins: hist,
        bin_count: bins,
        sample_count: samples,
        absorbed_count: absorbed,
        rng: RNG_ALGORITHM,
    })
}

/// Ensemble statistics of `log r(X_n)` by step.
#[derive(Debug, Clone, Serialize)]
pub struct DecaySeries {
    pub step: Vec<usize>,
    /// Traces still running at this step.
    pub alive: Vec<usize>,
    pub mean_log_r: Vec<f64>,
    pub q25: Vec<f64>,
    pub q50: Vec<f64>,
    pub q75: Vec<f64>,
}

impl DecaySeries {
    /// Least-squares slope of the ensemble mean over the steps where at
    /// least `min_alive` traces survive.
    pub fn fit_slope(&self, min_alive: usize) -> Option<f64> {
        let ys: Vec<f64> = self
            .alive
            .iter()
            .zip(&self.mean_log_r)
            .take_while(|(&a, _)| a >= min_alive)
            .map(|(_, &m)| m)
            .collect();
        if ys.len() < 2 {
            return None;
        }
        Some(ols_slope(&ys).0)
    }
}

pub fn radii_decay_series(traces: &[WalkTrace]) -> Result<DecaySeries> {
    let max_len = traces.iter().map(|t| t.len()).max().unwrap_or(0);
    if max_len == 0 {
        return Err(Error::InvalidInput("no traces given".into()));
    }
    let mut step = Vec::new();
    let mut alive_v = Vec::new();
    let mut mean_v = Vec::new();
    let mut q25_v = Vec::new();
    let mut q50_v = Vec::new();
    let mut q75_v = Vec::new();
    for i in 0..max_len {
        let mut vals: Vec<f64> = Vec::new();
        for t in traces {
            if let Some(r) = &t.radii {
                if i < r.len() {
                    vals.push(r[i].ln());
                }
            }
        }
        if vals.is_empty() {
            break;
        }
        vals.sort_by(f64::total_cmp);
        let quant = |q: f64| -> f64 {
            let pos = q * (vals.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            let frac = pos - lo as f64;
            vals[lo] * (1.0 - frac) + vals[hi] * frac
        };
        step.push(i);
        alive_v.push(vals.len());
        mean_v.push(vals.iter().sum::<f64>() / vals.len() as f64);
        q25_v.push(quant(0.25));
        q50_v.push(quant(0.5));
        q75_v.push(quant(0.75));
    }
    Ok(DecaySeries {
        step,
        alive: alive_v,
        mean_log_r: mean_v,
        q25: q25_v,
        q50: q50_v,
        q75: q75_v,
    })
}


#[cfg(test)]
mod exit_measure_tests {
    use super::*;
    use crate::angle::AngleAssignment;
    use crate::layout::{layout_embed, normalize_to_disk};
    use crate::packing::{solve, PackingMetric, SolverConfig, SolverMethod};
    use crate::tessellation::generate_regular_patch;

    #[test]
    fn doubling_bins_keeps_mass_spread_out() {
        // Non-atomicity proxy: refining the angular bins must not leave the
        // mass concentrated in one bin.
        let m = generate_regular_patch(3, 7, 3).unwrap();
        let theta = AngleAssignment::uniform(&m, std::f64::consts::PI / 3.0).unwrap();
        let r0 = PackingMetric::uniform(&m, 1.0).unwrap();
        let out = solve(
            &m,
            &theta,
            &r0,
            &SolverConfig {
                method: SolverMethod::FixedPoint,
                tol: 1e-10,
                ..Default::default()
            },
        )
        .unwrap();
        let disk = normalize_to_disk(&layout_embed(&m, &theta, &out.metric).unwrap());
        for bins in [16usize, 32] {
            let h = exit_histogram(&m, &disk, 2000, 100_000, bins, 3).unwrap();
            let max_frac =
                *h.bins.iter().max().unwrap() as f64 / h.sample_count as f64;
            assert!(
                max_frac < 0.5,
                "{bins} bins: max fraction {max_frac:.3} suggests an atom"
            );
        }
    }
}
