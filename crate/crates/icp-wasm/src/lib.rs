//! Browser bindings for the packing pipeline, driving the static demo page
//! in `www/`. Three entry points: render a packing as SVG, overlay a random
//! walk on it, and compute exit-angle/speed statistics as JSON.

use wasm_bindgen::prelude::*;

use icp_core::angle::{perturb_theta_on_c1, AngleAssignment};
use icp_core::layout::{export_svg, layout_embed, normalize_to_disk, Layout, SvgOptions};
use icp_core::map::PlanarMap;
use icp_core::packing::{solve, PackingMetric, SolverConfig, SolverMethod};
use icp_core::tessellation::generate_regular_patch;
use icp_core::walk::{ensemble_speed, exit_histogram, srw_walk_stream};

fn build_packing(
    p: usize,
    q: usize,
    generations: usize,
    perturb: f64,
    seed: u64,
) -> Result<(PlanarMap, Layout), JsError> {
    let map = generate_regular_patch(p, q, generations)?;
    let base = AngleAssignment::uniform(&map, AngleAssignment::regular_angle(p))?;
    let theta = if perturb > 0.0 {
        perturb_theta_on_c1(&map, &base, perturb, seed)?
    } else {
        base
    };
    let r0 = PackingMetric::uniform(&map, 1.0)?;
    let cfg = SolverConfig {
        method: SolverMethod::FixedPoint,
        tol: 1e-11,
        ..Default::default()
    };
    let out = solve(&map, &theta, &r0, &cfg)?;
    if !out.converged {
        return Err(JsError::new("solver did not converge for these parameters"));
    }
    let layout = normalize_to_disk(&layout_embed(&map, &theta, &out.metric)?);
    Ok((map, layout))
}

/// Solve and render a `{p,q}` packing in the unit disk. `perturb` applies a
/// C1-preserving random perturbation to the intersection angles.
#[wasm_bindgen]
pub fn render_packing(
    p: usize,
    q: usize,
    generations: usize,
    perturb: f64,
    seed: u64,
    edges: bool,
    duals: bool,
) -> Result<String, JsError> {
    let (map, layout) = build_packing(p, q, generations, perturb, seed)?;
    Ok(export_svg(
        &layout,
        &map,
        &SvgOptions {
            draw_edges: edges,
            draw_dual_points: duals,
            ..Default::default()
        },
    ))
}

/// Render the packing with one random-walk trajectory overlaid (polyline
/// through the visited circle centers, stopped at the boundary).
#[wasm_bindgen]
pub fn render_walk(
    p: usize,
    q: usize,
    generations: usize,
    perturb: f64,
    seed: u64,
    steps: usize,
    walk_seed: u64,
) -> Result<String, JsError> {
    let (map, layout) = build_packing(p, q, generations, perturb, seed)?;
    let trace = srw_walk_stream(&map, map.root(), steps, walk_seed, 0)?;
    let path = trace.steps.iter().map(|&v| layout.center[v]).collect();
    Ok(export_svg(
        &layout,
        &map,
        &SvgOptions {
            overlay_path: path,
            ..Default::default()
        },
    ))
}

/// Exit-angle histogram and pooled speed estimates for a walk ensemble,
/// returned as a JSON object for the page to chart.
#[wasm_bindgen]
pub fn walk_stats(
    p: usize,
    q: usize,
    generations: usize,
    samples: usize,
    bins: usize,
    seed: u64,
) -> Result<String, JsError> {
    let (map, layout) = build_packing(p, q, generations, 0.0, seed)?;
    let hist = exit_histogram(&map, &layout, samples, 100_000, bins, seed)?;
    let mut traces = Vec::with_capacity(samples);
    for s in 0..samples {
        let mut t = srw_walk_stream(&map, map.root(), 100_000, seed, s as u64)?;
        t.observe_layout(&layout)?;
        traces.push(t);
    }
    let speed = ensemble_speed(&traces).ok();
    let value = serde_json::json!({
        "bins": hist.bins,
        "bin_count": hist.bin_count,
        "sample_count": hist.sample_count,
        "absorbed_count": hist.absorbed_count,
        "lambda_radius": speed.as_ref().map(|s| s.lambda_radius),
        "lambda_hyp": speed.as_ref().and_then(|s| s.lambda_hyp),
        "rng": hist.rng,
    });
    Ok(value.to_string())
}
