//! Ideal circle packings of angle-weighted planar maps.
//!
//! A planar cellular decomposition together with an edge angle function
//! `Θ : E → (0, π)` (the intersection angles of adjacent circles) determines,
//! when Rivin's conditions hold, an *ideal circle packing*: one circle per
//! vertex, adjacent circles crossing at the prescribed angle, and all circles
//! around a face passing through a common dual point.
//!
//! The crate is organized as a pipeline:
//!
//! * [`map`] — combinatorial maps (disk patches and torus quotients), duals,
//!   and generators for the regular `{p,q}` families;
//! * [`angle`] — angle assignments, Rivin condition checking, the vertex
//!   characters `T`, `θ`, `k`, `L`, and the mass-transport identity;
//! * [`packing`] — circle packing metrics, discrete Gauss curvature, and the
//!   curvature-zeroing solvers (Ricci flow and fixed-point iteration);
//! * [`layout`] — planar realization of a flat metric, unit-disk
//!   normalization, and SVG export;
//! * [`hyperbolic`] — Poincaré disk distance and hyperbolic circle centers;
//! * [`walk`] — seeded simple random walks with radius/speed observables;
//! * [`analysis`] — dichotomy, ring-lemma, counting-bound, and
//!   mass-transport verification suites.

pub mod analysis;
pub mod angle;
pub mod cycles;
pub mod error;
pub mod geom;
pub mod hyperbolic;
pub mod io;
pub mod layout;
pub mod map;
pub mod packing;
pub mod tessellation;
pub mod walk;

pub use error::{Error, Result};
pub use map::{DualSkeleton, PlanarMap, Topology};
