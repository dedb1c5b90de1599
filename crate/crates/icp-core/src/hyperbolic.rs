//! Poincaré disk utilities: hyperbolic distance and hyperbolic centers of
//! Euclidean circles contained in the unit disk.

use crate::error::{Error, Result};
use crate::geom::Point;

/// Poincaré distance between two points of the open unit disk, via the
/// Möbius-invariant pseudo-distance `ρ = |z1 − z2| / |1 − z1 conj(z2)|`:
/// `d = log((1 + ρ) / (1 − ρ))`. For `z1 = 0` this is `log((1+|z2|)/(1−|z2|))`.
pub fn d_hyp(z1: Point, z2: Point) -> Result<f64> {
    if z1.norm() >= 1.0 || z2.norm() >= 1.0 {
        return Err(Error::NotInsideDisk);
    }
    // 1 - z1 * conj(z2) in components.
    let re = 1.0 - (z1.x * z2.x + z1.y * z2.y);
    let im = -(z1.y * z2.x - z1.x * z2.y);
    let rho = z1.dist(z2) / re.hypot(im);
    Ok(((1.0 + rho) / (1.0 - rho)).ln())
}

/// Hyperbolic center of the Euclidean circle `B(z, r)` inside the unit disk.
///
/// By symmetry the center lies on the diameter through `z`, at the
/// hyperbolic midpoint of the two diametral points `|z| ± r`:
/// `|z_h| = tanh((artanh(|z| − r) + artanh(|z| + r)) / 2)`.
/// It always lies inside the Euclidean circle: `|z_h − z| < r`.
pub fn hyperbolic_center(z: Point, r: f64) -> Result<Point> {
    if r <= 0.0 || r.is_nan() {
        return Err(Error::DomainError(format!("radius {r} must be positive")));
    }
    let d = z.norm();
    if d + r >= 1.0 {
        return Err(Error::NotInsideDisk);
    }
    let m = (((d - r).atanh() + (d + r).atanh()) / 2.0).tanh();
    if d < 1e-300 {
        return Ok(Point::ORIGIN);
    }
    Ok(z.scale(m / d))
}
