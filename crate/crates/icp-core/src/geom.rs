//! Small 2D vector/point utilities used by the layout engine.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Angle of the vector from the origin to `self`, in `(-pi, pi]`.
    pub fn arg(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    /// Counterclockwise rotation by 90 degrees.
    pub fn rot90(self) -> Point {
        Point::new(-self.y, self.x)
    }

    /// Unit vector at the given angle.
    pub fn from_angle(phi: f64) -> Point {
        Point::new(phi.cos(), phi.sin())
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// 2D cross product (z component of the 3D cross product).
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// The two intersection points of circles `(c1, r1)` and `(c2, r2)`.
///
/// Returns the points `base ± h·n` where `n` is the CCW normal of the
/// center-to-center direction; the first returned point lies to the left of
/// the directed segment `c1 → c2`. Returns `None` when the circles do not
/// intersect in two points (within a small tolerance the tangent case is
/// accepted and both points coincide).
pub fn circle_intersections(c1: Point, r1: f64, c2: Point, r2: f64) -> Option<(Point, Point)> {
    let d = c1.dist(c2);
    if d <= 0.0 {
        return None;
    }
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h2 = r1 * r1 - a * a;
    // Tolerate slightly negative h^2 from roundoff near tangency.
    if h2 < -1e-12 * r1 * r1 {
        return None;
    }
    let h = h2.max(0.0).sqrt();
    let u = (c2 - c1).scale(1.0 / d);
    let base = c1 + u.scale(a);
    let n = u.rot90();
    Some((base + n.scale(h), base - n.scale(h)))
}

/// Signed area of a polygon (positive for CCW orientation).
pub fn polygon_signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += pts[i].cross(pts[(i + 1) % n]);
    }
    0.5 * acc
}

/// Area of the intersection of two triangles, by Sutherland-Hodgman clipping.
///
/// Both triangles may be given in either orientation.
pub fn triangle_intersection_area(t1: [Point; 3], t2: [Point; 3]) -> f64 {
    let mut subject: Vec<Point> = t1.to_vec();
    let mut clip: Vec<Point> = t2.to_vec();
    if polygon_signed_area(&subject) < 0.0 {
        subject.reverse();
    }
    if polygon_signed_area(&clip) < 0.0 {
        clip.reverse();
    }
    let mut poly = subject;
    for i in 0..3 {
        if poly.is_empty() {
            return 0.0;
        }
        let a = clip[i];
        let b = clip[(i + 1) % 3];
        let dir = b - a;
        let inside = |p: Point| dir.cross(p - a) >= 0.0;
        let mut out: Vec<Point> = Vec::with_capacity(poly.len() + 2);
        for j in 0..poly.len() {
            let p = poly[j];
            let q = poly[(j + 1) % poly.len()];
            let pin = inside(p);
            let qin = inside(q);
            if pin {
                out.push(p);
            }
            if pin != qin {
                let denom = dir.cross(q - p);
                if denom.abs() > 0.0 {
                    let t = (dir.cross(a - p) / denom).clamp(0.0, 1.0);
                    out.push(p + (q - p).scale(t));
                }
            }
        }
        poly = out;
    }
    polygon_signed_area(&poly).abs()
}
