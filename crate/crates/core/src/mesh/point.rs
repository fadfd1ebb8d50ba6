use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    /// Counterclockwise rotation by 90°.
    #[inline]
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    #[inline]
    pub fn midpoint(self, o: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    #[inline]
    fn add_assign(&mut self, o: Point2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2::new(x, y)
    }
}

/// Signed area of a closed polygon (positive when counterclockwise).
pub fn signed_area(pts: &[Point2]) -> f64 {
    let n = pts.len();
    let mut a = 0.0;
    for i in 0..n {
        a += pts[i].cross(pts[(i + 1) % n]);
    }
    0.5 * a
}

/// Area centroid of a simple polygon.
pub fn polygon_centroid(pts: &[Point2]) -> Point2 {
    let n = pts.len();
    // shift to the first vertex to limit cancellation
    let o = pts[0];
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p = pts[i] - o;
        let q = pts[(i + 1) % n] - o;
        let c = p.cross(q);
        a += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    Point2::new(o.x + cx / (3.0 * a), o.y + cy / (3.0 * a))
}

/// Largest distance between two vertices.
pub fn diameter(pts: &[Point2]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            d = d.max(pts[i].dist(pts[j]));
        }
    }
    d
}

/// Circumcenter of a triangle, `None` for (near-)collinear input.
pub fn circumcenter(a: Point2, b: Point2, c: Point2) -> Option<Point2> {
    let ab = b - a;
    let ac = c - a;
    let d = 2.0 * ab.cross(ac);
    if d.abs() <= 1e-300 {
        return None;
    }
    let (b2, c2) = (ab.norm_sq(), ac.norm_sq());
    Some(Point2::new(a.x + (ac.y * b2 - ab.y * c2) / d, a.y + (ab.x * c2 - ac.x * b2) / d))
}

/// The three interior angles at `a`, `b`, `c`.
pub fn triangle_angles(a: Point2, b: Point2, c: Point2) -> [f64; 3] {
    let ang = |p: Point2, q: Point2, r: Point2| {
        let u = q - p;
        let v = r - p;
        u.cross(v).abs().atan2(u.dot(v))
    };
    [ang(a, b, c), ang(b, c, a), ang(c, a, b)]
}

/// Cotangent of the angle at `p` in the triangle `(p, q, r)`.
pub fn cot_at(p: Point2, q: Point2, r: Point2) -> f64 {
    let u = q - p;
    let v = r - p;
    u.dot(v) / u.cross(v).abs()
}

/// Interior angle of a CCW polygon at vertex `i` (in `(0, 2π)`).
pub fn interior_angle(pts: &[Point2], i: usize) -> f64 {
    let n = pts.len();
    let prev = pts[(i + n - 1) % n];
    let next = pts[(i + 1) % n];
    let u = next - pts[i];
    let v = prev - pts[i];
    let a = u.cross(v).atan2(u.dot(v));
    if a < 0.0 {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_area_and_centroid() {
        let sq = [Point2::new(0., 0.), Point2::new(1., 0.), Point2::new(1., 1.), Point2::new(0., 1.)];
        assert_eq!(signed_area(&sq), 1.0);
        let c = polygon_centroid(&sq);
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
        assert!((diameter(&sq) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn circumcenter_of_right_triangle_is_hypotenuse_midpoint() {
        let c = circumcenter(Point2::new(0., 0.), Point2::new(2., 0.), Point2::new(0., 2.)).unwrap();
        assert!((c.x - 1.0).abs() < 1e-15 && (c.y - 1.0).abs() < 1e-15);
        assert!(circumcenter(Point2::new(0., 0.), Point2::new(1., 1.), Point2::new(2., 2.)).is_none());
    }

    #[test]
    fn reflex_angle_detected() {
        // arrow shape with a notch at (1, 0.5)
        let pts = [Point2::new(0., 0.), Point2::new(2., 0.), Point2::new(2., 1.), Point2::new(1., 0.5), Point2::new(0., 1.)];
        assert!(interior_angle(&pts, 3) > std::f64::consts::PI);
        assert!(interior_angle(&pts, 0) < std::f64::consts::PI);
    }
}
