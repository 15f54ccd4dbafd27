//! Plane geometry helpers shared by every module.

pub type Point = nalgebra::Point2<f64>;
pub type Vec2 = nalgebra::Vector2<f64>;

#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Clockwise quarter turn, `(x, y) -> (y, -x)`.
#[inline]
pub fn perp_cw(z: &Vec2) -> Vec2 {
    Vec2::new(z.y, -z.x)
}

/// Counter-clockwise quarter turn, `(x, y) -> (-y, x)`.
#[inline]
pub fn perp_ccw(z: &Vec2) -> Vec2 {
    Vec2::new(-z.y, z.x)
}

/// Twice the signed area of a closed polygon (shoelace).
pub fn signed_area2(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            a.x * b.y - a.y * b.x
        })
        .sum()
}

/// Largest pairwise distance, computed via the bounding box diagonal's
/// upper bound when the set is large and exactly otherwise.
pub fn diameter(points: &[Point]) -> f64 {
    if points.len() <= 512 {
        let mut d2: f64 = 0.0;
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                d2 = d2.max((a - b).norm_squared());
            }
        }
        d2.sqrt()
    } else {
        let (lo, hi) = bounding_box(points);
        (hi - lo).norm()
    }
}

pub fn bounding_box(points: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

pub fn is_finite(p: &Point) -> bool {
    p.x.is_finite() && p.y.is_finite()
}
