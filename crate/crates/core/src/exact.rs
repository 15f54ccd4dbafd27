//! Exact geometric predicates.
//!
//! Every binary64 value is a dyadic rational, so a predicate evaluated on
//! `BigRational` images of the inputs is exact. A floating-point filter
//! with a forward error bound answers the easy cases; anything inside the
//! bound is re-evaluated in rational arithmetic.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::geom::{Point, Vec2};

/// `(3 + 16 eps) eps` with `eps = 2^-53`: bound on the relative error of a
/// 2x2 determinant whose entries are differences of inputs.
const DET_ERRBOUND: f64 = (3.0 + 16.0 * f64::EPSILON / 2.0) * (f64::EPSILON / 2.0);

/// Exact rational image of a finite float.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("exact predicates require finite input")
}

pub fn rational_point(p: &Point) -> [BigRational; 2] {
    [rational(p.x), rational(p.y)]
}

fn ord_of(r: &BigRational) -> Ordering {
    if r.is_positive() {
        Ordering::Greater
    } else if r.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

fn ord_of_f64(x: f64) -> Ordering {
    x.partial_cmp(&0.0).expect("finite")
}

/// Sign of `cross(u1 - u0, v1 - v0)`.
pub fn cross_diff_sign(u0: &Point, u1: &Point, v0: &Point, v1: &Point) -> Ordering {
    let ux = u1.x - u0.x;
    let uy = u1.y - u0.y;
    let vx = v1.x - v0.x;
    let vy = v1.y - v0.y;
    let l = ux * vy;
    let r = uy * vx;
    let det = l - r;
    let bound = DET_ERRBOUND * (l.abs() + r.abs());
    if det.abs() > bound && det.is_finite() && bound >= f64::MIN_POSITIVE {
        return ord_of_f64(det);
    }
    // A float difference is exactly zero iff its operands are equal, so
    // terms with a zero factor are exactly zero.
    if (ux == 0.0 || vy == 0.0) && (uy == 0.0 || vx == 0.0) {
        return Ordering::Equal;
    }
    let [u0x, u0y] = rational_point(u0);
    let [u1x, u1y] = rational_point(u1);
    let [v0x, v0y] = rational_point(v0);
    let [v1x, v1y] = rational_point(v1);
    let d = (u1x - u0x) * (v1y - v0y) - (u1y - u0y) * (v1x - v0x);
    ord_of(&d)
}

/// Sign of the orientation of the triangle `(a, b, c)`: `Greater` for a
/// counter-clockwise turn.
#[inline]
pub fn orient(a: &Point, b: &Point, c: &Point) -> Ordering {
    cross_diff_sign(a, b, a, c)
}

/// Sign of `cross(d1 - d0, z)` for a free vector `z`.
///
/// This is the cone inequality `<z_cw, d1 - d0>` with `z_cw` the clockwise
/// quarter turn of `z`.
pub fn cross_diff_vec_sign(d0: &Point, d1: &Point, z: &Vec2) -> Ordering {
    cross_diff_sign(d0, d1, &Point::origin(), &Point::new(z.x, z.y))
}

/// Sign of `cross(u, v)` for free vectors.
pub fn cross_sign(u: &Vec2, v: &Vec2) -> Ordering {
    cross_diff_sign(
        &Point::origin(),
        &Point::new(u.x, u.y),
        &Point::origin(),
        &Point::new(v.x, v.y),
    )
}

/// Sign of `dot(u1 - u0, v1 - v0)`.
pub fn dot_diff_sign(u0: &Point, u1: &Point, v0: &Point, v1: &Point) -> Ordering {
    let ux = u1.x - u0.x;
    let uy = u1.y - u0.y;
    let vx = v1.x - v0.x;
    let vy = v1.y - v0.y;
    let l = ux * vx;
    let r = uy * vy;
    let dot = l + r;
    let bound = DET_ERRBOUND * (l.abs() + r.abs());
    if dot.abs() > bound && bound >= f64::MIN_POSITIVE {
        return ord_of_f64(dot);
    }
    if (ux == 0.0 || vx == 0.0) && (uy == 0.0 || vy == 0.0) {
        return Ordering::Equal;
    }
    let [u0x, u0y] = rational_point(u0);
    let [u1x, u1y] = rational_point(u1);
    let [v0x, v0y] = rational_point(v0);
    let [v1x, v1y] = rational_point(v1);
    let d = (u1x - u0x) * (v1x - v0x) + (u1y - u0y) * (v1y - v0y);
    ord_of(&d)
}

pub fn dot_sign(u: &Vec2, v: &Vec2) -> Ordering {
    dot_diff_sign(
        &Point::origin(),
        &Point::new(u.x, u.y),
        &Point::origin(),
        &Point::new(v.x, v.y),
    )
}

/// `p` lies in the closed axis-aligned box of `a, b`. Exact (comparisons
/// only); combined with a zero orientation this is "on the closed segment".
fn in_box(a: &Point, b: &Point, p: &Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// `p` lies on the closed segment `[a, b]`.
pub fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    orient(a, b, p) == Ordering::Equal && in_box(a, b, p)
}

/// Closed segments `[a, b]` and `[c, d]` share at least one point.
pub fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 != o2
        && o3 != o4
        && o1 != Ordering::Equal
        && o2 != Ordering::Equal
        && o3 != Ordering::Equal
        && o4 != Ordering::Equal
    {
        return true;
    }
    (o1 == Ordering::Equal && in_box(a, b, c))
        || (o2 == Ordering::Equal && in_box(a, b, d))
        || (o3 == Ordering::Equal && in_box(c, d, a))
        || (o4 == Ordering::Equal && in_box(c, d, b))
}

/// Two segments sharing the endpoint `a`, namely `[a, b]` and `[a, c]`,
/// overlap beyond `a` (collinear and pointing the same way).
pub fn adjacent_segments_overlap(a: &Point, b: &Point, c: &Point) -> bool {
    orient(a, b, c) == Ordering::Equal && dot_diff_sign(a, b, a, c) == Ordering::Greater
}

/// Closed triangle `(a, b, c)` (either orientation) contains `p`.
pub fn in_closed_triangle(a: &Point, b: &Point, c: &Point, p: &Point) -> bool {
    let o = orient(a, b, c);
    if o == Ordering::Equal {
        return on_segment(a, b, p) || on_segment(b, c, p) || on_segment(c, a, p);
    }
    let o1 = orient(a, b, p);
    let o2 = orient(b, c, p);
    let o3 = orient(c, a, p);
    let bad = o.reverse();
    o1 != bad && o2 != bad && o3 != bad
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Exact point-in-polygon by winding number over a closed polygon.
pub fn locate_in_polygon(poly: &[Point], p: &Point) -> Location {
    let n = poly.len();
    let mut winding: i64 = 0;
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        if on_segment(a, b, p) {
            return Location::Boundary;
        }
        if a.y <= p.y {
            if b.y > p.y && orient(a, b, p) == Ordering::Greater {
                winding += 1;
            }
        } else if b.y <= p.y && orient(a, b, p) == Ordering::Less {
            winding -= 1;
        }
    }
    if winding == 0 {
        Location::Outside
    } else {
        Location::Inside
    }
}

/// Exact sign of twice the signed area of a closed polygon.
pub fn polygon_orientation(poly: &[Point]) -> Ordering {
    let approx = crate::geom::signed_area2(poly);
    let mag: f64 = poly
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let b = &poly[(i + 1) % poly.len()];
            (a.x * b.y).abs() + (a.y * b.x).abs()
        })
        .sum();
    // Loose filter: n products and n sums.
    let bound = (poly.len() as f64 + 2.0) * f64::EPSILON * mag;
    if approx.abs() > bound && bound >= f64::MIN_POSITIVE {
        return ord_of_f64(approx);
    }
    let mut acc = BigRational::zero();
    for (i, a) in poly.iter().enumerate() {
        let b = &poly[(i + 1) % poly.len()];
        let [ax, ay] = rational_point(a);
        let [bx, by] = rational_point(b);
        acc += ax * by - ay * bx;
    }
    ord_of(&acc)
}

/// Simple closed polygon test: non-adjacent edges are disjoint, adjacent
/// edges meet only at their shared vertex. O(n^2).
pub fn polygon_is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        if poly[i] == poly[(i + 1) % n] {
            return false;
        }
    }
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        for j in i + 1..n {
            let c = &poly[j];
            let d = &poly[(j + 1) % n];
            if j == i + 1 {
                // share b == c
                if adjacent_segments_overlap(b, a, d) {
                    return false;
                }
                continue;
            }
            if i == 0 && j == n - 1 {
                // share a == d
                if adjacent_segments_overlap(a, b, c) {
                    return false;
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Exact `sum_j w_j (y_j - y_i)` as rationals.
pub fn exact_weighted_sum(center: &Point, terms: &[(f64, Point)]) -> [BigRational; 2] {
    let [cx, cy] = rational_point(center);
    let mut sx = BigRational::zero();
    let mut sy = BigRational::zero();
    for (w, p) in terms {
        let w = rational(*w);
        let [px, py] = rational_point(p);
        sx += &w * (px - &cx);
        sy += w * (py - &cy);
    }
    [sx, sy]
}

/// Sign of `cross(d1 - d0, z)` for an exact rational vector `z`.
pub fn cross_diff_rational_sign(d0: &Point, d1: &Point, z: &[BigRational; 2]) -> Ordering {
    let [ax, ay] = rational_point(d0);
    let [bx, by] = rational_point(d1);
    let v = (bx - ax) * &z[1] - (by - ay) * &z[0];
    ord_of(&v)
}

/// Sign of `dot(c, v)` with exact rationals.
pub fn dot_rational_sign(c: &[BigRational; 2], v: &[BigRational; 2]) -> Ordering {
    ord_of(&(&c[0] * &v[0] + &c[1] * &v[1]))
}

pub fn rational_vec(v: &Vec2) -> [BigRational; 2] {
    [rational(v.x), rational(v.y)]
}
