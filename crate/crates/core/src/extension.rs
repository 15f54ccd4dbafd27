//! Completion of a non-convex target to its convex hull.
//!
//! The region between the hull and the target polygon splits into pockets;
//! each pocket is triangulated by ear clipping without new vertices. The
//! extended triangulation gets weights under which the given drawing is
//! discrete-harmonic with the hull as its boundary.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::cone::{self, CombinationOutcome, ConeError};
use crate::exact;
use crate::geom::{self, Point, Vec2};
use crate::harmonic::{self, EdgeWeights, HarmonicError, SolveOptions};
use crate::mesh::{classify_polygon, BuildOptions, MeshError, PlanarDrawing, TargetPolygon, Triangulation, VertexClass};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtensionError {
    #[error("all points are collinear")]
    AllCollinear,
    #[error("polygon is not simple and counter-clockwise")]
    NotSimple,
    #[error("drawings realize different triangulations")]
    MeshMismatch,
    #[error("drawing is not discrete-harmonic: residual {residual:e} at vertex {vertex}")]
    NotHarmonic { vertex: usize, residual: f64 },
    #[error("cone condition fails at boundary vertices {0:?}")]
    ConeConditionViolated(Vec<usize>),
    #[error("no valid weights at vertex {vertex}: {reason}")]
    ExtensionInfeasible { vertex: usize, reason: String },
    #[error("extended triangulation is invalid: {0}")]
    InvalidExtension(#[from] MeshError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
}

/// Indices of the strict convex hull vertices, counter-clockwise, starting
/// from the lexicographically smallest point. Collinear points are dropped.
pub fn convex_hull_indices(points: &[Point]) -> Result<Vec<usize>, ExtensionError> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a].x.total_cmp(&points[b].x).then(points[a].y.total_cmp(&points[b].y)).then(a.cmp(&b))
    });
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return Err(ExtensionError::AllCollinear);
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    let push = |hull: &mut Vec<usize>, i: usize, floor: usize| {
        while hull.len() >= floor + 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if exact::orient(&points[a], &points[b], &points[i]) == Ordering::Greater {
                break;
            }
            hull.pop();
        }
        hull.push(i);
    };
    for &i in &idx {
        push(&mut hull, i, 0);
    }
    let lower = hull.len() - 1;
    for &i in idx.iter().rev().skip(1) {
        push(&mut hull, i, lower);
    }
    hull.pop();
    if hull.len() < 3 {
        return Err(ExtensionError::AllCollinear);
    }
    Ok(hull)
}

pub fn convex_hull(points: &[Point]) -> Result<TargetPolygon, ExtensionError> {
    let h = convex_hull_indices(points)?;
    TargetPolygon::new(h.iter().map(|&i| points[i]).collect()).map_err(|_| ExtensionError::AllCollinear)
}

/// Which valid ear is clipped first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EarOrder {
    #[default]
    LowestPosition,
    HighestPosition,
}

/// Polygon vertices within `HULL_SNAP_REL * diam` of a hull edge are
/// treated as lying on it. Otherwise a resampled straight edge that bends
/// inward by rounding forms a sliver pocket that admits no usable weights.
pub const HULL_SNAP_REL: f64 = 1e-12;

fn near_segment(a: &Point, b: &Point, p: &Point, tol: f64) -> bool {
    let ab = b - a;
    let t = (p - a).dot(&ab) / ab.norm_squared();
    (0.0..=1.0).contains(&t) && (p - (a + t * ab)).norm() <= tol
}

/// Ear tips whose turn has `|sin| <= NEAR_STRAIGHT_SIN` count as nearly
/// straight.
pub const NEAR_STRAIGHT_SIN: f64 = 1e-6;

/// Triangulate a simple counter-clockwise polygon by ear clipping. Returns
/// `n - 2` triangles as local vertex indices, counter-clockwise.
///
/// An ear's tip must turn strictly left and its closed triangle must hold
/// no other remaining vertex, so vertices with straight angles always end
/// up with a diagonal.
pub fn ear_clip(poly: &[Point], order: EarOrder) -> Result<Vec<[usize; 3]>, ExtensionError> {
    let n = poly.len();
    if n < 3 || !exact::polygon_is_simple(poly) || exact::polygon_orientation(poly) != Ordering::Greater {
        return Err(ExtensionError::NotSimple);
    }
    let mut rest: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n - 2);
    while rest.len() > 3 {
        let m = rest.len();
        let is_ear = |k: usize| {
            let (a, b, c) = (rest[(k + m - 1) % m], rest[k], rest[(k + 1) % m]);
            exact::orient(&poly[a], &poly[b], &poly[c]) == Ordering::Greater
                && rest
                    .iter()
                    .all(|&v| v == a || v == b || v == c || !exact::in_closed_triangle(&poly[a], &poly[b], &poly[c], &poly[v]))
        };
        // Nearly straight tips are clipped last so they keep a diagonal;
        // without one their pocket weights blow up.
        let flat = |k: usize| {
            let (a, b, c) = (poly[rest[(k + m - 1) % m]], poly[rest[k]], poly[rest[(k + 1) % m]]);
            let (u, v) = (a - b, c - b);
            geom::cross(&v, &u).abs() <= NEAR_STRAIGHT_SIN * u.norm() * v.norm()
        };
        let positions: Vec<usize> = match order {
            EarOrder::LowestPosition => (0..m).collect(),
            EarOrder::HighestPosition => (0..m).rev().collect(),
        };
        // Clipping next to a flat vertex hands it a diagonal at once.
        let beside_flat = |k: usize| flat((k + m - 1) % m) || flat((k + 1) % m);
        let find = |pred: &dyn Fn(usize) -> bool| positions.iter().copied().find(|&k| pred(k) && is_ear(k));
        let k = find(&|k| !flat(k) && beside_flat(k))
            .or_else(|| find(&|k| !flat(k)))
            .or_else(|| find(&|_| true))
            .ok_or(ExtensionError::NotSimple)?;
        out.push([rest[(k + m - 1) % m], rest[k], rest[(k + 1) % m]]);
        rest.remove(k);
    }
    if exact::orient(&poly[rest[0]], &poly[rest[1]], &poly[rest[2]]) != Ordering::Greater {
        return Err(ExtensionError::NotSimple);
    }
    out.push([rest[0], rest[1], rest[2]]);
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ConvexExtension {
    /// Strict hull vertices as mesh indices, counter-clockwise.
    pub hull: Vec<usize>,
    /// Pocket polygons as mesh indices, counter-clockwise. The first and
    /// last vertex lie on the hull boundary.
    pub pockets: Vec<Vec<usize>>,
    /// Pocket triangles. Generally not a disk triangulation by itself, so
    /// kept as a face list over the mesh's index space.
    pub delta_faces: Vec<[usize; 3]>,
    pub extended_tri: Arc<Triangulation>,
    pub extended_weights: EdgeWeights,
}

impl ConvexExtension {
    pub fn hull_polygon(&self, drawing: &PlanarDrawing) -> Vec<Point> {
        self.hull.iter().map(|&v| drawing.point(v)).collect()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExtensionOptions {
    pub ear_order: EarOrder,
    pub solve: SolveOptions,
}

pub fn build_extension(
    source: &PlanarDrawing,
    target: &PlanarDrawing,
    w: &EdgeWeights,
) -> Result<ConvexExtension, ExtensionError> {
    build_extension_with(source, target, w, &ExtensionOptions::default())
}

/// Extend `(target, T)` to a drawing of `T' = T + pockets` into the hull.
///
/// Weights on `T'`: hull-boundary vertices keep `w` on old edges and get 1
/// on new ones; interior vertices of `T` keep `w`; strictly convex polygon
/// vertices inside the hull get fresh weights balancing all `T'` neighbors;
/// straight and reflex polygon vertices inside the hull add pocket weights
/// cancelling their boundary force.
pub fn build_extension_with(
    source: &PlanarDrawing,
    target: &PlanarDrawing,
    w: &EdgeWeights,
    opts: &ExtensionOptions,
) -> Result<ConvexExtension, ExtensionError> {
    if !source.same_mesh(target) || **w.triangulation() != **target.triangulation() {
        return Err(ExtensionError::MeshMismatch);
    }
    let tri = target.triangulation();
    let y = target.coords();
    let poly = target.boundary_polygon();
    let diam = target.diameter();

    for v in tri.interior_vertices() {
        let r = harmonic::laplace_at(w, y, v).norm();
        let bound = opts.solve.bound(w.row_sum(v), diam);
        if !(r <= bound) {
            return Err(ExtensionError::NotHarmonic { vertex: v, residual: r });
        }
    }
    let report = cone::cone_condition_report(target, w)?;
    if !report.verdict {
        return Err(ExtensionError::ConeConditionViolated(report.failing().map(|r| r.index).collect()));
    }

    let cycle = tri.boundary();
    let m = cycle.len();
    let hull_pos = convex_hull_indices(&poly)?;
    // Hull vertices in boundary order from the smallest position.
    let mut hp = hull_pos.clone();
    let rot = hp.iter().enumerate().min_by_key(|(_, p)| **p).map(|(k, _)| k).unwrap();
    hp.rotate_left(rot);
    debug_assert!(hp.windows(2).all(|w| w[0] < w[1]), "hull order follows the polygon");

    let snap = HULL_SNAP_REL * diam;
    let mut pockets: Vec<Vec<usize>> = Vec::new();
    let mut on_hull = vec![false; m];
    for k in 0..hp.len() {
        let (a, b) = (hp[k], hp[(k + 1) % hp.len()]);
        let len = (b + m - a) % m;
        // Split the chain a..=b at vertices on the closed hull segment.
        let mut splits = vec![a];
        for s in 1..len {
            let p = (a + s) % m;
            if exact::on_segment(&poly[a], &poly[b], &poly[p]) || near_segment(&poly[a], &poly[b], &poly[p], snap) {
                splits.push(p);
            }
        }
        splits.push(b);
        for &s in &splits {
            on_hull[s] = true;
        }
        for pair in splits.windows(2) {
            let (s, e) = (pair[0], pair[1]);
            let span = (e + m - s) % m;
            if span >= 2 {
                // The chain runs clockwise around the pocket; reverse it.
                let mut pocket: Vec<usize> = (0..=span).map(|t| cycle[(s + t) % m]).collect();
                pocket.reverse();
                pockets.push(pocket);
            }
        }
    }

    let mut delta_faces = Vec::new();
    for pocket in &pockets {
        let pts: Vec<Point> = pocket.iter().map(|&v| y[v]).collect();
        for f in ear_clip(&pts, opts.ear_order)? {
            delta_faces.push([pocket[f[0]], pocket[f[1]], pocket[f[2]]]);
        }
    }

    // Faces of T oriented like the drawing.
    let mut faces: Vec<[usize; 3]> = tri.faces().to_vec();
    if exact::polygon_orientation(&poly) == Ordering::Less {
        for f in &mut faces {
            f.swap(1, 2);
        }
    }
    faces.extend_from_slice(&delta_faces);
    let ext = Triangulation::build(&faces, tri.vertex_count(), BuildOptions { allow_unreferenced: true })?
        .oriented_like(y);
    let ext = Arc::new(ext);

    let delta_edges: HashSet<(usize, usize)> = delta_faces
        .iter()
        .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
        .flat_map(|(a, b)| [(a, b), (b, a)])
        .collect();
    let classes = classify_polygon(&poly).map_err(ConeError::from)?;
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; tri.vertex_count()];
    let infeasible = |vertex: usize, reason: String| ExtensionError::ExtensionInfeasible { vertex, reason };
    let solve = |v: usize, nb: &[usize], t: Vec2| -> Result<Vec<f64>, ExtensionError> {
        let vs: Vec<Vec2> = nb.iter().map(|&j| y[j] - y[v]).collect();
        match cone::solve_positive_combination(&vs, &t, cone::DEFAULT_ALPHA_MIN) {
            Ok(CombinationOutcome::Feasible(c)) => Ok(c.alpha),
            Ok(CombinationOutcome::Infeasible(c)) => Err(infeasible(v, format!("certificate {:?}", c.c))),
            Err(e) => Err(infeasible(v, e.to_string())),
        }
    };
    for k in 0..m {
        if on_hull[k] {
            continue;
        }
        let v = cycle[k];
        let nb = ext.neighbors(v);
        let row = if classes[k] == VertexClass::StrictlyConvex {
            solve(v, nb, Vec2::zeros())?
        } else {
            let dnb: Vec<usize> = nb.iter().copied().filter(|&j| delta_edges.contains(&(v, j))).collect();
            let force = harmonic::laplace_at(w, y, v);
            let wd = solve(v, &dnb, -force)?;
            nb.iter()
                .map(|&j| {
                    let old = w.get(v, j).unwrap_or(0.0);
                    let new = dnb.binary_search(&j).map(|p| wd[p]).unwrap_or(0.0);
                    old + new
                })
                .collect()
        };
        rows[v] = Some(row);
    }
    let extended_weights = EdgeWeights::from_fn(ext.clone(), |i, j| match &rows[i] {
        Some(r) => r[ext.neighbors(i).binary_search(&j).expect("neighbor")],
        None => w.get(i, j).unwrap_or(1.0),
    })?;

    let hull_diam = geom::diameter(&ext.boundary().iter().map(|&v| y[v]).collect::<Vec<_>>());
    for v in ext.interior_vertices() {
        let r = harmonic::laplace_at(&extended_weights, y, v).norm();
        let bound = opts.solve.bound(extended_weights.row_sum(v), hull_diam);
        if !(r <= bound) {
            return Err(infeasible(v, format!("residual {r:e} exceeds {bound:e}")));
        }
    }

    Ok(ConvexExtension {
        hull: hull_pos.iter().map(|&p| cycle[p]).collect(),
        pockets,
        delta_faces,
        extended_tri: ext,
        extended_weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::signed_area2;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    /// Triangles cover the polygon exactly: areas add up and no two
    /// triangles share an interior point.
    fn check_triangulation(poly: &[Point], tris: &[[usize; 3]]) {
        assert_eq!(tris.len(), poly.len() - 2);
        let total: f64 = tris
            .iter()
            .map(|t| signed_area2(&[poly[t[0]], poly[t[1]], poly[t[2]]]))
            .sum();
        assert!((total - signed_area2(poly)).abs() < 1e-12);
        for t in tris {
            assert_eq!(exact::orient(&poly[t[0]], &poly[t[1]], &poly[t[2]]), Ordering::Greater);
        }
        for (i, a) in tris.iter().enumerate() {
            for b in &tris[i + 1..] {
                // centroid of one is never strictly inside the other
                let ca = Point::from((poly[a[0]].coords + poly[a[1]].coords + poly[a[2]].coords) / 3.0);
                let cb = Point::from((poly[b[0]].coords + poly[b[1]].coords + poly[b[2]].coords) / 3.0);
                assert!(!exact::in_closed_triangle(&poly[b[0]], &poly[b[1]], &poly[b[2]], &ca));
                assert!(!exact::in_closed_triangle(&poly[a[0]], &poly[a[1]], &poly[a[2]], &cb));
                // and no edge pair crosses properly
                for ea in [(a[0], a[1]), (a[1], a[2]), (a[2], a[0])] {
                    for eb in [(b[0], b[1]), (b[1], b[2]), (b[2], b[0])] {
                        let shared = [ea.0, ea.1].iter().any(|v| *v == eb.0 || *v == eb.1);
                        if !shared {
                            assert!(!exact::segments_intersect(&poly[ea.0], &poly[ea.1], &poly[eb.0], &poly[eb.1]));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hull_examples() {
        let sq = pts(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]);
        assert_eq!(convex_hull_indices(&sq).unwrap(), vec![0, 1, 2, 3]);
        let l = pts(&[(0., 0.), (2., 0.), (2., 1.), (1., 1.), (1., 2.), (0., 2.)]);
        let h = convex_hull(&l).unwrap();
        assert_eq!(h.vertices(), &pts(&[(0., 0.), (2., 0.), (2., 1.), (1., 2.), (0., 2.)])[..]);
        let mut with_center = sq.clone();
        with_center.push(Point::new(0.5, 0.5));
        with_center.push(Point::new(0.5, 0.0));
        assert_eq!(convex_hull_indices(&with_center).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(convex_hull_indices(&pts(&[(0., 0.), (1., 1.), (2., 2.)])), Err(ExtensionError::AllCollinear));
    }

    #[test]
    fn ear_clip_examples() {
        let t = pts(&[(0., 0.), (1., 0.), (0., 1.)]);
        assert_eq!(ear_clip(&t, EarOrder::LowestPosition).unwrap(), vec![[0, 1, 2]]);
        let q = pts(&[(0., 0.), (1., 0.), (1.2, 1.), (0., 1.)]);
        check_triangulation(&q, &ear_clip(&q, EarOrder::LowestPosition).unwrap());
        let hex = pts(&[(0., 0.), (3., 0.), (3., 2.), (2., 0.5), (1., 0.5), (0., 2.)]);
        for order in [EarOrder::LowestPosition, EarOrder::HighestPosition] {
            let tris = ear_clip(&hex, order).unwrap();
            assert_eq!(tris.len(), 4);
            check_triangulation(&hex, &tris);
        }
        let bow = pts(&[(0., 0.), (1., 1.), (1., 0.), (0., 1.)]);
        assert_eq!(ear_clip(&bow, EarOrder::LowestPosition), Err(ExtensionError::NotSimple));
    }

    #[test]
    fn straight_vertices_get_diagonals() {
        // pocket-like shape with a straight vertex at (1, 0)
        let p = pts(&[(0., 0.), (1., 0.), (2., 0.), (1., 1.)]);
        let tris = ear_clip(&p, EarOrder::LowestPosition).unwrap();
        check_triangulation(&p, &tris);
        let deg1 = tris.iter().filter(|t| t.contains(&1)).count();
        assert_eq!(deg1, 2);
    }
}
