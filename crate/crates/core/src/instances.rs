//! Reproducible test instances: random disk triangulations, convex and
//! non-convex target polygons, and harmonic-embedding problems built from
//! them.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

use spade::{ConstrainedDelaunayTriangulation, DelaunayTriangulation, Point2, Triangulation as _};

use crate::exact::{self, Location};
use crate::geom::{self, Point};
use crate::harmonic::{harmonic_embed, BoundaryAssignment, EdgeWeights, HarmonicError};
use crate::mesh::{build_triangulation, GeometryError, MeshError, PlanarDrawing, TargetPolygon};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random 3-connected disk triangulation with about `n` vertices, drawn in
/// the unit disk: Delaunay triangulation of `~4 sqrt(n)` boundary points on
/// the unit circle and random interior points, with every chord (an
/// interior edge joining two boundary vertices) split at its midpoint.
pub fn random_disk_mesh(n: usize, seed: u64) -> Result<PlanarDrawing, MeshError> {
    let mut r = rng(seed);
    let nb = ((4.0 * (n as f64).sqrt()).round() as usize).clamp(3, n.max(3));
    let mut pts: Vec<Point> = (0..nb)
        .map(|k| {
            let t = TAU * (k as f64 + r.gen_range(-0.3..0.3)) / nb as f64;
            Point::new(t.cos(), t.sin())
        })
        .collect();
    while pts.len() < n {
        let (rad, t): (f64, f64) = (0.92 * r.gen::<f64>().sqrt(), r.gen_range(0.0..TAU));
        pts.push(Point::new(rad * t.cos(), rad * t.sin()));
    }
    let mut faces = delaunay_faces(&pts)?;
    split_chords(&mut pts, &mut faces, nb);
    let tri = build_triangulation(&faces, pts.len())?;
    Ok(PlanarDrawing::new(Arc::new(tri), pts).expect("finite coordinates"))
}

fn delaunay_faces(pts: &[Point]) -> Result<Vec<[usize; 3]>, MeshError> {
    let mut dt: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::new();
    let mut index = Vec::with_capacity(pts.len());
    for p in pts {
        let h = dt
            .insert(Point2::new(p.x, p.y))
            .map_err(|e| MeshError::NotDisk(format!("delaunay insertion failed: {e:?}")))?;
        index.push(h.index());
    }
    let mut back = vec![usize::MAX; dt.num_vertices()];
    for (i, h) in index.iter().enumerate() {
        if back[*h] != usize::MAX {
            return Err(MeshError::NotDisk("duplicate points".into()));
        }
        back[*h] = i;
    }
    Ok(dt
        .inner_faces()
        .map(|f| {
            let v = f.vertices();
            [back[v[0].fix().index()], back[v[1].fix().index()], back[v[2].fix().index()]]
        })
        .collect())
}

/// Random triangulation of the polygon itself: constrained Delaunay
/// triangulation of its vertices and about `interior` random points inside
/// it, chords split. Polygon vertex `k` is mesh vertex `k`.
pub fn random_polygon_mesh(poly: &TargetPolygon, interior: usize, seed: u64) -> Result<PlanarDrawing, MeshError> {
    let mut r = rng(seed);
    let v = poly.vertices();
    let nb = v.len();
    let area = geom::signed_area2(v) * 0.5;
    // spacing of a uniform point set of the requested density
    let h = (area / (interior + nb) as f64).sqrt();
    let (lo, hi) = geom::bounding_box(v);
    let mut pts: Vec<Point> = v.to_vec();
    let mut attempts = 0;
    while pts.len() < nb + interior && attempts < 200 * (interior + 1) {
        attempts += 1;
        let p = Point::new(r.gen_range(lo.x..hi.x), r.gen_range(lo.y..hi.y));
        if exact::locate_in_polygon(v, &p) != Location::Inside {
            continue;
        }
        if pts.iter().any(|q| (p - q).norm() < 0.5 * h) {
            continue;
        }
        pts.push(p);
    }
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut handles = Vec::with_capacity(pts.len());
    for p in &pts {
        let h = cdt
            .insert(Point2::new(p.x, p.y))
            .map_err(|e| MeshError::NotDisk(format!("delaunay insertion failed: {e:?}")))?;
        handles.push(h);
    }
    for k in 0..nb {
        let (a, b) = (handles[k], handles[(k + 1) % nb]);
        if cdt.try_add_constraint(a, b).is_empty() && !cdt.exists_constraint(a, b) {
            return Err(MeshError::NotDisk(format!("boundary edge {k} could not be constrained")));
        }
    }
    let mut back = vec![usize::MAX; cdt.num_vertices()];
    for (i, h) in handles.iter().enumerate() {
        if back[h.index()] != usize::MAX {
            return Err(MeshError::NotDisk("duplicate points".into()));
        }
        back[h.index()] = i;
    }
    let all: Vec<[usize; 3]> = cdt
        .inner_faces()
        .map(|f| {
            let h = f.vertices();
            [back[h[0].fix().index()], back[h[1].fix().index()], back[h[2].fix().index()]]
        })
        .collect();
    let mut faces = inside_faces(&all, nb).ok_or_else(|| MeshError::NotDisk("boundary edge missing from triangulation".into()))?;
    split_chords(&mut pts, &mut faces, nb);
    let tri = build_triangulation(&faces, pts.len())?;
    Ok(PlanarDrawing::new(Arc::new(tri), pts).expect("finite coordinates"))
}

/// Faces reachable from the face left of the directed edge `0 -> 1`
/// without crossing a polygon edge `k -> k+1 (mod nb)`.
fn inside_faces(all: &[[usize; 3]], nb: usize) -> Option<Vec<[usize; 3]>> {
    let mut by_edge = HashMap::new();
    for (i, f) in all.iter().enumerate() {
        for k in 0..3 {
            by_edge.insert((f[k], f[(k + 1) % 3]), i);
        }
    }
    let is_side = |a: usize, b: usize| a < nb && b < nb && ((a + 1) % nb == b || (b + 1) % nb == a);
    let seed = *by_edge.get(&(0, 1))?;
    let mut keep = vec![false; all.len()];
    keep[seed] = true;
    let mut stack = vec![seed];
    while let Some(i) = stack.pop() {
        let f = all[i];
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            if is_side(a, b) {
                continue;
            }
            if let Some(&j) = by_edge.get(&(b, a)) {
                if !keep[j] {
                    keep[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    Some(all.iter().zip(keep).filter(|(_, k)| *k).map(|(f, _)| *f).collect())
}

/// Mean-value weights of the drawing on rows of interior vertices, with
/// which the harmonic embedding into the drawing's own boundary reproduces
/// the drawing; rows of boundary vertices get `boundary(i, j)`.
pub fn mean_value_weights(
    drawing: &PlanarDrawing,
    mut boundary: impl FnMut(usize, usize) -> f64,
) -> Result<EdgeWeights, HarmonicError> {
    let tri = drawing.triangulation().clone();
    let x = drawing.coords();
    let mut third = HashMap::new();
    for f in tri.faces() {
        for k in 0..3 {
            third.insert((f[k], f[(k + 1) % 3]), f[(k + 2) % 3]);
        }
    }
    let half_tan = |i: usize, j: usize, k: usize| {
        let (a, b) = (x[j] - x[i], x[k] - x[i]);
        (a.norm() * b.norm() - a.dot(&b)) / geom::cross(&a, &b).abs()
    };
    EdgeWeights::from_fn(tri.clone(), |i, j| {
        if tri.is_boundary(i) {
            return boundary(i, j);
        }
        let (k1, k2) = (third[&(i, j)], third[&(j, i)]);
        (half_tan(i, j, k1) + half_tan(i, j, k2)) / (x[j] - x[i]).norm()
    })
}

/// Split every edge between two boundary vertices (indices `< nb`) that is
/// not a boundary edge, until none is left.
fn split_chords(pts: &mut Vec<Point>, faces: &mut Vec<[usize; 3]>, nb: usize) {
    let is_bdry = |v: usize| v < nb;
    let is_side = |a: usize, b: usize| (a + 1) % nb == b || (b + 1) % nb == a;
    loop {
        let chord = faces.iter().find_map(|f| {
            (0..3)
                .map(|k| (f[k], f[(k + 1) % 3]))
                .find(|&(a, b)| is_bdry(a) && is_bdry(b) && !is_side(a, b))
        });
        let Some((a, b)) = chord else { break };
        let m = pts.len();
        pts.push(Point::from((pts[a].coords + pts[b].coords) * 0.5));
        let mut out = Vec::with_capacity(faces.len() + 2);
        for f in faces.iter() {
            let k = (0..3).find(|&k| {
                let (x, y) = (f[k], f[(k + 1) % 3]);
                (x, y) == (a, b) || (x, y) == (b, a)
            });
            match k {
                Some(k) => {
                    let (x, y, z) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
                    out.push([x, m, z]);
                    out.push([m, y, z]);
                }
                None => out.push(*f),
            }
        }
        *faces = out;
    }
}

/// `m` points along the closed outline through `corners`, including every
/// corner, with the extra points spread over the edges by length.
pub fn resample_outline(corners: &[Point], m: usize) -> Vec<Point> {
    let k = corners.len();
    assert!(m >= k, "need at least one point per corner");
    let lens: Vec<f64> = (0..k).map(|i| (corners[(i + 1) % k] - corners[i]).norm()).collect();
    let total: f64 = lens.iter().sum();
    // largest-remainder apportionment of the m - k extra points
    let extra = m - k;
    let quota: Vec<f64> = lens.iter().map(|l| extra as f64 * l / total).collect();
    let mut counts: Vec<usize> = quota.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| (quota[b] - quota[b].floor()).total_cmp(&(quota[a] - quota[a].floor())).then(a.cmp(&b)));
    let missing = extra - counts.iter().sum::<usize>();
    for &i in order.iter().take(missing) {
        counts[i] += 1;
    }
    let mut out = Vec::with_capacity(m);
    for i in 0..k {
        let (a, b) = (corners[i], corners[(i + 1) % k]);
        for j in 0..=counts[i] {
            out.push(a + (b - a) * (j as f64 / (counts[i] + 1) as f64));
        }
    }
    out
}

/// Random strictly convex polygon with `m` vertices: jittered angles on an
/// ellipse with random axes and rotation.
pub fn random_convex_polygon(m: usize, seed: u64) -> Result<TargetPolygon, GeometryError> {
    let mut r = rng(seed);
    let (ax, ay) = (r.gen_range(0.6..1.6), r.gen_range(0.6..1.6));
    let rot = r.gen_range(0.0..TAU);
    let off = r.gen_range(0.0..TAU);
    let pts = (0..m)
        .map(|k| {
            let t = off + TAU * (k as f64 + r.gen_range(-0.3..0.3)) / m as f64;
            let (x, y) = (ax * t.cos(), ay * t.sin());
            Point::new(x * rot.cos() - y * rot.sin(), x * rot.sin() + y * rot.cos())
        })
        .collect();
    TargetPolygon::new(pts)
}

/// L-shaped outline with random arm widths, resampled to `m` vertices.
pub fn l_polygon(m: usize, seed: u64) -> Result<TargetPolygon, GeometryError> {
    let mut r = rng(seed);
    let (a, b) = (r.gen_range(0.3..0.7), r.gen_range(0.3..0.7));
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, b), (a, b), (a, 1.0), (0.0, 1.0)].map(|(x, y)| Point::new(x, y));
    TargetPolygon::new(resample_outline(&corners, m))
}

/// U-shaped outline with a random slot, resampled to `m` vertices.
pub fn u_polygon(m: usize, seed: u64) -> Result<TargetPolygon, GeometryError> {
    let mut r = rng(seed);
    let (w, d) = (r.gen_range(0.2..0.5), r.gen_range(0.3..0.7));
    let (x0, x1) = (0.5 - w / 2.0, 0.5 + w / 2.0);
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (x1, 1.0), (x1, 1.0 - d), (x0, 1.0 - d), (x0, 1.0), (0.0, 1.0)]
        .map(|(x, y)| Point::new(x, y));
    TargetPolygon::new(resample_outline(&corners, m))
}

/// Star with `spikes` tips and inner radius ratio drawn from `inner`,
/// resampled to `m` vertices. The inner corners are the notches.
pub fn star_notch_polygon(m: usize, spikes: usize, inner: (f64, f64), seed: u64) -> Result<TargetPolygon, GeometryError> {
    let mut r = rng(seed);
    let ratio = r.gen_range(inner.0..inner.1);
    let off = r.gen_range(0.0..TAU);
    let corners: Vec<Point> = (0..2 * spikes)
        .map(|k| {
            let t = off + TAU * k as f64 / (2 * spikes) as f64;
            let rad = if k % 2 == 0 { 1.0 } else { ratio };
            Point::new(rad * t.cos(), rad * t.sin())
        })
        .collect();
    TargetPolygon::new(resample_outline(&corners, m))
}

/// Non-convex target shapes used by the suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    L,
    U,
    StarNotch,
}

pub fn nonconvex_polygon(shape: Shape, m: usize, seed: u64) -> Result<TargetPolygon, GeometryError> {
    match shape {
        Shape::L => l_polygon(m, seed),
        Shape::U => u_polygon(m, seed),
        Shape::StarNotch => star_notch_polygon(m, 3 + (seed % 3) as usize, (0.55, 0.8), seed),
    }
}

/// A Dirichlet problem: a mesh (with its source drawing), a target polygon
/// matched to its boundary cycle from `start`, and weights.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub source: PlanarDrawing,
    pub polygon: TargetPolygon,
    pub start: usize,
    pub weights: EdgeWeights,
}

impl Instance {
    pub fn boundary(&self) -> Result<BoundaryAssignment, HarmonicError> {
        BoundaryAssignment::new(self.source.triangulation().clone(), &self.polygon, self.start)
    }

    /// The discrete-harmonic drawing of the instance.
    pub fn embed(&self) -> Result<PlanarDrawing, HarmonicError> {
        harmonic_embed(&self.weights, &self.boundary()?)
    }
}

/// Mesh with `n` vertices, random weights in `[lo, hi]`, and a target built
/// by `polygon(m, seed)` for the mesh's boundary length `m`.
pub fn make_instance(
    name: &str,
    n: usize,
    seed: u64,
    (lo, hi): (f64, f64),
    polygon: impl Fn(usize, u64) -> Result<TargetPolygon, GeometryError>,
) -> Result<Instance, Box<dyn std::error::Error + Send + Sync>> {
    let source = random_disk_mesh(n, seed)?;
    let tri = source.triangulation().clone();
    let m = tri.boundary().len();
    let polygon = polygon(m, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let weights = EdgeWeights::random_positive(tri.clone(), seed.wrapping_add(1), lo, hi)?;
    let start = tri.boundary()[(seed as usize) % m];
    Ok(Instance {
        name: format!("{name}-{seed}"),
        source,
        polygon,
        start,
        weights,
    })
}

/// Weights for instances whose mesh is drawn inside its own target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightKind {
    /// Mean-value weights; the embedding reproduces the source drawing.
    MeanValue,
    /// Mean-value weights times independent factors in `[1/f, f]`.
    Perturbed(f64),
    /// Independent uniform weights in `[lo, hi]`.
    Random(f64, f64),
}

/// Triangulation of a random `shape` polygon with `m` boundary and about
/// `interior` interior vertices, embedded back into the same polygon.
pub fn polygon_instance(shape: Shape, m: usize, interior: usize, seed: u64, kind: WeightKind) -> Result<Instance, Box<dyn std::error::Error + Send + Sync>> {
    let polygon = nonconvex_polygon(shape, m, seed)?;
    let source = random_polygon_mesh(&polygon, interior, seed)?;
    let tri = source.triangulation().clone();
    let mut r = rng(seed.wrapping_add(7));
    let weights = match kind {
        WeightKind::MeanValue => mean_value_weights(&source, |_, _| r.gen_range(0.1..10.0))?,
        WeightKind::Perturbed(f) => {
            let mv = mean_value_weights(&source, |_, _| 1.0)?;
            EdgeWeights::from_fn(tri.clone(), |i, j| {
                let base = if tri.is_boundary(i) { r.gen_range(0.1..10.0) } else { mv.get(i, j).expect("edge") };
                base * f.powf(r.gen_range(-1.0..1.0))
            })?
        }
        WeightKind::Random(lo, hi) => EdgeWeights::random_positive(tri.clone(), seed.wrapping_add(1), lo, hi)?,
    };
    Ok(Instance {
        name: format!("{shape:?}-{kind:?}-{seed}"),
        source,
        polygon,
        start: 0,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::intersection_free;
    use crate::mesh::VertexClass;

    #[test]
    fn random_meshes_are_valid_and_reproducible() {
        for (n, seed) in [(50, 1), (200, 2), (500, 3)] {
            let d = random_disk_mesh(n, seed).unwrap();
            assert!(d.coords().len() >= n);
            assert!(intersection_free(&d).is_certified());
            let again = random_disk_mesh(n, seed).unwrap();
            assert_eq!(again.coords(), d.coords());
        }
    }

    #[test]
    fn chord_splitting_removes_two_cuts() {
        // a square with one diagonal has the chord (0, 2)
        let mut pts = vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(1., 1.), Point::new(0., 1.)];
        let mut faces = vec![[0, 1, 2], [0, 2, 3]];
        split_chords(&mut pts, &mut faces, 4);
        assert_eq!(faces.len(), 4);
        assert!(build_triangulation(&faces, 5).is_ok());
    }

    #[test]
    fn outlines_keep_corners_and_count() {
        let p = l_polygon(40, 7).unwrap();
        assert_eq!(p.len(), 40);
        let strict = p.classes().iter().filter(|c| **c == VertexClass::StrictlyReflex).count();
        assert_eq!(strict, 1);
        assert_eq!(p.classes().iter().filter(|c| **c == VertexClass::StrictlyConvex).count(), 5);
        let u = u_polygon(33, 1).unwrap();
        assert_eq!(u.classes().iter().filter(|c| **c == VertexClass::StrictlyReflex).count(), 2);
        let s = star_notch_polygon(30, 4, (0.5, 0.6), 3).unwrap();
        // points on slanted edges are collinear only up to rounding, so some
        // resampled vertices classify as barely reflex
        assert!(s.classes().iter().filter(|c| **c == VertexClass::StrictlyReflex).count() >= 4);
        let c = random_convex_polygon(25, 9).unwrap();
        assert!(c.classes().iter().all(|c| *c == VertexClass::StrictlyConvex));
    }

    #[test]
    fn convex_instance_embeds() {
        let inst = make_instance("convex", 120, 5, (0.1, 10.0), random_convex_polygon).unwrap();
        let d = inst.embed().unwrap();
        assert!(intersection_free(&d).is_certified());
    }
}
