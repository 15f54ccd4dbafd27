//! Boundary cones of a polygon, the cone condition on a drawing, and the
//! strictly positive combination solver with Farkas certificates.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact;
use crate::geom::{self, Point, Vec2};
use crate::harmonic::{self, EdgeWeights};
use crate::mesh::{classify_polygon, GeometryError, PlanarDrawing, VertexClass};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("cone points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),
    #[error("vector {0} is zero")]
    ZeroVector(usize),
    #[error("input is not finite")]
    NonFinite,
    #[error("no vectors given")]
    NoVectors,
    #[error("best coefficient ratio {ratio:e} is below alpha_min {alpha_min:e}")]
    BelowAlphaMin { ratio: f64, alpha_min: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The open cone at `apex` bounded by the inward half-planes of its two
/// incident polygon edges.
///
/// `z` is inside iff `cross(d_in, z) > 0` and `cross(d_out, z) > 0`, with
/// `d_in = p - p_prev` and `d_out = p_next - p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryCone {
    pub prev: Point,
    pub apex: Point,
    pub next: Point,
    /// Inward unit normal of the incoming edge.
    pub normal_minus: Vec2,
    /// Inward unit normal of the outgoing edge.
    pub normal_plus: Vec2,
    /// The two open half-planes do not intersect.
    pub degenerate: bool,
}

pub fn cone_at_vertex(prev: Point, apex: Point, next: Point) -> Result<BoundaryCone, ConeError> {
    if ![prev, apex, next].iter().all(geom::is_finite) {
        return Err(ConeError::NonFinite);
    }
    if prev == apex {
        return Err(ConeError::CoincidentPoints(0, 1));
    }
    if apex == next {
        return Err(ConeError::CoincidentPoints(1, 2));
    }
    if prev == next {
        return Err(ConeError::CoincidentPoints(0, 2));
    }
    let d_in = apex - prev;
    let d_out = next - apex;
    let degenerate = exact::cross_diff_sign(&prev, &apex, &apex, &next) == Ordering::Equal
        && exact::dot_diff_sign(&prev, &apex, &apex, &next) == Ordering::Less;
    Ok(BoundaryCone {
        prev,
        apex,
        next,
        normal_minus: geom::perp_ccw(&d_in).normalize(),
        normal_plus: geom::perp_ccw(&d_out).normalize(),
        degenerate,
    })
}

impl BoundaryCone {
    /// Exact strict membership of a float vector.
    pub fn contains(&self, z: &Vec2) -> bool {
        exact::cross_diff_vec_sign(&self.prev, &self.apex, z) == Ordering::Greater
            && exact::cross_diff_vec_sign(&self.apex, &self.next, z) == Ordering::Greater
    }

    /// Exact strict membership of a rational vector.
    pub fn contains_exact(&self, z: &[num_rational::BigRational; 2]) -> bool {
        exact::cross_diff_rational_sign(&self.prev, &self.apex, z) == Ordering::Greater
            && exact::cross_diff_rational_sign(&self.apex, &self.next, z) == Ordering::Greater
    }

    /// Smaller of the two inner products with the unit inward normals.
    /// Positive inside the cone, up to rounding.
    pub fn margin(&self, z: &Vec2) -> f64 {
        self.normal_minus.dot(z).min(self.normal_plus.dot(z))
    }

    /// Unit vector along the bisector of the inward normals.
    pub fn bisector(&self) -> Option<Vec2> {
        let b = self.normal_minus + self.normal_plus;
        let n = b.norm();
        (n > 0.0).then(|| b / n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexConeReport {
    pub index: usize,
    pub class: VertexClass,
    pub force: [f64; 2],
    pub margin: f64,
    /// Exact strict membership of the force in the open cone.
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeReport {
    /// Conjunction of `pass` over straight and strictly reflex vertices.
    pub verdict: bool,
    pub vertices: Vec<VertexConeReport>,
}

impl ConeReport {
    pub fn failing(&self) -> impl Iterator<Item = &VertexConeReport> {
        self.vertices.iter().filter(|v| v.class.is_reflex() && !v.pass)
    }

    pub fn min_reflex_margin(&self) -> Option<f64> {
        self.vertices
            .iter()
            .filter(|v| v.class.is_reflex())
            .map(|v| v.margin)
            .min_by(f64::total_cmp)
    }
}

/// Evaluate the boundary force of every boundary vertex against its cone.
/// The force is the weighted Laplacian, whose membership is decided on its
/// exact rational value.
pub fn cone_condition_report(drawing: &PlanarDrawing, w: &EdgeWeights) -> Result<ConeReport, ConeError> {
    let tri = drawing.triangulation();
    let poly = drawing.boundary_polygon();
    let classes = classify_polygon(&poly)?;
    let m = poly.len();
    let coords = drawing.coords();
    let mut vertices = Vec::with_capacity(m);
    for (k, &v) in tri.boundary().iter().enumerate() {
        let cone = cone_at_vertex(poly[(k + m - 1) % m], poly[k], poly[(k + 1) % m])?;
        let force = harmonic::laplace_at(w, coords, v);
        let terms: Vec<(f64, Point)> = w.row(v).map(|(j, wij)| (wij, coords[j])).collect();
        let exact_force = exact::exact_weighted_sum(&coords[v], &terms);
        vertices.push(VertexConeReport {
            index: v,
            class: classes[k],
            force: [force.x, force.y],
            margin: cone.margin(&force),
            pass: !cone.degenerate && cone.contains_exact(&exact_force),
        });
    }
    let verdict = vertices.iter().filter(|r| r.class.is_reflex()).all(|r| r.pass);
    Ok(ConeReport { verdict, vertices })
}

/// Shape of the set of nonnegative combinations of a vector family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpanKind {
    Plane,
    /// Closed half-plane; `boundary` is a spanning direction on its line.
    HalfPlane { boundary: usize },
    Line,
    /// Pointed wedge from `first` counter-clockwise to `last`.
    Wedge { first: usize, last: usize },
    Ray,
}

/// Proof that a target is not a strictly positive combination:
/// `<c, Y_j> >= 0` for every `j` and `<c, target> <= 0`, with either the
/// latter strict or some `<c, Y_j> > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FarkasCertificate {
    pub c: [f64; 2],
    /// `<c, target> < 0`, so the target is outside the closed cone too.
    pub strict: bool,
}

impl FarkasCertificate {
    /// Exact verification of the certificate conditions.
    pub fn verify(&self, vectors: &[Vec2], target: &Vec2) -> bool {
        let c = Vec2::new(self.c[0], self.c[1]);
        let mut some_positive = false;
        for y in vectors {
            match exact::dot_sign(&c, y) {
                Ordering::Less => return false,
                Ordering::Greater => some_positive = true,
                Ordering::Equal => {}
            }
        }
        match exact::dot_sign(&c, target) {
            Ordering::Greater => false,
            Ordering::Less => self.strict || some_positive,
            Ordering::Equal => !self.strict && some_positive,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositiveCombination {
    pub alpha: Vec<f64>,
    /// `sum_j alpha_j Y_j - target` in floating point.
    pub residual: Vec2,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CombinationOutcome {
    Feasible(PositiveCombination),
    Infeasible(FarkasCertificate),
}

impl CombinationOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, CombinationOutcome::Feasible(_))
    }

    pub fn feasible(self) -> Option<PositiveCombination> {
        match self {
            CombinationOutcome::Feasible(p) => Some(p),
            CombinationOutcome::Infeasible(_) => None,
        }
    }
}

/// Default lower bound on `min alpha / max alpha`.
pub const DEFAULT_ALPHA_MIN: f64 = 1e-6;

/// Accepted residual of a feasible combination, relative to
/// `sum(alpha) * max |Y_j|`.
pub const SOLVE_RESIDUAL_REL: f64 = 1e-10;

fn half(v: &Vec2) -> u8 {
    if v.y > 0.0 || (v.y == 0.0 && v.x > 0.0) {
        0
    } else {
        1
    }
}

/// Exact angular order starting at the positive x axis.
fn angle_cmp(a: &Vec2, b: &Vec2) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| exact::cross_sign(b, a))
}

/// Distinct directions in counter-clockwise order, each with the indices of
/// the vectors pointing that way.
fn directions(vectors: &[Vec2]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&i, &j| angle_cmp(&vectors[i], &vectors[j]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match groups.last_mut() {
            Some(g) if angle_cmp(&vectors[g[0]], &vectors[i]) == Ordering::Equal => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// Classify the cone spanned by nonzero vectors.
pub fn span_kind(vectors: &[Vec2]) -> SpanKind {
    let groups = directions(vectors);
    let reps: Vec<Vec2> = groups.iter().map(|g| vectors[g[0]]).collect();
    span_kind_of(&groups, &reps)
}

fn span_kind_of(groups: &[Vec<usize>], reps: &[Vec2]) -> SpanKind {
    let k = reps.len();
    if k == 1 {
        return SpanKind::Ray;
    }
    let mut straight = Vec::new();
    for i in 0..k {
        let (a, b) = (reps[i], reps[(i + 1) % k]);
        match exact::cross_sign(&a, &b) {
            Ordering::Less => {
                return SpanKind::Wedge {
                    first: groups[(i + 1) % k][0],
                    last: groups[i][0],
                }
            }
            Ordering::Equal => straight.push((i + 1) % k),
            Ordering::Greater => {}
        }
    }
    match straight.len() {
        0 => SpanKind::Plane,
        1 => SpanKind::HalfPlane { boundary: groups[straight[0]][0] },
        _ => SpanKind::Line,
    }
}

/// Find `alpha_j > 0` with `sum_j alpha_j Y_j = target`, or a Farkas
/// certificate that none exists.
///
/// Membership of the target in the open positive span is decided exactly.
/// The coefficients are `alpha = s + beta` with a uniform part `s > 0` and a
/// nonnegative remainder `beta` supported on at most two adjacent
/// directions. `alpha_min` bounds `min alpha / max alpha` from below. For a
/// zero target the coefficients are scaled so that `max alpha = 1`.
pub fn solve_positive_combination(
    vectors: &[Vec2],
    target: &Vec2,
    alpha_min: f64,
) -> Result<CombinationOutcome, ConeError> {
    if vectors.is_empty() {
        return Err(ConeError::NoVectors);
    }
    if !(target.x.is_finite() && target.y.is_finite()) {
        return Err(ConeError::NonFinite);
    }
    for (j, y) in vectors.iter().enumerate() {
        if !(y.x.is_finite() && y.y.is_finite()) {
            return Err(ConeError::NonFinite);
        }
        if y.x == 0.0 && y.y == 0.0 {
            return Err(ConeError::ZeroVector(j));
        }
    }
    let groups = directions(vectors);
    let reps: Vec<Vec2> = groups.iter().map(|g| vectors[g[0]]).collect();
    let kind = span_kind_of(&groups, &reps);
    let t = *target;
    let zero_target = t.x == 0.0 && t.y == 0.0;

    let cert = |c: Vec2| {
        let strict = exact::dot_sign(&c, &t) == Ordering::Less;
        Ok(CombinationOutcome::Infeasible(FarkasCertificate { c: [c.x, c.y], strict }))
    };

    // Upper bound on the uniform part keeping t - s S in the closed cone.
    let sum: Vec2 = vectors.iter().sum();
    let s_max = match kind {
        SpanKind::Plane => f64::INFINITY,
        SpanKind::HalfPlane { boundary } => {
            let n = geom::perp_ccw(&vectors[boundary]);
            if exact::dot_sign(&n, &t) != Ordering::Greater {
                return cert(n);
            }
            n.dot(&t) / n.dot(&sum)
        }
        SpanKind::Line => {
            let n = geom::perp_ccw(&reps[0]);
            match exact::dot_sign(&n, &t) {
                Ordering::Greater => return cert(-n),
                Ordering::Less => return cert(n),
                Ordering::Equal => f64::INFINITY,
            }
        }
        SpanKind::Wedge { first, last } => {
            let (a, b) = (vectors[first], vectors[last]);
            // Prefer a strict certificate when the target is outside the
            // closed wedge.
            let sa = exact::cross_sign(&a, &t);
            let sb = exact::cross_sign(&t, &b);
            if sa == Ordering::Less || (sa == Ordering::Equal && sb != Ordering::Less) {
                return cert(geom::perp_ccw(&a));
            }
            if sb != Ordering::Greater {
                return cert(-geom::perp_ccw(&b));
            }
            let mut s: f64 = f64::INFINITY;
            let ca = geom::cross(&a, &sum);
            if ca > 0.0 {
                s = s.min(geom::cross(&a, &t) / ca);
            }
            let cb = geom::cross(&sum, &b);
            if cb > 0.0 {
                s = s.min(geom::cross(&t, &b) / cb);
            }
            s
        }
        SpanKind::Ray => {
            let d = reps[0];
            match exact::cross_sign(&d, &t) {
                Ordering::Greater => return cert(-geom::perp_ccw(&d)),
                Ordering::Less => return cert(geom::perp_ccw(&d)),
                Ordering::Equal => {}
            }
            if exact::dot_sign(&d, &t) != Ordering::Greater {
                return cert(d);
            }
            // All vectors are positive multiples of d: equal coefficients.
            let c: f64 = vectors.iter().map(|y| y.dot(&d)).sum::<f64>() / d.norm_squared();
            let lambda = t.dot(&d) / d.norm_squared();
            let alpha = vec![lambda / c; vectors.len()];
            return Ok(finish(vectors, &t, alpha, false));
        }
    };

    let ymax = vectors.iter().map(|y| y.norm()).fold(0.0, f64::max);
    let candidates: Vec<f64> = if s_max.is_finite() {
        (1..=8).map(|k| s_max * 0.5f64.powi(k)).collect()
    } else {
        let base = if zero_target { 1.0 } else { t.norm() / ymax };
        (-12..=8).map(|k| base * 4f64.powi(k)).collect()
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in candidates {
        if !(s > 0.0 && s.is_finite()) {
            continue;
        }
        let x = t - s * sum;
        let beta = decompose(&x, vectors, &groups, &reps);
        let alpha: Vec<f64> = beta.iter().map(|b| s + b).collect();
        let total: f64 = alpha.iter().sum();
        let resid = (alpha.iter().zip(vectors).map(|(a, y)| *a * y).sum::<Vec2>() - t).norm();
        if !(resid <= SOLVE_RESIDUAL_REL * total * ymax) {
            continue;
        }
        let hi = alpha.iter().cloned().fold(0.0, f64::max);
        let lo = alpha.iter().cloned().fold(f64::INFINITY, f64::min);
        let ratio = lo / hi;
        if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
            best = Some((ratio, alpha));
        }
    }
    // No usable candidate: the target sits on the cone boundary to within
    // rounding, or the directions are too close to reproduce it accurately.
    let Some((ratio, alpha)) = best else {
        return Err(ConeError::BelowAlphaMin { ratio: 0.0, alpha_min });
    };
    if !(ratio >= alpha_min) {
        return Err(ConeError::BelowAlphaMin { ratio, alpha_min });
    }
    Ok(finish(vectors, &t, alpha, zero_target))
}

fn finish(vectors: &[Vec2], t: &Vec2, mut alpha: Vec<f64>, normalize: bool) -> CombinationOutcome {
    if normalize {
        let hi = alpha.iter().cloned().fold(0.0, f64::max);
        for a in &mut alpha {
            *a /= hi;
        }
    }
    let residual = alpha.iter().zip(vectors).map(|(a, y)| *a * y).sum::<Vec2>() - t;
    CombinationOutcome::Feasible(PositiveCombination { alpha, residual })
}

/// Nonnegative coefficients reproducing `x` with one direction or two
/// adjacent ones, choosing the candidate with the smallest error.
fn decompose(x: &Vec2, vectors: &[Vec2], groups: &[Vec<usize>], reps: &[Vec2]) -> Vec<f64> {
    let mut beta = vec![0.0; vectors.len()];
    if x.x == 0.0 && x.y == 0.0 {
        return beta;
    }
    let k = reps.len();
    let mut best: (f64, Vec<(usize, f64)>) = ((*x).norm(), Vec::new());
    for i in 0..k {
        let a = reps[i];
        let la = (x.dot(&a) / a.norm_squared()).max(0.0);
        let err = (x - la * a).norm();
        if err < best.0 {
            best = (err, vec![(groups[i][0], la)]);
        }
        if k >= 2 {
            let b = reps[(i + 1) % k];
            let det = geom::cross(&a, &b);
            if det > 0.0 {
                let ca = (geom::cross(x, &b) / det).max(0.0);
                let cb = (geom::cross(&a, x) / det).max(0.0);
                let err = (x - ca * a - cb * b).norm();
                if err < best.0 {
                    best = (err, vec![(groups[i][0], ca), (groups[(i + 1) % k][0], cb)]);
                }
            }
        }
    }
    for (j, c) in best.1 {
        beta[j] += c;
    }
    beta
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y)
    }

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn check_feasible(vs: &[Vec2], t: Vec2, out: &CombinationOutcome) {
        let CombinationOutcome::Feasible(c) = out else {
            panic!("expected feasible, got {out:?}")
        };
        let sum: f64 = c.alpha.iter().sum();
        let ymax = vs.iter().map(|y| y.norm()).fold(0.0, f64::max);
        assert!(c.alpha.iter().all(|a| *a > 0.0));
        let direct = c.alpha.iter().zip(vs).map(|(a, y)| *a * y).sum::<Vec2>() - t;
        assert!(direct.norm() <= 1e-9 * sum * ymax, "{direct:?}");
    }

    #[test]
    fn half_plane_cone() {
        let c = cone_at_vertex(p(1., 0.), p(0., 0.), p(-1., 0.)).unwrap();
        assert!(!c.degenerate);
        assert!(c.contains(&v(0.3, -1.0)));
        assert!(!c.contains(&v(0.3, 1.0)));
        assert!(!c.contains(&v(1.0, 0.0)));
    }

    #[test]
    fn quadrant_cone() {
        let c = cone_at_vertex(p(0., -1.), p(0., 0.), p(1., 0.)).unwrap();
        assert!(c.contains(&v(-1.0, 1.0)));
        assert!(!c.contains(&v(1.0, 1.0)));
        assert!(!c.contains(&v(-1.0, -1.0)));
        assert!(!c.contains(&v(0.0, 1.0)));
    }

    #[test]
    fn reversed_tangents_are_degenerate() {
        let c = cone_at_vertex(p(1., 0.), p(0., 0.), p(2., 0.)).unwrap();
        assert!(c.degenerate);
        for z in [v(0., 1.), v(0., -1.), v(1., 0.), v(-1., 0.3)] {
            assert!(!c.contains(&z));
        }
        assert!(matches!(
            cone_at_vertex(p(0., 0.), p(0., 0.), p(1., 0.)),
            Err(ConeError::CoincidentPoints(0, 1))
        ));
    }

    #[test]
    fn combination_examples() {
        let vs = [v(1., 0.), v(0., 1.), v(-1., -1.)];
        let out = solve_positive_combination(&vs, &v(0., 0.), DEFAULT_ALPHA_MIN).unwrap();
        check_feasible(&vs, v(0., 0.), &out);
        let a = out.feasible().unwrap().alpha;
        assert!((a[0] - a[1]).abs() < 1e-15 && (a[1] - a[2]).abs() < 1e-15);

        let out = solve_positive_combination(&vs, &v(1., 1.), DEFAULT_ALPHA_MIN).unwrap();
        check_feasible(&vs, v(1., 1.), &out);
        // (2, 2, 1) is one valid answer
        assert_eq!(2.0 * vs[0] + 2.0 * vs[1] + vs[2], v(1., 1.));

        let vs = [v(1., 0.), v(0., 1.)];
        match solve_positive_combination(&vs, &v(-1., 0.), DEFAULT_ALPHA_MIN).unwrap() {
            CombinationOutcome::Infeasible(c) => {
                assert!(c.strict);
                assert!(c.verify(&vs, &v(-1., 0.)));
                assert_eq!(c.c, [1.0, 0.0]);
            }
            o => panic!("{o:?}"),
        }
        assert_eq!(
            solve_positive_combination(&[v(1., 0.), v(0., 0.)], &v(1., 0.), 1e-6),
            Err(ConeError::ZeroVector(1))
        );
    }

    #[test]
    fn boundary_targets_get_weak_certificates() {
        let vs = [v(1., 0.), v(0., 1.)];
        for t in [v(1., 0.), v(0., 0.), v(0., 2.)] {
            match solve_positive_combination(&vs, &t, DEFAULT_ALPHA_MIN).unwrap() {
                CombinationOutcome::Infeasible(c) => {
                    assert!(!c.strict);
                    assert!(c.verify(&vs, &t));
                }
                o => panic!("{o:?}"),
            }
        }
    }

    #[test]
    fn span_kinds() {
        assert_eq!(span_kind(&[v(1., 0.), v(2., 0.)]), SpanKind::Ray);
        assert_eq!(span_kind(&[v(1., 0.), v(-2., 0.)]), SpanKind::Line);
        assert_eq!(span_kind(&[v(1., 0.), v(-2., 0.), v(0., 1.)]), SpanKind::HalfPlane { boundary: 0 });
        assert_eq!(span_kind(&[v(1., 0.), v(0., 1.), v(-1., -1.)]), SpanKind::Plane);
        assert_eq!(span_kind(&[v(0., 1.), v(1., 0.)]), SpanKind::Wedge { first: 1, last: 0 });
    }

    #[test]
    fn line_and_half_plane_feasibility() {
        let line = [v(1., 1.), v(-2., -2.)];
        check_feasible(&line, v(0., 0.), &solve_positive_combination(&line, &v(0., 0.), 1e-6).unwrap());
        check_feasible(&line, v(-3., -3.), &solve_positive_combination(&line, &v(-3., -3.), 1e-6).unwrap());
        let hp = [v(1., 0.), v(-1., 0.), v(0.5, 1.)];
        check_feasible(&hp, v(-4., 0.5), &solve_positive_combination(&hp, &v(-4., 0.5), 1e-6).unwrap());
        let out = solve_positive_combination(&hp, &v(5., 0.), 1e-6).unwrap();
        assert!(matches!(out, CombinationOutcome::Infeasible(c) if !c.strict && c.verify(&hp, &v(5., 0.))));
    }

    fn rotate(z: Vec2, a: f64) -> Vec2 {
        let (s, c) = a.sin_cos();
        v(c * z.x - s * z.y, s * z.x + c * z.y)
    }

    fn arb_vec() -> impl Strategy<Value = Vec2> {
        (-10.0f64..10.0, -10.0f64..10.0).prop_filter_map("nonzero", |(x, y)| {
            (x.abs() + y.abs() > 1e-3).then(|| v(x, y))
        })
    }

    proptest! {
        #[test]
        fn cone_rotation_equivariance(a in arb_vec(), b in arb_vec(), z in arb_vec(), ang in 0.0..std::f64::consts::TAU) {
            let c = cone_at_vertex(Point::origin() - a, Point::origin(), Point::origin() + b).unwrap();
            // compare only away from the cone boundary, where rotation
            // rounding cannot flip a sign
            let zn = z.norm();
            prop_assume!(c.normal_minus.dot(&z).abs() > 1e-9 * zn && c.normal_plus.dot(&z).abs() > 1e-9 * zn);
            let r = cone_at_vertex(
                Point::origin() - rotate(a, ang),
                Point::origin(),
                Point::origin() + rotate(b, ang),
            ).unwrap();
            prop_assert_eq!(c.contains(&z), r.contains(&rotate(z, ang)));
        }

        #[test]
        fn combination_feasible_or_certified(vs in proptest::collection::vec(arb_vec(), 2..8), t in arb_vec(), zero in any::<bool>()) {
            let t = if zero { Vec2::zeros() } else { t };
            match solve_positive_combination(&vs, &t, 1e-9) {
                Ok(CombinationOutcome::Feasible(_)) => {
                    check_feasible(&vs, t, &solve_positive_combination(&vs, &t, 1e-9).unwrap());
                }
                Ok(CombinationOutcome::Infeasible(c)) => prop_assert!(c.verify(&vs, &t)),
                Err(ConeError::BelowAlphaMin { .. }) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        #[test]
        fn interior_of_plane_always_feasible(n in 3usize..10, jitter in proptest::collection::vec(-0.2f64..0.2, 10), t in arb_vec()) {
            // directions spread around the circle span the plane
            let vs: Vec<Vec2> = (0..n)
                .map(|k| {
                    let a = std::f64::consts::TAU * (k as f64 + jitter[k]) / n as f64;
                    v(a.cos(), a.sin()) * (1.0 + jitter[k].abs())
                })
                .collect();
            prop_assume!(span_kind(&vs) == SpanKind::Plane);
            let out = solve_positive_combination(&vs, &t, DEFAULT_ALPHA_MIN).unwrap();
            check_feasible(&vs, t, &out);
        }
    }
}
