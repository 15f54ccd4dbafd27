//! Exact certification of intersection-free drawings and homeomorphisms,
//! and recovery of positive weights from a certified drawing.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{self, cone_at_vertex, CombinationOutcome, ConeError, ConeReport};
use crate::exact;
use crate::geom::{Point, Vec2};
use crate::harmonic::{EdgeWeights, HarmonicError};
use crate::mesh::{classify_polygon, PlanarDrawing, VertexClass};
use crate::Exec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("drawings realize different triangulations")]
    MeshMismatch,
    #[error("source face {0} has zero area")]
    DegenerateSourceTriangle(usize),
    #[error("weight recovery failed at vertex {vertex}: {reason}")]
    RecoveryFailed { vertex: usize, reason: String },
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedEmbedding,
    Rejected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    OrientationCertificate,
    PairwiseOracle,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Two edges meet somewhere other than a shared endpoint.
    Crossing { a: [usize; 2], b: [usize; 2] },
    FlippedTriangle { face: usize },
    DegenerateTriangle { face: usize },
    CoincidentVertices { a: usize, b: usize },
    BoundaryNotSimple,
    /// Boundary orientation differs from the source drawing's.
    BoundaryOrientation,
    /// The source drawing is not itself an embedding.
    SourceNotEmbedding,
    /// The orientation certificate and the pairwise oracle disagree.
    MethodDisagreement { orientation: bool, oracle: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingCertificate {
    pub verdict: Verdict,
    pub method: Method,
    pub violations: Vec<Violation>,
    /// Sign of the linear map on each face touching the boundary, when a
    /// source drawing is involved.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub det_signs: Vec<i8>,
}

impl EmbeddingCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::CertifiedEmbedding
    }
}

/// Violations kept per certificate; counting continues past it.
pub const MAX_REPORTED: usize = 10_000;

fn sign_i8(o: Ordering) -> i8 {
    match o {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

/// Exact face orientation signs of a drawing.
pub fn face_signs(drawing: &PlanarDrawing) -> Vec<i8> {
    let c = drawing.coords();
    drawing
        .triangulation()
        .faces()
        .iter()
        .map(|f| sign_i8(exact::orient(&c[f[0]], &c[f[1]], &c[f[2]])))
        .collect()
}

/// Pairs of referenced vertices drawn at the same point.
pub fn coincident_vertices(drawing: &PlanarDrawing) -> Vec<(usize, usize)> {
    let tri = drawing.triangulation();
    let c = drawing.coords();
    let mut idx: Vec<usize> = (0..tri.vertex_count()).filter(|&v| tri.is_referenced(v)).collect();
    idx.sort_by(|&a, &b| c[a].x.total_cmp(&c[b].x).then(c[a].y.total_cmp(&c[b].y)).then(a.cmp(&b)));
    idx.windows(2)
        .filter(|w| c[w[0]] == c[w[1]])
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
        .collect()
}

/// Every pair of edges meeting improperly, by exact segment tests.
///
/// Edges sharing a vertex are improper when they overlap collinearly;
/// disjoint edges are improper when the closed segments meet. A bounding
/// box sweep skips pairs that cannot meet; it uses comparisons only, so the
/// result is the same as testing all pairs.
pub fn pairwise_crossings(drawing: &PlanarDrawing, exec: Exec) -> Vec<([usize; 2], [usize; 2])> {
    let c = drawing.coords();
    let mut edges = drawing.triangulation().undirected_edges();
    let bbox = |e: &(usize, usize)| {
        let (p, q) = (c[e.0], c[e.1]);
        (p.x.min(q.x), p.x.max(q.x), p.y.min(q.y), p.y.max(q.y))
    };
    edges.sort_by(|a, b| bbox(a).0.total_cmp(&bbox(b).0).then(a.cmp(b)));
    let boxes: Vec<_> = edges.iter().map(bbox).collect();
    let mut found = exec.flat_map_range(edges.len(), |i| {
        let (a0, a1) = edges[i];
        let bi = boxes[i];
        let mut out = Vec::new();
        for j in i + 1..edges.len() {
            let bj = boxes[j];
            if bj.0 > bi.1 {
                break;
            }
            if bj.3 < bi.2 || bj.2 > bi.3 {
                continue;
            }
            let (b0, b1) = edges[j];
            let shared = [a0, a1].into_iter().find(|v| *v == b0 || *v == b1);
            let bad = match shared {
                Some(s) => {
                    let oa = if a0 == s { a1 } else { a0 };
                    let ob = if b0 == s { b1 } else { b0 };
                    exact::adjacent_segments_overlap(&c[s], &c[oa], &c[ob])
                }
                None => exact::segments_intersect(&c[a0], &c[a1], &c[b0], &c[b1]),
            };
            if bad {
                let (x, y) = ([a0, a1], [b0, b1]);
                out.push(if x < y { (x, y) } else { (y, x) });
            }
        }
        out
    });
    found.sort();
    found
}

/// All faces strictly counter-clockwise and the boundary drawn as a simple
/// counter-clockwise polygon. For a disk triangulation this implies an
/// embedding: the map is a local homeomorphism whose boundary winds once
/// around every interior point.
pub fn orientation_certificate(drawing: &PlanarDrawing) -> bool {
    let poly = drawing.boundary_polygon();
    face_signs(drawing).iter().all(|s| *s > 0)
        && exact::polygon_is_simple(&poly)
        && exact::polygon_orientation(&poly) == Ordering::Greater
}

pub fn intersection_free(drawing: &PlanarDrawing) -> EmbeddingCertificate {
    intersection_free_with(drawing, Exec::default())
}

/// Certify that the straight-line drawing is an embedding with positively
/// oriented faces. The pairwise oracle is the ground truth; the orientation
/// certificate is computed alongside and any disagreement is reported.
pub fn intersection_free_with(drawing: &PlanarDrawing, exec: Exec) -> EmbeddingCertificate {
    let mut violations = Vec::new();
    for (k, s) in face_signs(drawing).iter().enumerate() {
        match s {
            -1 => violations.push(Violation::FlippedTriangle { face: k }),
            0 => violations.push(Violation::DegenerateTriangle { face: k }),
            _ => {}
        }
    }
    for (a, b) in coincident_vertices(drawing) {
        violations.push(Violation::CoincidentVertices { a, b });
    }
    let crossings = pairwise_crossings(drawing, exec);
    let oracle_ok = violations.is_empty() && crossings.is_empty();
    violations.extend(crossings.into_iter().map(|(a, b)| Violation::Crossing { a, b }));
    let poly = drawing.boundary_polygon();
    if !exact::polygon_is_simple(&poly) {
        violations.push(Violation::BoundaryNotSimple);
    }
    let orientation_ok = orientation_certificate(drawing);
    if orientation_ok != oracle_ok {
        log::error!("orientation certificate ({orientation_ok}) disagrees with pairwise oracle ({oracle_ok})");
        violations.push(Violation::MethodDisagreement {
            orientation: orientation_ok,
            oracle: oracle_ok,
        });
    }
    violations.truncate(MAX_REPORTED);
    EmbeddingCertificate {
        verdict: if oracle_ok && orientation_ok {
            Verdict::CertifiedEmbedding
        } else {
            Verdict::Rejected
        },
        method: Method::Both,
        violations,
        det_signs: Vec::new(),
    }
}

/// Certify that the piecewise-linear map from `source` to `target` is an
/// orientation-preserving homeomorphism onto the target's polygon. A
/// certified verdict is cross-checked by recovering positive weights.
pub fn certify_homeomorphism(source: &PlanarDrawing, target: &PlanarDrawing) -> Result<EmbeddingCertificate, CertifyError> {
    certify_homeomorphism_with(source, target, Exec::default())
}

pub fn certify_homeomorphism_with(
    source: &PlanarDrawing,
    target: &PlanarDrawing,
    exec: Exec,
) -> Result<EmbeddingCertificate, CertifyError> {
    if !source.same_mesh(target) {
        return Err(CertifyError::MeshMismatch);
    }
    let mut cert = intersection_free_with(target, exec);
    if !intersection_free_with(source, exec).is_certified() {
        cert.violations.push(Violation::SourceNotEmbedding);
        cert.verdict = Verdict::Rejected;
    }
    let so = exact::polygon_orientation(&source.boundary_polygon());
    let to = exact::polygon_orientation(&target.boundary_polygon());
    if so != to {
        cert.violations.push(Violation::BoundaryOrientation);
        cert.verdict = Verdict::Rejected;
    }
    if cert.is_certified() {
        recover_weights(source, target)?;
    }
    if let Ok(det) = boundary_det_check(source, target) {
        cert.det_signs = det.signs;
    }
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetCheck {
    /// Faces with at least one boundary vertex.
    pub faces: Vec<usize>,
    /// Exact sign of the Jacobian determinant on each face.
    pub signs: Vec<i8>,
    /// Target over source signed area, for reporting only.
    pub ratios: Vec<f64>,
    pub verdict: bool,
}

/// Sign of the Jacobian of the piecewise-linear map on each face touching
/// the boundary. The sign is the product of the exact face orientations.
pub fn boundary_det_check(source: &PlanarDrawing, target: &PlanarDrawing) -> Result<DetCheck, CertifyError> {
    if !source.same_mesh(target) {
        return Err(CertifyError::MeshMismatch);
    }
    let tri = source.triangulation();
    let (xs, ys) = (source.coords(), target.coords());
    let area2 = |c: &[Point], f: &[usize; 3]| {
        let (a, b, d) = (c[f[0]], c[f[1]], c[f[2]]);
        (b - a).perp(&(d - a))
    };
    let mut out = DetCheck { faces: vec![], signs: vec![], ratios: vec![], verdict: true };
    for (k, f) in tri.faces().iter().enumerate() {
        if !f.iter().any(|&v| tri.is_boundary(v)) {
            continue;
        }
        let so = exact::orient(&xs[f[0]], &xs[f[1]], &xs[f[2]]);
        if so == Ordering::Equal {
            return Err(CertifyError::DegenerateSourceTriangle(k));
        }
        let to = exact::orient(&ys[f[0]], &ys[f[1]], &ys[f[2]]);
        let s = sign_i8(so) * sign_i8(to);
        out.verdict &= s > 0;
        out.faces.push(k);
        out.signs.push(s);
        out.ratios.push(area2(ys, f) / area2(xs, f));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct RecoveredWeights {
    pub weights: EdgeWeights,
    pub cone_report: ConeReport,
}

/// Positive weights for which `target` is discrete-harmonic at every
/// interior vertex and satisfies the cone condition at strictly reflex
/// boundary vertices. Convex and straight boundary vertices get weight 1.
pub fn recover_weights(source: &PlanarDrawing, target: &PlanarDrawing) -> Result<RecoveredWeights, CertifyError> {
    if !source.same_mesh(target) {
        return Err(CertifyError::MeshMismatch);
    }
    recover_weights_for(target)
}

/// Weight recovery on a single drawing; see [`recover_weights`].
pub fn recover_weights_for(target: &PlanarDrawing) -> Result<RecoveredWeights, CertifyError> {
    let tri = target.triangulation().clone();
    let y = target.coords();
    let poly = target.boundary_polygon();
    let classes = classify_polygon(&poly).map_err(ConeError::from)?;
    let m = poly.len();
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; tri.vertex_count()];
    let fail = |vertex: usize, reason: String| CertifyError::RecoveryFailed { vertex, reason };
    let solve = |v: usize, t: Vec2| -> Result<Vec<f64>, CertifyError> {
        let vs: Vec<Vec2> = tri.neighbors(v).iter().map(|&j| y[j] - y[v]).collect();
        match cone::solve_positive_combination(&vs, &t, cone::DEFAULT_ALPHA_MIN) {
            Ok(CombinationOutcome::Feasible(c)) => Ok(c.alpha),
            Ok(CombinationOutcome::Infeasible(c)) => Err(fail(v, format!("infeasible, certificate {:?}", c.c))),
            Err(e) => Err(fail(v, e.to_string())),
        }
    };
    for v in tri.interior_vertices() {
        rows[v] = Some(solve(v, Vec2::zeros())?);
    }
    for (k, &v) in tri.boundary().iter().enumerate() {
        if classes[k] != VertexClass::StrictlyReflex {
            continue;
        }
        let cone = cone_at_vertex(poly[(k + m - 1) % m], poly[k], poly[(k + 1) % m])?;
        let dir = cone.bisector().ok_or_else(|| fail(v, "cone has no bisector".into()))?;
        let nb = tri.neighbors(v);
        let mean = nb.iter().map(|&j| (y[j] - y[v]).norm()).sum::<f64>() / nb.len() as f64;
        rows[v] = Some(solve(v, dir * mean)?);
    }
    let weights = EdgeWeights::from_fn(tri.clone(), |i, j| match &rows[i] {
        Some(r) => r[tri.neighbors(i).binary_search(&j).expect("neighbor")],
        None => 1.0,
    })?;
    let cone_report = cone::cone_condition_report(target, &weights)?;
    Ok(RecoveredWeights { weights, cone_report })
}
