//! Boundary maps onto non-convex polygons whose harmonic extension is not
//! injective, and the harmonic measure of a half circle.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::{cone_condition_scan, map_grid, ConeScan, DiskBoundaryMap, DiskError, PoissonExtension, PoissonOptions, PolarGrid, ScalarData};
use crate::exact::{self, Location};
use crate::geom::Point;
use crate::mesh::{TargetPolygon, VertexClass};
use crate::Exec;

/// One member of the family: the boundary map, the two polygon vertices it
/// lingers at, and the slowdown parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoquetFamily {
    pub map: DiskBoundaryMap,
    pub gamma_a: usize,
    pub gamma_b: usize,
    pub slowdown: f64,
}

/// Two polygon vertices whose connecting segment leaves the polygon: the
/// neighbours of a strictly reflex vertex when their midpoint is outside,
/// otherwise any such pair.
fn exterior_chord(poly: &TargetPolygon) -> Option<(usize, usize)> {
    let v = poly.vertices();
    let n = v.len();
    let outside = |i: usize, j: usize| {
        let mid = Point::from((v[i].coords + v[j].coords) * 0.5);
        exact::locate_in_polygon(v, &mid) == Location::Outside
    };
    for (k, c) in poly.classes().iter().enumerate() {
        if *c == VertexClass::StrictlyReflex {
            let (a, b) = ((k + n - 1) % n, (k + 1) % n);
            if outside(a, b) {
                return Some((a, b));
            }
        }
    }
    (0..n).flat_map(|i| (i + 2..n).map(move |j| (i, j))).find(|&(i, j)| (j + 1) % n != i && outside(i, j))
}

/// Boundary map onto `poly` that spends almost all of the upper half circle
/// at vertex `gamma_a` (right quarter) and `gamma_b` (left quarter) and
/// traverses the chain between them on an arc of width `s pi / 2` around
/// `theta = pi / 2`; the lower half does the same for the remaining chain.
/// As `s -> 0` the extension approaches `gamma_a` on the right half disk and
/// `gamma_b` on the left half, so the centre tends to the chord midpoint,
/// which lies outside the polygon.
pub fn choquet_counterexample(poly: &TargetPolygon, slowdown: f64) -> Result<ChoquetFamily, DiskError> {
    if !(slowdown > 0.0 && slowdown <= 1.0) {
        return Err(DiskError::InvalidParameter(format!("slowdown {slowdown} outside (0, 1]")));
    }
    let (ga, gb) = exterior_chord(poly).ok_or(DiskError::NoReflexChord)?;
    let v = poly.vertices();
    let n = v.len();
    // arc length from gamma_a, counter-clockwise
    let mut u = vec![0.0; n + 1];
    for k in 0..n {
        u[k + 1] = u[k] + (v[(ga + k + 1) % n] - v[(ga + k) % n]).norm();
    }
    let total = u[n];
    let kb = (gb + n - ga) % n;
    let ub = u[kb];
    let s = slowdown;
    let (eps, eps2) = (s * ub / 4.0, s * (total - ub) / 4.0);
    let w = s * PI / 4.0;
    let knots_t = [0.0, FRAC_PI_2 - w, FRAC_PI_2 + w, PI, 3.0 * FRAC_PI_2 - w, 3.0 * FRAC_PI_2 + w, TAU];
    let knots_u = [0.0, eps, ub - eps, ub, ub + eps2, total - eps2, total];
    let theta_of = |x: f64| {
        let k = knots_u.partition_point(|&y| y <= x).clamp(1, knots_u.len() - 1) - 1;
        knots_t[k] + (knots_t[k + 1] - knots_t[k]) * (x - knots_u[k]) / (knots_u[k + 1] - knots_u[k])
    };
    let point_at = |x: f64| {
        let k = u.partition_point(|&y| y <= x).clamp(1, n) - 1;
        let (p, q) = (v[(ga + k) % n], v[(ga + k + 1) % n]);
        p + (q - p) * ((x - u[k]) / (u[k + 1] - u[k]))
    };
    let mut nodes: Vec<(f64, Point)> = (0..n).map(|k| (theta_of(u[k]), v[(ga + k) % n])).collect();
    for k in 1..knots_t.len() - 1 {
        nodes.push((knots_t[k], point_at(knots_u[k])));
    }
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    nodes.dedup_by(|b, a| b.0 - a.0 <= 1e-15 || (b.1 - a.1).norm() == 0.0);
    let (angles, points): (Vec<f64>, Vec<Point>) = nodes.into_iter().unzip();
    let map = DiskBoundaryMap::piecewise_linear(&points, &angles)?;
    Ok(ChoquetFamily {
        map,
        gamma_a: ga,
        gamma_b: gb,
        slowdown,
    })
}

/// A witness must lie this far outside the polygon, relative to its
/// diameter, so quadrature error cannot manufacture one.
pub const WITNESS_MARGIN: f64 = 1e-6;

fn boundary_distance(poly: &[Point], p: &Point) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            let d = b - a;
            let t = ((p - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
            (p - (a + d * t)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

fn is_witness(poly: &TargetPolygon, p: &Point) -> bool {
    exact::locate_in_polygon(poly.vertices(), p) == Location::Outside
        && boundary_distance(poly.vertices(), p) >= WITNESS_MARGIN * poly.diameter()
}

/// A sample of the disk mapped strictly outside the polygon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub slowdown: f64,
    pub nu: f64,
    pub theta: f64,
    pub image: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoquetScan {
    /// `(s, witness found)` for every slowdown tried, in order.
    pub tried: Vec<(f64, bool)>,
    pub witness: Option<Witness>,
    /// The family member at the witness.
    pub family: Option<ChoquetFamily>,
    /// Cone scan of that member.
    pub cone: Option<ConeScan>,
}

/// Try `s = 1, 1/2, 1/4, ...` down to `s_min` and stop at the first map
/// with a sample (the centre first, then the grid) mapped outside the
/// polygon by exact point location and at least `WITNESS_MARGIN * diam`
/// away from it.
pub fn choquet_witness_scan(
    poly: &TargetPolygon,
    s_min: f64,
    grid: PolarGrid,
    cone_samples: usize,
    opts: &PoissonOptions,
    exec: Exec,
) -> Result<ChoquetScan, DiskError> {
    let mut tried = Vec::new();
    let mut s = 1.0;
    while s >= s_min {
        let fam = choquet_counterexample(poly, s)?;
        let ext = PoissonExtension::new(&fam.map, opts.clone())?;
        let centre = Point::from(ext.phi(1.0, 0.0)?);
        let mut found = None;
        if is_witness(poly, &centre) {
            found = Some((1.0, 0.0, centre));
        } else {
            let img = map_grid(&fam.map, grid, opts, exec)?;
            let pts = grid.points();
            if let Some(i) = img.iter().position(|p| is_witness(poly, p)) {
                found = Some((pts[i].0, pts[i].1, img[i]));
            }
        }
        tried.push((s, found.is_some()));
        log::debug!("choquet slowdown {s}: witness {}", found.is_some());
        if let Some((nu, theta, p)) = found {
            let cone = cone_condition_scan(&fam.map, cone_samples, opts, exec)?;
            return Ok(ChoquetScan {
                tried,
                witness: Some(Witness {
                    slowdown: s,
                    nu,
                    theta,
                    image: [p.x, p.y],
                }),
                family: Some(fam),
                cone: Some(cone),
            });
        }
        s *= 0.5;
    }
    Ok(ChoquetScan {
        tried,
        witness: None,
        family: None,
        cone: None,
    })
}

/// Which closed form matches the measured profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureFit {
    /// `1/2 + (2/pi) arctan x`
    TwoOverPi,
    /// `1/2 + (1/pi) arctan x`
    OneOverPi,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicMeasureAudit {
    pub xs: Vec<f64>,
    pub measured: Vec<f64>,
    pub err_two_over_pi: f64,
    pub err_one_over_pi: f64,
    pub tolerance: f64,
    pub fit: MeasureFit,
}

/// Extension of the indicator of the right half circle, sampled on the
/// horizontal diameter at `xs`, compared with both candidate closed forms.
pub fn harmonic_measure_audit(xs: &[f64], tolerance: f64, opts: &PoissonOptions) -> Result<HarmonicMeasureAudit, DiskError> {
    let chi = ScalarData::with_jumps(|t: f64| if t.cos() > 0.0 { 1.0 } else { 0.0 }, &[-FRAC_PI_2, FRAC_PI_2]);
    let ext = PoissonExtension::new(&chi, opts.clone())?;
    let mut measured = Vec::with_capacity(xs.len());
    for &x in xs {
        if !(x.abs() < 1.0) {
            return Err(DiskError::InvalidParameter(format!("x = {x} not inside the disk")));
        }
        let (nu, theta) = if x >= 0.0 { (1.0 - x, 0.0) } else { (1.0 + x, PI) };
        measured.push(ext.phi(nu, theta)?.x);
    }
    let err = |k: f64| {
        xs.iter()
            .zip(&measured)
            .map(|(x, m)| (m - (0.5 + k / PI * x.atan())).abs())
            .fold(0.0, f64::max)
    };
    let (e2, e1) = (err(2.0), err(1.0));
    let fit = if e2 <= tolerance && e2 <= e1 {
        MeasureFit::TwoOverPi
    } else if e1 <= tolerance {
        MeasureFit::OneOverPi
    } else {
        MeasureFit::Neither
    };
    Ok(HarmonicMeasureAudit {
        xs: xs.to_vec(),
        measured,
        err_two_over_pi: e2,
        err_one_over_pi: e1,
        tolerance,
        fit,
    })
}
