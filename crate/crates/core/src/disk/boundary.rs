//! Boundary data on the unit circle, parameterized by angle.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::DiskError;
use crate::geom::{self, Point, Vec2};

/// Data the Poisson integrator can consume: pieces on consecutive angle
/// intervals `[b_i, b_{i+1}]` with `b_k = b_0 + 2 pi`.
pub trait BoundaryData: Sync {
    fn breakpoints(&self) -> &[f64];

    /// Value of piece `i` at angle `t` (inside its interval).
    fn eval_piece(&self, i: usize, t: f64) -> Vec2;

    /// A single piece whose periodic continuation is smooth, so the periodic
    /// trapezoid rule applies.
    fn is_smooth_periodic(&self) -> bool;

    /// Angle reduced to `[b_0, b_0 + 2 pi)`.
    fn reduce(&self, t: f64) -> f64 {
        let b0 = self.breakpoints()[0];
        let mut u = (t - b0).rem_euclid(TAU) + b0;
        if u >= b0 + TAU {
            u = b0;
        }
        u
    }

    /// Index of the piece containing `t`; a breakpoint belongs to the piece
    /// on its right.
    fn piece_at(&self, t: f64) -> usize {
        let b = self.breakpoints();
        let u = self.reduce(t);
        let k = b.partition_point(|x| *x <= u);
        k.saturating_sub(1).min(b.len() - 2)
    }

    fn eval(&self, t: f64) -> Vec2 {
        self.eval_piece(self.piece_at(t), self.reduce(t))
    }
}

/// One smooth arc of a boundary map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Piece {
    /// `sum_k c_k (t - a)^k` with `a` the start of the piece's interval.
    Poly { coeffs: Vec<[f64; 2]> },
    /// `a0 + sum_k (cos_k cos(k t) + sin_k sin(k t))`, `k` from 1.
    Trig {
        a0: [f64; 2],
        cos: Vec<[f64; 2]>,
        sin: Vec<[f64; 2]>,
    },
}

fn v2(c: &[f64; 2]) -> Vec2 {
    Vec2::new(c[0], c[1])
}

impl Piece {
    /// Value and derivative at `t`, with `a` the interval start.
    pub fn eval(&self, a: f64, t: f64) -> (Vec2, Vec2) {
        match self {
            Piece::Poly { coeffs } => {
                let x = t - a;
                let mut val = Vec2::zeros();
                let mut der = Vec2::zeros();
                for (k, c) in coeffs.iter().enumerate().rev() {
                    der = der * x + val;
                    val = val * x + v2(c);
                    let _ = k;
                }
                (val, der)
            }
            Piece::Trig { a0, cos, sin } => {
                let mut val = v2(a0);
                let mut der = Vec2::zeros();
                for (k, (ck, sk)) in cos.iter().zip(sin.iter()).enumerate() {
                    let k = (k + 1) as f64;
                    let (s, c) = (k * t).sin_cos();
                    val += c * v2(ck) + s * v2(sk);
                    der += k * (-s * v2(ck) + c * v2(sk));
                }
                (val, der)
            }
        }
    }
}

/// A closed, counter-clockwise, piecewise-smooth curve `theta -> gamma`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBoundaryMap")]
pub struct DiskBoundaryMap {
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBoundaryMap {
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
}

impl TryFrom<RawBoundaryMap> for DiskBoundaryMap {
    type Error = DiskError;

    fn try_from(raw: RawBoundaryMap) -> Result<Self, DiskError> {
        DiskBoundaryMap::new(raw.breakpoints, raw.pieces)
    }
}

/// Relative tolerance for continuity at junctions.
const JUNCTION_TOL: f64 = 1e-9;

impl DiskBoundaryMap {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Piece>) -> Result<Self, DiskError> {
        if pieces.is_empty() || breakpoints.len() != pieces.len() + 1 {
            return Err(DiskError::InvalidBreakpoints("need one more breakpoint than pieces".into()));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DiskError::InvalidBreakpoints("breakpoints must be finite and increasing".into()));
        }
        let span = breakpoints[breakpoints.len() - 1] - breakpoints[0];
        if (span - TAU).abs() > 1e-12 * TAU {
            return Err(DiskError::InvalidBreakpoints(format!("breakpoints span {span}, expected 2 pi")));
        }
        for p in &pieces {
            let ok = match p {
                Piece::Poly { coeffs } => !coeffs.is_empty() && coeffs.iter().flatten().all(|c| c.is_finite()),
                Piece::Trig { a0, cos, sin } => {
                    cos.len() == sin.len() && a0.iter().chain(cos.iter().flatten()).chain(sin.iter().flatten()).all(|c| c.is_finite())
                }
            };
            if !ok {
                return Err(DiskError::InvalidBreakpoints("malformed piece coefficients".into()));
            }
        }
        let map = DiskBoundaryMap { breakpoints, pieces };
        let scale = map.scale();
        let k = map.pieces.len();
        for i in 0..k {
            let end = map.piece_end(i).0;
            let next = map.piece_start((i + 1) % k).0;
            if (end - next).norm() > JUNCTION_TOL * scale {
                return Err(DiskError::Discontinuous(i));
            }
        }
        for i in 0..k {
            let (a, b) = (map.breakpoints[i], map.breakpoints[i + 1]);
            for j in 0..=16 {
                let t = a + (b - a) * j as f64 / 16.0;
                let d = map.pieces[i].eval(a, t).1;
                if d.norm() <= 1e-14 * scale {
                    return Err(DiskError::ZeroDerivative(t));
                }
            }
        }
        if geom::signed_area2(&map.dense_samples()) <= 0.0 {
            return Err(DiskError::NotCounterClockwise);
        }
        Ok(map)
    }

    /// The identity map onto the unit circle.
    pub fn circle() -> Self {
        Self::trig([0.0, 0.0], vec![[1.0, 0.0]], vec![[0.0, 1.0]]).expect("circle is valid")
    }

    /// A single trigonometric piece on `[-pi, pi]`.
    pub fn trig(a0: [f64; 2], cos: Vec<[f64; 2]>, sin: Vec<[f64; 2]>) -> Result<Self, DiskError> {
        Self::new(vec![-std::f64::consts::PI, std::f64::consts::PI], vec![Piece::Trig { a0, cos, sin }])
    }

    /// Linear interpolation of `points[k]` at increasing `angles[k]`, closed
    /// back to `points[0]` at `angles[0] + 2 pi`.
    pub fn piecewise_linear(points: &[Point], angles: &[f64]) -> Result<Self, DiskError> {
        if points.len() < 3 || points.len() != angles.len() {
            return Err(DiskError::InvalidBreakpoints("need >= 3 points with one angle each".into()));
        }
        let n = points.len();
        let mut breakpoints = angles.to_vec();
        breakpoints.push(angles[0] + TAU);
        let pieces = (0..n)
            .map(|k| {
                let (a, b) = (breakpoints[k], breakpoints[k + 1]);
                let p = points[k];
                let q = points[(k + 1) % n];
                let slope = (q - p) / (b - a);
                Piece::Poly { coeffs: vec![[p.x, p.y], [slope.x, slope.y]] }
            })
            .collect();
        Self::new(breakpoints, pieces)
    }

    /// Constant-speed parameterization of a polygon: vertex 0 at `start`,
    /// the other vertices at angles proportional to arc length.
    pub fn polygon_arclength(poly: &[Point], start: f64) -> Result<Self, DiskError> {
        let n = poly.len();
        let lens: Vec<f64> = (0..n).map(|k| (poly[(k + 1) % n] - poly[k]).norm()).collect();
        let total: f64 = lens.iter().sum();
        let mut angles = Vec::with_capacity(n);
        let mut acc = 0.0;
        for l in &lens {
            angles.push(start + TAU * acc / total);
            acc += l;
        }
        Self::piecewise_linear(poly, &angles)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Junction angles. Empty for a single trigonometric piece.
    pub fn singular_set(&self) -> Vec<f64> {
        if self.is_smooth_periodic() {
            Vec::new()
        } else {
            self.breakpoints[..self.pieces.len()].to_vec()
        }
    }

    fn piece_start(&self, i: usize) -> (Vec2, Vec2) {
        let a = self.breakpoints[i];
        self.pieces[i].eval(a, a)
    }

    fn piece_end(&self, i: usize) -> (Vec2, Vec2) {
        let a = self.breakpoints[i];
        self.pieces[i].eval(a, self.breakpoints[i + 1])
    }

    /// Points along the curve: every junction plus enough interior samples
    /// per piece to resolve short, fast pieces as well as long ones.
    fn dense_samples(&self) -> Vec<Point> {
        let mut pts = Vec::new();
        for i in 0..self.pieces.len() {
            let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
            let m = ((4096.0 * (b - a) / TAU).ceil() as usize).max(32);
            pts.extend((0..m).map(|j| Point::from(self.pieces[i].eval(a, a + (b - a) * j as f64 / m as f64).0)));
        }
        pts
    }

    /// Size of the curve, used for relative tolerances.
    pub fn scale(&self) -> f64 {
        let pts: Vec<Point> = (0..self.pieces.len()).map(|i| Point::from(self.piece_start(i).0)).chain(
            (0..64).map(|j| self.point(self.breakpoints[0] + TAU * j as f64 / 64.0))).collect();
        geom::diameter(&pts).max(f64::MIN_POSITIVE)
    }

    pub fn point(&self, t: f64) -> Point {
        Point::from(self.eval(t))
    }

    /// One-sided derivatives `(gamma'_-, gamma'_+)` at `t`.
    pub fn one_sided_derivatives(&self, t: f64) -> (Vec2, Vec2) {
        let u = self.reduce(t);
        let i = self.piece_at(u);
        let plus = self.pieces[i].eval(self.breakpoints[i], u).1;
        let k = self.pieces.len();
        let at_break = self.breakpoints[i] == u;
        let minus = if at_break && !self.is_smooth_periodic() {
            let j = (i + k - 1) % k;
            self.piece_end(j).1
        } else {
            plus
        };
        (minus, plus)
    }
}

impl BoundaryData for DiskBoundaryMap {
    fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    fn eval_piece(&self, i: usize, t: f64) -> Vec2 {
        self.pieces[i].eval(self.breakpoints[i], t).0
    }

    fn is_smooth_periodic(&self) -> bool {
        self.pieces.len() == 1 && matches!(self.pieces[0], Piece::Trig { .. })
    }
}

/// Real-valued data with optional jumps, embedded as `(f(t), 0)`.
pub struct ScalarData<F: Fn(f64) -> f64 + Sync> {
    f: F,
    breakpoints: Vec<f64>,
    smooth: bool,
}

impl<F: Fn(f64) -> f64 + Sync> ScalarData<F> {
    /// Smooth periodic data.
    pub fn smooth(f: F) -> Self {
        ScalarData {
            f,
            breakpoints: vec![-std::f64::consts::PI, std::f64::consts::PI],
            smooth: true,
        }
    }

    /// Data smooth between the given jump angles (increasing, spanning less
    /// than a full turn); `f` is sampled only strictly between them.
    pub fn with_jumps(f: F, jumps: &[f64]) -> Self {
        let mut breakpoints = jumps.to_vec();
        breakpoints.push(jumps[0] + TAU);
        ScalarData { f, breakpoints, smooth: false }
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }
}

impl<F: Fn(f64) -> f64 + Sync> BoundaryData for ScalarData<F> {
    fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    fn eval_piece(&self, _i: usize, t: f64) -> Vec2 {
        Vec2::new((self.f)(t), 0.0)
    }

    fn is_smooth_periodic(&self) -> bool {
        self.smooth
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square() -> Vec<Point> {
        vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(1., 1.), Point::new(0., 1.)]
    }

    #[test]
    fn circle_evaluation() {
        let c = DiskBoundaryMap::circle();
        for t in [-3.0, -1.0, 0.0, 0.5, 3.1] {
            let p = c.point(t);
            assert!((p - Point::new(f64::cos(t), f64::sin(t))).norm() < 1e-15);
            let (m, pl) = c.one_sided_derivatives(t);
            assert_eq!(m, pl);
            assert!((pl - Vec2::new(-f64::sin(t), f64::cos(t))).norm() < 1e-15);
        }
        assert!(c.singular_set().is_empty());
    }

    #[test]
    fn square_corners_have_distinct_one_sided_derivatives() {
        let m = DiskBoundaryMap::polygon_arclength(&square(), -PI).unwrap();
        assert_eq!(m.singular_set().len(), 4);
        let (minus, plus) = m.one_sided_derivatives(-PI / 2.0);
        // corner (1, 0): arriving along +x, leaving along +y
        assert!(minus.y.abs() < 1e-15 && minus.x > 0.0);
        assert!(plus.x.abs() < 1e-15 && plus.y > 0.0);
        assert!((minus.norm() - 4.0 / TAU).abs() < 1e-14);
        assert!((m.point(-PI / 2.0) - Point::new(1.0, 0.0)).norm() < 1e-15);
        assert!((m.point(PI) - Point::new(0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn validation_errors() {
        let mut cw = square();
        cw.reverse();
        assert_eq!(DiskBoundaryMap::polygon_arclength(&cw, 0.0).unwrap_err(), DiskError::NotCounterClockwise);
        let bad = DiskBoundaryMap::new(
            vec![0.0, PI, TAU],
            vec![
                Piece::Poly { coeffs: vec![[0.0, 0.0], [1.0, 0.0]] },
                Piece::Poly { coeffs: vec![[5.0, 5.0], [1.0, 0.0]] },
            ],
        );
        assert!(matches!(bad, Err(DiskError::Discontinuous(0))));
        assert!(matches!(
            DiskBoundaryMap::new(vec![0.0, 1.0], vec![Piece::Poly { coeffs: vec![[0.0, 0.0]] }]),
            Err(DiskError::InvalidBreakpoints(_))
        ));
    }

    #[test]
    fn json_roundtrip() {
        let m = DiskBoundaryMap::polygon_arclength(&square(), -PI).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: DiskBoundaryMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let broken = s.replace("[1.0,0.0]", "[1.0,5.0]");
        assert!(serde_json::from_str::<DiskBoundaryMap>(&broken).is_err());
    }
}
