//! Weighted discrete Laplacian and the Dirichlet problem with boundary
//! vertices pinned to a polygon.

use std::sync::Arc;

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exact;
use crate::geom::{self, Point, Vec2};
use crate::mesh::{PlanarDrawing, TargetPolygon, Triangulation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarmonicError {
    #[error("weight range [{lo}, {hi}] is not strictly positive")]
    NonPositiveRange { lo: f64, hi: f64 },
    #[error("weight of edge ({0}, {1}) is {2}, must be finite and > 0")]
    NonPositiveWeight(usize, usize, f64),
    #[error("directed edge ({0}, {1}) has no weight")]
    MissingWeight(usize, usize),
    #[error("({0}, {1}) is not an edge of the triangulation")]
    UnknownEdge(usize, usize),
    #[error("directed edge ({0}, {1}) given twice")]
    DuplicateWeight(usize, usize),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("weights and boundary refer to different triangulations")]
    MeshMismatch,
    #[error("linear system could not be solved: {0}")]
    SingularSystem(String),
    #[error("residual {residual:e} at vertex {vertex} exceeds bound {bound:e}")]
    ResidualTooLarge { vertex: usize, residual: f64, bound: f64 },
}

/// Positive weights on the directed edges of a triangulation, stored in the
/// triangulation's edge-slot order. `w(i, j)` and `w(j, i)` are independent.
#[derive(Clone, Debug)]
pub struct EdgeWeights {
    tri: Arc<Triangulation>,
    w: Vec<f64>,
}

fn check_weight(i: usize, j: usize, w: f64) -> Result<f64, HarmonicError> {
    if w.is_finite() && w > 0.0 {
        Ok(w)
    } else {
        Err(HarmonicError::NonPositiveWeight(i, j, w))
    }
}

impl EdgeWeights {
    pub fn uniform(tri: Arc<Triangulation>) -> Self {
        let w = vec![1.0; tri.directed_edge_count()];
        EdgeWeights { tri, w }
    }

    /// Independent uniform samples in `[lo, hi]`, reproducible from `seed`.
    pub fn random_positive(tri: Arc<Triangulation>, seed: u64, lo: f64, hi: f64) -> Result<Self, HarmonicError> {
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(HarmonicError::NonPositiveRange { lo, hi });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = (0..tri.directed_edge_count())
            .map(|_| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
            .collect();
        Ok(EdgeWeights { tri, w })
    }

    pub fn from_fn(tri: Arc<Triangulation>, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, HarmonicError> {
        let w = tri
            .directed_edges()
            .map(|(i, j)| check_weight(i, j, f(i, j)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EdgeWeights { tri, w })
    }

    /// Weights from `(i, j, w_ij)` triples covering every directed edge once.
    pub fn from_triples(tri: Arc<Triangulation>, triples: &[(usize, usize, f64)]) -> Result<Self, HarmonicError> {
        let mut w = vec![f64::NAN; tri.directed_edge_count()];
        for &(i, j, wij) in triples {
            if i >= tri.vertex_count() || j >= tri.vertex_count() {
                return Err(HarmonicError::UnknownEdge(i, j));
            }
            let slot = tri.edge_slot(i, j).ok_or(HarmonicError::UnknownEdge(i, j))?;
            if !w[slot].is_nan() {
                return Err(HarmonicError::DuplicateWeight(i, j));
            }
            w[slot] = check_weight(i, j, wij)?;
        }
        if let Some((i, j)) = tri.directed_edges().zip(&w).find(|(_, x)| x.is_nan()).map(|(e, _)| e) {
            return Err(HarmonicError::MissingWeight(i, j));
        }
        Ok(EdgeWeights { tri, w })
    }

    pub fn triangulation(&self) -> &Arc<Triangulation> {
        &self.tri
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.tri.edge_slot(i, j).map(|s| self.w[s])
    }

    /// `(j, w_ij)` for every neighbor `j` of `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.tri.slot_range(i);
        self.tri.neighbors(i).iter().copied().zip(self.w[r].iter().copied())
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.w[self.tri.slot_range(i)].iter().sum()
    }

    pub fn triples(&self) -> Vec<(usize, usize, f64)> {
        self.tri.directed_edges().zip(&self.w).map(|((i, j), &w)| (i, j, w)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.tri.directed_edges().all(|(i, j)| self.get(i, j) == self.get(j, i))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightScheme {
    Uniform,
    RandomPositive { seed: u64, lo: f64, hi: f64 },
}

pub fn weight_scheme(scheme: WeightScheme, tri: &Arc<Triangulation>) -> Result<EdgeWeights, HarmonicError> {
    match scheme {
        WeightScheme::Uniform => Ok(EdgeWeights::uniform(tri.clone())),
        WeightScheme::RandomPositive { seed, lo, hi } => EdgeWeights::random_positive(tri.clone(), seed, lo, hi),
    }
}

/// Pinned positions for the boundary cycle of a triangulation.
#[derive(Clone, Debug)]
pub struct BoundaryAssignment {
    tri: Arc<Triangulation>,
    pinned: Vec<Option<Point>>,
    polygon: Vec<Point>,
}

impl BoundaryAssignment {
    /// Map `start_vertex` to polygon vertex 0 and walk both cycles in their
    /// counter-clockwise order.
    pub fn new(tri: Arc<Triangulation>, polygon: &TargetPolygon, start_vertex: usize) -> Result<Self, HarmonicError> {
        let cycle = tri.boundary();
        if cycle.len() != polygon.len() {
            return Err(HarmonicError::BoundaryMismatch(format!(
                "boundary cycle has {} vertices, polygon has {}",
                cycle.len(),
                polygon.len()
            )));
        }
        let k0 = if start_vertex < tri.vertex_count() {
            tri.boundary_position(start_vertex)
        } else {
            None
        }
        .ok_or_else(|| HarmonicError::BoundaryMismatch(format!("vertex {start_vertex} is not on the boundary")))?;
        let m = cycle.len();
        let mut pinned = vec![None; tri.vertex_count()];
        for (k, p) in polygon.vertices().iter().enumerate() {
            pinned[cycle[(k0 + k) % m]] = Some(*p);
        }
        Ok(BoundaryAssignment {
            tri,
            pinned,
            polygon: polygon.vertices().to_vec(),
        })
    }

    /// Take boundary positions from a full coordinate array. The boundary
    /// cycle must be drawn as a simple counter-clockwise polygon.
    pub fn from_coords(tri: Arc<Triangulation>, coords: &[Point]) -> Result<Self, HarmonicError> {
        if coords.len() != tri.vertex_count() {
            return Err(HarmonicError::BoundaryMismatch(format!(
                "{} coordinates for {} vertices",
                coords.len(),
                tri.vertex_count()
            )));
        }
        let poly: Vec<Point> = tri.boundary().iter().map(|&v| coords[v]).collect();
        let target = TargetPolygon::new(poly).map_err(|e| HarmonicError::BoundaryMismatch(e.to_string()))?;
        let start = tri.boundary()[0];
        Self::new(tri, &target, start)
    }

    pub fn triangulation(&self) -> &Arc<Triangulation> {
        &self.tri
    }

    pub fn position(&self, v: usize) -> Option<Point> {
        self.pinned[v]
    }

    /// Polygon vertices in boundary-cycle order from the start vertex.
    pub fn polygon(&self) -> &[Point] {
        &self.polygon
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Absolute residual tolerance as a multiple of the polygon diameter.
    pub tol_abs: f64,
    /// Residual tolerance relative to `row_sum * diameter`.
    pub tol_rel: f64,
    /// Largest system factored directly; larger ones use BiCGSTAB.
    pub direct_limit: usize,
    pub max_refinements: usize,
    pub max_iterations: usize,
    /// Relative residual target for the iterative solver.
    pub iterative_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol_abs: 1e-12,
            tol_rel: 1e-10,
            direct_limit: 20_000,
            max_refinements: 4,
            max_iterations: 20_000,
            iterative_tol: 1e-12,
        }
    }
}

impl SolveOptions {
    /// Residual bound at vertex `i`.
    pub fn bound(&self, row_sum: f64, diam: f64) -> f64 {
        self.tol_abs * diam + self.tol_rel * row_sum * diam
    }
}

/// Per-vertex value of the weighted Laplacian `sum_j w_ij (y_j - y_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplaceResidual(pub Vec<Vec2>);

impl LaplaceResidual {
    pub fn at(&self, v: usize) -> Vec2 {
        self.0[v]
    }

    /// Largest norm over the interior vertices of `tri`.
    pub fn max_interior_norm(&self, tri: &Triangulation) -> f64 {
        tri.interior_vertices().iter().map(|&v| self.0[v].norm()).fold(0.0, f64::max)
    }
}

pub fn laplace_at(w: &EdgeWeights, coords: &[Point], i: usize) -> Vec2 {
    let yi = coords[i];
    w.row(i).fold(Vec2::zeros(), |acc, (j, wij)| acc + wij * (coords[j] - yi))
}

/// Evaluate the weighted Laplacian at every vertex.
///
/// # Panics
/// If the drawing and the weights use different triangulations.
pub fn laplace_residual(drawing: &PlanarDrawing, w: &EdgeWeights) -> LaplaceResidual {
    assert!(
        **drawing.triangulation() == *w.tri,
        "drawing and weights must share one triangulation"
    );
    LaplaceResidual((0..w.tri.vertex_count()).map(|i| laplace_at(w, drawing.coords(), i)).collect())
}

/// Exact check that `sum_j w_ij (y_j - y_i)` vanishes in rational arithmetic.
pub fn laplace_is_exactly_zero(w: &EdgeWeights, coords: &[Point], i: usize) -> bool {
    let terms: Vec<(f64, Point)> = w.row(i).map(|(j, wij)| (wij, coords[j])).collect();
    let [x, y] = exact::exact_weighted_sum(&coords[i], &terms);
    num_traits::Zero::is_zero(&x) && num_traits::Zero::is_zero(&y)
}

pub fn harmonic_embed(w: &EdgeWeights, boundary: &BoundaryAssignment) -> Result<PlanarDrawing, HarmonicError> {
    harmonic_embed_with(w, boundary, &SolveOptions::default())
}

/// Solve `L_w(y)(v) = 0` at interior vertices with pinned boundary values.
/// Unreferenced vertices are placed at the polygon's vertex centroid.
pub fn harmonic_embed_with(
    w: &EdgeWeights,
    boundary: &BoundaryAssignment,
    opts: &SolveOptions,
) -> Result<PlanarDrawing, HarmonicError> {
    if *w.tri != *boundary.tri {
        return Err(HarmonicError::MeshMismatch);
    }
    let tri = &w.tri;
    let n = tri.vertex_count();
    let centroid = {
        let s = boundary.polygon.iter().fold(Vec2::zeros(), |a, p| a + p.coords);
        Point::from(s / boundary.polygon.len() as f64)
    };
    let mut coords: Vec<Point> = (0..n).map(|v| boundary.pinned[v].unwrap_or(centroid)).collect();
    let interior = tri.interior_vertices();
    let diam = geom::diameter(&boundary.polygon);
    if !interior.is_empty() {
        let sys = System::assemble(w, &interior, &coords);
        let x = if interior.len() <= opts.direct_limit {
            match sys.solve_direct(opts) {
                Ok(x) => x,
                Err(e) => {
                    log::warn!("direct solve failed ({e}), using iterative fallback");
                    sys.solve_iterative(opts)?
                }
            }
        } else {
            sys.solve_iterative(opts)?
        };
        for (k, &v) in interior.iter().enumerate() {
            coords[v] = Point::new(x[0][k], x[1][k]);
        }
    }
    for &v in &interior {
        let r = laplace_at(w, &coords, v).norm();
        let bound = opts.bound(w.row_sum(v), diam);
        if !(r <= bound) {
            return Err(HarmonicError::ResidualTooLarge { vertex: v, residual: r, bound });
        }
    }
    PlanarDrawing::new(tri.clone(), coords).map_err(|e| HarmonicError::SingularSystem(e.to_string()))
}

/// Interior block of the Laplacian in CSR form, with the boundary part moved
/// to the right-hand side. Rows are `sum_j w_ij x_i - sum_{j interior} w_ij x_j`.
struct System {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
    diag: Vec<f64>,
    rhs: [Vec<f64>; 2],
}

impl System {
    fn assemble(w: &EdgeWeights, interior: &[usize], coords: &[Point]) -> System {
        let tri = &w.tri;
        let mut index = vec![usize::MAX; tri.vertex_count()];
        for (k, &v) in interior.iter().enumerate() {
            index[v] = k;
        }
        let n = interior.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col = Vec::new();
        let mut val = Vec::new();
        let mut diag = vec![0.0; n];
        let mut rhs = [vec![0.0; n], vec![0.0; n]];
        row_ptr.push(0);
        for (k, &v) in interior.iter().enumerate() {
            for (j, wij) in w.row(v) {
                diag[k] += wij;
                if index[j] != usize::MAX {
                    col.push(index[j]);
                    val.push(-wij);
                } else {
                    rhs[0][k] += wij * coords[j].x;
                    rhs[1][k] += wij * coords[j].y;
                }
            }
            col.push(k);
            val.push(diag[k]);
            row_ptr.push(col.len());
        }
        System { n, row_ptr, col, val, diag, rhs }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate().take(self.n) {
            *o = (self.row_ptr[r]..self.row_ptr[r + 1]).map(|p| self.val[p] * x[self.col[p]]).sum();
        }
    }

    fn residual(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        let mut ax = vec![0.0; self.n];
        self.apply(x, &mut ax);
        b.iter().zip(&ax).map(|(b, a)| b - a).collect()
    }

    fn solve_direct(&self, opts: &SolveOptions) -> Result<[Vec<f64>; 2], HarmonicError> {
        let triplets: Vec<Triplet<usize, usize, f64>> = (0..self.n)
            .flat_map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |p| (r, p)))
            .map(|(r, p)| Triplet::new(r, self.col[p], self.val[p]))
            .collect();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(self.n, self.n, &triplets)
            .map_err(|e| HarmonicError::SingularSystem(format!("{e:?}")))?;
        let lu = a.sp_lu().map_err(|e| HarmonicError::SingularSystem(format!("{e:?}")))?;
        let solve = |b: &[Vec<f64>; 2]| -> [Vec<f64>; 2] {
            let m = lu.solve(Mat::<f64>::from_fn(self.n, 2, |i, j| b[j][i]));
            [(0..self.n).map(|i| m[(i, 0)]).collect(), (0..self.n).map(|i| m[(i, 1)]).collect()]
        };
        let mut x = solve(&self.rhs);
        // Iterative refinement against the assembled system.
        for _ in 0..opts.max_refinements {
            let r = [self.residual(&x[0], &self.rhs[0]), self.residual(&x[1], &self.rhs[1])];
            if r.iter().flatten().all(|v| *v == 0.0) {
                break;
            }
            let d = solve(&r);
            for c in 0..2 {
                for i in 0..self.n {
                    x[c][i] += d[c][i];
                }
            }
        }
        if x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(HarmonicError::SingularSystem("non-finite solution".into()));
        }
        Ok(x)
    }

    fn solve_iterative(&self, opts: &SolveOptions) -> Result<[Vec<f64>; 2], HarmonicError> {
        let x0 = self.bicgstab(&self.rhs[0], opts)?;
        let x1 = self.bicgstab(&self.rhs[1], opts)?;
        Ok([x0, x1])
    }

    /// Jacobi-preconditioned BiCGSTAB. The matrix is not assumed symmetric.
    fn bicgstab(&self, b: &[f64], opts: &SolveOptions) -> Result<Vec<f64>, HarmonicError> {
        let n = self.n;
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let norm = |a: &[f64]| dot(a, a).sqrt();
        let precond = |v: &[f64]| -> Vec<f64> { v.iter().zip(&self.diag).map(|(x, d)| x / d).collect() };
        let bnorm = norm(b);
        let mut x = precond(b);
        if bnorm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut r = self.residual(&x, b);
        let r_hat = r.clone();
        let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
        let mut v = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut s = vec![0.0; n];
        let mut t = vec![0.0; n];
        for _ in 0..opts.max_iterations {
            if norm(&r) <= opts.iterative_tol * bnorm {
                return Ok(x);
            }
            let rho_new = dot(&r_hat, &r);
            if rho_new == 0.0 || omega == 0.0 {
                break;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            let p_hat = precond(&p);
            self.apply(&p_hat, &mut v);
            alpha = rho / dot(&r_hat, &v);
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            let s_hat = precond(&s);
            self.apply(&s_hat, &mut t);
            let tt = dot(&t, &t);
            omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
            for i in 0..n {
                x[i] += alpha * p_hat[i] + omega * s_hat[i];
                r[i] = s[i] - omega * t[i];
            }
        }
        let rel = norm(&self.residual(&x, b)) / bnorm;
        if rel <= opts.iterative_tol {
            Ok(x)
        } else {
            Err(HarmonicError::SingularSystem(format!("BiCGSTAB stalled at relative residual {rel:e}")))
        }
    }
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::mesh::build_triangulation;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn square() -> TargetPolygon {
        TargetPolygon::new(vec![
            Point::new(0., 0.),
            Point::new(1., 0.),
            Point::new(1., 1.),
            Point::new(0., 1.),
        ])
        .unwrap()
    }

    fn fan() -> Arc<Triangulation> {
        Arc::new(build_triangulation(&[[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]], 5).unwrap())
    }

    /// Square with two interior vertices joined by an edge.
    fn chain() -> Arc<Triangulation> {
        Arc::new(
            build_triangulation(&[[0, 1, 4], [1, 5, 4], [1, 2, 5], [2, 3, 5], [3, 4, 5], [3, 0, 4]], 6).unwrap(),
        )
    }

    /// Dense Gaussian elimination with partial pivoting.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
            a.swap(c, p);
            b.swap(c, p);
            for r in c + 1..n {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
            x[r] = (b[r] - s) / a[r][r];
        }
        x
    }

    #[test]
    fn uniform_single_triangle() {
        let t = Arc::new(build_triangulation(&[[0, 1, 2]], 3).unwrap());
        let w = weight_scheme(WeightScheme::Uniform, &t).unwrap();
        assert_eq!(w.triples().len(), 6);
        assert!(w.triples().iter().all(|&(_, _, x)| x == 1.0));
    }

    #[test]
    fn random_weights_reproducible_and_validated() {
        let t = chain();
        let s = WeightScheme::RandomPositive { seed: 7, lo: 0.1, hi: 10.0 };
        let a = weight_scheme(s, &t).unwrap();
        let b = weight_scheme(s, &t).unwrap();
        assert_eq!(a.triples(), b.triples());
        assert!(a.triples().iter().all(|&(_, _, x)| (0.1..=10.0).contains(&x)));
        assert!(!a.is_symmetric());
        let bad = WeightScheme::RandomPositive { seed: 7, lo: 0.0, hi: 10.0 };
        assert!(matches!(weight_scheme(bad, &t), Err(HarmonicError::NonPositiveRange { .. })));
    }

    #[test]
    fn fan_uniform_center() {
        let t = fan();
        let ba = BoundaryAssignment::new(t.clone(), &square(), 0).unwrap();
        let d = harmonic_embed(&EdgeWeights::uniform(t), &ba).unwrap();
        assert_relative_eq!(d.point(4), Point::new(0.5, 0.5), epsilon = 1e-14);
        for v in 0..4 {
            assert_eq!(d.point(v), square().vertices()[v]);
        }
    }

    #[test]
    fn fan_weighted_center() {
        let t = fan();
        let ws = [1.0, 1.0, 1.0, 3.0];
        let w = EdgeWeights::from_fn(t.clone(), |i, j| if i == 4 { ws[j] } else { 1.0 }).unwrap();
        let d = harmonic_embed(&w, &BoundaryAssignment::new(t, &square(), 0).unwrap()).unwrap();
        assert_relative_eq!(d.point(4), Point::new(1.0 / 3.0, 2.0 / 3.0), epsilon = 1e-14);
    }

    #[test]
    fn chain_matches_dense_solve() {
        let t = chain();
        let w = EdgeWeights::random_positive(t.clone(), 3, 0.1, 10.0).unwrap();
        let sq = square();
        let d = harmonic_embed(&w, &BoundaryAssignment::new(t.clone(), &sq, 0).unwrap()).unwrap();
        // full 6x6 system: identity rows for the boundary
        let n = 6;
        for c in 0..2 {
            let mut a = vec![vec![0.0; n]; n];
            let mut b = vec![0.0; n];
            for v in 0..n {
                if v < 4 {
                    a[v][v] = 1.0;
                    b[v] = sq.vertices()[v][c];
                } else {
                    for (j, wij) in w.row(v) {
                        a[v][v] += wij;
                        a[v][j] -= wij;
                    }
                }
            }
            let x = dense_solve(a, b);
            for v in 4..6 {
                assert_relative_eq!(d.point(v)[c], x[v], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn start_vertex_rotates_assignment() {
        let t = fan();
        let ba = BoundaryAssignment::new(t.clone(), &square(), 2).unwrap();
        assert_eq!(ba.position(2), Some(Point::new(0., 0.)));
        assert_eq!(ba.position(3), Some(Point::new(1., 0.)));
        assert!(matches!(
            BoundaryAssignment::new(t.clone(), &square(), 4),
            Err(HarmonicError::BoundaryMismatch(_))
        ));
        let tri = TargetPolygon::new(vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(0., 1.)]).unwrap();
        assert!(matches!(BoundaryAssignment::new(t, &tri, 0), Err(HarmonicError::BoundaryMismatch(_))));
    }

    #[test]
    fn from_coords_rejects_clockwise_boundary() {
        let t = fan();
        let cw = vec![
            Point::new(0., 0.),
            Point::new(0., 1.),
            Point::new(1., 1.),
            Point::new(1., 0.),
            Point::new(0.5, 0.5),
        ];
        assert!(matches!(BoundaryAssignment::from_coords(t, &cw), Err(HarmonicError::BoundaryMismatch(_))));
    }

    #[test]
    fn residual_examples() {
        // boundary vertex 0 at the origin with neighbors (1,0), (0,1)
        let t = Arc::new(build_triangulation(&[[0, 1, 2]], 3).unwrap());
        let w = EdgeWeights::from_fn(t.clone(), |i, j| match (i, j) {
            (0, 1) => 2.0,
            (0, 2) => 3.0,
            _ => 1.0,
        })
        .unwrap();
        let d = PlanarDrawing::new(t.clone(), vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(0., 1.)]).unwrap();
        assert_eq!(laplace_residual(&d, &w).at(0), Vec2::new(2.0, 3.0));

        let f = fan();
        let coords = vec![
            Point::new(0., 0.),
            Point::new(1., 0.),
            Point::new(1., 1.),
            Point::new(0., 1.),
            Point::new(0.5, 0.5),
        ];
        let d = PlanarDrawing::new(f.clone(), coords.clone()).unwrap();
        let w = EdgeWeights::uniform(f);
        assert_eq!(laplace_residual(&d, &w).at(4), Vec2::zeros());
        assert!(laplace_is_exactly_zero(&w, &coords, 4));
    }

    #[test]
    fn triples_roundtrip_and_errors() {
        let t = fan();
        let w = EdgeWeights::random_positive(t.clone(), 1, 0.5, 2.0).unwrap();
        let back = EdgeWeights::from_triples(t.clone(), &w.triples()).unwrap();
        assert_eq!(back.triples(), w.triples());
        let mut tr = w.triples();
        tr.pop();
        assert!(matches!(EdgeWeights::from_triples(t.clone(), &tr), Err(HarmonicError::MissingWeight(..))));
        tr.push((0, 2, 1.0));
        assert!(matches!(EdgeWeights::from_triples(t.clone(), &tr), Err(HarmonicError::UnknownEdge(0, 2))));
        assert!(matches!(
            EdgeWeights::from_fn(t, |_, _| -1.0),
            Err(HarmonicError::NonPositiveWeight(..))
        ));
    }

    #[test]
    fn iterative_solver_agrees_with_direct() {
        let t = chain();
        let w = EdgeWeights::random_positive(t.clone(), 11, 0.1, 10.0).unwrap();
        let ba = BoundaryAssignment::new(t, &square(), 1).unwrap();
        let direct = harmonic_embed(&w, &ba).unwrap();
        let opts = SolveOptions { direct_limit: 0, ..Default::default() };
        let iter = harmonic_embed_with(&w, &ba, &opts).unwrap();
        for v in 0..6 {
            assert_relative_eq!(direct.point(v), iter.point(v), epsilon = 1e-11);
        }
    }

    proptest! {
        #[test]
        fn affine_equivariance(seed in 0u64..1000, a in -2.0f64..2.0, b in -2.0f64..2.0,
                               c in -2.0f64..2.0, d in -2.0f64..2.0, tx in -5.0f64..5.0, ty in -5.0f64..5.0) {
            let det = a * d - b * c;
            prop_assume!(det > 0.1);
            let t = chain();
            let w = EdgeWeights::random_positive(t.clone(), seed, 0.1, 10.0).unwrap();
            let map = |p: &Point| Point::new(a * p.x + b * p.y + tx, c * p.x + d * p.y + ty);
            let sq = square();
            let moved = TargetPolygon::new(sq.vertices().iter().map(map).collect()).unwrap();
            let y0 = harmonic_embed(&w, &BoundaryAssignment::new(t.clone(), &sq, 0).unwrap()).unwrap();
            let y1 = harmonic_embed(&w, &BoundaryAssignment::new(t, &moved, 0).unwrap()).unwrap();
            for v in 0..6 {
                let e = map(&y0.point(v));
                let scale = 1.0 + e.coords.norm();
                prop_assert!((y1.point(v) - e).norm() <= 1e-10 * scale);
            }
        }

        #[test]
        fn maximum_principle(seed in 0u64..1000) {
            let t = chain();
            let w = EdgeWeights::random_positive(t.clone(), seed, 0.1, 10.0).unwrap();
            let y = harmonic_embed(&w, &BoundaryAssignment::new(t, &square(), 0).unwrap()).unwrap();
            for v in 4..6 {
                let p = y.point(v);
                prop_assert!(p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0);
            }
        }
    }
}
