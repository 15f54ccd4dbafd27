//! The continuous counterpart on the unit disk.
//!
//! Points of the closed disk are addressed by polar coordinates `(nu, theta)`
//! with radius `r = 1 - nu`, so `nu = 0` is the boundary circle and `nu`
//! increases inward. A boundary map `gamma` is extended to the disk by the
//! Poisson integral, coordinate by coordinate.
//!
//! Injectivity in this module is *sampled*, never certified: the checks map
//! a finite polar grid and inspect the images with exact predicates. Exact
//! certification belongs to the discrete modules.

pub mod boundary;
mod choquet;
mod monotone;
pub mod quadrature;

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use boundary::{BoundaryData, DiskBoundaryMap, Piece, ScalarData};
pub use choquet::{
    choquet_counterexample, choquet_witness_scan, harmonic_measure_audit, ChoquetFamily, ChoquetScan, HarmonicMeasureAudit,
    MeasureFit, Witness,
};
pub use monotone::{lipschitz_check, monotonicity_check, MonotoneReport, RadiusResult};
use quadrature::{GaussRule, KernelIntegrals};

use crate::exact;
use crate::geom::{self, Point, Vec2};
use crate::mesh::GeometryError;
use crate::Exec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiskError {
    #[error("nu = 0 is the boundary; evaluate the boundary map instead")]
    BoundaryPoint,
    #[error("nu = {0} outside (0, 1]")]
    InvalidRadius(f64),
    #[error("invalid breakpoints: {0}")]
    InvalidBreakpoints(String),
    #[error("pieces {0} and its successor do not join continuously")]
    Discontinuous(usize),
    #[error("boundary derivative vanishes at theta = {0}")]
    ZeroDerivative(f64),
    #[error("boundary curve is not counter-clockwise")]
    NotCounterClockwise,
    #[error("no boundary chord outside the polygon (polygon convex?)")]
    NoReflexChord,
    #[error("hypothesis violated between t = {s} and t = {t}: slack {slack}")]
    HypothesisViolated { s: f64, t: f64, slack: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Quadrature and differentiation settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoissonOptions {
    /// Base trapezoid node count for smooth periodic data.
    pub m: usize,
    /// Near the boundary the node count grows as `ceil(m0 / nu)`.
    pub m0: usize,
    /// Largest trapezoid node count; beyond it graded Gauss panels are used.
    pub m_max: usize,
    /// Gauss-Legendre nodes per panel.
    pub gauss_nodes: usize,
    /// Widest Gauss panel.
    pub max_panel: f64,
    /// Richardson step for the radial derivative near the boundary.
    pub richardson_h: f64,
    /// From this `nu` on, the radial derivative uses the differentiated kernel.
    pub derivative_switch: f64,
}

impl Default for PoissonOptions {
    fn default() -> Self {
        PoissonOptions {
            m: 2048,
            m0: 1024,
            m_max: 1 << 16,
            gauss_nodes: 16,
            max_panel: 0.25,
            richardson_h: 1e-3,
            derivative_switch: 0.05,
        }
    }
}

/// Poisson extension of boundary data.
pub struct PoissonExtension<'a, B: BoundaryData + ?Sized> {
    data: &'a B,
    opts: PoissonOptions,
    rule: GaussRule,
}

impl<'a, B: BoundaryData + ?Sized> PoissonExtension<'a, B> {
    pub fn new(data: &'a B, opts: PoissonOptions) -> Result<Self, DiskError> {
        if opts.m < 64 {
            return Err(DiskError::InvalidParameter(format!("m = {} < 64", opts.m)));
        }
        if opts.gauss_nodes == 0 || !(opts.max_panel > 0.0) || !(opts.richardson_h > 0.0) {
            return Err(DiskError::InvalidParameter("quadrature settings must be positive".into()));
        }
        let rule = GaussRule::new(opts.gauss_nodes);
        Ok(PoissonExtension { data, opts, rule })
    }

    pub fn options(&self) -> &PoissonOptions {
        &self.opts
    }

    /// Kernel integrals at an interior point.
    pub fn integrals(&self, nu: f64, theta: f64) -> Result<KernelIntegrals, DiskError> {
        if nu == 0.0 {
            return Err(DiskError::BoundaryPoint);
        }
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(DiskError::InvalidRadius(nu));
        }
        let b = self.data.breakpoints();
        if self.data.is_smooth_periodic() {
            let m = self.opts.m.max((self.opts.m0 as f64 / nu).ceil() as usize);
            if m <= self.opts.m_max {
                return Ok(quadrature::trapezoid(|t| self.data.eval_piece(0, t), b[0], m, nu, theta));
            }
        }
        let mut acc = KernelIntegrals::default();
        for i in 0..b.len() - 1 {
            let part = quadrature::gauss_piece(
                |t| self.data.eval_piece(i, t),
                b[i],
                b[i + 1],
                nu,
                theta,
                &self.rule,
                self.opts.max_panel,
            );
            acc.value += part.value;
            acc.d_theta += part.d_theta;
            acc.d_r += part.d_r;
        }
        Ok(acc)
    }

    /// `phi(nu, theta)`; the boundary `nu = 0` is evaluated exactly.
    pub fn phi(&self, nu: f64, theta: f64) -> Result<Vec2, DiskError> {
        if nu == 0.0 {
            return Ok(self.data.eval(theta));
        }
        Ok(self.integrals(nu, theta)?.value)
    }

    /// `d phi / d nu`: one-sided Richardson extrapolation along the inward
    /// ray below `derivative_switch`, the differentiated kernel above.
    pub fn normal_derivative(&self, nu: f64, theta: f64) -> Result<Vec2, DiskError> {
        if nu >= self.opts.derivative_switch {
            return Ok(-self.integrals(nu, theta)?.d_r);
        }
        let h = self.opts.richardson_h;
        let p0 = self.phi(nu, theta)?;
        let d1 = (self.phi(nu + h, theta)? - p0) / h;
        let d2 = (self.phi(nu + 0.5 * h, theta)? - p0) / (0.5 * h);
        Ok(2.0 * d2 - d1)
    }

    /// `d phi / d theta` at an interior point.
    pub fn tangential_derivative(&self, nu: f64, theta: f64) -> Result<Vec2, DiskError> {
        Ok(self.integrals(nu, theta)?.d_theta)
    }
}

/// Poisson extension of `gamma` at one interior point with `m` base nodes.
pub fn poisson_extend(gamma: &DiskBoundaryMap, nu: f64, theta: f64, m: usize) -> Result<Point, DiskError> {
    let ext = PoissonExtension::new(gamma, PoissonOptions { m, ..PoissonOptions::default() })?;
    Ok(Point::from(ext.integrals(nu, theta)?.value))
}

/// Boundary derivative data at one angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDerivatives {
    pub theta: f64,
    pub d_nu: [f64; 2],
    pub gamma_minus: [f64; 2],
    pub gamma_plus: [f64; 2],
}

pub fn boundary_derivatives(gamma: &DiskBoundaryMap, theta: f64, h: f64) -> Result<BoundaryDerivatives, DiskError> {
    let ext = PoissonExtension::new(gamma, PoissonOptions { richardson_h: h, ..PoissonOptions::default() })?;
    boundary_derivatives_with(&ext, gamma, theta)
}

fn boundary_derivatives_with(
    ext: &PoissonExtension<'_, DiskBoundaryMap>,
    gamma: &DiskBoundaryMap,
    theta: f64,
) -> Result<BoundaryDerivatives, DiskError> {
    let d = ext.normal_derivative(0.0, theta)?;
    let (m, p) = gamma.one_sided_derivatives(theta);
    Ok(BoundaryDerivatives {
        theta,
        d_nu: [d.x, d.y],
        gamma_minus: [m.x, m.y],
        gamma_plus: [p.x, p.y],
    })
}

/// One sample of the extension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskSample {
    pub nu: f64,
    pub theta: f64,
    pub phi: [f64; 2],
    pub d_nu: [f64; 2],
    pub d_theta: [f64; 2],
}

/// Polar sampling grid: `angles` equally spaced angles from `-pi`, radii
/// `r_j = j / radii` for `j = 1..=radii` (the last ring is the boundary),
/// plus the centre.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub angles: usize,
    pub radii: usize,
}

impl Default for PolarGrid {
    fn default() -> Self {
        PolarGrid { angles: 256, radii: 64 }
    }
}

impl PolarGrid {
    pub fn theta(&self, k: usize) -> f64 {
        -PI + TAU * k as f64 / self.angles as f64
    }

    pub fn nu(&self, j: usize) -> f64 {
        1.0 - (j + 1) as f64 / self.radii as f64
    }

    /// Index of the ring point `(j, k)`; the centre is last.
    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.angles + (k % self.angles)
    }

    pub fn len(&self) -> usize {
        self.angles * self.radii + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(nu, theta)` of each sample in index order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.radii {
            for k in 0..self.angles {
                out.push((self.nu(j), self.theta(k)));
            }
        }
        out.push((1.0, 0.0));
        out
    }

    /// Counter-clockwise triangles of the grid in the disk.
    pub fn faces(&self) -> Vec<[usize; 3]> {
        let c = self.len() - 1;
        let a = self.angles;
        let mut faces = Vec::with_capacity(a * (2 * self.radii - 1));
        for k in 0..a {
            faces.push([c, self.index(0, k), self.index(0, k + 1)]);
        }
        for j in 0..self.radii - 1 {
            for k in 0..a {
                let (p, q) = (self.index(j, k), self.index(j, k + 1));
                let (p2, q2) = (self.index(j + 1, k), self.index(j + 1, k + 1));
                faces.push([p, p2, q2]);
                faces.push([p, q2, q]);
            }
        }
        faces
    }
}

/// Values and derivatives of the extension of `gamma` on a polar grid.
pub fn sample_grid(
    gamma: &DiskBoundaryMap,
    grid: PolarGrid,
    opts: &PoissonOptions,
    exec: Exec,
) -> Result<Vec<DiskSample>, DiskError> {
    let ext = PoissonExtension::new(gamma, opts.clone())?;
    let pts = grid.points();
    exec.map_range(pts.len(), |i| {
        let (nu, theta) = pts[i];
        let phi = ext.phi(nu, theta)?;
        let d_nu = ext.normal_derivative(nu, theta)?;
        let d_theta = if nu == 0.0 { gamma.one_sided_derivatives(theta).1 } else { ext.tangential_derivative(nu, theta)? };
        Ok(DiskSample {
            nu,
            theta,
            phi: [phi.x, phi.y],
            d_nu: [d_nu.x, d_nu.y],
            d_theta: [d_theta.x, d_theta.y],
        })
    })
    .into_iter()
    .collect()
}

/// Mapped grid positions only.
pub fn map_grid(gamma: &DiskBoundaryMap, grid: PolarGrid, opts: &PoissonOptions, exec: Exec) -> Result<Vec<Point>, DiskError> {
    let ext = PoissonExtension::new(gamma, opts.clone())?;
    let pts = grid.points();
    exec.map_range(pts.len(), |i| ext.phi(pts[i].0, pts[i].1).map(Point::from))
        .into_iter()
        .collect()
}

/// Cone-condition margins at one boundary angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleVerdict {
    pub theta: f64,
    /// `min(<n_perp, gamma'_->, <n_perp, gamma'_+>)` with `n_perp` the
    /// clockwise perpendicular of the normal derivative.
    pub margin: f64,
    pub normal_norm: f64,
    pub singular: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeScan {
    pub pass: bool,
    pub min_margin: f64,
    /// Smallest sampled `|d phi / d nu|`; the theory assumes it never
    /// vanishes, which sampling cannot verify.
    pub min_normal_norm: f64,
    pub failing: Vec<f64>,
    pub angles: Vec<AngleVerdict>,
}

/// Scan the cone condition at `samples` equally spaced angles and at every
/// junction of `gamma`.
pub fn cone_condition_scan(gamma: &DiskBoundaryMap, samples: usize, opts: &PoissonOptions, exec: Exec) -> Result<ConeScan, DiskError> {
    let ext = PoissonExtension::new(gamma, opts.clone())?;
    let singular = gamma.singular_set();
    let mut thetas: Vec<(f64, bool)> = (0..samples).map(|k| (-PI + TAU * k as f64 / samples as f64, false)).collect();
    thetas.extend(singular.iter().map(|&t| (t, true)));
    let angles: Vec<AngleVerdict> = exec
        .map_range(thetas.len(), |i| {
            let (theta, singular) = thetas[i];
            let b = boundary_derivatives_with(&ext, gamma, theta)?;
            let n = Vec2::new(b.d_nu[0], b.d_nu[1]);
            let rot = geom::perp_cw(&n);
            let margin = rot
                .dot(&Vec2::new(b.gamma_minus[0], b.gamma_minus[1]))
                .min(rot.dot(&Vec2::new(b.gamma_plus[0], b.gamma_plus[1])));
            Ok(AngleVerdict {
                theta,
                margin,
                normal_norm: n.norm(),
                singular,
                pass: margin > 0.0,
            })
        })
        .into_iter()
        .collect::<Result<_, DiskError>>()?;
    let failing: Vec<f64> = angles.iter().filter(|a| !a.pass).map(|a| a.theta).collect();
    Ok(ConeScan {
        pass: failing.is_empty(),
        min_margin: angles.iter().map(|a| a.margin).fold(f64::INFINITY, f64::min),
        min_normal_norm: angles.iter().map(|a| a.normal_norm).fold(f64::INFINITY, f64::min),
        failing,
        angles,
    })
}

/// Outcome of the sampled injectivity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RkcReport {
    pub pass: bool,
    pub faces: usize,
    pub non_positive_faces: usize,
    pub boundary_simple: bool,
    pub boundary_ccw: bool,
}

/// Map the polar grid, then check with exact predicates that every grid
/// triangle keeps its counter-clockwise orientation and the image of the
/// outer ring is a simple counter-clockwise polygon. Together these make
/// the mapped grid an embedding; the map between grid points is not
/// examined.
pub fn rkc_check(gamma: &DiskBoundaryMap, grid: PolarGrid, opts: &PoissonOptions, exec: Exec) -> Result<RkcReport, DiskError> {
    let img = map_grid(gamma, grid, opts, exec)?;
    let faces = grid.faces();
    let bad = exec
        .map_range(faces.len(), |f| {
            let [a, b, c] = faces[f];
            exact::orient(&img[a], &img[b], &img[c]) != Ordering::Greater
        })
        .into_iter()
        .filter(|b| *b)
        .count();
    let ring: Vec<Point> = (0..grid.angles).map(|k| img[grid.index(grid.radii - 1, k)]).collect();
    let boundary_simple = exact::polygon_is_simple(&ring);
    let boundary_ccw = exact::polygon_orientation(&ring) == Ordering::Greater;
    Ok(RkcReport {
        pass: bad == 0 && boundary_simple && boundary_ccw,
        faces: faces.len(),
        non_positive_faces: bad,
        boundary_simple,
        boundary_ccw,
    })
}

/// Per-angle comparison of the Jacobian sign near the boundary with the
/// cone-condition verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnSample {
    pub theta: f64,
    pub margin: f64,
    /// Jacobian determinant from the normal derivative and `gamma'`.
    pub det_boundary: f64,
    /// Jacobian determinant from finite differences at `nu = probe`.
    pub det_interior: f64,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnReport {
    pub agree: bool,
    pub samples: Vec<AnSample>,
}

/// Compare `sign det D phi` on the boundary with the cone verdict at
/// `samples` angles. The Cartesian determinant is
/// `-cross(phi_nu, phi_theta) / (1 - nu)`; at `nu = 0` it is the cone margin
/// itself when `gamma` is smooth. The interior value uses centred
/// differences of `phi` at `nu = probe` as an independent estimate.
pub fn an_check(gamma: &DiskBoundaryMap, samples: usize, probe: f64, opts: &PoissonOptions, exec: Exec) -> Result<AnReport, DiskError> {
    let scan = cone_condition_scan(gamma, samples, opts, exec)?;
    let ext = PoissonExtension::new(gamma, opts.clone())?;
    let h = 0.25 * probe;
    let out: Vec<AnSample> = exec
        .map_range(samples, |k| {
            let v = scan.angles[k];
            let theta = v.theta;
            let (_, gp) = gamma.one_sided_derivatives(theta);
            let dn = ext.normal_derivative(0.0, theta)?;
            let det_boundary = -geom::cross(&dn, &gp);
            let pn = (ext.phi(probe + h, theta)? - ext.phi(probe - h, theta)?) / (2.0 * h);
            let pt = (ext.phi(probe, theta + h)? - ext.phi(probe, theta - h)?) / (2.0 * h);
            let det_interior = -geom::cross(&pn, &pt) / (1.0 - probe);
            let agree = (det_boundary > 0.0) == v.pass && (det_interior > 0.0) == v.pass;
            Ok(AnSample {
                theta,
                margin: v.margin,
                det_boundary,
                det_interior,
                agree,
            })
        })
        .into_iter()
        .collect::<Result<_, DiskError>>()?;
    Ok(AnReport {
        agree: out.iter().all(|s| s.agree),
        samples: out,
    })
}
