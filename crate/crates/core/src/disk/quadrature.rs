//! Quadrature for Poisson integrals on the unit circle.
//!
//! Smooth periodic data use the periodic trapezoid rule, whose error decays
//! like `r^M`. Piecewise data use composite Gauss-Legendre panels split at
//! the data breakpoints and graded geometrically towards the kernel peak.

use std::f64::consts::{PI, TAU};

use crate::geom::Vec2;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Nodes by Newton iteration on the Legendre polynomial from Chebyshev
    /// initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussRule { nodes, weights }
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Poisson kernel and its derivatives at radius `r = 1 - nu` and angle
/// difference `d`: `(P, dP/dtheta, dP/dr)`.
#[inline]
pub fn kernel(nu: f64, d: f64) -> (f64, f64, f64) {
    let r = 1.0 - nu;
    let one_minus_r2 = nu * (2.0 - nu);
    let sh = (0.5 * d).sin();
    // 1 + r^2 - 2 r cos d, written to keep accuracy near the peak
    let den = nu * nu + 4.0 * r * sh * sh;
    let (s, c) = d.sin_cos();
    let p = one_minus_r2 / den;
    let pt = -2.0 * r * one_minus_r2 * s / (den * den);
    let pr = (2.0 * c * (1.0 + r * r) - 4.0 * r) / (den * den);
    (p, pt, pr)
}

/// Integrals `(1 / 2pi) int K(theta - t) g(t) dt` for the kernel and both
/// derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KernelIntegrals {
    pub value: Vec2,
    pub d_theta: Vec2,
    pub d_r: Vec2,
}

impl KernelIntegrals {
    fn add(&mut self, w: f64, k: (f64, f64, f64), g: Vec2) {
        self.value += (w * k.0) * g;
        self.d_theta += (w * k.1) * g;
        self.d_r += (w * k.2) * g;
    }

    fn scale(mut self, s: f64) -> Self {
        self.value *= s;
        self.d_theta *= s;
        self.d_r *= s;
        self
    }
}

/// Periodic trapezoid rule with `m` nodes starting at `t0`.
pub fn trapezoid(g: impl Fn(f64) -> Vec2, t0: f64, m: usize, nu: f64, theta: f64) -> KernelIntegrals {
    let h = TAU / m as f64;
    let mut acc = KernelIntegrals::default();
    for k in 0..m {
        let t = t0 + h * k as f64;
        acc.add(1.0, kernel(nu, theta - t), g(t));
    }
    acc.scale(1.0 / m as f64)
}

/// Panel endpoints on `[a, b]`: the interval ends, the kernel peak (and its
/// periodic images), geometric grading `peak +- nu 2^k`, and a cap on the
/// panel width.
pub fn panel_breaks(a: f64, b: f64, nu: f64, theta: f64, max_panel: f64) -> Vec<f64> {
    let mut pts = vec![a, b];
    for shift in [-TAU, 0.0, TAU] {
        let peak = theta + shift;
        let dist = (a - peak).max(peak - b).max(0.0);
        if dist < PI {
            if peak > a && peak < b {
                pts.push(peak);
            }
            let mut d = nu.max(1e-300);
            while d < TAU {
                for q in [peak - d, peak + d] {
                    if q > a && q < b {
                        pts.push(q);
                    }
                }
                d *= 2.0;
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let k = (len / max_panel).ceil().max(1.0) as usize;
        for j in 1..=k {
            out.push(if j == k { w[1] } else { w[0] + len * j as f64 / k as f64 });
        }
    }
    out
}

/// Composite Gauss-Legendre over one smooth piece `[a, b]`.
pub fn gauss_piece(
    g: impl Fn(f64) -> Vec2,
    a: f64,
    b: f64,
    nu: f64,
    theta: f64,
    rule: &GaussRule,
    max_panel: f64,
) -> KernelIntegrals {
    let breaks = panel_breaks(a, b, nu, theta, max_panel);
    let mut acc = KernelIntegrals::default();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            let t = mid + half * x;
            acc.add(wt * half, kernel(nu, theta - t), g(t));
        }
    }
    acc.scale(1.0 / TAU)
}
