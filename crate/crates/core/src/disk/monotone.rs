//! Local angular monotonicity of harmonic extensions of scalar data.

use serde::{Deserialize, Serialize};

use super::{BoundaryData, DiskError, PoissonExtension, PoissonOptions};
use crate::Exec;

/// Sampling of the hypothesis interval `[-delta, delta]`.
const HYPOTHESIS_SAMPLES: usize = 2001;
/// Sampling of the conclusion interval `[-delta/8, delta/8]`.
const CONCLUSION_SAMPLES: usize = 257;
/// Rounding allowance on consecutive differences.
const SLACK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusResult {
    pub r: f64,
    /// Smallest `F(t') - F(t) - (c/2)(t' - t)` over consecutive samples.
    pub min_slack: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub c: f64,
    pub delta: f64,
    pub radii: Vec<RadiusResult>,
    /// Smallest tested radius from which the conclusion holds at every
    /// larger tested radius.
    pub threshold: Option<f64>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Given scalar data with `f(t) - f(s) >= c (t - s)` for `-delta <= s < t <=
/// delta`, check `F(r, t) - F(r, s) >= (c/2)(t - s)` on `[-delta/8, delta/8]`
/// for every `r` in `r_grid`. Both are checked on consecutive sample pairs,
/// which implies every sampled pair by telescoping.
pub fn monotonicity_check<B: BoundaryData + ?Sized>(
    f: &B,
    c: f64,
    delta: f64,
    r_grid: &[f64],
    opts: &PoissonOptions,
    exec: Exec,
) -> Result<MonotoneReport, DiskError> {
    if !(c > 0.0 && delta > 0.0 && delta < std::f64::consts::PI) {
        return Err(DiskError::InvalidParameter("need c > 0 and 0 < delta < pi".into()));
    }
    let ts = linspace(-delta, delta, HYPOTHESIS_SAMPLES);
    let vals: Vec<f64> = ts.iter().map(|&t| f.eval(t).x).collect();
    for k in 0..ts.len() - 1 {
        let slack = vals[k + 1] - vals[k] - c * (ts[k + 1] - ts[k]);
        if slack < -SLACK_TOL * vals[k].abs().max(1.0) {
            return Err(DiskError::HypothesisViolated {
                s: ts[k],
                t: ts[k + 1],
                slack,
            });
        }
    }
    let ext = PoissonExtension::new(f, opts.clone())?;
    let ts = linspace(-delta / 8.0, delta / 8.0, CONCLUSION_SAMPLES);
    let mut radii = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        if !(0.0..1.0).contains(&r) {
            return Err(DiskError::InvalidParameter(format!("radius {r} outside [0, 1)")));
        }
        let vals: Vec<f64> = exec
            .map_range(ts.len(), |k| ext.phi(1.0 - r, ts[k]).map(|p| p.x))
            .into_iter()
            .collect::<Result<_, _>>()?;
        let min_slack = (0..ts.len() - 1)
            .map(|k| vals[k + 1] - vals[k] - 0.5 * c * (ts[k + 1] - ts[k]))
            .fold(f64::INFINITY, f64::min);
        radii.push(RadiusResult {
            r,
            min_slack,
            holds: min_slack >= -SLACK_TOL,
        });
    }
    let mut sorted = radii.clone();
    sorted.sort_by(|a, b| a.r.total_cmp(&b.r));
    let mut threshold = None;
    for res in sorted.iter().rev() {
        if !res.holds {
            break;
        }
        threshold = Some(res.r);
    }
    Ok(MonotoneReport { c, delta, radii, threshold })
}

/// Largest `|dF/dtheta|` over `angles` equally spaced angles at each radius.
pub fn lipschitz_check<B: BoundaryData + ?Sized>(
    f: &B,
    r_grid: &[f64],
    angles: usize,
    opts: &PoissonOptions,
    exec: Exec,
) -> Result<f64, DiskError> {
    let ext = PoissonExtension::new(f, opts.clone())?;
    let mut worst: f64 = 0.0;
    for &r in r_grid {
        let d = exec
            .map_range(angles, |k| {
                let t = -std::f64::consts::PI + std::f64::consts::TAU * k as f64 / angles as f64;
                ext.tangential_derivative(1.0 - r, t).map(|v| v.x.abs())
            })
            .into_iter()
            .collect::<Result<Vec<f64>, _>>()?;
        worst = d.into_iter().fold(worst, f64::max);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::ScalarData;
    use std::f64::consts::PI;

    #[test]
    fn sawtooth_matches_closed_form_and_is_monotone() {
        let f = ScalarData::with_jumps(|t| t, &[-PI]);
        let ext = PoissonExtension::new(&f, PoissonOptions::default()).unwrap();
        for &(r, t) in &[(0.5, 0.3), (0.99, -1.0), (0.9, 3.0)] {
            let exact = 2.0 * f64::atan2(r * f64::sin(t), 1.0 + r * f64::cos(t));
            assert!((ext.phi(1.0 - r, t).unwrap().x - exact).abs() < 1e-11);
        }
        let rep = monotonicity_check(&f, 1.0, 1.0, &[0.5, 0.7, 0.9, 0.99], &PoissonOptions::default(), Exec::default()).unwrap();
        assert!(rep.radii.iter().all(|r| r.holds));
        assert_eq!(rep.threshold, Some(0.5));
    }

    #[test]
    fn localized_family_has_threshold_below_one() {
        let f = ScalarData::smooth(|t| (3.0 * t).sin());
        let c = 3.0 * f64::cos(1.2);
        let grid: Vec<f64> = (1..20).map(|k| k as f64 / 20.0).collect();
        let rep = monotonicity_check(&f, c, 0.4, &grid, &PoissonOptions::default(), Exec::default()).unwrap();
        // F = r^3 sin 3t, slope 3 r^3 cos 3t >= c / 2 needs r^3 >= 0.18
        let th = rep.threshold.unwrap();
        assert!((0.55..=0.65).contains(&th), "{th}");
        assert!(!rep.radii[0].holds);
    }

    #[test]
    fn hypothesis_is_checked() {
        let f = ScalarData::smooth(|t| (3.0 * t).sin());
        let err = monotonicity_check(&f, 3.0, 0.4, &[0.9], &PoissonOptions::default(), Exec::default()).unwrap_err();
        assert!(matches!(err, DiskError::HypothesisViolated { .. }));
    }

    #[test]
    fn lipschitz_bound() {
        let f = ScalarData::smooth(|t| (3.0 * t).sin());
        let l = lipschitz_check(&f, &[0.5, 0.9, 0.999], 128, &PoissonOptions::default(), Exec::default()).unwrap();
        assert!(l <= 3.0 + 1e-6, "{l}");
        assert!(l > 2.9);
    }
}
