//! Angle optimization, the minimal-frame scan and fits of its boundary.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::HalfInt;
use crate::bell::chained_chsh_parity;
use crate::correlations::Frame;
use crate::{Error, Result, VIOLATION_EPS};

/// Seed constant for the optimal angle at large spin, `Δθ ≈ x / (2 j_s + 1)`.
pub const CLASSICAL_ANGLE_SEED: f64 = 1.054;

/// Points in the coarse angle grid.
pub const ANGLE_GRID_POINTS: usize = 64;

/// Width at which golden-section refinement stops.
pub const ANGLE_TOLERANCE: f64 = 1e-6;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

fn angle_upper_limit(j_s: HalfInt) -> f64 {
    (PI / 3.0).min(8.0 * CLASSICAL_ANGLE_SEED / (j_s.twice() as f64 + 1.0))
}

/// Golden-section maximum of `f` on `[lo, hi]`.
fn golden_max<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Maximizes the chained CHSH value over the angle step. A 64-point grid
/// on `(0, min(π/3, 8x/(2j_s+1))]` locates the peak and golden-section search
/// refines it between the neighbouring grid points. Returns `(Δθ, S)`.
pub fn maximize_chained_chsh(j_s: HalfInt, frame: Frame) -> Result<(f64, f64)> {
    if j_s.twice() < 1 {
        return Err(Error::InvalidSpin(format!("j_s = {j_s} must be at least 1/2")));
    }
    let s = |dt: f64| chained_chsh_parity(j_s, frame, dt).map(|r| r.value);
    let hi = angle_upper_limit(j_s);
    let step = hi / ANGLE_GRID_POINTS as f64;
    let grid: Vec<(f64, f64)> = (1..=ANGLE_GRID_POINTS)
        .into_par_iter()
        .map(|i| {
            let x = step * i as f64;
            s(x).map(|v| (x, v))
        })
        .collect::<Result<_>>()?;
    let (best_i, &(best_x, best_s)) =
        grid.iter().enumerate().max_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).expect("non-empty grid");
    let lo = if best_i == 0 { step * 1e-3 } else { grid[best_i - 1].0 };
    let up = grid.get(best_i + 1).map_or(hi, |p| p.0);
    let (x, v) = golden_max(s, lo, up, ANGLE_TOLERANCE)?;
    Ok(if v >= best_s { (x, v) } else { (best_x, best_s) })
}

/// `Δθ_opt (2 j_s + 1)` with classical frames; tends to a constant near
/// 1.054 for large spins.
pub fn classical_angle_constant(j_s: HalfInt) -> Result<f64> {
    let (dt, _) = maximize_chained_chsh(j_s, Frame::Unbounded)?;
    Ok(dt * (j_s.twice() as f64 + 1.0))
}

/// Smallest frame that violates the chained inequality for a given spin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub two_j_s: i64,
    pub two_j_rf_min: i64,
    pub delta_theta_opt: f64,
    pub s_max: f64,
}

impl ScanRecord {
    pub fn j_s(&self) -> HalfInt {
        HalfInt::from_twice(self.two_j_s)
    }

    pub fn j_rf_min(&self) -> HalfInt {
        HalfInt::from_twice(self.two_j_rf_min)
    }
}

/// Default cap on the frame size, `20 j_s^2 + 50`, rounded up to a
/// half-integer.
pub fn default_cap(j_s: HalfInt) -> HalfInt {
    let j = j_s.to_f64();
    HalfInt::from_twice((2.0 * (20.0 * j * j + 50.0)).ceil() as i64)
}

/// Finds the smallest half-integer `j_rf <= cap` whose optimized chained
/// CHSH value exceeds `2 + ε`. Frame sizes `2j_s, 4j_s, 8j_s, ...` bracket the
/// boundary and bisection over half-integers narrows it; violation is taken
/// to be monotone inside the bracket. Both sides of the boundary are then
/// evaluated again and a disagreement is reported as
/// [`Error::NonMonotoneBoundary`].
pub fn minimal_rf_scan(j_s: HalfInt, cap: HalfInt) -> Result<ScanRecord> {
    if j_s.twice() < 1 {
        return Err(Error::InvalidSpin(format!("j_s = {j_s} must be at least 1/2")));
    }
    if cap < j_s {
        return Err(Error::InvalidArgument(format!("cap {cap} is below j_s = {j_s}")));
    }
    let eval = |two_j_rf: i64| -> Result<(f64, f64)> {
        if two_j_rf == 0 {
            // a trivial frame gives a single outcome, hence S = 2
            return Ok((0.0, 2.0));
        }
        maximize_chained_chsh(j_s, Frame::Finite(HalfInt::from_twice(two_j_rf)))
    };
    let violates = |s: f64| s > 2.0 + VIOLATION_EPS;

    let mut lo = 0i64;
    let mut hi = None;
    let mut best_s = f64::NEG_INFINITY;
    let mut probe = 2 * j_s.twice();
    loop {
        let t = probe.min(cap.twice());
        let (_, s) = eval(t)?;
        best_s = best_s.max(s);
        if violates(s) {
            hi = Some(t);
            break;
        }
        lo = t;
        if t == cap.twice() {
            break;
        }
        probe *= 2;
    }
    let Some(mut hi) = hi else {
        return Err(Error::NotFoundBelowCap { cap, best_s });
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if violates(eval(mid)?.1) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (dt, s) = eval(hi)?;
    let (_, s_below) = eval(hi - 1)?;
    if !violates(s) || violates(s_below) {
        return Err(Error::NonMonotoneBoundary { two_j_rf: hi });
    }
    Ok(ScanRecord { two_j_s: j_s.twice(), two_j_rf_min: hi, delta_theta_opt: dt, s_max: s })
}

/// Runs [`minimal_rf_scan`] for each spin in parallel with the default cap.
pub fn scan_rows(spins: &[HalfInt]) -> Vec<Result<ScanRecord>> {
    spins.par_iter().map(|&j| minimal_rf_scan(j, default_cap(j))).collect()
}

/// `j_rf_min ≈ a j_s^2 + b j_s` fitted by least squares, plus a diagnostic
/// cubic refit `c3 j^3 + c2 j^2 + c1 j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub rms_residual: f64,
    /// Cubic coefficient of the refit; `None` with fewer than three spins.
    pub cubic: Option<f64>,
}

impl FitResult {
    pub fn predict(&self, j_s: f64) -> f64 {
        self.a * j_s * j_s + self.b * j_s
    }
}

/// Zero-intercept quadratic fit of the scan boundary.
pub fn quadratic_fit(records: &[ScanRecord]) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> =
        records.iter().map(|r| (r.two_j_s as f64 / 2.0, r.two_j_rf_min as f64 / 2.0)).collect();
    fit_points(&pts)
}

/// Same fit on raw `(j_s, j_rf)` pairs.
pub fn fit_points(pts: &[(f64, f64)]) -> Result<FitResult> {
    let mut distinct: Vec<f64> = pts.iter().map(|p| p.0).filter(|&x| x != 0.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::DegenerateDesign(format!("{} distinct nonzero j_s, need 2", distinct.len())));
    }
    let (mut s2, mut s3, mut s4, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y) in pts {
        s2 += x * x;
        s3 += x * x * x;
        s4 += x * x * x * x;
        y1 += y * x;
        y2 += y * x * x;
    }
    let det = s4 * s2 - s3 * s3;
    let a = (y2 * s2 - y1 * s3) / det;
    let b = (s4 * y1 - s3 * y2) / det;
    let sq: f64 = pts.iter().map(|&(x, y)| (y - a * x * x - b * x).powi(2)).sum();
    let rms_residual = (sq / pts.len() as f64).sqrt();
    let cubic = if distinct.len() >= 3 {
        let design = DMatrix::from_fn(pts.len(), 3, |r, c| pts[r].0.powi(3 - c as i32));
        let rhs = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
        let coef = design
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|e| Error::DegenerateDesign(e.to_string()))?;
        Some(coef[0])
    } else {
        None
    };
    Ok(FitResult { a, b, rms_residual, cubic })
}

/// Spread of a coherent frame state projected on an axis at angle `theta`:
/// `σ = sqrt(j_rf sin²θ / 2)`, with angular uncertainty `1/σ`.
pub fn heuristic_bound(j_rf: HalfInt, theta: f64) -> Result<(f64, f64)> {
    if j_rf.twice() <= 0 {
        return Err(Error::InvalidSpin(format!("j_rf = {j_rf} must be positive")));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::InvalidAngle { value: theta, min: 0.0, max: PI });
    }
    let sigma = (0.5 * j_rf.to_f64() * theta.sin().powi(2)).sqrt();
    Ok((sigma, 1.0 / sigma))
}

/// The rough requirement `j_rf > j_s^2` for resolving spin-`j_s` structure.
pub fn heuristic_ok(j_rf: HalfInt, j_s: HalfInt) -> bool {
    let (r, s) = (j_rf.twice() as i128, j_s.twice() as i128);
    // j_rf > j_s^2  <=>  2 * (2 j_rf) > (2 j_s)^2
    2 * r > s * s
}
