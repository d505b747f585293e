//! Bell expressions: CHSH for a bounded pair, Mermin for GHZ states and the
//! chained CHSH expression for parity measurements on large spins.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::HalfInt;
use crate::correlations::{ghz_branch_factors, mermin_correlation_numeric, pair_correlation_analytic, parity_correlation, Frame};
use crate::{Direction, Error, Result, VIOLATION_EPS};

/// Largest party count evaluated through the GHZ correlation sum.
pub const MERMIN_NUMERIC_MAX_PARTIES: usize = 20;

/// Largest party count for which `mermin_value` attaches the brute-force
/// sum over all `2^N` settings.
pub const MERMIN_CROSS_CHECK_MAX_PARTIES: usize = 4;

/// Value of a Bell expression against its local realistic bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellResult {
    pub value: f64,
    pub bound: f64,
    pub violated: bool,
    /// Angles that define the settings, in radians.
    pub settings: Vec<f64>,
    /// The same quantity evaluated by an independent route, when one is cheap.
    pub cross_check: Option<f64>,
}

impl BellResult {
    fn new(value: f64, bound: f64, settings: Vec<f64>, cross_check: Option<f64>) -> Self {
        BellResult { value, bound, violated: value > bound + VIOLATION_EPS, settings, cross_check }
    }
}

fn check_spin(j: HalfInt, what: &str) -> Result<()> {
    if j.is_physical_spin() {
        Ok(())
    } else {
        Err(Error::InvalidSpin(format!("{what} = {j} is negative")))
    }
}

/// CHSH value with the optimal relative angles: three pairs at `3π/4` and
/// the remaining pair at `π/4`.
pub fn chsh_pair(j1: HalfInt, j2: HalfInt) -> Result<BellResult> {
    check_spin(j1, "j1")?;
    check_spin(j2, "j2")?;
    let (a, b) = (j1.to_f64(), j2.to_f64());
    let value = 2.0 * ((1.0 + 4.0 * SQRT_2 * a * b) / ((2.0 * a + 1.0) * (2.0 * b + 1.0))).abs();
    let t = 3.0 * FRAC_PI_4;
    let assembled = (pair_correlation_analytic(j1, j2, t) * 3.0 - pair_correlation_analytic(j1, j2, FRAC_PI_4)).abs();
    Ok(BellResult::new(value, 2.0, vec![t, t, t, FRAC_PI_4], Some(assembled)))
}

/// Smallest `j1` for which the pair `(j1, j2)` violates CHSH, or `None` when
/// no frame size suffices.
///
/// The condition is `j1 > j2 / (2(√2 - 1) j2 - 1)`; an unbounded partner
/// leaves `j1 > 1 / (2(√2 - 1))`.
pub fn chsh_min_partner(j2: Frame) -> Result<Option<HalfInt>> {
    let threshold = match j2 {
        Frame::Unbounded => 1.0 / (2.0 * (SQRT_2 - 1.0)),
        Frame::Finite(j) => {
            check_spin(j, "j2")?;
            let b = j.to_f64();
            let denom = 2.0 * (SQRT_2 - 1.0) * b - 1.0;
            if denom <= 0.0 {
                return Ok(None);
            }
            b / denom
        }
    };
    // smallest multiple of 1/2 strictly above the threshold
    Ok(Some(HalfInt::from_twice((2.0 * threshold).floor() as i64 + 1)))
}

// Settings X = (π/2, 0), Y = (π/2, π/2) as (θ0, φ0, θ1, φ1).
fn xy_settings() -> Vec<f64> {
    vec![FRAC_PI_2, 0.0, FRAC_PI_2, FRAC_PI_2]
}

fn mermin_bound(n: usize) -> f64 {
    2f64.powf((n as f64 - 1.0) / 2.0)
}

/// Mermin expression summed literally over all `2^N` choices of X/Y settings,
/// one GHZ correlation per term.
pub fn mermin_sum_brute(frames: &[Frame]) -> Result<f64> {
    let n = frames.len();
    if n > MERMIN_NUMERIC_MAX_PARTIES {
        return Err(Error::DimensionTooLarge { what: "Mermin parties", value: n, limit: MERMIN_NUMERIC_MAX_PARTIES });
    }
    let mut total = 0.0;
    for mask in 0u32..(1u32 << n) {
        let ones = mask.count_ones();
        let weight = match ones % 4 {
            0 => 1.0,
            2 => -1.0,
            _ => continue,
        };
        let settings: Vec<Direction> =
            (0..n).map(|k| if mask >> k & 1 == 1 { Direction::Y } else { Direction::X }).collect();
        total += weight * mermin_correlation_numeric(&settings, frames)?;
    }
    Ok(total.abs())
}

/// Mermin expression at X/Y settings for a GHZ state, from the numerical
/// POVMs. The sum over settings factorizes party by party because
/// `cos(π s / 2) = Re i^s`, so the cost is linear in the number of parties.
pub fn mermin_sum(frames: &[Frame]) -> Result<f64> {
    let n = frames.len();
    if n == 0 {
        return Err(Error::InvalidArgument("at least one party required".into()));
    }
    if n > MERMIN_NUMERIC_MAX_PARTIES {
        return Err(Error::DimensionTooLarge { what: "Mermin parties", value: n, limit: MERMIN_NUMERIC_MAX_PARTIES });
    }
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let (mut pa, mut pd, mut pc, mut pcc) = (one, one, one, one);
    for &frame in frames {
        if let Frame::Finite(j) = frame {
            check_spin(j, "frame")?;
        }
        let (ax, dx, cx) = ghz_branch_factors(Direction::X, frame)?;
        let (ay, dy, cy) = ghz_branch_factors(Direction::Y, frame)?;
        pa *= ax + i * ay;
        pd *= dx + i * dy;
        pc *= cx + i * cy;
        pcc *= cx.conj() + i * cy.conj();
    }
    // E = (Πa + Πd)/2 + Re Πc and Re(i^s) Re(C) = [Re(i^s C) + Re(i^s C*)]/2
    Ok((0.5 * (pa.re + pd.re) + 0.5 * (pc.re + pcc.re)).abs())
}

/// Mermin value for GHZ parties with finite frames,
/// `|√2 cos(Nπ/4) + 2^(N-1) Π 2j_k| / Π (2j_k + 1)`, against `2^((N-1)/2)`.
///
/// Up to four parties the brute-force sum over settings is attached as the
/// cross-check.
pub fn mermin_value(frames: &[HalfInt]) -> Result<BellResult> {
    let n = frames.len();
    if n == 0 {
        return Err(Error::InvalidArgument("at least one party required".into()));
    }
    frames.iter().try_for_each(|&j| check_spin(j, "frame"))?;
    let mut ln_prod_2j = 0.0;
    let mut ln_prod_d = 0.0;
    let mut any_zero = false;
    for j in frames {
        let tj = j.twice() as f64;
        if tj == 0.0 {
            any_zero = true;
        } else {
            ln_prod_2j += tj.ln();
        }
        ln_prod_d += (tj + 1.0).ln();
    }
    let constant = SQRT_2 * (n as f64 * FRAC_PI_4).cos();
    let leading = if any_zero { 0.0 } else { ((n as f64 - 1.0) * std::f64::consts::LN_2 + ln_prod_2j).exp() };
    let value = (constant + leading).abs() / ln_prod_d.exp();
    let cross_check = if n <= MERMIN_CROSS_CHECK_MAX_PARTIES {
        let fs: Vec<Frame> = frames.iter().map(|&j| Frame::Finite(j)).collect();
        Some(mermin_sum_brute(&fs)?)
    } else {
        None
    };
    Ok(BellResult::new(value, mermin_bound(n), xy_settings(), cross_check))
}

/// Mermin value from the numerical GHZ sum; frames may be unbounded.
pub fn mermin_numeric(frames: &[Frame]) -> Result<BellResult> {
    let value = mermin_sum(frames)?;
    Ok(BellResult::new(value, mermin_bound(frames.len()), xy_settings(), None))
}

/// Per-party gain over the local bound for many parties, `√2 j / (j + 1/2)`.
pub fn mermin_asymptotic_factor(j: Frame) -> f64 {
    match j {
        Frame::Unbounded => SQRT_2,
        Frame::Finite(j) => {
            let x = j.to_f64().max(0.0);
            SQRT_2 * x / (x + 0.5)
        }
    }
}

/// `n1` parties with frames of size `j1` and `n2` with frames `j2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedFrameSpec {
    pub n1: u64,
    pub j1: HalfInt,
    pub n2: u64,
    pub j2: Frame,
}

impl MixedFrameSpec {
    pub fn new(n1: u64, j1: HalfInt, n2: u64, j2: Frame) -> Result<Self> {
        if n1 + n2 == 0 {
            return Err(Error::InvalidArgument("no parties".into()));
        }
        check_spin(j1, "j1")?;
        if let Frame::Finite(j) = j2 {
            check_spin(j, "j2")?;
        }
        Ok(MixedFrameSpec { n1, j1, n2, j2 })
    }

    pub fn parties(&self) -> u64 {
        self.n1 + self.n2
    }
}

// n ln f with 0 ln 0 = 0.
fn n_ln(n: u64, f: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * f.ln()
    }
}

/// Large-N Mermin condition `f(j1)^n1 f(j2)^n2 > √2`, evaluated as a sum of
/// logarithms so that millions of parties do not overflow.
pub fn mermin_mixed_violates(spec: &MixedFrameSpec) -> bool {
    let lhs = n_ln(spec.n1, mermin_asymptotic_factor(Frame::Finite(spec.j1)))
        + n_ln(spec.n2, mermin_asymptotic_factor(spec.j2));
    lhs > SQRT_2.ln() + VIOLATION_EPS
}

/// Smallest asymptotic fraction `N1/N` of frames `j1` that still violates
/// when the rest have size `j2`: the root of `r ln f1 + (1 - r) ln f2 = 0`.
pub fn mermin_min_ratio(j1: HalfInt, j2: HalfInt) -> Result<f64> {
    let f1 = mermin_asymptotic_factor(Frame::Finite(j1));
    let f2 = mermin_asymptotic_factor(Frame::Finite(j2));
    if !(f1 > 1.0 && f2 < 1.0 && f2 > 0.0) {
        return Err(Error::NoThresholdExists(format!(
            "needs f({j1}) > 1 > f({j2}) > 0, got {f1} and {f2}"
        )));
    }
    Ok(-f2.ln() / (f1.ln() - f2.ln()))
}

/// Chained CHSH `|3 E(Δθ) - E(3Δθ)|` for parity measurements on the spin-`j_s`
/// singlet, settings equally spaced by `delta_theta`.
pub fn chained_chsh_parity(j_s: HalfInt, frame: Frame, delta_theta: f64) -> Result<BellResult> {
    if !(0.0..=PI / 3.0 + 1e-15).contains(&delta_theta) {
        return Err(Error::InvalidAngle { value: delta_theta, min: 0.0, max: PI / 3.0 });
    }
    let dt = delta_theta.min(PI / 3.0);
    let value = (3.0 * parity_correlation(j_s, frame, dt)? - parity_correlation(j_s, frame, 3.0 * dt)?).abs();
    Ok(BellResult::new(value, 2.0, vec![0.0, dt, 2.0 * dt, 3.0 * dt], None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn chsh_examples() {
        let r = chsh_pair(h(5), h(5)).unwrap();
        assert!((r.value - (2.0 + 50.0 * SQRT_2) / 36.0).abs() < 1e-14);
        assert!((r.value - 2.0197411).abs() < 1e-6 && r.violated);
        assert!((r.cross_check.unwrap() - r.value).abs() < 1e-12);
        let r = chsh_pair(h(4), h(4)).unwrap();
        assert!((r.value - 1.890193).abs() < 1e-6 && !r.violated);
        let big = chsh_pair(h(2_000_000), h(2_000_000)).unwrap();
        assert!((big.value - 2.0 * SQRT_2).abs() < 1e-4);
    }

    #[test]
    fn min_partner() {
        assert_eq!(chsh_min_partner(Frame::Finite(h(5))).unwrap(), Some(h(5)));
        assert_eq!(chsh_min_partner(Frame::Unbounded).unwrap(), Some(h(3)));
        assert_eq!(chsh_min_partner(Frame::Finite(h(2))).unwrap(), None);
        for tj2 in 0..=40 {
            let partner = chsh_min_partner(Frame::Finite(h(tj2))).unwrap();
            let first = (0..=400).find(|&t| chsh_pair(h(t), h(tj2)).unwrap().violated).map(h);
            assert_eq!(partner, first, "j2 = {}", h(tj2));
        }
    }

    #[test]
    fn mermin_examples() {
        let m = mermin_value(&[h(3); 3]).unwrap();
        assert!((m.value - 107.0 / 64.0).abs() < 1e-12 && !m.violated);
        let m = mermin_value(&[h(4); 3]).unwrap();
        assert!((m.value - 255.0 / 125.0).abs() < 1e-12 && m.violated);
        let m = mermin_value(&[h(3); 6]).unwrap();
        assert!((m.value - 23328.0 / 4096.0).abs() < 1e-12 && m.violated);
        assert!(m.cross_check.is_none());
        let m = mermin_value(&[h(0); 3]).unwrap();
        assert!(!m.violated);
    }

    #[test]
    fn factorized_sum_matches_brute_force() {
        let cases: Vec<Vec<Frame>> = vec![
            vec![Frame::Finite(h(3)); 3],
            vec![Frame::Finite(h(1)), Frame::Unbounded, Frame::Finite(h(4)), Frame::Finite(h(2))],
            vec![Frame::Unbounded; 5],
            vec![Frame::Finite(h(0)), Frame::Finite(h(7))],
        ];
        for frames in cases {
            let a = mermin_sum(&frames).unwrap();
            let b = mermin_sum_brute(&frames).unwrap();
            assert!((a - b).abs() < 1e-12, "{frames:?}: {a} vs {b}");
        }
        let classical = mermin_numeric(&[Frame::Unbounded; 3]).unwrap();
        assert!((classical.value - 4.0).abs() < 1e-12 && classical.bound == 2.0);
    }

    #[test]
    fn asymptotic_factors() {
        assert!((mermin_asymptotic_factor(Frame::Finite(h(3))) - 3.0 * SQRT_2 / 4.0).abs() < 1e-15);
        assert!((mermin_asymptotic_factor(Frame::Finite(h(2))) - 2.0 * SQRT_2 / 3.0).abs() < 1e-15);
        assert!((mermin_asymptotic_factor(Frame::Finite(h(1))) - SQRT_2 / 2.0).abs() < 1e-15);
        assert_eq!(mermin_asymptotic_factor(Frame::Finite(h(0))), 0.0);
        assert_eq!(mermin_asymptotic_factor(Frame::Unbounded), SQRT_2);
    }

    #[test]
    fn mixed_examples() {
        let spec = |n1, j1, n2, j2| MixedFrameSpec::new(n1, j1, n2, j2).unwrap();
        assert!(mermin_mixed_violates(&spec(10, h(1), 12, Frame::Unbounded)));
        assert!(!mermin_mixed_violates(&spec(10, h(1), 11, Frame::Unbounded)));
        assert!(mermin_mixed_violates(&spec(6, h(3), 1, Frame::Finite(h(3)))));
        assert!(!mermin_mixed_violates(&spec(1_000_000, h(2), 1_000_000, Frame::Finite(h(2)))));
        assert!(mermin_mixed_violates(&spec(1_000_000, h(1), 1_000_002, Frame::Unbounded)));
        assert!(!mermin_mixed_violates(&spec(0, h(0), 1, Frame::Unbounded)));
        assert!(MixedFrameSpec::new(0, h(1), 0, Frame::Unbounded).is_err());
    }

    #[test]
    fn min_ratio() {
        let r = mermin_min_ratio(h(3), h(1)).unwrap();
        assert!((r - 0.8548).abs() < 5e-4, "{r}");
        let r = mermin_min_ratio(h(2_000_000), h(1)).unwrap();
        assert!((r - 0.5).abs() < 1e-6);
        let f1 = 4.0 * SQRT_2 / 5.0;
        let f2 = 2.0 * SQRT_2 / 3.0;
        let r = mermin_min_ratio(h(4), h(2)).unwrap();
        assert!((r - (-f2.ln() / (f1.ln() - f2.ln()))).abs() < 1e-15);
        assert!(matches!(mermin_min_ratio(h(2), h(1)), Err(Error::NoThresholdExists(_))));
        assert!(matches!(mermin_min_ratio(h(3), h(0)), Err(Error::NoThresholdExists(_))));
    }

    #[test]
    fn chained_spin_half() {
        for &dt in &[0.1, FRAC_PI_4, 0.9, PI / 3.0] {
            let r = chained_chsh_parity(HalfInt::HALF, Frame::Unbounded, dt).unwrap();
            assert!((r.value - (3.0 * dt.cos() - (3.0 * dt).cos()).abs()).abs() < 1e-12);
        }
        let best = chained_chsh_parity(HalfInt::HALF, Frame::Unbounded, FRAC_PI_4).unwrap();
        assert!((best.value - 2.0 * SQRT_2).abs() < 1e-12 && best.violated);
        let zero = chained_chsh_parity(h(2), Frame::Finite(h(4)), 0.0).unwrap();
        assert!(zero.value <= 2.0 + 1e-12);
        assert!(chained_chsh_parity(h(1), Frame::Unbounded, 1.1).is_err());
    }
}
