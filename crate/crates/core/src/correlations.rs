//! Correlation functions.
//!
//! Production paths use the relative-angle reduction: frames sit along `z`
//! (or along `z` and one rotated axis) and the rotation is moved onto the
//! state. The `*_full_frames` variants build both frames explicitly and are
//! kept as slow cross-checks.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{rotation_matrix, HalfInt, ParseHalfIntError};
use crate::measurements::{parity_observable, povm_for, HermitianOperator, Povm};
use crate::states::{generalized_singlet, rotated_singlet, StateVector};
use crate::{Direction, Error, Result};

/// Size of a party's reference frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frame {
    Finite(HalfInt),
    /// Classical frame: ideal projective measurements.
    Unbounded,
}

impl Frame {
    pub fn finite(self) -> Option<HalfInt> {
        match self {
            Frame::Finite(j) => Some(j),
            Frame::Unbounded => None,
        }
    }
}

impl From<HalfInt> for Frame {
    fn from(j: HalfInt) -> Self {
        Frame::Finite(j)
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::Finite(j) => write!(f, "{j}"),
            Frame::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for Frame {
    type Err = ParseHalfIntError;

    /// A half-integer, or `inf` for a classical frame.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "Inf" | "infinity" | "unbounded" => Ok(Frame::Unbounded),
            other => other.parse().map(Frame::Finite),
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidAngle { value: theta, min: 0.0, max: std::f64::consts::PI });
    }
    Ok(())
}

fn check_frame(frame: Frame) -> Result<()> {
    match frame {
        Frame::Finite(j) if !j.is_physical_spin() => Err(Error::InvalidSpin(format!("frame {j} is negative"))),
        _ => Ok(()),
    }
}

// <psi| A (x) B |psi> for a two-party state with amplitude matrix `psi`.
fn two_party_expectation(psi: &DMatrix<Complex64>, a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let inner = a * psi * b.transpose();
    psi.iter().zip(inner.iter()).map(|(p, q)| (p.conj() * q).re).sum()
}

fn outcome_sign(m: HalfInt) -> f64 {
    if m.twice() > 0 {
        1.0
    } else {
        -1.0
    }
}

fn pair_expectation(state: &StateVector, a: &Povm, b: &Povm) -> f64 {
    let psi = state.as_matrix().expect("two-party state");
    let mut e = 0.0;
    for pa in a.outcomes() {
        for pb in b.outcomes() {
            let p = two_party_expectation(&psi, pa.op.matrix(), pb.op.matrix());
            e += outcome_sign(pa.m) * outcome_sign(pb.m) * p;
        }
    }
    e
}

/// Singlet correlation of two spin-1/2 particles measured relative to frames
/// `j1`, `j2` at relative angle `theta`, by summing over the four outcome
/// probabilities.
pub fn pair_correlation_numeric(j1: Frame, j2: Frame, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    check_frame(j1)?;
    check_frame(j2)?;
    let state = rotated_singlet(theta)?;
    let a = povm_for(j1, HalfInt::HALF, Direction::Z)?;
    let b = povm_for(j2, HalfInt::HALF, Direction::Z)?;
    Ok(pair_expectation(&state, &a, &b))
}

/// Same correlation with the unrotated singlet and both frames pointing along
/// their own directions.
pub fn pair_correlation_full_frames(j1: Frame, j2: Frame, dir_a: Direction, dir_b: Direction) -> Result<f64> {
    check_frame(j1)?;
    check_frame(j2)?;
    let state = rotated_singlet(0.0)?;
    let a = povm_for(j1, HalfInt::HALF, dir_a)?;
    let b = povm_for(j2, HalfInt::HALF, dir_b)?;
    Ok(pair_expectation(&state, &a, &b))
}

/// `(1 - 4 j1 j2 cos theta) / ((2 j1 + 1)(2 j2 + 1))`.
pub fn pair_correlation_analytic(j1: HalfInt, j2: HalfInt, theta: f64) -> f64 {
    let (a, b) = (j1.to_f64(), j2.to_f64());
    (1.0 - 4.0 * a * b * theta.cos()) / ((2.0 * a + 1.0) * (2.0 * b + 1.0))
}

// Per-party data of the GHZ two-branch decomposition:
// (sum_mu mu <a+|P_mu|a+>, sum_mu mu <a-|P_mu|a->, sum_mu mu <a+|P_mu|a->)
pub(crate) fn ghz_branch_factors(dir: Direction, frame: Frame) -> Result<(f64, f64, Complex64)> {
    let povm = povm_for(frame, HalfInt::HALF, Direction::Z)?;
    let u = rotation_matrix(HalfInt::HALF, dir.theta(), dir.phi())?;
    // |a+-> = U^dagger |z+->, i.e. conjugated rows of U
    let plus = u.row(0).adjoint();
    let minus = u.row(1).adjoint();
    let mut out = (0.0, 0.0, Complex64::new(0.0, 0.0));
    for e in povm.outcomes() {
        let s = outcome_sign(e.m);
        let p = e.op.matrix();
        out.0 += s * (plus.adjoint() * p * &plus)[(0, 0)].re;
        out.1 += s * (minus.adjoint() * p * &minus)[(0, 0)].re;
        out.2 += (plus.adjoint() * p * &minus)[(0, 0)] * s;
    }
    Ok(out)
}

fn check_lengths(settings: &[Direction], frames: &[Frame]) -> Result<()> {
    if settings.len() != frames.len() {
        return Err(Error::MismatchedLengths { left: settings.len(), right: frames.len() });
    }
    if settings.is_empty() {
        return Err(Error::InvalidArgument("at least one party required".into()));
    }
    frames.iter().try_for_each(|&f| check_frame(f))
}

/// N-party GHZ correlation `sum_mu prod_k mu_k p(mu)`, with
/// `p(mu) = 1/2 [prod a_k + prod d_k + 2 Re prod c_k]`. The outcome sum
/// factorizes party by party, so the cost is linear in N.
pub fn mermin_correlation_numeric(settings: &[Direction], frames: &[Frame]) -> Result<f64> {
    check_lengths(settings, frames)?;
    let mut pa = 1.0;
    let mut pd = 1.0;
    let mut pc = Complex64::new(1.0, 0.0);
    for (&dir, &frame) in settings.iter().zip(frames) {
        let (a, d, c) = ghz_branch_factors(dir, frame)?;
        pa *= a;
        pd *= d;
        pc *= c;
    }
    Ok(0.5 * (pa + pd) + pc.re)
}

/// Closed form of the GHZ correlation:
/// `{1/2 [prod(1 + 2j cos t) + prod(1 - 2j cos t)] + cos(sum phi) prod 2j sin t} / prod(2j + 1)`,
/// taken party by party so that unbounded frames enter as exact limits.
pub fn mermin_correlation_analytic(settings: &[Direction], frames: &[Frame]) -> Result<f64> {
    check_lengths(settings, frames)?;
    let mut plus = 1.0;
    let mut minus = 1.0;
    let mut transverse = 1.0;
    let mut phi_sum = 0.0;
    for (&dir, &frame) in settings.iter().zip(frames) {
        let (c, s) = (dir.theta().cos(), dir.theta().sin());
        let (u, v, w) = match frame {
            Frame::Finite(j) => {
                let tj = j.twice() as f64;
                let d = tj + 1.0;
                ((1.0 + tj * c) / d, (1.0 - tj * c) / d, tj * s / d)
            }
            Frame::Unbounded => (c, -c, s),
        };
        plus *= u;
        minus *= v;
        transverse *= w;
        phi_sum += dir.phi();
    }
    Ok(0.5 * (plus + minus) + phi_sum.cos() * transverse)
}

/// Parity observable for a frame pointing along `dir`.
pub fn parity_for(j_s: HalfInt, frame: Frame, dir: Direction) -> Result<HermitianOperator> {
    Ok(parity_observable(&povm_for(frame, j_s, dir)?))
}

/// `<Psi-| P(a) (x) P(b) |Psi->` for the spin-`j_s` singlet with both parity
/// observables given.
pub fn parity_expectation(j_s: HalfInt, a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    let psi = generalized_singlet(j_s)?.as_matrix().expect("two parties");
    Ok(two_party_expectation(&psi, a.matrix(), b.matrix()))
}

/// Parity correlation of the spin-`j_s` singlet, party A along `z` and party B
/// at polar angle `delta_theta`.
pub fn parity_correlation(j_s: HalfInt, frame: Frame, delta_theta: f64) -> Result<f64> {
    check_theta(delta_theta)?;
    check_frame(frame)?;
    if !j_s.is_physical_spin() {
        return Err(Error::InvalidSpin(format!("j_s = {j_s} is negative")));
    }
    let a = parity_for(j_s, frame, Direction::Z)?;
    let b = parity_for(j_s, frame, Direction::polar(delta_theta)?)?;
    parity_expectation(j_s, &a, &b)
}

/// Parity correlation with both parties' frames along arbitrary directions.
pub fn parity_correlation_full_frames(j_s: HalfInt, frame: Frame, dir_a: Direction, dir_b: Direction) -> Result<f64> {
    check_frame(frame)?;
    let a = parity_for(j_s, frame, dir_a)?;
    let b = parity_for(j_s, frame, dir_b)?;
    parity_expectation(j_s, &a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn h(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn frame_parse() {
        assert_eq!("inf".parse::<Frame>().unwrap(), Frame::Unbounded);
        assert_eq!("5/2".parse::<Frame>().unwrap(), Frame::Finite(h(5)));
        assert!("x".parse::<Frame>().is_err());
        assert_eq!(Frame::Finite(h(3)).to_string(), "3/2");
    }

    #[test]
    fn pair_examples() {
        let half = Frame::Finite(HalfInt::HALF);
        assert!((pair_correlation_numeric(half, half, PI).unwrap() - 0.5).abs() < 1e-14);
        for &t in &[0.0, 0.4, 2.0, PI] {
            let e = pair_correlation_numeric(Frame::Unbounded, Frame::Unbounded, t).unwrap();
            assert!((e + t.cos()).abs() < 1e-12);
        }
        let f = Frame::Finite(h(5));
        let e = pair_correlation_numeric(f, f, 0.75 * PI).unwrap();
        assert!((e - (1.0 + 25.0 / 2f64.sqrt()) / 36.0).abs() < 1e-12);
        assert!(pair_correlation_analytic(HalfInt::HALF, HalfInt::HALF, 0.0).abs() < 1e-15);
        let j = HalfInt::ONE;
        let sum = pair_correlation_analytic(j, j, 0.3) + pair_correlation_analytic(j, j, 0.3 + PI);
        assert!((sum - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn pair_large_frames_approach_classical() {
        let j = HalfInt::integer(100);
        for &t in &[0.0, 1.0, 2.5] {
            assert!((pair_correlation_analytic(j, j, t) + t.cos()).abs() < 0.02);
        }
    }

    #[test]
    fn mermin_examples() {
        let inf = [Frame::Unbounded; 2];
        let e = mermin_correlation_numeric(&[Direction::Z, Direction::Z], &inf).unwrap();
        assert!((e - 1.0).abs() < 1e-14);

        let half = [Frame::Finite(HalfInt::HALF); 3];
        let xxx = [Direction::X; 3];
        assert!((mermin_correlation_numeric(&xxx, &half).unwrap() - 0.25).abs() < 1e-14);
        assert!((mermin_correlation_analytic(&xxx, &half).unwrap() - 0.25).abs() < 1e-15);

        let xyy = [Direction::X, Direction::Y, Direction::Y];
        assert!(mermin_correlation_numeric(&xyy, &half).unwrap().abs() < 1e-14);

        let two = [Frame::Finite(HalfInt::HALF); 2];
        let zz = [Direction::Z; 2];
        assert!((mermin_correlation_analytic(&zz, &two).unwrap() - 0.5).abs() < 1e-15);

        assert!(matches!(
            mermin_correlation_numeric(&xxx, &two),
            Err(Error::MismatchedLengths { .. })
        ));
    }

    #[test]
    fn mermin_unbounded_analytic_limit() {
        let dirs = [Direction::new(PI / 2.0, 0.3).unwrap(), Direction::new(PI / 2.0, 1.1).unwrap(), Direction::Y];
        let e = mermin_correlation_analytic(&dirs, &[Frame::Unbounded; 3]).unwrap();
        assert!((e - (0.3f64 + 1.1 + PI / 2.0).cos()).abs() < 1e-14);
    }

    #[test]
    fn parity_examples() {
        for &t in &[0.0, 0.5, 1.0, PI] {
            let e = parity_correlation(HalfInt::HALF, Frame::Unbounded, t).unwrap();
            assert!((e + t.cos()).abs() < 1e-12);
        }
        // aligned parities: E(0) = (-1)^(2 j_s)
        for ts in 1..8 {
            let e = parity_correlation(h(ts), Frame::Unbounded, 0.0).unwrap();
            let expected = if ts % 2 == 0 { 1.0 } else { -1.0 };
            assert!((e - expected).abs() < 1e-12);
        }
    }
}
