//! Quantum states: spin coherent states (the reference frames), the rotated
//! two-qubit singlet, the spin-`j` singlet and GHZ states.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{ln_binomial, HalfInt};
use crate::{Error, Result};

/// Largest party count for the dense GHZ vector.
pub const GHZ_MAX_PARTIES: usize = 12;

/// Measurement or frame axis, polar angle `theta` in `[0, pi]` and azimuth
/// `phi` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    pub const Z: Direction = Direction { theta: 0.0, phi: 0.0 };
    pub const X: Direction = Direction { theta: PI / 2.0, phi: 0.0 };
    pub const Y: Direction = Direction { theta: PI / 2.0, phi: PI / 2.0 };

    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidAngle { value: theta, min: 0.0, max: PI });
        }
        if !phi.is_finite() {
            return Err(Error::InvalidAngle { value: phi, min: 0.0, max: TAU });
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Direction { theta, phi })
    }

    /// Direction in the `xz` plane.
    pub fn polar(theta: f64) -> Result<Self> {
        Direction::new(theta, 0.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Normalized pure state on a product of spin multiplets. Amplitudes are
/// row-major over the parties; within a party index `i` is `m = j - i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    spins: Vec<HalfInt>,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps raw amplitudes, checking the size and normalization.
    pub fn new(spins: Vec<HalfInt>, amps: Vec<Complex64>) -> Result<Self> {
        if spins.iter().any(|j| !j.is_physical_spin()) {
            return Err(Error::InvalidSpin(format!("{spins:?}")));
        }
        let dim: usize = spins.iter().map(|j| j.multiplicity()).product();
        if dim != amps.len() {
            return Err(Error::MismatchedLengths { left: amps.len(), right: dim });
        }
        let state = StateVector { spins, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("state norm^2 = {norm}")));
        }
        Ok(state)
    }

    pub fn spins(&self) -> &[HalfInt] {
        &self.spins
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spins.iter().map(|j| j.multiplicity()).collect()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Amplitude of the product basis state with the given projections.
    pub fn amplitude(&self, ms: &[HalfInt]) -> Option<Complex64> {
        if ms.len() != self.spins.len() {
            return None;
        }
        let mut idx = 0usize;
        for (&j, &m) in self.spins.iter().zip(ms) {
            if m.abs() > j || !j.same_parity(m) {
                return None;
            }
            idx = idx * j.multiplicity() + ((j - m).twice() / 2) as usize;
        }
        Some(self.amps[idx])
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Two-party amplitudes as a `d1 x d2` matrix.
    pub fn as_matrix(&self) -> Option<DMatrix<Complex64>> {
        match self.spins.as_slice() {
            [a, b] => {
                let (d1, d2) = (a.multiplicity(), b.multiplicity());
                Some(DMatrix::from_fn(d1, d2, |r, c| self.amps[r * d2 + c]))
            }
            _ => None,
        }
    }
}

fn power_term(base: f64, exponent: i64) -> f64 {
    // ln(base^exponent) with 0^0 = 1
    if exponent == 0 {
        0.0
    } else if base == 0.0 {
        f64::NEG_INFINITY
    } else {
        exponent as f64 * base.abs().ln()
    }
}

/// Spin coherent state `|theta, phi>` of spin `j_rf`:
/// `c_m = sqrt(C(2j, j+m)) cos^(j+m)(theta/2) sin^(j-m)(theta/2) e^(-i m phi)`.
pub fn coherent_state(j_rf: HalfInt, dir: Direction) -> Result<StateVector> {
    if !j_rf.is_physical_spin() {
        return Err(Error::InvalidSpin(format!("j_rf = {j_rf} is negative")));
    }
    Ok(StateVector { spins: vec![j_rf], amps: coherent_amplitudes(j_rf, dir) })
}

pub(crate) fn coherent_amplitudes(j: HalfInt, dir: Direction) -> Vec<Complex64> {
    let two_j = j.twice();
    let c = (0.5 * dir.theta).cos();
    let s = (0.5 * dir.theta).sin();
    j.projections()
        .map(|m| {
            let up = (j + m).twice() / 2;
            let down = (j - m).twice() / 2;
            let ln = 0.5 * ln_binomial(two_j as u64, up as u64) + power_term(c, up) + power_term(s, down);
            Complex64::from_polar(ln.exp(), -m.to_f64() * dir.phi)
        })
        .collect()
}

/// Two-qubit singlet with particle two rotated by `theta` about `y`, over
/// the basis `(++, +-, -+, --)`.
pub fn rotated_singlet(theta: f64) -> Result<StateVector> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::InvalidAngle { value: theta, min: 0.0, max: PI });
    }
    let s = FRAC_1_SQRT_2 * (0.5 * theta).sin();
    let c = FRAC_1_SQRT_2 * (0.5 * theta).cos();
    let amps = [s, c, -c, s].into_iter().map(Complex64::from).collect();
    Ok(StateVector { spins: vec![HalfInt::HALF; 2], amps })
}

/// `(-1)^(j - m)` with the exponent evaluated as the integer `(2j - 2m) / 2`.
pub(crate) fn parity_sign(j: HalfInt, m: HalfInt) -> f64 {
    let k = (j - m).twice() / 2;
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Rotation-invariant singlet of two spin-`j_s` particles,
/// `sum_m (-1)^(j_s - m) |m>|-m> / sqrt(2 j_s + 1)`.
pub fn generalized_singlet(j_s: HalfInt) -> Result<StateVector> {
    if !j_s.is_physical_spin() {
        return Err(Error::InvalidSpin(format!("j_s = {j_s} is negative")));
    }
    let d = j_s.multiplicity();
    let norm = 1.0 / (d as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for (i, m) in j_s.projections().enumerate() {
        // |m>|-m> sits at row i, column d - 1 - i
        amps[i * d + (d - 1 - i)] = Complex64::from(parity_sign(j_s, m) * norm);
    }
    Ok(StateVector { spins: vec![j_s; 2], amps })
}

/// `(|z+>^n + |z->^n) / sqrt 2` for `1 <= n <= 12`.
pub fn ghz_state(n: usize) -> Result<StateVector> {
    if n == 0 {
        return Err(Error::InvalidArgument("GHZ state needs at least one party".into()));
    }
    if n > GHZ_MAX_PARTIES {
        return Err(Error::DimensionTooLarge { what: "GHZ parties", value: n, limit: GHZ_MAX_PARTIES });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[0] = Complex64::from(FRAC_1_SQRT_2);
    amps[(1 << n) - 1] = Complex64::from(FRAC_1_SQRT_2);
    Ok(StateVector { spins: vec![HalfInt::HALF; n], amps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    fn reals(s: &StateVector) -> Vec<f64> {
        s.amplitudes().iter().map(|a| {
            assert!(a.im.abs() < 1e-15);
            a.re
        }).collect()
    }

    #[test]
    fn direction_ranges() {
        assert!(Direction::new(-0.1, 0.0).is_err());
        assert!(Direction::new(3.2, 0.0).is_err());
        let d = Direction::new(1.0, -PI / 2.0).unwrap();
        assert!((d.phi() - 1.5 * PI).abs() < 1e-15);
        assert_eq!(Direction::new(1.0, TAU).unwrap().phi(), 0.0);
    }

    #[test]
    fn coherent_examples() {
        let top = coherent_state(h(5), Direction::Z).unwrap();
        let mut expected = vec![0.0; 6];
        expected[0] = 1.0;
        assert_eq!(reals(&top), expected);

        let half = coherent_state(HalfInt::HALF, Direction::X).unwrap();
        for a in reals(&half) {
            assert!((a - FRAC_1_SQRT_2).abs() < 1e-15);
        }

        let one = reals(&coherent_state(HalfInt::ONE, Direction::X).unwrap());
        for (a, e) in one.iter().zip([0.5, FRAC_1_SQRT_2, 0.5]) {
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn rotated_singlet_examples() {
        let s0 = reals(&rotated_singlet(0.0).unwrap());
        for (a, e) in s0.iter().zip([0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]) {
            assert!((a - e).abs() < 1e-15);
        }
        let spi = reals(&rotated_singlet(PI).unwrap());
        for (a, e) in spi.iter().zip([FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]) {
            assert!((a - e).abs() < 1e-15);
        }
        assert!(rotated_singlet(-0.1).is_err());
    }

    #[test]
    fn generalized_singlet_examples() {
        // spin 1/2 agrees with the two-qubit singlet including sign
        let g = generalized_singlet(HalfInt::HALF).unwrap();
        let r = rotated_singlet(0.0).unwrap();
        for (a, b) in g.amplitudes().iter().zip(r.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        let g1 = generalized_singlet(HalfInt::ONE).unwrap();
        let third = 1.0 / 3f64.sqrt();
        assert!((g1.amplitude(&[h(2), h(-2)]).unwrap().re - third).abs() < 1e-15);
        assert!((g1.amplitude(&[h(0), h(0)]).unwrap().re + third).abs() < 1e-15);
        assert!((g1.amplitude(&[h(-2), h(2)]).unwrap().re - third).abs() < 1e-15);
        assert_eq!(g1.amplitude(&[h(2), h(2)]).unwrap().norm(), 0.0);
    }

    #[test]
    fn ghz_examples() {
        assert_eq!(reals(&ghz_state(1).unwrap()), vec![FRAC_1_SQRT_2; 2]);
        let g3 = reals(&ghz_state(3).unwrap());
        assert_eq!(g3.iter().filter(|a| **a != 0.0).count(), 2);
        assert_eq!(g3[0], FRAC_1_SQRT_2);
        assert_eq!(g3[7], FRAC_1_SQRT_2);
        let g2 = ghz_state(2).unwrap();
        let rs = rotated_singlet(PI).unwrap();
        for (a, b) in g2.amplitudes().iter().zip(rs.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(matches!(ghz_state(13), Err(Error::DimensionTooLarge { .. })));
        assert!(ghz_state(0).is_err());
    }
}
