//! Independent reference implementations used only by the test suites.
#![allow(dead_code)]

use bref::HalfInt;
use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn h(twice: i64) -> HalfInt {
    HalfInt::from_twice(twice)
}

/// `ln n!` by plain summation, independent of the crate's table.
pub fn ln_fact(n: i64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 60 {
        return x.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 60;
    let top: BigInt = x.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Clebsch-Gordan coefficient from the Racah sum with the alternating series
/// summed exactly in big integers. Arguments are twice the quantum numbers.
pub fn cg_exact(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> f64 {
    if tm1 + tm2 != tm
        || tm1.abs() > tj1
        || tm2.abs() > tj2
        || tm.abs() > tj
        || (tj1 - tm1) % 2 != 0
        || (tj2 - tm2) % 2 != 0
        || (tj - tm) % 2 != 0
        || tj < (tj1 - tj2).abs()
        || tj > tj1 + tj2
        || (tj1 + tj2 + tj) % 2 != 0
    {
        return 0.0;
    }
    let p = (tj1 + tj2 - tj) / 2;
    let q = (tj1 - tm1) / 2;
    let r = (tj2 + tm2) / 2;
    let s = (tj - tj2 + tm1) / 2;
    let t = (tj - tj1 - tm2) / 2;
    let k_min = 0.max(-s).max(-t);
    let k_max = p.min(q).min(r);
    if k_min > k_max {
        return 0.0;
    }
    let ln_pre = 0.5
        * (((tj + 1) as f64).ln()
            + ln_fact((tj1 + tj2 - tj) / 2)
            + ln_fact((tj1 - tj2 + tj) / 2)
            + ln_fact((-tj1 + tj2 + tj) / 2)
            - ln_fact((tj1 + tj2 + tj) / 2 + 1)
            + ln_fact((tj + tm) / 2)
            + ln_fact((tj - tm) / 2)
            + ln_fact((tj1 - tm1) / 2)
            + ln_fact((tj1 + tm1) / 2)
            + ln_fact((tj2 - tm2) / 2)
            + ln_fact((tj2 + tm2) / 2));
    // T_k = C(p,k) q^(k) r^(k) (s+kmax)!/(s+k)! (t+kmax)!/(t+k)!, all integers
    let mut term = BigUint::one();
    let binom_num: BigUint = ((p - k_min + 1)..=p).map(|x| BigUint::from(x as u64)).product();
    let binom_den: BigUint = (1..=k_min).map(|x| BigUint::from(x as u64)).product();
    term *= binom_num / binom_den;
    for i in 0..k_min {
        term *= BigUint::from((q - i) as u64);
        term *= BigUint::from((r - i) as u64);
    }
    for x in (s + k_min + 1)..=(s + k_max) {
        term *= BigUint::from(x as u64);
    }
    for x in (t + k_min + 1)..=(t + k_max) {
        term *= BigUint::from(x as u64);
    }
    let mut sum = BigInt::zero();
    let mut k = k_min;
    loop {
        let signed = BigInt::from(term.clone());
        if k % 2 == 0 {
            sum += signed;
        } else {
            sum -= signed;
        }
        if k == k_max {
            break;
        }
        term *= BigUint::from(((p - k) * (q - k)) as u64);
        term *= BigUint::from((r - k) as u64);
        term /= BigUint::from(((k + 1) * (s + k + 1)) as u64);
        term /= BigUint::from((t + k + 1) as u64);
        k += 1;
    }
    if sum.is_zero() {
        return 0.0;
    }
    let ln_p = ln_fact(p) + ln_fact(q) + ln_fact(r) + ln_fact(s + k_max) + ln_fact(t + k_max);
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    sign * (ln_pre + big_ln(&sum) - ln_p).exp()
}

/// `exp(-i theta J_y)` from the eigen-decomposition of the Hermitian `J_y`.
pub fn small_d_spectral(tj: i64, theta: f64) -> DMatrix<f64> {
    let n = (tj + 1) as usize;
    let j = tj as f64 / 2.0;
    let mut jy = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        // <m+1| J+ |m>, rows ordered m = j..-j
        let m = j - i as f64;
        let jp = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        jy[(i - 1, i)] = Complex64::new(0.0, -0.5 * jp);
        jy[(i, i - 1)] = Complex64::new(0.0, 0.5 * jp);
    }
    let eig = jy.symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -theta * l)));
    let full = v * phases * v.adjoint();
    full.map(|z| z.re)
}

/// Dense Kronecker product.
pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}
