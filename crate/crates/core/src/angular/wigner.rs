use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::factorial::{ln_factorial, CompensatedSum};
use super::recurrence::{null_vector, Anchor};
use super::HalfInt;
use crate::{Error, Result};

/// Above this `2j` the small-d matrix comes from the recurrence in `m'`.
pub const DIRECT_SUM_MAX_TWO_J: i64 = 16;

fn check_angle(theta: f64) -> Result<()> {
    if !(-PI..=PI).contains(&theta) {
        return Err(Error::InvalidAngle { value: theta, min: -PI, max: PI });
    }
    Ok(())
}

fn check_projection(j: HalfInt, m: HalfInt) -> Result<()> {
    if !j.is_physical_spin() {
        return Err(Error::InvalidSpin(format!("j = {j} is negative")));
    }
    if m.abs() > j || !j.same_parity(m) {
        return Err(Error::InvalidSpin(format!("m = {m} is not a projection of j = {j}")));
    }
    Ok(())
}

/// `d^j_{m_row, m_col}(theta) = <j m_row| exp(-i theta J_y) |j m_col>`.
pub fn wigner_small_d(j: HalfInt, m_row: HalfInt, m_col: HalfInt, theta: f64) -> Result<f64> {
    check_projection(j, m_row)?;
    check_projection(j, m_col)?;
    check_angle(theta)?;
    if j.twice() <= DIRECT_SUM_MAX_TWO_J {
        Ok(direct_sum(j, m_row, m_col, theta))
    } else {
        let col = recurrence_column(j, m_col, theta);
        Ok(col[((j - m_row).twice() / 2) as usize])
    }
}

/// Full `(2j+1) x (2j+1)` small-d matrix; row/column `i` is `m = j - i`.
pub fn wigner_small_d_matrix(j: HalfInt, theta: f64) -> Result<DMatrix<f64>> {
    if !j.is_physical_spin() {
        return Err(Error::InvalidSpin(format!("j = {j} is negative")));
    }
    check_angle(theta)?;
    let n = j.multiplicity();
    let mut d = DMatrix::zeros(n, n);
    if j.twice() <= DIRECT_SUM_MAX_TWO_J {
        for (r, mr) in j.projections().enumerate() {
            for (c, mc) in j.projections().enumerate() {
                d[(r, c)] = direct_sum(j, mr, mc, theta);
            }
        }
    } else {
        for (c, mc) in j.projections().enumerate() {
            let col = recurrence_column(j, mc, theta);
            for (r, v) in col.into_iter().enumerate() {
                d[(r, c)] = v;
            }
        }
    }
    Ok(d)
}

/// `D^j(dir) = exp(-i phi J_z) exp(-i theta J_y)`, the rotation taking `z`
/// to `dir`, in the same basis ordering as [`wigner_small_d_matrix`].
pub fn rotation_matrix(j: HalfInt, theta: f64, phi: f64) -> Result<DMatrix<Complex64>> {
    let d = wigner_small_d_matrix(j, theta)?;
    let phases: Vec<Complex64> = j
        .projections()
        .map(|m| Complex64::from_polar(1.0, -m.to_f64() * phi))
        .collect();
    Ok(DMatrix::from_fn(d.nrows(), d.ncols(), |r, c| phases[r] * d[(r, c)]))
}

// Wigner's explicit sum.
fn direct_sum(j: HalfInt, mr: HalfInt, mc: HalfInt, theta: f64) -> f64 {
    if theta < 0.0 {
        return direct_sum(j, mc, mr, -theta);
    }
    let jpmr = (j + mr).as_integer();
    let jmmr = (j - mr).as_integer();
    let jpmc = (j + mc).as_integer();
    let jmmc = (j - mc).as_integer();
    let dm = (mr - mc).as_integer();
    let c = (0.5 * theta).cos();
    let s = (0.5 * theta).sin();
    let lf = |n: i64| ln_factorial(n as u64);
    let ln_pre = 0.5 * (lf(jpmr) + lf(jmmr) + lf(jpmc) + lf(jmmc));

    let k_min = 0.max(-dm);
    let k_max = jpmc.min(jmmr);
    let mut terms = Vec::new();
    for k in k_min..=k_max {
        let pc = j.twice() - 2 * k - dm;
        let ps = 2 * k + dm;
        let mut ln = ln_pre - (lf(jpmc - k) + lf(k) + lf(jmmr - k) + lf(k + dm));
        for (base, power) in [(c, pc), (s, ps)] {
            if power > 0 {
                if base == 0.0 {
                    ln = f64::NEG_INFINITY;
                } else {
                    ln += power as f64 * base.abs().ln();
                }
            }
        }
        if ln == f64::NEG_INFINITY {
            continue;
        }
        let negative = (k + dm) % 2 != 0;
        terms.push((ln, negative));
    }
    let top = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return 0.0;
    }
    let mut sum = CompensatedSum::default();
    for (ln, negative) in terms {
        let v = (ln - top).exp();
        sum.add(if negative { -v } else { v });
    }
    sum.value() * top.exp()
}

// Column m_col of d^j(theta) via
//   b(m') d_{m'+1} + b(m'-1) d_{m'-1} = 2 (m - m' cos theta) / sin theta * d_{m'},
// b(m') = sqrt((j - m')(j + m' + 1)), anchored by sign d_{j, m} = (-1)^(j - m).
// Returned in row order m' = j, j-1, ..., -j.
fn recurrence_column(j: HalfInt, mc: HalfInt, theta: f64) -> Vec<f64> {
    let n = j.multiplicity();
    if theta < 0.0 {
        // d(-theta) = d(theta)^T: build the row m_col instead
        return (0..n)
            .map(|r| {
                let mr = j - HalfInt::from_twice(2 * r as i64);
                let col = recurrence_column(j, mr, -theta);
                col[((j - mc).twice() / 2) as usize]
            })
            .collect();
    }
    let col_idx = ((j - mc).twice() / 2) as usize;
    let sin = theta.sin();
    if theta == 0.0 || sin.abs() < 1e-300 {
        let mut out = vec![0.0; n];
        if theta.abs() < 1.0 {
            out[col_idx] = 1.0;
        } else {
            // theta = pi: d_{m', m} = (-1)^(j - m) delta_{m', -m}
            let phase = if (j - mc).as_integer() % 2 == 0 { 1.0 } else { -1.0 };
            out[n - 1 - col_idx] = phase;
        }
        return out;
    }
    let cos = theta.cos();
    let m = mc.to_f64();
    let tj = j.twice();
    // ascending m' = -j + i
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n - 1);
    for i in 0..n {
        let tmp = -tj + 2 * i as i64;
        let mp = tmp as f64 / 2.0;
        diag.push(2.0 * (m - mp * cos) / sin);
        if i + 1 < n {
            let a = (tj - tmp) * (tj + tmp + 2);
            off.push((a as f64).sqrt() / 2.0);
        }
    }
    let top_sign = if (j - mc).as_integer() % 2 == 0 { 1.0 } else { -1.0 };
    let mut col = null_vector(&off, &diag, Anchor::Top(top_sign));
    col.reverse();
    col
}
