use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::factorial::{ln_factorial, CompensatedSum};
use super::recurrence::{null_vector, Anchor};
use super::HalfInt;
use crate::{Error, Result};

/// Above this `2j` the Racah sum is replaced by the recurrence.
pub const RACAH_MAX_TWO_J: i64 = 40;

/// Arguments of `<j1 m1; j2 m2 | j m>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CgArgs {
    pub j1: HalfInt,
    pub m1: HalfInt,
    pub j2: HalfInt,
    pub m2: HalfInt,
    pub j: HalfInt,
    pub m: HalfInt,
}

impl CgArgs {
    pub fn new(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> Self {
        CgArgs { j1, m1, j2, m2, j, m }
    }

    fn check_spins(&self) -> Result<()> {
        for (name, v) in [("j1", self.j1), ("j2", self.j2), ("j", self.j)] {
            if !v.is_physical_spin() {
                return Err(Error::InvalidSpin(format!("{name} = {v} is negative")));
            }
        }
        Ok(())
    }

    /// All selection rules hold, so the coefficient may be non-zero.
    pub fn allowed(&self) -> bool {
        let projection_ok = |j: HalfInt, m: HalfInt| m.abs() <= j && j.same_parity(m);
        projection_ok(self.j1, self.m1)
            && projection_ok(self.j2, self.m2)
            && projection_ok(self.j, self.m)
            && self.m1 + self.m2 == self.m
            && (self.j1 - self.j2).abs() <= self.j
            && self.j <= self.j1 + self.j2
            && (self.j1 + self.j2 + self.j).is_integer()
    }
}

/// Condon-Shortley Clebsch-Gordan coefficient `<j1 m1; j2 m2 | j m>`.
///
/// Exactly zero when a selection rule fails.
pub fn clebsch_gordan(args: CgArgs) -> Result<f64> {
    args.check_spins()?;
    if !args.allowed() {
        return Ok(0.0);
    }
    let largest = args.j1.twice().max(args.j2.twice()).max(args.j.twice());
    if largest <= RACAH_MAX_TWO_J {
        Ok(racah_unchecked(&args))
    } else {
        let row = cg_row(args.j1, args.j2, args.j, args.m)?;
        Ok(row.get(args.m1))
    }
}

/// Racah single-sum formula evaluated with log-factorials and compensated
/// summation. Accurate while the alternating sum does not cancel badly, i.e.
/// for small spins or when one of the three spins is small.
pub fn clebsch_gordan_racah(args: CgArgs) -> Result<f64> {
    args.check_spins()?;
    if !args.allowed() {
        return Ok(0.0);
    }
    Ok(racah_unchecked(&args))
}

fn racah_unchecked(a: &CgArgs) -> f64 {
    // all of these are non-negative integers once the selection rules hold
    let h = |x: HalfInt| -> i64 { x.as_integer() };
    let jsum = h(a.j1 + a.j2 + a.j);
    let j1p_j2m_j = h(a.j1 + a.j2 - a.j);
    let j1m_j2p_j = h(a.j1 - a.j2 + a.j);
    let mj1p_j2p_j = h(-a.j1 + a.j2 + a.j);

    let lf = |n: i64| ln_factorial(n as u64);
    let ln_pre = 0.5
        * (((a.j.twice() + 1) as f64).ln() + lf(j1p_j2m_j) + lf(j1m_j2p_j) + lf(mj1p_j2p_j)
            - lf(jsum + 1)
            + lf(h(a.j + a.m))
            + lf(h(a.j - a.m))
            + lf(h(a.j1 - a.m1))
            + lf(h(a.j1 + a.m1))
            + lf(h(a.j2 - a.m2))
            + lf(h(a.j2 + a.m2)));

    let p = j1p_j2m_j;
    let q = h(a.j1 - a.m1);
    let r = h(a.j2 + a.m2);
    let s = h(a.j - a.j2 + a.m1);
    let t = h(a.j - a.j1 - a.m2);
    let k_min = 0.max(-s).max(-t);
    let k_max = p.min(q).min(r);
    if k_min > k_max {
        return 0.0;
    }

    let ln_terms: Vec<f64> = (k_min..=k_max)
        .map(|k| -(lf(k) + lf(p - k) + lf(q - k) + lf(r - k) + lf(s + k) + lf(t + k)))
        .collect();
    let top = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = CompensatedSum::default();
    for (k, lt) in (k_min..=k_max).zip(&ln_terms) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum.add(sign * (lt - top).exp());
    }
    sum.value() * (ln_pre + top).exp()
}

/// All coefficients `<j1 m1; j2 (m - m1) | j m>` for one `(j1, j2, j, m)`,
/// indexed by `m1` from `m1_min` upward.
#[derive(Debug, Clone, PartialEq)]
pub struct CgRow {
    pub m1_min: HalfInt,
    pub values: Vec<f64>,
}

impl CgRow {
    pub fn m1_max(&self) -> HalfInt {
        self.m1_min + HalfInt::from_twice(2 * (self.values.len() as i64 - 1))
    }

    /// Coefficient at `m1`, zero outside the row.
    pub fn get(&self, m1: HalfInt) -> f64 {
        let off = m1.twice() - self.m1_min.twice();
        if off < 0 || off % 2 != 0 {
            return 0.0;
        }
        self.values.get((off / 2) as usize).copied().unwrap_or(0.0)
    }
}

/// Row of coefficients from the three-term recurrence in `m1` that follows
/// from `J^2 |j m> = j(j+1) |j m>`. Sign fixed by the Condon-Shortley
/// convention `<j1 j1; j2 (m - j1) | j m> > 0`.
pub fn cg_row(j1: HalfInt, j2: HalfInt, j: HalfInt, m: HalfInt) -> Result<CgRow> {
    for (name, v) in [("j1", j1), ("j2", j2), ("j", j)] {
        if !v.is_physical_spin() {
            return Err(Error::InvalidSpin(format!("{name} = {v} is negative")));
        }
    }
    let triangle = (j1 - j2).abs() <= j && j <= j1 + j2 && (j1 + j2 + j).is_integer();
    if !triangle || m.abs() > j || !j.same_parity(m) {
        return Ok(CgRow { m1_min: -j1, values: Vec::new() });
    }
    if m.twice() < 0 {
        // <j1 -m1; j2 -m2 | j -m> = (-1)^(j1+j2-j) <j1 m1; j2 m2 | j m>
        let mirrored = cg_row(j1, j2, j, -m)?;
        let phase = if (j1 + j2 - j).as_integer() % 2 == 0 { 1.0 } else { -1.0 };
        let m1_min = -mirrored.m1_max();
        let values = mirrored.values.iter().rev().map(|v| phase * v).collect();
        return Ok(CgRow { m1_min, values });
    }

    let m1_min = (-j1).max(m - j2);
    let m1_max = j1.min(m + j2);
    let n = ((m1_max.twice() - m1_min.twice()) / 2 + 1) as usize;

    // everything in quarter units so the coefficients are exact integers
    let tj1 = j1.twice();
    let tj2 = j2.twice();
    let tj = j.twice();
    let tm = m.twice();
    let lambda4 = tj * (tj + 2) - tj1 * (tj1 + 2) - tj2 * (tj2 + 2);
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let tm1 = m1_min.twice() + 2 * i as i64;
        let tm2 = tm - tm1;
        diag.push((lambda4 - 2 * tm1 * tm2) as f64 / 4.0);
        if i + 1 < n {
            // J1+ J2- linking (m1, m2) -> (m1 + 1, m2 - 1)
            let a = (tj1 - tm1) * (tj1 + tm1 + 2);
            let b = (tj2 + tm2) * (tj2 - tm2 + 2);
            off.push(((a as f64) * (b as f64)).sqrt() / 4.0);
        }
    }

    let anchor = if m1_max == j1 {
        Anchor::Top(1.0)
    } else {
        // m2 = j2 at the bottom of the row
        let phase = if (j1 + j2 - j).as_integer() % 2 == 0 { 1.0 } else { -1.0 };
        Anchor::Bottom(phase)
    };
    Ok(CgRow { m1_min, values: null_vector(&off, &diag, anchor) })
}

/// Every coefficient `<j_rf mu; j_s m_s | J, mu + m_s>` needed by a frame of
/// spin `j_rf` measuring a system of spin `j_s`, for all total spins
/// `J = |j_rf - j_s| ..= j_rf + j_s`.
#[derive(Debug)]
pub struct CgBand {
    pub j_rf: HalfInt,
    pub j_s: HalfInt,
    j_min: HalfInt,
    // rows[t][M + J] for J = j_min + t
    rows: Vec<Vec<CgRow>>,
}

impl CgBand {
    fn build(j_rf: HalfInt, j_s: HalfInt) -> Result<Self> {
        let j_min = (j_rf - j_s).abs();
        let j_max = j_rf + j_s;
        let mut rows = Vec::new();
        let mut j = j_min;
        while j <= j_max {
            let use_racah = j_rf.twice().max(j_s.twice()).max(j.twice()) <= RACAH_MAX_TWO_J;
            let mut per_m = Vec::with_capacity(j.multiplicity());
            for m in j.projections().rev() {
                let row = if use_racah {
                    let m1_min = (-j_rf).max(m - j_s);
                    let m1_max = j_rf.min(m + j_s);
                    let mut values = Vec::new();
                    let mut m1 = m1_min;
                    while m1 <= m1_max {
                        values.push(clebsch_gordan_racah(CgArgs::new(j_rf, m1, j_s, m - m1, j, m))?);
                        m1 = m1 + HalfInt::ONE;
                    }
                    CgRow { m1_min, values }
                } else {
                    cg_row(j_rf, j_s, j, m)?
                };
                per_m.push(row);
            }
            rows.push(per_m);
            j = j + HalfInt::ONE;
        }
        Ok(CgBand { j_rf, j_s, j_min, rows })
    }

    /// `<j_rf mu; j_s m_s | j, mu + m_s>`.
    pub fn get(&self, j: HalfInt, mu: HalfInt, m_s: HalfInt) -> f64 {
        if j < self.j_min || j > self.j_rf + self.j_s || mu.abs() > self.j_rf || m_s.abs() > self.j_s {
            return 0.0;
        }
        let m = mu + m_s;
        if m.abs() > j {
            return 0.0;
        }
        let t = ((j - self.j_min).twice() / 2) as usize;
        let idx = ((m + j).twice() / 2) as usize;
        self.rows[t][idx].get(mu)
    }
}

type BandKey = (i64, i64);

fn band_cache() -> &'static Mutex<HashMap<BandKey, Arc<CgBand>>> {
    static CACHE: OnceLock<Mutex<HashMap<BandKey, Arc<CgBand>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

const BAND_CACHE_LIMIT: usize = 512;

/// Memoized [`CgBand`], keyed by `(2 j_rf, 2 j_s)`. Shared across threads.
pub fn cg_band(j_rf: HalfInt, j_s: HalfInt) -> Result<Arc<CgBand>> {
    if !j_rf.is_physical_spin() || !j_s.is_physical_spin() {
        return Err(Error::InvalidSpin(format!("j_rf = {j_rf}, j_s = {j_s}")));
    }
    let key = (j_rf.twice(), j_s.twice());
    if let Some(band) = band_cache().lock().unwrap().get(&key) {
        return Ok(Arc::clone(band));
    }
    let band = Arc::new(CgBand::build(j_rf, j_s)?);
    let mut cache = band_cache().lock().unwrap();
    if cache.len() >= BAND_CACHE_LIMIT {
        cache.clear();
    }
    Ok(Arc::clone(cache.entry(key).or_insert(band)))
}

/// Drops every memoized band.
pub fn clear_band_cache() {
    band_cache().lock().unwrap().clear();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    fn cg(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> f64 {
        clebsch_gordan(CgArgs::new(h(j1), h(m1), h(j2), h(m2), h(j), h(m))).unwrap()
    }

    #[test]
    fn triplet_zero() {
        assert!((cg(1, 1, 1, -1, 2, 0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((cg(1, 1, 1, -1, 0, 0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((cg(1, -1, 1, 1, 0, 0) + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn selection_rules_give_exact_zero() {
        assert_eq!(cg(1, 1, 1, 1, 2, 0), 0.0); // m1 + m2 != m
        assert_eq!(cg(2, 0, 2, 0, 6, 0), 0.0); // triangle
        assert_eq!(cg(2, 4, 2, -4, 2, 0), 0.0); // |m| > j
        assert_eq!(cg(2, 1, 2, -1, 2, 0), 0.0); // parity of j - m
        assert_eq!(cg(2, 0, 2, 0, 2, 0), 0.0); // genuine zero: <1 0;1 0|1 0>
    }

    #[test]
    fn negative_spin_rejected() {
        let r = clebsch_gordan(CgArgs::new(h(-1), h(1), h(1), h(1), h(2), h(2)));
        assert!(matches!(r, Err(Error::InvalidSpin(_))));
    }

    #[test]
    fn row_matches_racah_small() {
        for (tj1, tj2) in [(6, 3), (10, 4), (7, 7), (2, 9)] {
            let mut tj = (tj1 - tj2 as i64).abs();
            while tj <= tj1 + tj2 {
                let mut tm = -tj;
                while tm <= tj {
                    let row = cg_row(h(tj1), h(tj2), h(tj), h(tm)).unwrap();
                    let mut tm1 = row.m1_min.twice();
                    for v in &row.values {
                        let r = clebsch_gordan_racah(CgArgs::new(h(tj1), h(tm1), h(tj2), h(tm - tm1), h(tj), h(tm))).unwrap();
                        assert!((v - r).abs() < 1e-13, "{tj1} {tj2} {tj} {tm} {tm1}: {v} vs {r}");
                        tm1 += 2;
                    }
                    tm += 2;
                }
                tj += 2;
            }
        }
    }

    #[test]
    fn band_lookup() {
        let band = cg_band(h(7), h(2)).unwrap();
        for tj in [5, 7, 9] {
            for tmu in (-7..=7).step_by(2) {
                for tms in [-2, 0, 2] {
                    let direct = cg(7, tmu, 2, tms, tj, tmu + tms);
                    assert!((band.get(h(tj), h(tmu), h(tms)) - direct).abs() < 1e-14);
                }
            }
        }
        let again = cg_band(h(7), h(2)).unwrap();
        assert!(Arc::ptr_eq(&band, &again));
    }
}
