//! Measurements relative to a frame: the bounded-frame POVM obtained by
//! measuring total spin of system + coherent-state frame, ideal projective
//! measurements along a classical axis, and parity observables.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::angular::{cg_band, rotation_matrix, HalfInt};
use crate::correlations::Frame;
use crate::states::{coherent_amplitudes, parity_sign};
use crate::{Direction, Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// Hermitian matrix on a spin-`j` multiplet, rows/columns ordered `m = j..-j`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    j: HalfInt,
    matrix: DMatrix<Complex64>,
}

impl HermitianOperator {
    pub fn new(j: HalfInt, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = j.multiplicity();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::MismatchedLengths { left: matrix.nrows(), right: d });
        }
        let skew = (&matrix - matrix.adjoint()).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        if skew > HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!("operator not Hermitian (defect {skew:e})")));
        }
        Ok(HermitianOperator { j, matrix })
    }

    // symmetrizes away rounding noise
    fn from_raw(j: HalfInt, m: DMatrix<Complex64>) -> Self {
        let matrix = (&m + m.adjoint()) * Complex64::from(0.5);
        HermitianOperator { j, matrix }
    }

    pub fn spin(&self) -> HalfInt {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Entry `<m_row| A |m_col>`.
    pub fn entry(&self, m_row: HalfInt, m_col: HalfInt) -> Complex64 {
        let idx = |m: HalfInt| ((self.j - m).twice() / 2) as usize;
        self.matrix[(idx(m_row), idx(m_col))]
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// One outcome of a POVM, labelled by the spin projection `m` it reports.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    pub m: HalfInt,
    pub op: HermitianOperator,
}

/// Effective measurement on a spin-`j_s` system.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    j_s: HalfInt,
    frame: Frame,
    direction: Direction,
    outcomes: Vec<PovmElement>,
}

impl Povm {
    pub fn j_s(&self) -> HalfInt {
        self.j_s
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn outcomes(&self) -> &[PovmElement] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn element(&self, m: HalfInt) -> Option<&HermitianOperator> {
        self.outcomes.iter().find(|e| e.m == m).map(|e| &e.op)
    }

    /// Largest entry of `|sum_m P_m - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.j_s.multiplicity();
        let mut total = DMatrix::<Complex64>::zeros(d, d);
        for e in &self.outcomes {
            total += &e.op.matrix;
        }
        (total - DMatrix::identity(d, d)).iter().fold(0.0f64, |a, z| a.max(z.norm()))
    }

    /// Smallest eigenvalue over all elements.
    pub fn min_eigenvalue(&self) -> f64 {
        self.outcomes.iter().map(|e| e.op.min_eigenvalue()).fold(f64::INFINITY, f64::min)
    }

    /// Checks completeness (1e-10), positivity (-1e-10) and distinct labels.
    pub fn validate(&self) -> Result<()> {
        let defect = self.completeness_defect();
        if defect > 1e-10 {
            return Err(Error::InvalidArgument(format!("POVM incomplete (defect {defect:e})")));
        }
        let min = self.min_eigenvalue();
        if min < -1e-10 {
            return Err(Error::InvalidArgument(format!("POVM element not positive ({min:e})")));
        }
        let mut labels: Vec<i64> = self.outcomes.iter().map(|e| e.m.twice()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != self.outcomes.len() {
            return Err(Error::InvalidArgument("duplicate POVM labels".into()));
        }
        Ok(())
    }
}

fn check_spins(j_rf: HalfInt, j_s: HalfInt) -> Result<()> {
    if !j_rf.is_physical_spin() || !j_s.is_physical_spin() {
        return Err(Error::InvalidSpin(format!("j_rf = {j_rf}, j_s = {j_s}")));
    }
    Ok(())
}

/// Outcome labels `m = J - j_rf` for `J = |j_rf - j_s| ..= j_rf + j_s`,
/// largest first. There are `2 min(j_rf, j_s) + 1` of them.
fn outcome_labels(j_rf: HalfInt, j_s: HalfInt) -> Vec<HalfInt> {
    let lowest = (j_rf - j_s).abs() - j_rf;
    let mut out = Vec::new();
    let mut m = j_s;
    while m >= lowest {
        out.push(m);
        m = m - HalfInt::ONE;
    }
    out
}

/// POVM of a frame pointing along `z`. Every element is diagonal,
/// `[P_m]_{m_s m_s} = <j_rf j_rf; j_s m_s | j_rf + m, j_rf + m_s>^2`.
pub fn bounded_povm_z(j_rf: HalfInt, j_s: HalfInt) -> Result<Povm> {
    check_spins(j_rf, j_s)?;
    let band = cg_band(j_rf, j_s)?;
    let d = j_s.multiplicity();
    let outcomes = outcome_labels(j_rf, j_s)
        .into_iter()
        .map(|m| {
            let total = j_rf + m;
            let mut mat = DMatrix::<Complex64>::zeros(d, d);
            for (i, m_s) in j_s.projections().enumerate() {
                let c = band.get(total, j_rf, m_s);
                mat[(i, i)] = Complex64::from(c * c);
            }
            PovmElement { m, op: HermitianOperator { j: j_s, matrix: mat } }
        })
        .collect();
    Ok(Povm { j_s, frame: Frame::Finite(j_rf), direction: Direction::Z, outcomes })
}

/// POVM of a frame in the coherent state `|dir>`:
/// `P_m(dir) = <dir| Pi_{j_rf + m} |dir>`, expanded over the frame amplitudes
/// and the Clebsch-Gordan coefficients of each total-spin projector.
pub fn bounded_povm(j_rf: HalfInt, j_s: HalfInt, dir: Direction) -> Result<Povm> {
    check_spins(j_rf, j_s)?;
    let band = cg_band(j_rf, j_s)?;
    let amps = coherent_amplitudes(j_rf, dir);
    let amp = |mu: HalfInt| -> Complex64 {
        if mu.abs() > j_rf {
            Complex64::new(0.0, 0.0)
        } else {
            amps[((j_rf - mu).twice() / 2) as usize]
        }
    };
    let d = j_s.multiplicity();
    let m_s_list: Vec<HalfInt> = j_s.projections().collect();
    let outcomes = outcome_labels(j_rf, j_s)
        .into_iter()
        .map(|m| {
            let total = j_rf + m;
            let mut mat = DMatrix::<Complex64>::zeros(d, d);
            let mut w = vec![Complex64::new(0.0, 0.0); d];
            for big_m in total.projections() {
                // w = (<dir| x 1) |J M>
                let mut any = false;
                for (i, &m_s) in m_s_list.iter().enumerate() {
                    let mu = big_m - m_s;
                    let c = band.get(total, mu, m_s);
                    w[i] = if c == 0.0 { Complex64::new(0.0, 0.0) } else { amp(mu).conj() * c };
                    any |= c != 0.0;
                }
                if !any {
                    continue;
                }
                for r in 0..d {
                    if w[r] == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for c in 0..d {
                        mat[(r, c)] += w[r] * w[c].conj();
                    }
                }
            }
            PovmElement { m, op: HermitianOperator::from_raw(j_s, mat) }
        })
        .collect();
    Ok(Povm { j_s, frame: Frame::Finite(j_rf), direction: dir, outcomes })
}

/// Projective spin measurement along `dir` with a classical frame.
pub fn ideal_projectors_along(j_s: HalfInt, dir: Direction) -> Result<Povm> {
    if !j_s.is_physical_spin() {
        return Err(Error::InvalidSpin(format!("j_s = {j_s} is negative")));
    }
    let rot = rotation_matrix(j_s, dir.theta(), dir.phi())?;
    let outcomes = j_s
        .projections()
        .enumerate()
        .map(|(k, m)| {
            let col = rot.column(k);
            let mat = &col * col.adjoint();
            PovmElement { m, op: HermitianOperator::from_raw(j_s, mat) }
        })
        .collect();
    Ok(Povm { j_s, frame: Frame::Unbounded, direction: dir, outcomes })
}

/// Projectors `|j_s, m><j_s, m|` rotated by `delta_theta` in the `xz` plane.
pub fn ideal_projectors(j_s: HalfInt, delta_theta: f64) -> Result<Povm> {
    ideal_projectors_along(j_s, Direction::polar(delta_theta)?)
}

/// POVM for either kind of frame.
pub fn povm_for(frame: Frame, j_s: HalfInt, dir: Direction) -> Result<Povm> {
    match frame {
        Frame::Finite(j_rf) => bounded_povm(j_rf, j_s, dir),
        Frame::Unbounded => ideal_projectors_along(j_s, dir),
    }
}

/// `sum_m (-1)^(j_s - m) P_m`.
pub fn parity_observable(povm: &Povm) -> HermitianOperator {
    let d = povm.j_s.multiplicity();
    let mut mat = DMatrix::<Complex64>::zeros(d, d);
    for e in &povm.outcomes {
        mat += &e.op.matrix * Complex64::from(parity_sign(povm.j_s, e.m));
    }
    HermitianOperator { j: povm.j_s, matrix: mat }
}

/// Largest entry-wise distance between the POVM and the ideal projectors
/// along the same axis (outcomes missing from the POVM count as zero).
pub fn distance_to_projectors(povm: &Povm) -> Result<f64> {
    let ideal = ideal_projectors_along(povm.j_s, povm.direction)?;
    let mut worst = 0.0f64;
    for e in ideal.outcomes() {
        let diff = match povm.element(e.m) {
            Some(op) => &op.matrix - &e.op.matrix,
            None => -e.op.matrix.clone(),
        };
        worst = worst.max(diff.iter().fold(0.0f64, |a, z| a.max(z.norm())));
    }
    Ok(worst)
}
