//! Angular-momentum kernels: exact half-integers, log-factorials,
//! Clebsch-Gordan coefficients and Wigner small-d matrices.
//!
//! Clebsch-Gordan coefficients come from the Racah sum for `2j <= 60` and from
//! a normalized three-term recurrence above that, where the alternating Racah
//! sum loses all precision.

mod cg;
mod factorial;
mod halfint;
mod recurrence;
mod wigner;

pub use cg::{
    cg_band, cg_row, clear_band_cache, clebsch_gordan, clebsch_gordan_racah, CgArgs, CgBand, CgRow,
    RACAH_MAX_TWO_J,
};
pub use factorial::{ln_binomial, ln_factorial, MAX_TWO_J};
pub use halfint::{HalfInt, ParseHalfIntError};
pub use wigner::{rotation_matrix, wigner_small_d, wigner_small_d_matrix, DIRECT_SUM_MAX_TWO_J};
