//! Haar coefficients of the discrepancy function.
//!
//! For `j = (j1, j2)` with `j_i >= -1` and `m` in `D_j`, the coefficient is
//! `mu_{j,m} = integral of Delta(t) h_{j1,m1}(t1) h_{j2,m2}(t2) dt`, where
//! `h_{j,m}` is `+1` on the left half of `[m/2^j, (m+1)/2^j)`, `-1` on its
//! right half, and `h_{-1,0}` is the indicator of `[0,1)`.

mod closed;
mod oracle;
mod parseval;
mod sweep;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use closed::{
    corner_coefficient, haar_coeff_closed, BoundConstants, CaseLabel, ClosedConfig, ClosedForms,
    ClosedValue, Fault, Transcription,
};
pub use oracle::{haar_coeff_oracle, oracle_level, LevelCoefficients};
pub use parseval::{
    linear_tail, parseval_check, parseval_check_with_cap, parseval_for_set, square_function_lp,
    ParsevalReport, SquareFunction, DEFAULT_PARSEVAL_CAP, MAX_SQUARE_FUNCTION_LEVEL,
};
pub use sweep::{report, sweep_net, CaseStats, HaarCoefficientReport, SweepSummary};

/// Largest supported `j_i`.
pub const MAX_J: i32 = 60;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct HaarIndex {
    pub j1: i32,
    pub j2: i32,
    pub m1: u64,
    pub m2: u64,
}

impl HaarIndex {
    pub fn new(j1: i32, j2: i32, m1: u64, m2: u64) -> Result<Self> {
        for (j, m) in [(j1, m1), (j2, m2)] {
            if !(-1..=MAX_J).contains(&j) {
                return Err(Error::InvalidArgument(format!("j = {j} outside -1..={MAX_J}")));
            }
            if m >= translations(j) {
                return Err(Error::InvalidArgument(format!("m = {m} not in D_{j}")));
            }
        }
        Ok(HaarIndex { j1, j2, m1, m2 })
    }

    /// `|j| = max(0, j1) + max(0, j2)`.
    pub fn level(&self) -> u32 {
        level(self.j1, self.j2)
    }
}

impl fmt::Display for HaarIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({},{}),({},{}))", self.j1, self.j2, self.m1, self.m2)
    }
}

/// `|D_j|`: `2^j` for `j >= 0`, one for `j = -1`.
pub fn translations(j: i32) -> u64 {
    1u64 << j.max(0)
}

pub fn level(j1: i32, j2: i32) -> u32 {
    (j1.max(0) + j2.max(0)) as u32
}

/// The nine index classes for a net with `2^n` points.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Case {
    J1,
    J2,
    J3,
    J4,
    J5,
    J6,
    J7,
    J8,
    J9,
}

impl Case {
    pub const ALL: [Case; 9] =
        [Case::J1, Case::J2, Case::J3, Case::J4, Case::J5, Case::J6, Case::J7, Case::J8, Case::J9];

    /// Cases with an exact closed form; the others are bounded.
    pub fn is_exact(self) -> bool {
        !matches!(self, Case::J7 | Case::J8)
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Case> {
        Case::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown case {s:?}")))
    }
}

/// The unique class containing `(j1, j2)`.
///
/// * `J1`: `(-1, -1)`.
/// * `J2`: `(-1, j2)` with `0 <= j2 <= n-2`.
/// * `J3`: `(-1, k)` or `(k, -1)` with `k >= n`.
/// * `J4`: `(0, -1)`.
/// * `J5`: `(j1, -1)` with `1 <= j1 <= n-2`.
/// * `J6`: `j1, j2 >= 0` and `j1 + j2 <= n-3`.
/// * `J7`: `0 <= j1, j2 <= n-1` and `j1 + j2 >= n-2`.
/// * `J8`: `(-1, n-1)` or `(n-1, -1)`; for `n = 1` the index `(0, -1)` is `J4`.
/// * `J9`: `j1, j2 >= 0` with `j1 >= n` or `j2 >= n`.
pub fn classify(j1: i32, j2: i32, n: u32) -> Case {
    assert!(j1 >= -1 && j2 >= -1, "j components must be at least -1");
    let n = n as i32;
    match (j1, j2) {
        (-1, -1) => Case::J1,
        (-1, k) if k <= n - 2 => Case::J2,
        (-1, k) if k == n - 1 => Case::J8,
        (-1, _) => Case::J3,
        (0, -1) => Case::J4,
        (k, -1) if k <= n - 2 => Case::J5,
        (k, -1) if k == n - 1 => Case::J8,
        (_, -1) => Case::J3,
        _ if j1 >= n || j2 >= n => Case::J9,
        _ if j1 + j2 <= n - 3 => Case::J6,
        _ => Case::J7,
    }
}

/// The part of `mu_{j,m}` contributed by `-t1 t2` alone: the value of every
/// coefficient whose box holds no point in its interior.
pub fn linear_part(j1: i32, j2: i32) -> crate::rational::Dyadic {
    use crate::rational::Dyadic;
    match (j1, j2) {
        (-1, -1) => -Dyadic::pow2(-2),
        (-1, k) | (k, -1) => Dyadic::pow2(-2 * k - 3),
        _ => -Dyadic::pow2(-2 * j1 - 2 * j2 - 4),
    }
}

pub(crate) fn linear_part_rational(j1: i32, j2: i32) -> Rational {
    linear_part(j1, j2).to_rational()
}
