//! Discrepancy function and its L2, L-infinity and general Lp norms.
//!
//! Counting is strict throughout: a point `z` lies in the anchored box
//! `[0, t)` iff `z1 < t1` and `z2 < t2`.

mod lp;
pub mod quadrature;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgen::{DyadicPoint, PointSet};
use crate::par;
use crate::rational::{int, pow2, ratio, Rational};

pub use lp::{lp_norm, lp_norm_with, LpOptions, DEFAULT_TOL};

/// Upper corner `t` of the box `[0, t)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Anchor {
    t1: Rational,
    t2: Rational,
}

impl Anchor {
    pub fn new(t1: Rational, t2: Rational) -> Result<Self> {
        let unit = |t: &Rational| *t >= Rational::zero() && *t <= Rational::one();
        if !unit(&t1) || !unit(&t2) {
            return Err(Error::InvalidArgument(format!("anchor ({t1}, {t2}) outside [0,1]^2")));
        }
        Ok(Anchor { t1, t2 })
    }

    pub fn t1(&self) -> &Rational {
        &self.t1
    }

    pub fn t2(&self) -> &Rational {
        &self.t2
    }
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Squared L2 discrepancy.
    L2Sq,
    LInf,
    Lp,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Quadrature,
}

#[derive(Clone, PartialEq, Debug)]
pub enum LpValue {
    Exact(Rational),
    Approx { value: f64, error_bound: f64 },
}

/// A discrepancy value together with how it was obtained.
#[derive(Clone, PartialEq, Debug)]
pub struct LpResult {
    pub measure: Measure,
    /// Exponent for [`Measure::Lp`].
    pub p: Option<f64>,
    pub value: LpValue,
}

impl LpResult {
    pub fn mode(&self) -> Mode {
        match self.value {
            LpValue::Exact(_) => Mode::Exact,
            LpValue::Approx { .. } => Mode::Quadrature,
        }
    }

    /// The value as a float (exact values rounded).
    pub fn as_f64(&self) -> f64 {
        match &self.value {
            LpValue::Exact(r) => crate::rational::to_f64(r),
            LpValue::Approx { value, .. } => *value,
        }
    }

    pub fn error_bound(&self) -> f64 {
        match self.value {
            LpValue::Exact(_) => 0.0,
            LpValue::Approx { error_bound, .. } => error_bound,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match &self.value {
            LpValue::Exact(r) => Some(r),
            LpValue::Approx { .. } => None,
        }
    }
}

/// `(1/N) #{z in P : z1 < t1, z2 < t2} - t1 t2`.
pub fn local_discrepancy(p: &PointSet, t: &Anchor) -> Rational {
    let area = &t.t1 * &t.t2;
    if p.is_empty() {
        return -area;
    }
    let d = BigInt::one() << p.scale();
    // z < t  <=>  num < t * 2^scale
    let bx = &t.t1 * Rational::from_integer(d.clone());
    let by = &t.t2 * Rational::from_integer(d);
    let count = p
        .points()
        .iter()
        .filter(|q| {
            Rational::from_integer(BigInt::from(q.x)) < bx && Rational::from_integer(BigInt::from(q.y)) < by
        })
        .count();
    ratio(count as i64, p.len() as i64) - area
}

/// Exact squared L2 discrepancy by Warnock's formula
///
/// `L2^2 = 1/9 - (2/N) sum (1 - x^2)(1 - y^2)/4 + (1/N^2) sum sum (1 - max x)(1 - max y)`,
///
/// evaluated in integers over the common denominator `2^scale`.
pub fn l2_sq_exact(p: &PointSet) -> Rational {
    let n = p.len();
    if n == 0 {
        return ratio(1, 9);
    }
    let s = p.scale();
    let d = 1u64 << s;
    let d2 = BigInt::from(d) * BigInt::from(d);

    let mut single = BigInt::zero();
    for q in p.points() {
        let fx = &d2 - BigInt::from(q.x) * BigInt::from(q.x);
        let fy = &d2 - BigInt::from(q.y) * BigInt::from(q.y);
        single += fx * fy;
    }

    let mut pts: Vec<DyadicPoint> = p.points().to_vec();
    pts.sort_unstable_by_key(|q| q.x);
    let gy: Vec<u64> = pts.iter().map(|q| d - q.y).collect();

    // With points sorted by x, max(x_i, x_k) = x_k for i < k, and
    // 1 - max(y_i, y_k) = min(1 - y_i, 1 - y_k).
    let chunk = (n / (par::threads() * 16)).clamp(1, 1 << 12);
    let partials = par::map_chunks(n, chunk, |range| {
        let mut acc = BigUint::zero();
        for k in range {
            let gk = gy[k];
            let mut row: u128 = 0;
            for &gi in &gy[..k] {
                row += u128::from(gi.min(gk));
            }
            let dx = u128::from(d - pts[k].x);
            let diag = dx * u128::from(gk);
            // 2 * row terms for the ordered pairs, plus the diagonal
            acc += BigUint::from(dx) * BigUint::from(row) * 2u32 + BigUint::from(diag);
        }
        acc
    });
    let pairs: BigUint = partials.into_iter().sum();

    let nn = BigInt::from(n);
    let d4 = &d2 * &d2;
    ratio(1, 9) - Rational::new(single, BigInt::from(2) * &nn * d4)
        + Rational::new(BigInt::from(pairs), &nn * &nn * d2)
}

/// Exact supremum of `|Delta_P|` over the unit square.
///
/// The count is constant on the open cells of the grid spanned by the point
/// coordinates together with 0 and 1, and `t1 t2` is monotone in each
/// variable, so the supremum over a cell is attained as a limit at its lower
/// left corner (count including the corner lines) or its upper right corner
/// (strict count). Both variants are evaluated at every grid point.
pub fn linf_exact(p: &PointSet) -> Rational {
    let n = p.len();
    if n == 0 {
        return int(1);
    }
    let s = p.scale();
    let d = 1u64 << s;
    let grid = |coord: &dyn Fn(&DyadicPoint) -> u64| {
        let mut g: Vec<u64> = p.points().iter().map(coord).collect();
        g.push(0);
        g.push(d);
        g.sort_unstable();
        g.dedup();
        g
    };
    let gx = grid(&|q| q.x);
    let gy = grid(&|q| q.y);
    let mut pts: Vec<(u64, usize)> = p
        .points()
        .iter()
        .map(|q| (q.x, gy.binary_search(&q.y).expect("y on grid")))
        .collect();
    pts.sort_unstable();

    let d2 = u128::from(d) * u128::from(d);
    let nn = n as u128;
    let top_rank = gy.len() - 1; // rank of y = 1
    let chunk = par::chunk_size(gx.len());
    let maxima = par::map_chunks(gx.len(), chunk, |cols| {
        let mut hist = vec![0u32; gy.len()];
        let mut next = pts.partition_point(|&(x, _)| x < gx[cols.start]);
        for &(_, r) in &pts[..next] {
            hist[r] += 1;
        }
        let mut best: u128 = 0;
        for &t1 in &gx[cols] {
            let xt = u128::from(t1);
            // strict count: x < t1, y < t2
            let mut c: u128 = 0;
            for (k, &t2) in gy.iter().enumerate() {
                best = best.max((c * d2).abs_diff(nn * xt * u128::from(t2)));
                c += u128::from(hist[k]);
            }
            while next < pts.len() && pts[next].0 == t1 {
                hist[pts[next].1] += 1;
                next += 1;
            }
            // count including the lines x = t1, y = t2; coordinates equal to 1
            // are never inside [0, t) for t in the unit square
            if t1 < d {
                let mut c: u128 = 0;
                for (k, &t2) in gy.iter().enumerate() {
                    if k < top_rank {
                        c += u128::from(hist[k]);
                    }
                    best = best.max((c * d2).abs_diff(nn * xt * u128::from(t2)));
                }
            }
        }
        best
    });
    let best = maxima.into_iter().max().unwrap_or(0);
    Rational::new(BigInt::from(best), BigInt::from(nn * d2))
}

/// Known closed form of the squared L2 discrepancy of the Hammersley net with
/// `2^n` points.
pub fn hammersley_l2_sq_formula(n: u32) -> Rational {
    let n_r = int(n as i64);
    let inv2n = pow2(-(n as i64));
    let inv4n = pow2(-2 * n as i64);
    let inner = &n_r * &n_r / int(64) + &n_r * ratio(29, 192) + ratio(3, 8)
        - &n_r * &inv2n / int(16)
        + &inv2n / int(4)
        - &inv4n / int(72);
    inner * inv4n
}

/// Closed form of the squared L2 discrepancy of the net with `a = (1, ..., 1)`.
pub fn all_ones_l2_sq_formula(n: u32) -> Rational {
    let n_r = int(n as i64);
    let inv2n = pow2(-(n as i64));
    let inv4n = pow2(-2 * n as i64);
    let inner = &n_r * ratio(5, 192) + ratio(15, 32) + &inv2n / int(4) - &inv4n / int(72);
    inner * inv4n
}

/// Closed form of the star discrepancy of the Hammersley net (valid for `n >= 2`).
pub fn hammersley_linf_formula(n: u32) -> Rational {
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    let inv2n = pow2(-(n as i64));
    (ratio(n as i64, 3) + ratio(13, 9) - int(sign) * ratio(4, 9) * &inv2n) * inv2n
}
