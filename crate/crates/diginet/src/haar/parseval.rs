//! Parseval identity and the truncated square function.
//!
//! With the L-infinity normalized Haar functions,
//! `L2^2 = sum_j 2^{|j|} sum_m mu_{j,m}^2` and
//! `S(t)^2 = sum_j 2^{2|j|} sum_m mu_{j,m}^2 1_{I_{j,m}}(t)`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{level, linear_part, oracle_level, translations};
use crate::discrepancy::l2_sq_exact;
use crate::error::{Error, Result};
use crate::netgen::{net_from_a, AVector, PointSet};
use crate::par;
use crate::rational::{pow2, ratio, serde_rational, Rational};

/// Largest `n` accepted by [`parseval_check`].
pub const DEFAULT_PARSEVAL_CAP: usize = 8;

/// Largest level cap of [`square_function_lp`] (a `2^L x 2^L` grid).
pub const MAX_SQUARE_FUNCTION_LEVEL: u32 = 11;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    pub equal: bool,
}

/// `sum 2^{|j|} sum_m mu^2` over all `j` with `j1 >= s` or `j2 >= s`, where
/// every coefficient equals its linear part.
///
/// Each such level contributes `4^{|j|} lin(j)^2`: `2^{-2k-6}` on the rays
/// `(k,-1)`, `(-1,k)` and `2^{-2 j1 - 2 j2 - 8}` when both are nonnegative.
pub fn linear_tail(s: u32) -> Rational {
    let s = s as i64;
    let rays = pow2(-2 * s - 3) * ratio(1, 3);
    // sum over j1, j2 >= 0 minus the part with both below s
    let inner = Rational::from_integer(BigInt::from(1)) - pow2(-2 * s);
    let quad = pow2(-8) * ratio(16, 9) * (Rational::from_integer(BigInt::from(1)) - &inner * &inner);
    rays + quad
}

/// Both sides of the identity for a set of `2^k` points with coordinates on
/// the grid `2^{-s}`.
pub fn parseval_for_set(p: &PointSet) -> Result<ParsevalReport> {
    let s = p.scale() as i32;
    let lhs = l2_sq_exact(p);
    let levels: Vec<(i32, i32)> = (-1..s).flat_map(|j1| (-1..s).map(move |j2| (j1, j2))).collect();
    let parts = par::map_collect(levels.len(), |i| {
        let (j1, j2) = levels[i];
        oracle_level(p, j1, j2).map(|lv| lv.sum_of_squares() * pow2(level(j1, j2) as i64))
    });
    let mut rhs = linear_tail(s as u32);
    for part in parts {
        rhs += part?;
    }
    let equal = lhs == rhs;
    Ok(ParsevalReport { lhs, rhs, equal })
}

pub fn parseval_check(a: &AVector) -> Result<ParsevalReport> {
    parseval_check_with_cap(a, DEFAULT_PARSEVAL_CAP)
}

pub fn parseval_check_with_cap(a: &AVector, cap: usize) -> Result<ParsevalReport> {
    if a.n() > cap {
        return Err(Error::InvalidArgument(format!("n = {} exceeds the Parseval cap {cap}", a.n())));
    }
    parseval_for_set(&net_from_a(a))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareFunction {
    /// `||S_L||_p` for the truncation to `|j| <= L`.
    pub value: f64,
    /// Upper bound on `||S - S_L||_p`.
    pub tail_bound: f64,
    pub level_cap: u32,
}

/// `L_p` norm of the square function truncated to `|j| <= level_cap`.
///
/// `S_L` is constant on the cells of the `2^L` grid. The omitted part
/// `R^2 = S^2 - S_L^2` is bounded pointwise by the sum over omitted levels of
/// `2^{2|j|} max_m mu_{j,m}^2`, and `|S - S_L| <= R`.
pub fn square_function_lp(set: &PointSet, p: f64, level_cap: u32) -> Result<SquareFunction> {
    if p.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p = {p} must lie in (1, inf)")));
    }
    let s = set.scale();
    if level_cap < s {
        return Err(Error::InvalidArgument(format!("level cap {level_cap} below the scale {s}")));
    }
    if level_cap > MAX_SQUARE_FUNCTION_LEVEL {
        return Err(Error::Infeasible(format!(
            "level cap {level_cap} exceeds {MAX_SQUARE_FUNCTION_LEVEL}"
        )));
    }
    let l = level_cap as i32;
    let levels: Vec<(i32, i32)> = (-1..=l)
        .flat_map(|j1| (-1..=l).map(move |j2| (j1, j2)))
        .filter(|&(j1, j2)| level(j1, j2) <= level_cap)
        .collect();
    let tables = par::map_collect(levels.len(), |i| {
        let (j1, j2) = levels[i];
        let lv = oracle_level(set, j1, j2)?;
        let w = pow2_f64(2 * level(j1, j2) as i32);
        let mut table = vec![w * lv.linear().square().to_f64(); lv.box_count() as usize];
        for (m1, m2, v) in lv.nonlinear() {
            table[(m1 * translations(j2) + m2) as usize] = w * v.square().to_f64();
        }
        Ok((j1, j2, table))
    });
    let tables: Vec<(i32, i32, Vec<f64>)> = tables.into_iter().collect::<Result<_>>()?;

    let side = 1usize << level_cap;
    let rows = par::map_collect(side, |cx| {
        let mut acc = 0.0;
        for cy in 0..side {
            let mut sq = 0.0;
            for (j1, j2, table) in &tables {
                let m1 = if *j1 < 0 { 0 } else { cx >> (l - j1) };
                let m2 = if *j2 < 0 { 0 } else { cy >> (l - j2) };
                sq += table[m1 * translations(*j2) as usize + m2];
            }
            acc += sq.sqrt().powf(p);
        }
        acc
    });
    let mean = rows.iter().sum::<f64>() / (side * side) as f64;
    let value = mean.powf(1.0 / p);

    let tail_bound = omitted_bound_sq(set, level_cap)?.max(0.0).sqrt();
    Ok(SquareFunction { value, tail_bound, level_cap })
}

fn pow2_f64(e: i32) -> f64 {
    2f64.powi(e)
}

/// `sum over |j| > L of 2^{2|j|} max_m mu_{j,m}^2`, for `L >= s`.
fn omitted_bound_sq(set: &PointSet, cap: u32) -> Result<f64> {
    let s = set.scale() as i32;
    let big_l = cap as i32;
    // all-linear values: sum_{t > L} (t+1) 2^{-2t-8} + 2 sum_{k > L} 2^{-2k-6}
    let x = 0.25f64;
    let m = (big_l + 1) as f64;
    let quad = pow2_f64(-8) * x.powi(big_l + 1) * ((m + 1.0) - m * x) / ((1.0 - x) * (1.0 - x));
    let rays = 2.0 * pow2_f64(-2 * (big_l + 1) - 6) / (1.0 - x);
    let mut total = quad + rays;
    // omitted levels with both j_i below s are not purely linear
    for j1 in 0..s {
        for j2 in 0..s {
            if j1 + j2 <= big_l {
                continue;
            }
            let w = pow2_f64(2 * (j1 + j2));
            let lv = oracle_level(set, j1, j2)?;
            total -= w * linear_part(j1, j2).square().to_f64();
            total += w * lv.max_abs().square().to_f64();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::linear_part_rational;
    use crate::netgen::{generate_net, GeneratorSpec};
    use crate::rational::to_f64;

    #[test]
    fn tail_matches_partial_sums() {
        for s in 0..6u32 {
            let si = s as i32;
            let mut partial = Rational::from_integer(BigInt::from(0));
            let far = si + 40;
            for j1 in -1..far {
                for j2 in -1..far {
                    if j1 < si && j2 < si {
                        continue;
                    }
                    let lin = linear_part_rational(j1, j2);
                    // 2^{|j|} weight times 2^{|j|} translations
                    partial += &lin * &lin * pow2(2 * level(j1, j2) as i64);
                }
            }
            let exact = linear_tail(s);
            let gap = to_f64(&(exact.clone() - partial));
            assert!((0.0..1e-20).contains(&gap), "s = {s}: {gap}");
        }
    }

    #[test]
    fn omitted_geometric_part_matches_partial_sums() {
        for cap in 0..6i32 {
            let mut partial = 0.0;
            for j1 in -1..80 {
                for j2 in -1..80 {
                    if level(j1, j2) as i32 > cap {
                        let w = pow2_f64(2 * level(j1, j2) as i32);
                        partial += w * linear_part(j1, j2).square().to_f64();
                    }
                }
            }
            let empty = PointSet::from_points(0, vec![]).unwrap();
            let bound = omitted_bound_sq(&empty, cap as u32).unwrap();
            assert!((bound - partial).abs() <= 1e-12 * partial, "cap {cap}");
        }
    }

    #[test]
    fn examples() {
        let ham1 = net_from_a(&AVector::parse("").unwrap());
        let r = parseval_for_set(&ham1).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, ratio(91, 576));
        let r = parseval_check(&AVector::parse("11").unwrap()).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, ratio(2663, 294912));
        assert!(parseval_check(&AVector::zeros(9).unwrap()).is_err());
    }

    #[test]
    fn square_function_close_to_l2() {
        let ham2 = generate_net(&GeneratorSpec::hammersley(2).unwrap()).unwrap();
        let exact = to_f64(&l2_sq_exact(&ham2)).sqrt();
        let sf = square_function_lp(&ham2, 2.0, 8).unwrap();
        assert!(sf.value <= exact + 1e-12);
        assert!(exact - sf.value <= sf.tail_bound + 1e-12, "{} {} {}", exact, sf.value, sf.tail_bound);
        let q = square_function_lp(&ham2, 1.5, 8).unwrap();
        let r = square_function_lp(&ham2, 3.0, 8).unwrap();
        assert!(q.value <= sf.value && sf.value <= r.value);
        assert!(square_function_lp(&ham2, 1.0, 8).is_err());
        assert!(square_function_lp(&ham2, 2.0, 1).is_err());
    }
}
