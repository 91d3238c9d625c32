//! Haar coefficients as finite sums over the points.
//!
//! With `N` points, hats `hat_{j,m}(z) = 1 - |2m + 1 - 2^{j+1} z|` on the
//! interior of `I_{j,m}` (zero elsewhere, in particular on its end points):
//!
//! * `j = (-1,-1)`: `(1/N) sum (1 - z1)(1 - z2) - 1/4`
//! * `j = (j1,-1)`: `-(1/(N 2^{j1+1})) sum hat_{j1,m1}(z1)(1 - z2) + 2^{-2 j1 - 3}`
//! * `j = (-1,j2)`: the same with the coordinates exchanged
//! * `j1, j2 >= 0`: `(1/(N 2^{j1+j2+2})) sum hat(z1) hat(z2) - 2^{-2 j1 - 2 j2 - 4}`

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{linear_part, linear_part_rational, translations, HaarIndex};
use crate::error::{Error, Result};
use crate::netgen::PointSet;
use crate::rational::{Dyadic, Rational};

/// Scaled hat: `2^s hat_{j,m}(v / 2^s)` restricted to the open interval, or
/// the weight `2^s - v` of an axis with `j = -1`.
fn weight(j: i32, m: u64, v: u64, s: u32) -> i128 {
    let d = 1i128 << s;
    if j < 0 {
        return d - v as i128;
    }
    let centre = (2 * m as i128 + 1) << s;
    let pos = (v as i128) << (j + 1);
    (d - (centre - pos).abs()).max(0)
}

/// `mu_{j,m}` for any finite point set, exactly.
pub fn haar_coeff_oracle(p: &PointSet, idx: &HaarIndex) -> Rational {
    let lin = linear_part_rational(idx.j1, idx.j2);
    if p.is_empty() {
        return lin;
    }
    let s = p.scale();
    let sum: BigInt = p
        .points()
        .iter()
        .map(|q| {
            let w1 = weight(idx.j1, idx.m1, q.x, s);
            let w2 = weight(idx.j2, idx.m2, q.y, s);
            BigInt::from(w1) * BigInt::from(w2)
        })
        .sum();
    let (sign, extra) = prefactor(idx.j1, idx.j2);
    let den = BigInt::from(p.len()) * (BigInt::one() << (extra + 2 * s));
    Rational::new(BigInt::from(sign) * sum, den) + lin
}

/// Sign and the power of two `e` in the prefactor `sign / (N 2^e)`.
fn prefactor(j1: i32, j2: i32) -> (i32, u32) {
    match (j1, j2) {
        (-1, -1) => (1, 0),
        (-1, k) | (k, -1) => (-1, (k + 1) as u32),
        _ => (1, (j1 + j2 + 2) as u32),
    }
}

/// All coefficients of one level `j`, stored sparsely: only boxes that hold
/// at least one point get an entry; the others equal [`LevelCoefficients::linear`].
#[derive(Clone, Debug)]
pub struct LevelCoefficients {
    pub j1: i32,
    pub j2: i32,
    coef: Dyadic,
    linear: Dyadic,
    /// `(m1 * |D_{j2}| + m2, sum)` sorted by key.
    sums: Vec<(u64, i128)>,
}

impl LevelCoefficients {
    pub fn linear(&self) -> Dyadic {
        self.linear
    }

    pub fn box_count(&self) -> u64 {
        translations(self.j1) * translations(self.j2)
    }

    pub fn get(&self, m1: u64, m2: u64) -> Dyadic {
        let key = m1 * translations(self.j2) + m2;
        match self.sums.binary_search_by_key(&key, |e| e.0) {
            Ok(i) => self.coef * self.sums[i].1 + self.linear,
            Err(_) => self.linear,
        }
    }

    /// Coefficients that differ from the linear part, as `(m1, m2, mu)`.
    pub fn nonlinear(&self) -> impl Iterator<Item = (u64, u64, Dyadic)> + '_ {
        let w = translations(self.j2);
        self.sums
            .iter()
            .filter(|e| e.1 != 0)
            .map(move |&(k, s)| (k / w, k % w, self.coef * s + self.linear))
    }

    /// `max_m |mu_{j,m}|`.
    pub fn max_abs(&self) -> Dyadic {
        let mut best = if self.nonlinear().count() as u64 == self.box_count() {
            Dyadic::ZERO
        } else {
            self.linear.abs()
        };
        for (_, _, v) in self.nonlinear() {
            best = best.max(v.abs());
        }
        best
    }

    /// `sum_m mu_{j,m}^2`, exactly.
    pub fn sum_of_squares(&self) -> Rational {
        // sum (c S + l)^2 = c^2 sum S^2 + 2 c l sum S + |D_j| l^2
        let mut s1 = BigInt::zero();
        let mut s2 = BigInt::zero();
        for &(_, s) in &self.sums {
            let b = BigInt::from(s);
            s2 += &b * &b;
            s1 += b;
        }
        let c = self.coef.to_rational();
        let l = self.linear.to_rational();
        let count = Rational::from_integer(BigInt::from(self.box_count()));
        &c * &c * Rational::from_integer(s2)
            + Rational::from_integer(BigInt::from(2)) * &c * &l * Rational::from_integer(s1)
            + count * &l * &l
    }
}

/// All coefficients of level `j` at once, in `O(N log N)`.
///
/// Requires the number of points to be a power of two so that every value is
/// dyadic.
pub fn oracle_level(p: &PointSet, j1: i32, j2: i32) -> Result<LevelCoefficients> {
    HaarIndex::new(j1, j2, 0, 0)?;
    if j1.max(0) + j2.max(0) > 62 {
        return Err(Error::InvalidArgument(format!("level ({j1},{j2}) too fine")));
    }
    let nu = p.log2_len().ok_or_else(|| {
        Error::InvalidArgument(format!("{} points is not a power of two", p.len()))
    })?;
    let s = p.scale();
    let (sign, extra) = prefactor(j1, j2);
    let coef = Dyadic::new(sign as i128, nu + extra + 2 * s);
    let w2 = translations(j2);
    let bucket = |j: i32, v: u64| -> Option<u64> {
        if j < 0 {
            return Some(0);
        }
        let m = ((v as u128) << j >> s) as u64;
        (m < translations(j)).then_some(m)
    };
    let mut entries: Vec<(u64, i128)> = p
        .points()
        .iter()
        .filter_map(|q| {
            let m1 = bucket(j1, q.x)?;
            let m2 = bucket(j2, q.y)?;
            let w = weight(j1, m1, q.x, s) * weight(j2, m2, q.y, s);
            Some((m1 * w2 + m2, w))
        })
        .collect();
    entries.sort_unstable_by_key(|e| e.0);
    let mut sums: Vec<(u64, i128)> = Vec::with_capacity(entries.len());
    for (k, w) in entries {
        match sums.last_mut() {
            Some(last) if last.0 == k => last.1 += w,
            _ => sums.push((k, w)),
        }
    }
    Ok(LevelCoefficients { j1, j2, coef, linear: linear_part(j1, j2), sums })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{generate_net, net_from_a, AVector, DyadicPoint, GeneratorSpec};
    use crate::rational::{pow2, ratio};

    #[test]
    fn examples() {
        let ham1 = generate_net(&GeneratorSpec::hammersley(1).unwrap()).unwrap();
        let corner = HaarIndex::new(-1, -1, 0, 0).unwrap();
        assert_eq!(haar_coeff_oracle(&ham1, &corner), ratio(3, 8));
        let origin = PointSet::from_points(0, vec![DyadicPoint { x: 0, y: 0 }]).unwrap();
        assert_eq!(haar_coeff_oracle(&origin, &corner), ratio(3, 4));
        for n in 1..=5usize {
            for a in AVector::all(n) {
                let p = net_from_a(&a);
                for m in 0..1u64 << n {
                    let idx = HaarIndex::new(n as i32, 0, m, 0).unwrap();
                    assert_eq!(haar_coeff_oracle(&p, &idx), -pow2(-2 * n as i64 - 4));
                }
            }
        }
    }

    #[test]
    fn level_agrees_with_single_index() {
        for bits in ["", "1", "01", "110", "0110"] {
            let p = net_from_a(&AVector::parse(bits).unwrap());
            let n = p.scale() as i32;
            for j1 in -1..=n + 1 {
                for j2 in -1..=n + 1 {
                    let lv = oracle_level(&p, j1, j2).unwrap();
                    let mut total = Rational::zero();
                    for m1 in 0..translations(j1) {
                        for m2 in 0..translations(j2) {
                            let idx = HaarIndex::new(j1, j2, m1, m2).unwrap();
                            let single = haar_coeff_oracle(&p, &idx);
                            assert_eq!(lv.get(m1, m2).to_rational(), single, "{bits} {idx}");
                            total += &single * &single;
                        }
                    }
                    assert_eq!(lv.sum_of_squares(), total);
                }
            }
        }
    }

    #[test]
    fn level_needs_power_of_two() {
        let p = PointSet::from_points(2, (0..3).map(|i| DyadicPoint { x: i, y: i }).collect()).unwrap();
        assert!(oracle_level(&p, 0, 0).is_err());
        let idx = HaarIndex::new(0, 0, 0, 0).unwrap();
        // hat_{0,0} is 0 at 0, 1/2 at 1/4 and 1 at 1/2
        assert_eq!(haar_coeff_oracle(&p, &idx), ratio(5, 48) - ratio(1, 16));
    }
}
