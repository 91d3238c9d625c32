//! Closed forms of the Haar coefficients of the nets selected by `a`.
//!
//! Notation, for a net with `2^n` points:
//!
//! * `a_i` for `1 <= i <= n-1`; `a_n` is read as 1 (since `b_n = t_n`, the
//!   construction is the same for either value) and other indices as 0.
//! * `m1 = sum_{k=1}^{j1} r_k 2^{j1-k}`, `m2 = sum_{k=1}^{j2} s_k 2^{j2-k}`.
//! * `R = r_1 xor ... xor r_{j1}`.
//! * `w` is the greatest index `w <= j2` with `a_w = 1`, when there is one,
//!   and `S = s_w xor ... xor s_{j2}`.
//! * `h = h_n(a)` is the number of zeros among `a_1, ..., a_{n-1}`.
//!
//! Two transcriptions are provided. [`Transcription::Published`] follows the
//! printed statements. [`Transcription::Corrected`] (the default) repairs the
//! four classes where those statements disagree with the point-sum oracle:
//!
//! * `J4`: adds `2^{-n-3} a_{n-1}`.
//! * `J5`: the `R` term carries the factor `a_{n-j1}`, and the last term has
//!   a plus sign.
//! * `J2` with `w` present and `a_{j2+1} = 0`: the third term is
//!   `2^{-n-2 j2+w-4}`, and the last is `2^{-n-2 j2+w-5} a_{j2+2}(1-2S)`.
//! * `J6`: the branch with `a_{j2+1} = 1` has a plus sign. At
//!   `j1 + j2 = n-3` with `a_{j2+2} = 0` every branch gains a boundary term.

use serde::{Deserialize, Serialize};

use super::{classify, linear_part, translations, Case, HaarIndex};
use crate::netgen::{net_from_a, AVector};
use crate::rational::{Dyadic, Rational};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transcription {
    Published,
    #[default]
    Corrected,
}

/// Implied constants of the bounded classes.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BoundConstants {
    /// `|mu| <= k7 2^{-n-j1-j2}` on `J7`.
    pub k7: Dyadic,
    /// `|mu| <= k8 2^{-2n}` on `J8`.
    pub k8: Dyadic,
}

impl Default for BoundConstants {
    /// At most four points in a `J7` box and two in a `J8` box, each hat
    /// product at most 1, plus the linear part.
    fn default() -> Self {
        BoundConstants { k7: Dyadic::new(5, 2), k8: Dyadic::new(5, 1) }
    }
}

/// Deliberate corruption used to check that verification catches errors.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Fault {
    /// Uses `h + 6` in place of `h + 5` in the `J1` value.
    CornerOffset,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct ClosedConfig {
    pub transcription: Transcription,
    pub bounds: BoundConstants,
    pub fault: Option<Fault>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClosedValue {
    Exact(Dyadic),
    /// `|mu| <= bound`; `empty` is the exact value when the box holds no
    /// point in its interior.
    Bound { bound: Dyadic, empty: Option<Dyadic> },
}

impl ClosedValue {
    /// Whether an oracle value is consistent with this closed form.
    pub fn accepts(&self, oracle: Dyadic) -> bool {
        match *self {
            ClosedValue::Exact(v) => v == oracle,
            ClosedValue::Bound { empty: Some(v), .. } => v == oracle,
            ClosedValue::Bound { bound, empty: None } => oracle.abs() <= bound,
        }
    }

    pub fn exact(&self) -> Option<Dyadic> {
        match *self {
            ClosedValue::Exact(v) | ClosedValue::Bound { empty: Some(v), .. } => Some(v),
            ClosedValue::Bound { empty: None, .. } => None,
        }
    }
}

/// A class together with the digit quantities its formula uses.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CaseLabel {
    pub case: Case,
    pub w: Option<u32>,
    pub r_parity: Option<u8>,
    pub s_parity: Option<u8>,
    pub eps: Option<Dyadic>,
}

impl CaseLabel {
    fn plain(case: Case) -> Self {
        CaseLabel { case, w: None, r_parity: None, s_parity: None, eps: None }
    }
}

/// `2^{-n-3}(h + 5) + 2^{-2n-2}`.
pub fn corner_coefficient(a: &AVector) -> Rational {
    corner_dyadic(a, 5).to_rational()
}

fn corner_dyadic(a: &AVector, offset: i128) -> Dyadic {
    let n = a.n() as i32;
    Dyadic::pow2(-n - 3) * (a.h() as i128 + offset) + Dyadic::pow2(-2 * n - 2)
}

/// Closed form of one coefficient with the default configuration.
pub fn haar_coeff_closed(a: &AVector, idx: &HaarIndex) -> ClosedValue {
    ClosedForms::new(a, ClosedConfig::default()).eval(idx).0
}

/// Closed-form evaluator for one `a`, caching the net for box occupancy
/// checks of the bounded classes.
#[derive(Clone, Debug)]
pub struct ClosedForms {
    a: AVector,
    n: u32,
    config: ClosedConfig,
    /// y numerator of the point with x numerator `X`, and the inverse.
    y_of_x: Vec<u64>,
    x_of_y: Vec<u64>,
}

fn p2(e: i32) -> Dyadic {
    Dyadic::pow2(e)
}

fn xor_all(bits: impl IntoIterator<Item = u8>) -> u8 {
    bits.into_iter().fold(0, |acc, b| acc ^ b)
}

/// `1 - 2b` for a bit `b`.
fn pm(b: u8) -> i128 {
    1 - 2 * b as i128
}

impl ClosedForms {
    pub fn new(a: &AVector, config: ClosedConfig) -> Self {
        let net = net_from_a(a);
        let n = a.n() as u32;
        let mut y_of_x = vec![0; 1 << n];
        let mut x_of_y = vec![0; 1 << n];
        for q in net.points() {
            y_of_x[q.x as usize] = q.y;
            x_of_y[q.y as usize] = q.x;
        }
        ClosedForms { a: a.clone(), n, config, y_of_x, x_of_y }
    }

    pub fn config(&self) -> &ClosedConfig {
        &self.config
    }

    /// `a_i` with `a_n = 1` and zero outside `1..=n`.
    fn av(&self, i: i32) -> u8 {
        let n = self.n as i32;
        if i == n {
            1
        } else if i >= 1 && i < n {
            self.a.get(i as usize)
        } else {
            0
        }
    }

    pub fn eval(&self, idx: &HaarIndex) -> (ClosedValue, CaseLabel) {
        let n = self.n as i32;
        let (j1, j2) = (idx.j1, idx.j2);
        let case = classify(j1, j2, self.n);
        let corrected = self.config.transcription == Transcription::Corrected;
        // r_k and s_k, 1-based
        let r = |k: i32| ((idx.m1 >> (j1 - k)) & 1) as u8;
        let s = |k: i32| ((idx.m2 >> (j2 - k)) & 1) as u8;
        let exact = |v: Dyadic| ClosedValue::Exact(v);
        match case {
            Case::J1 => {
                let offset = if self.config.fault == Some(Fault::CornerOffset) { 6 } else { 5 };
                (exact(corner_dyadic(&self.a, offset)), CaseLabel::plain(case))
            }
            Case::J3 => (exact(p2(-2 * j1.max(j2) - 3)), CaseLabel::plain(case)),
            Case::J9 => (exact(-p2(-2 * j1 - 2 * j2 - 4)), CaseLabel::plain(case)),
            Case::J4 => {
                let mut v = p2(-2 * n - 2) - p2(-n - 3);
                if corrected {
                    v = v + p2(-n - 3) * self.av(n - 1) as i128;
                }
                (exact(v), CaseLabel::plain(case))
            }
            Case::J5 => {
                let big_r = xor_all((1..=j1).map(r));
                let mut eps = Dyadic::new(r(1) as i128, n as u32);
                let mut prefix = r(1);
                for k in 2..=j1 {
                    let t = r(k) ^ (self.av(n + 1 - k) & prefix);
                    eps = eps + p2(-(n + 1 - k)) * t as i128;
                    prefix ^= r(k);
                }
                let a_last = self.av(n - j1 - 1) as i128;
                let base = p2(-2 * n - 2) - p2(-n - j1 - 3) + p2(-2 * j1 - 2) * eps;
                let v = if corrected {
                    base - p2(-2 * n - 1) * (self.av(n - j1) & big_r) as i128
                        + p2(-n - j1 - 3) * (a_last * pm(big_r))
                } else {
                    base - p2(-2 * n - 1) * big_r as i128 - p2(-n - j1 - 3) * (a_last * pm(big_r))
                };
                let label = CaseLabel { r_parity: Some(big_r), eps: Some(eps), ..CaseLabel::plain(case) };
                (exact(v), label)
            }
            Case::J2 => self.case2(j2, &s, corrected),
            Case::J6 => {
                let big_r = xor_all((1..=j1).map(r));
                let a_r = if j1 == 0 { 0 } else { self.av(n - j1) & big_r };
                let a1 = self.av(j2 + 1);
                let edge = corrected && j1 + j2 == n - 3 && self.av(j2 + 2) == 0;
                let e = |v: Dyadic| if edge { v } else { Dyadic::ZERO };
                let w = (1..=j2).rev().find(|&k| self.av(k) == 1);
                let mut label = CaseLabel { r_parity: Some(big_r), ..CaseLabel::plain(case) };
                let v = match w {
                    None => {
                        p2(-2 * n - 2) * (pm(a_r) * (1 - a1 as i128))
                            + e(p2(-2 * n - 1) * (a1 as i128 * pm(big_r)))
                    }
                    Some(w) => {
                        let big_s = xor_all((w..=j2).map(s));
                        label.w = Some(w as u32);
                        label.s_parity = Some(big_s);
                        if a1 == 0 {
                            p2(-2 * n - 2) * pm(a_r) + e(p2(-2 * n - 2 - j2 + w) * pm(big_s ^ big_r))
                        } else if corrected {
                            p2(-2 * n - 3 - j2 + w) * (pm(a_r) * pm(big_s)) + e(p2(-2 * n - 1) * pm(big_r))
                        } else {
                            -p2(-2 * n - j2 + w - 3) * (pm(a_r) * pm(big_s))
                        }
                    }
                };
                (exact(v), label)
            }
            Case::J7 => {
                let bound = self.config.bounds.k7 * p2(-n - j1 - j2);
                let empty = !self.box_occupied(idx);
                (
                    ClosedValue::Bound { bound, empty: empty.then(|| linear_part(j1, j2)) },
                    CaseLabel::plain(case),
                )
            }
            Case::J8 => {
                let bound = self.config.bounds.k8 * p2(-2 * n);
                let empty = !self.box_occupied(idx);
                (
                    ClosedValue::Bound { bound, empty: empty.then(|| linear_part(j1, j2)) },
                    CaseLabel::plain(case),
                )
            }
        }
    }

    fn case2(&self, j2: i32, s: &dyn Fn(i32) -> u8, corrected: bool) -> (ClosedValue, CaseLabel) {
        let n = self.n as i32;
        let a1 = self.av(j2 + 1) as i128;
        let a2 = self.av(j2 + 2) as i128;
        let ones: Vec<i32> = (1..=j2).filter(|&k| self.av(k) == 1).collect();
        let Some(&w) = ones.last() else {
            let digits: Dyadic = (1..=j2).map(|k| p2(-(n + 1 - k)) * s(k) as i128).sum();
            let v = p2(-2 * n - 2 * j2 - 4)
                * (-(p2(2 * j2 + 2) * (a1 - 1)) + p2(n + j2) * (a1 * a2 - 2) + p2(2 * n + 2) * digits);
            let label = CaseLabel { eps: Some(digits), ..CaseLabel::plain(Case::J2) };
            return (ClosedValue::Exact(v), label);
        };
        // digits t_k of the points in the box: t_k = s_k where a_k = 0, and
        // t_{k_i} = s_{k_i} xor ... xor s_{k_{i+1}} for consecutive ones
        let mut t = vec![0u8; j2 as usize + 1];
        for k in 1..=j2 {
            if self.av(k) == 0 {
                t[k as usize] = s(k);
            }
        }
        for pair in ones.windows(2) {
            t[pair[0] as usize] = xor_all((pair[0]..=pair[1]).map(s));
        }
        let eps: Dyadic = (1..=j2).filter(|&k| k != w).map(|k| p2(-(n + 1 - k)) * t[k as usize] as i128).sum();
        let big_s = xor_all((w..=j2).map(s));
        let v = if a1 == 0 {
            let head = p2(-2 * n - 2) - p2(-n - j2 - 3) + p2(-2 * j2 - 2) * eps;
            if corrected {
                head + p2(-n - 2 * j2 + w - 4) + p2(-n - 2 * j2 + w - 5) * (a2 * pm(big_s))
            } else {
                head + p2(-n - 2 * j2 + w - 5) + p2(-2 * n - j2 + w - 4) * (a2 * pm(big_s))
            }
        } else {
            -p2(-n - j2 - 3) + p2(-j2 + w - 2 * n - 3) + p2(-2 * j2 - n + w - 4) + p2(-2 * j2 - 2) * eps
                - p2(-2 * n - j2 + w - 2) * big_s as i128
                + p2(-n - j2 - 4) * a2
        };
        let label = CaseLabel {
            w: Some(w as u32),
            s_parity: Some(big_s),
            eps: Some(eps),
            ..CaseLabel::plain(Case::J2)
        };
        (ClosedValue::Exact(v), label)
    }

    /// Whether some point of the net lies where the coefficient's point sum
    /// is nonzero (interior of the box in every axis with `j >= 0`).
    fn box_occupied(&self, idx: &HaarIndex) -> bool {
        let n = self.n as i32;
        let inside = |j: i32, m: u64, v: u64| -> bool {
            if j < 0 {
                return true;
            }
            // v / 2^n strictly inside (m / 2^j, (m+1) / 2^j)
            let lo = m << (n - j);
            let hi = (m + 1) << (n - j);
            v > lo && v < hi
        };
        let scan = |j: i32, m: u64, table: &[u64], other_j: i32, other_m: u64| -> bool {
            if j < 0 {
                return (0..1u64 << n).any(|v| inside(other_j, other_m, table[v as usize]));
            }
            let lo = m << (n - j);
            let hi = (m + 1) << (n - j);
            (lo + 1..hi).any(|v| inside(other_j, other_m, table[v as usize]))
        };
        debug_assert!(idx.j1 < n && idx.j2 < n);
        if idx.j1 >= 0 {
            scan(idx.j1, idx.m1, &self.y_of_x, idx.j2, idx.m2)
        } else {
            scan(idx.j2, idx.m2, &self.x_of_y, idx.j1, idx.m1)
        }
    }

    /// Closed forms for every translation of level `j`, in `m1`-major order.
    pub fn eval_level(&self, j1: i32, j2: i32) -> Vec<(HaarIndex, ClosedValue, CaseLabel)> {
        let mut out = Vec::with_capacity((translations(j1) * translations(j2)) as usize);
        for m1 in 0..translations(j1) {
            for m2 in 0..translations(j2) {
                let idx = HaarIndex { j1, j2, m1, m2 };
                let (v, l) = self.eval(&idx);
                out.push((idx, v, l));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn idx(j1: i32, j2: i32, m1: u64, m2: u64) -> HaarIndex {
        HaarIndex::new(j1, j2, m1, m2).unwrap()
    }

    #[test]
    fn corner_examples() {
        let a = AVector::parse("010").unwrap();
        assert_eq!(haar_coeff_closed(&a, &idx(-1, -1, 0, 0)).exact().unwrap().to_rational(), ratio(57, 1024));
        let a = AVector::parse("").unwrap();
        assert_eq!(haar_coeff_closed(&a, &idx(-1, -1, 0, 0)).exact().unwrap().to_rational(), ratio(3, 8));
        assert_eq!(corner_coefficient(&AVector::parse("11").unwrap()), ratio(21, 256));
        for n in 1..=8 {
            let z = AVector::zeros(n).unwrap();
            let n = n as i64;
            let expected = ratio(n + 4, 1 << (n + 3)) + ratio(1, 1 << (2 * n + 2));
            assert_eq!(corner_coefficient(&z), expected);
        }
    }

    #[test]
    fn linear_classes() {
        let a = AVector::parse("0110").unwrap();
        for k in 5..9 {
            let v = haar_coeff_closed(&a, &idx(k, -1, 3, 0));
            assert_eq!(v, ClosedValue::Exact(Dyadic::pow2(-2 * k - 3)));
            let v = haar_coeff_closed(&a, &idx(-1, k, 0, 1));
            assert_eq!(v, ClosedValue::Exact(Dyadic::pow2(-2 * k - 3)));
        }
        assert_eq!(haar_coeff_closed(&a, &idx(5, 0, 0, 0)), ClosedValue::Exact(-Dyadic::pow2(-14)));
    }

    #[test]
    fn transcriptions_differ_only_where_corrected() {
        let a = AVector::parse("1111").unwrap();
        let published = ClosedForms::new(&a, ClosedConfig { transcription: Transcription::Published, ..Default::default() });
        let corrected = ClosedForms::new(&a, ClosedConfig::default());
        // J4 with a_{n-1} = 1
        assert_ne!(published.eval(&idx(0, -1, 0, 0)).0, corrected.eval(&idx(0, -1, 0, 0)).0);
        // J1 and J3 are shared
        assert_eq!(published.eval(&idx(-1, -1, 0, 0)).0, corrected.eval(&idx(-1, -1, 0, 0)).0);
        assert_eq!(published.eval(&idx(6, -1, 1, 0)).0, corrected.eval(&idx(6, -1, 1, 0)).0);
    }

    #[test]
    fn fault_changes_corner() {
        let a = AVector::parse("01").unwrap();
        let faulty = ClosedForms::new(&a, ClosedConfig { fault: Some(Fault::CornerOffset), ..Default::default() });
        assert_ne!(faulty.eval(&idx(-1, -1, 0, 0)).0, haar_coeff_closed(&a, &idx(-1, -1, 0, 0)));
    }
}
