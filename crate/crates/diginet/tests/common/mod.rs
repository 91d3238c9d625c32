//! Direct integration of the discrepancy function over a fine dyadic grid.
//!
//! On a cell `[u, u+1) x [v, v+1)` (units of `2^-K`, `K >= s`) the count
//! part of `Delta` is constant, so `Delta^2` and `Delta * h` integrate in
//! closed form. Everything is kept in integers.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;

use diginet::haar::HaarIndex;
use diginet::netgen::{DyadicPoint, PointSet};

pub struct Grid {
    k: u32,
    n: i128,
    /// `counts[u * side + v]`: points with `x <= u` and `y <= v` (grid units).
    counts: Vec<i128>,
}

impl Grid {
    pub fn new(p: &PointSet, k: u32) -> Self {
        assert!(k >= p.scale() && k <= 12);
        let side = 1usize << k;
        let shift = k - p.scale();
        let mut hist = vec![0i128; side * side];
        for q in p.points() {
            let (x, y) = ((q.x << shift) as usize, (q.y << shift) as usize);
            // coordinates equal to 1 are never inside [0, t)
            if x < side && y < side {
                hist[x * side + y] += 1;
            }
        }
        let mut counts = hist;
        for u in 0..side {
            for v in 0..side {
                let mut c = counts[u * side + v];
                if u > 0 {
                    c += counts[(u - 1) * side + v];
                }
                if v > 0 {
                    c += counts[u * side + v - 1];
                }
                if u > 0 && v > 0 {
                    c -= counts[(u - 1) * side + v - 1];
                }
                counts[u * side + v] = c;
            }
        }
        Grid { k, n: p.len() as i128, counts }
    }

    fn side(&self) -> usize {
        1 << self.k
    }

    /// `integral of Delta^2` over the unit square.
    pub fn l2_sq(&self) -> BigRational {
        // 18 N^2 2^{6K} times the cell integral of (C/N - t1 t2)^2
        let d2 = 1i128 << (2 * self.k);
        let n = self.n;
        let mut total = BigInt::from(0);
        for u in 0..self.side() {
            let mut row = 0i128;
            let (su, qu) = (2 * u as i128 + 1, 3 * (u as i128) * (u as i128) + 3 * u as i128 + 1);
            for v in 0..self.side() {
                let c = self.counts[u * self.side() + v];
                let (sv, qv) = (2 * v as i128 + 1, 3 * (v as i128) * (v as i128) + 3 * v as i128 + 1);
                row += 18 * c * c * d2 * d2 - 9 * n * c * su * sv * d2 + 2 * n * n * qu * qv;
            }
            total += row;
        }
        let den = BigInt::from(18) * BigInt::from(n) * BigInt::from(n) * (BigInt::from(1) << (6 * self.k));
        BigRational::new(total, den)
    }

    /// `integral of Delta(t) h_{j1,m1}(t1) h_{j2,m2}(t2)`; needs `K > j1, j2`.
    pub fn haar(&self, idx: &HaarIndex) -> BigRational {
        assert!(idx.j1 < self.k as i32 && idx.j2 < self.k as i32);
        let d2 = 1i128 << (2 * self.k);
        let mut total = 0i128;
        for u in 0..self.side() {
            let h1 = hat_sign(idx.j1, idx.m1, u, self.k);
            if h1 == 0 {
                continue;
            }
            for v in 0..self.side() {
                let h2 = hat_sign(idx.j2, idx.m2, v, self.k);
                if h2 == 0 {
                    continue;
                }
                let c = self.counts[u * self.side() + v];
                // 4 N 2^{4K} times the cell integral of (C/N - t1 t2)
                let cell = 4 * c * d2 - self.n * (2 * u as i128 + 1) * (2 * v as i128 + 1);
                total += (h1 * h2) as i128 * cell;
            }
        }
        let den = BigInt::from(4) * BigInt::from(self.n) * (BigInt::from(1) << (4 * self.k));
        BigRational::new(BigInt::from(total), den)
    }
}

/// Value of `h_{j,m}` on the grid cell `[c, c+1) 2^{-K}`.
fn hat_sign(j: i32, m: u64, c: usize, k: u32) -> i32 {
    if j < 0 {
        return 1;
    }
    let c = c as u64;
    let width = 1u64 << (k as i32 - j);
    if c / width != m {
        return 0;
    }
    if (c % width) < width / 2 {
        1
    } else {
        -1
    }
}

/// Every index with `j_i >= -1` and `max(0,j1) + max(0,j2) <= level`.
pub fn indices_up_to(level: u32) -> Vec<HaarIndex> {
    let l = level as i32;
    let mut out = Vec::new();
    for j1 in -1..=l {
        for j2 in -1..=l {
            if j1.max(0) + j2.max(0) > l {
                continue;
            }
            for m1 in 0..1u64 << j1.max(0) {
                for m2 in 0..1u64 << j2.max(0) {
                    out.push(HaarIndex::new(j1, j2, m1, m2).unwrap());
                }
            }
        }
    }
    out
}

/// A deterministic corpus of small sets: nets, symmetrized nets, and
/// scattered sets of every size up to 16 (not only powers of two).
pub fn small_sets() -> Vec<PointSet> {
    use diginet::netgen::{net_from_a, symmetrize, AVector};
    use rand::{Rng, SeedableRng};

    let mut sets = vec![PointSet::from_points(0, vec![DyadicPoint { x: 0, y: 0 }]).unwrap()];
    for n in 1..=4 {
        for a in AVector::all(n) {
            sets.push(net_from_a(&a));
        }
    }
    for n in 1..=3 {
        for a in AVector::all(n) {
            sets.push(symmetrize(&net_from_a(&a)).unwrap());
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    for size in 1..=16 {
        let scale = rng.random_range(0..=4u32);
        let d = 1u64 << scale;
        let pts = (0..size).map(|_| DyadicPoint { x: rng.random_range(0..=d), y: rng.random_range(0..=d) }).collect();
        sets.push(PointSet::from_points(scale, pts).unwrap());
    }
    sets
}
