//! Semi-analytic Lp discrepancy.
//!
//! On each cell of the grid spanned by the point coordinates (plus 0 and 1)
//! the discrepancy function is `c - t1 t2` with a constant `c`. The `t2`
//! integral of `|c - t1 t2|^p` over a cell is done in closed form, and the
//! remaining function of `t1` is integrated by adaptive Gauss-Legendre after
//! splitting at the points where the hyperbola `t1 t2 = c` enters or leaves
//! the cell.

use super::quadrature::{Adaptive, Estimate};
use super::{LpResult, LpValue, Measure};
use crate::error::{Error, Result};
use crate::netgen::PointSet;
use crate::par;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct LpOptions {
    /// Gauss-Legendre order of the panel rule.
    pub order: usize,
    /// Bisection depth limit per piece.
    pub max_depth: u32,
    /// Refuse grids with more cells than this.
    pub max_cells: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { order: 10, max_depth: 30, max_cells: 1 << 25 }
    }
}

/// Lp discrepancy with absolute error at most `tol` (default options).
pub fn lp_norm(p: &PointSet, exponent: f64, tol: f64) -> Result<LpResult> {
    lp_norm_with(p, exponent, tol, &LpOptions::default())
}

pub fn lp_norm_with(set: &PointSet, p: f64, tol: f64, opts: &LpOptions) -> Result<LpResult> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must be finite and at least 1")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let grid = Grid::new(set)?;
    if grid.cells() > opts.max_cells {
        return Err(Error::Infeasible(format!(
            "{} quadrature cells exceed the limit {}",
            grid.cells(),
            opts.max_cells
        )));
    }
    let quad = Adaptive::new(opts.order, opts.max_depth);
    let int_p = (p.fract() == 0.0 && p as usize <= quad.rule().exact_degree()).then_some(p as u32);

    // L_p >= L_1 >= |integral of Delta|, which gives a floor for converting
    // a tolerance on L_p into one on the integral of |Delta|^p.
    let floor = grid.mean_abs_lower_bound();
    let mut floor_lp = floor;
    if floor_lp <= 0.0 {
        let pilot = grid.integrate(&quad, p, int_p, 1e-6);
        floor_lp = 0.5 * pilot.value.max(0.0).powf(1.0 / p);
    }
    let mut tol_i = if p == 1.0 { 0.5 * tol } else { 0.5 * tol * p * floor_lp.powf(p - 1.0) };
    if tol_i <= 0.0 {
        tol_i = 0.5 * tol;
    }

    let mut last = None;
    for _ in 0..3 {
        let est = grid.integrate(&quad, p, int_p, tol_i);
        let integral = est.value.max(0.0);
        let lp = integral.powf(1.0 / p);
        let rounding = 4.0 * f64::EPSILON * integral * (grid.cells() as f64).sqrt();
        let err_i = est.error + rounding;
        let err = if p == 1.0 {
            err_i
        } else {
            // L = I^{1/p} is concave in I
            err_i / (p * lp.max(floor_lp).powf(p - 1.0))
        };
        if est.converged && err <= tol {
            return Ok(LpResult {
                measure: Measure::Lp,
                p: Some(p),
                value: LpValue::Approx { value: lp, error_bound: err },
            });
        }
        last = Some((lp, err));
        tol_i *= 0.25 * (tol / err).min(1.0);
    }
    let (estimate, error) = last.expect("at least one pass");
    Err(Error::NoConvergence { estimate, error })
}

struct Grid {
    /// Breakpoints in t1 and t2, as fractions of 1.
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Cell `(i, k)` at `i * ny + k`: points with `x <= xs[i]` and `y <= ys[k]`.
    counts: Vec<u32>,
    n: f64,
    corner: f64,
}

impl Grid {
    fn new(set: &PointSet) -> Result<Self> {
        let d = 1u64 << set.scale();
        let df = d as f64;
        let axis = |f: &dyn Fn(&crate::netgen::DyadicPoint) -> u64| {
            let mut g: Vec<u64> = set.points().iter().map(f).filter(|&v| v < d).collect();
            g.push(0);
            g.push(d);
            g.sort_unstable();
            g.dedup();
            g
        };
        let gx = axis(&|q| q.x);
        let gy = axis(&|q| q.y);
        let nx = gx.len() - 1;
        let ny = gy.len() - 1;
        let cells = nx.checked_mul(ny).ok_or_else(|| Error::Infeasible("grid too large".into()))?;
        if cells > 1 << 30 {
            return Err(Error::Infeasible(format!("{cells} quadrature cells")));
        }
        let mut pts: Vec<(u64, usize)> = set
            .points()
            .iter()
            .filter(|q| q.x < d && q.y < d)
            .map(|q| (q.x, gy.binary_search(&q.y).expect("y on grid")))
            .collect();
        pts.sort_unstable();
        let mut counts = vec![0u32; cells];
        let mut hist = vec![0u32; ny];
        let mut next = 0;
        for i in 0..nx {
            while next < pts.len() && pts[next].0 == gx[i] {
                hist[pts[next].1] += 1;
                next += 1;
            }
            let mut c = 0;
            for k in 0..ny {
                c += hist[k];
                counts[i * ny + k] = c;
            }
        }
        let n = set.len() as f64;
        let corner = if set.is_empty() {
            0.25
        } else {
            let s: f64 = set
                .to_f64()
                .iter()
                .map(|&(x, y)| (1.0 - x) * (1.0 - y))
                .sum();
            (s / n - 0.25).abs()
        };
        Ok(Grid {
            xs: gx.iter().map(|&v| v as f64 / df).collect(),
            ys: gy.iter().map(|&v| v as f64 / df).collect(),
            counts,
            n: n.max(1.0),
            corner,
        })
    }

    fn cells(&self) -> usize {
        self.counts.len()
    }

    /// `|integral of Delta|`, a lower bound for every Lp norm (floating point).
    fn mean_abs_lower_bound(&self) -> f64 {
        self.corner * (1.0 - 1e-12)
    }

    fn integrate(&self, quad: &Adaptive, p: f64, int_p: Option<u32>, tol_i: f64) -> Estimate {
        let nx = self.xs.len() - 1;
        let ny = self.ys.len() - 1;
        let parts = par::map_chunks(nx, par::chunk_size(nx), |cols| {
            let mut acc = Estimate::ZERO;
            for i in cols {
                let (a, b) = (self.xs[i], self.xs[i + 1]);
                for k in 0..ny {
                    let c = self.counts[i * ny + k] as f64 / self.n;
                    let e = cell_integral(quad, p, int_p, c, a, b, self.ys[k], self.ys[k + 1], tol_i);
                    acc = acc.merge(e);
                }
            }
            acc
        });
        parts.into_iter().fold(Estimate::ZERO, Estimate::merge)
    }
}

#[allow(clippy::too_many_arguments)]
fn cell_integral(
    quad: &Adaptive,
    p: f64,
    int_p: Option<u32>,
    c: f64,
    a: f64,
    b: f64,
    y0: f64,
    y1: f64,
    tol_i: f64,
) -> Estimate {
    let dy = y1 - y0;
    let f = |t1: f64| inner_integral(p, int_p, c, t1, y0, y1);
    // u = c - t1 t2 vanishes on the cell's lower edge at t1 = c / y0 and on
    // its upper edge at t1 = c / y1
    let mut cuts = [a, b, b, b];
    let mut m = 1;
    for y in [y1, y0] {
        if y > 0.0 && c > 0.0 {
            let t = c / y;
            if t > a && t < b {
                cuts[m] = t;
                m += 1;
            }
        }
    }
    cuts[m] = b;
    let mut out = Estimate::ZERO;
    for w in cuts[..=m].windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let same_sign = (c - mid * y0) * (c - mid * y1) >= 0.0;
        if same_sign && int_p.is_some() {
            // polynomial of degree p in t1: the rule is exact
            out.value += quad.rule().integrate(&f, lo, hi);
        } else {
            out = out.merge(quad.integrate(&f, lo, hi, tol_i * (hi - lo) * dy));
        }
    }
    out
}

/// `integral over [y0, y1] of |c - t1 t2|^p dt2`.
fn inner_integral(p: f64, int_p: Option<u32>, c: f64, t1: f64, y0: f64, y1: f64) -> f64 {
    let dy = y1 - y0;
    let u0 = c - t1 * y0;
    let u1 = c - t1 * y1;
    if t1 <= 0.0 {
        return c.abs().powf(p) * dy;
    }
    let q = p + 1.0;
    if u0 * u1 >= 0.0 {
        let (g0, g1) = (u0.abs(), u1.abs());
        if let Some(k) = int_p {
            // (g0^{k+1} - g1^{k+1}) / ((k+1) t1) with |g0 - g1| = t1 dy
            return dy * power_sum(g0, g1, k) / q;
        }
        let big = g0.max(g1);
        if big == 0.0 {
            return 0.0;
        }
        let r = -t1 * dy / big;
        return big.powf(q) * -(q * r.ln_1p()).exp_m1() / (q * t1);
    }
    (u0.abs().powf(q) + u1.abs().powf(q)) / (q * t1)
}

/// `sum_{i=0}^{k} x^i y^{k-i}`.
fn power_sum(x: f64, y: f64, k: u32) -> f64 {
    let mut s = 1.0;
    let mut yp = 1.0;
    for _ in 0..k {
        yp *= y;
        s = x * s + yp;
    }
    s
}
