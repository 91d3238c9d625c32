//! Scaling study over families of nets and the combined verification run.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discrepancy::{
    all_ones_l2_sq_formula, hammersley_l2_sq_formula, hammersley_linf_formula, l2_sq_exact, linf_exact, lp_norm,
};
use crate::error::{Error, Result};
use crate::haar::{
    parseval_check_with_cap, sweep_net, ClosedConfig, HaarCoefficientReport, SweepSummary, DEFAULT_PARSEVAL_CAP,
};
use crate::netgen::{generate_net, net_from_a, AVector, GeneratorSpec};
use crate::rational::{serde_rational, to_f64, Rational};

/// How `a` is chosen for each `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `a = 0`, the Hammersley net.
    Zero,
    /// `a = (1, ..., 1)`.
    One,
    /// `ceil(sqrt n)` zeros at 0-based positions `floor(k (n-1) / ceil(sqrt n))`.
    Balanced,
    /// A fixed tuple; only its own `n` is available.
    Custom(AVector),
    /// Uniform random bits from a seeded generator.
    Random { seed: u64 },
}

impl Family {
    pub fn a_for(&self, n: usize) -> Result<AVector> {
        match self {
            Family::Zero => AVector::zeros(n),
            Family::One => AVector::ones(n),
            Family::Balanced => balanced(n),
            Family::Custom(a) if a.n() == n => Ok(a.clone()),
            Family::Custom(a) => Err(Error::InvalidArgument(format!("custom a = {a} fixes n = {}", a.n()))),
            Family::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ n as u64);
                AVector::new((1..n).map(|_| rng.random_range(0..2u8)).collect())
            }
        }
    }
}

fn balanced(n: usize) -> Result<AVector> {
    let len = n.checked_sub(1).ok_or_else(|| Error::InvalidArgument("n must be at least 1".into()))?;
    let mut bits = vec![1u8; len];
    if len > 0 {
        let c = (n as f64).sqrt().ceil() as usize;
        for k in 0..c {
            // positions repeat for n <= 2
            bits[k * len / c] = 0;
        }
    }
    AVector::new(bits)
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Zero => write!(f, "zero"),
            Family::One => write!(f, "one"),
            Family::Balanced => write!(f, "balanced"),
            Family::Custom(a) => write!(f, "custom:{a}"),
            Family::Random { seed } => write!(f, "random:{seed}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        match s {
            "zero" => Ok(Family::Zero),
            "one" => Ok(Family::One),
            "balanced" => Ok(Family::Balanced),
            _ => {
                if let Some(bits) = s.strip_prefix("custom:") {
                    Ok(Family::Custom(AVector::parse(bits)?))
                } else if let Some(seed) = s.strip_prefix("random:") {
                    let seed = seed.parse().map_err(|_| Error::Parse(format!("bad seed in {s:?}")))?;
                    Ok(Family::Random { seed })
                } else {
                    Err(Error::Parse(format!("unknown family {s:?}")))
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: u32,
    pub family: String,
    pub a: String,
    pub h: u32,
    #[serde(rename = "N")]
    pub points: u64,
    /// Exact squared L2 discrepancy, present for `p = 2`.
    #[serde(with = "serde_rational::option")]
    pub l2_sq: Option<Rational>,
    pub lp: f64,
    pub lp_error: f64,
    /// `2^n L_p / max(sqrt n, h)`.
    pub normalized: f64,
}

/// One row per `n` in `n_from..=n_to`.
///
/// `p = 2` is exact: the known formulas for the zero and one families
/// (`n >= 2`) and the pair sum otherwise. Other `p` use quadrature with
/// absolute tolerance `tol`.
pub fn run_scaling_study(p: f64, n_from: u32, n_to: u32, family: &Family, tol: f64) -> Result<Vec<ScalingRow>> {
    if n_from < 1 || n_from > n_to {
        return Err(Error::InvalidArgument(format!("empty range {n_from}..={n_to}")));
    }
    let mut rows = Vec::new();
    for n in n_from..=n_to {
        let a = family.a_for(n as usize)?;
        let (l2_sq, lp, lp_error) = if p == 2.0 {
            let exact = match family {
                Family::Zero if n >= 2 => hammersley_l2_sq_formula(n),
                Family::One if n >= 2 => all_ones_l2_sq_formula(n),
                _ => l2_sq_exact(&net_from_a(&a)),
            };
            let v = to_f64(&exact).sqrt();
            (Some(exact), v, 0.0)
        } else {
            let r = lp_norm(&net_from_a(&a), p, tol)?;
            (None, r.as_f64(), r.error_bound())
        };
        let h = a.h() as u32;
        let scale = (n as f64).sqrt().max(h as f64);
        rows.push(ScalingRow {
            n,
            family: family.to_string(),
            a: a.to_string(),
            h,
            points: 1u64 << n,
            l2_sq,
            lp,
            lp_error,
            normalized: 2f64.powi(n as i32) * lp / scale,
        });
    }
    Ok(rows)
}

/// A closed formula checked against the exact computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaCheck {
    pub name: String,
    pub n: u32,
    pub a: String,
    #[serde(with = "serde_rational")]
    pub expected: Rational,
    #[serde(with = "serde_rational")]
    pub actual: Rational,
    pub passed: bool,
}

impl FormulaCheck {
    fn new(name: &str, n: u32, a: &AVector, expected: Rational, actual: Rational) -> Self {
        let passed = expected == actual;
        FormulaCheck { name: name.into(), n, a: a.to_string(), expected, actual, passed }
    }
}

/// A coefficient whose closed form disagrees with the oracle, with its net.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFailure {
    pub n: u32,
    pub a: String,
    pub report: HaarCoefficientReport,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub n_cap: u32,
    /// Totals over all nets; its `failures` list stays empty.
    pub sweep: SweepSummary,
    pub coefficient_failures: Vec<CoefficientFailure>,
    pub checks: Vec<FormulaCheck>,
}

impl VerifyReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &FormulaCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn passed(&self) -> bool {
        self.sweep.passed() && self.failed_checks().next().is_none()
    }
}

/// Largest `n_cap` of [`run_verify`].
pub const MAX_VERIFY_N: u32 = 8;

/// For every `a` with `n <= n_cap`: closed forms against the oracle for
/// `j` in `{-1, ..., n+2}^2`, the Parseval identity, and the corner value;
/// plus the known L2 and star discrepancy formulas.
pub fn run_verify(n_cap: u32, config: ClosedConfig) -> Result<VerifyReport> {
    if !(1..=MAX_VERIFY_N).contains(&n_cap) {
        return Err(Error::InvalidArgument(format!("n_cap = {n_cap} outside 1..={MAX_VERIFY_N}")));
    }
    let mut report = VerifyReport { n_cap, ..Default::default() };
    for n in 1..=n_cap {
        for a in AVector::all(n as usize) {
            let mut sweep = sweep_net(&a, n as i32 + 2, config);
            for f in sweep.failures.drain(..) {
                report.coefficient_failures.push(CoefficientFailure { n, a: a.to_string(), report: f });
            }
            report.sweep = std::mem::take(&mut report.sweep).merge(sweep);
            let pr = parseval_check_with_cap(&a, DEFAULT_PARSEVAL_CAP)?;
            report.checks.push(FormulaCheck::new("parseval", n, &a, pr.lhs, pr.rhs));
        }
        let zero = AVector::zeros(n as usize)?;
        let ham = generate_net(&GeneratorSpec::hammersley(n as usize)?)?;
        report.checks.push(FormulaCheck::new(
            "hammersley_l2_sq",
            n,
            &zero,
            hammersley_l2_sq_formula(n),
            l2_sq_exact(&ham),
        ));
        // both closed forms below are stated for n >= 2
        if n >= 2 {
            report.checks.push(FormulaCheck::new(
                "hammersley_linf",
                n,
                &zero,
                hammersley_linf_formula(n),
                linf_exact(&ham),
            ));
            let ones = AVector::ones(n as usize)?;
            report.checks.push(FormulaCheck::new(
                "all_ones_l2_sq",
                n,
                &ones,
                all_ones_l2_sq_formula(n),
                l2_sq_exact(&net_from_a(&ones)),
            ));
        }
    }
    Ok(report)
}
