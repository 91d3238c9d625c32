//! Comparison of the closed forms with the point-sum oracle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{oracle_level, translations, Case, CaseLabel, ClosedConfig, ClosedForms, ClosedValue, HaarIndex};
use crate::netgen::{net_from_a, AVector};
use crate::par;
use crate::rational::{serde_rational, Dyadic, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarCoefficientReport {
    pub index: HaarIndex,
    #[serde(with = "serde_rational")]
    pub oracle_value: Rational,
    #[serde(with = "serde_rational::option")]
    pub closed_value: Option<Rational>,
    /// Bound on `|mu|` for the bounded classes.
    #[serde(with = "serde_rational::option")]
    pub bound: Option<Rational>,
    pub case: CaseLabel,
    pub matched: bool,
}

impl HaarCoefficientReport {
    pub const CSV_HEADER: [&'static str; 12] = [
        "j1", "j2", "m1", "m2", "case", "oracle_num", "oracle_den", "closed_num", "closed_den", "match",
        "bound_num", "bound_den",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        let split = |r: &Option<Rational>| match r {
            Some(r) => (r.numer().to_string(), r.denom().to_string()),
            None => (String::new(), String::new()),
        };
        let (cn, cd) = split(&self.closed_value);
        let (bn, bd) = split(&self.bound);
        vec![
            self.index.j1.to_string(),
            self.index.j2.to_string(),
            self.index.m1.to_string(),
            self.index.m2.to_string(),
            self.case.case.to_string(),
            self.oracle_value.numer().to_string(),
            self.oracle_value.denom().to_string(),
            cn,
            cd,
            self.matched.to_string(),
            bn,
            bd,
        ]
    }

    fn new(idx: HaarIndex, oracle: Dyadic, closed: ClosedValue, case: CaseLabel) -> Self {
        let bound = match closed {
            ClosedValue::Bound { bound, .. } => Some(bound.to_rational()),
            ClosedValue::Exact(_) => None,
        };
        HaarCoefficientReport {
            index: idx,
            oracle_value: oracle.to_rational(),
            closed_value: closed.exact().map(|v| v.to_rational()),
            bound,
            case,
            matched: closed.accepts(oracle),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseStats {
    pub checked: u64,
    pub mismatched: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub per_case: BTreeMap<Case, CaseStats>,
    /// `J7` levels with more than `2^n` coefficients off the linear part.
    pub j7_count_violations: u64,
    /// `J6` coefficients with `|mu| > 2^{-2n}`.
    pub j6_magnitude_violations: u64,
    pub failures: Vec<HaarCoefficientReport>,
}

impl SweepSummary {
    pub fn checked(&self) -> u64 {
        self.per_case.values().map(|c| c.checked).sum()
    }

    pub fn mismatched(&self) -> u64 {
        self.per_case.values().map(|c| c.mismatched).sum()
    }

    pub fn mismatched_in(&self, cases: &[Case]) -> u64 {
        cases.iter().filter_map(|c| self.per_case.get(c)).map(|c| c.mismatched).sum()
    }

    pub fn passed(&self) -> bool {
        self.mismatched() == 0 && self.j7_count_violations == 0 && self.j6_magnitude_violations == 0
    }

    pub fn merge(mut self, other: SweepSummary) -> SweepSummary {
        for (case, st) in other.per_case {
            let e = self.per_case.entry(case).or_default();
            e.checked += st.checked;
            e.mismatched += st.mismatched;
        }
        self.j7_count_violations += other.j7_count_violations;
        self.j6_magnitude_violations += other.j6_magnitude_violations;
        self.failures.extend(other.failures);
        self
    }
}

/// All levels `j` in `{-1, ..., j_max}^2`.
fn levels(j_max: i32) -> Vec<(i32, i32)> {
    (-1..=j_max).flat_map(|j1| (-1..=j_max).map(move |j2| (j1, j2))).collect()
}

fn sweep_level(forms: &ClosedForms, net: &crate::netgen::PointSet, n: u32, j1: i32, j2: i32) -> SweepSummary {
    let lv = oracle_level(net, j1, j2).expect("nets have 2^n points");
    let mut summary = SweepSummary::default();
    let mut stats = CaseStats::default();
    let mut case = None;
    for m1 in 0..translations(j1) {
        for m2 in 0..translations(j2) {
            let idx = HaarIndex { j1, j2, m1, m2 };
            let (closed, label) = forms.eval(&idx);
            let oracle = lv.get(m1, m2);
            case = Some(label.case);
            stats.checked += 1;
            if !closed.accepts(oracle) {
                stats.mismatched += 1;
                summary.failures.push(HaarCoefficientReport::new(idx, oracle, closed, label));
            }
            if label.case == Case::J6 && oracle.abs() > Dyadic::pow2(-2 * n as i32) {
                summary.j6_magnitude_violations += 1;
            }
        }
    }
    let case = case.expect("every level has a translation");
    if case == Case::J7 && lv.nonlinear().count() as u64 > 1u64 << n {
        summary.j7_count_violations += 1;
    }
    summary.per_case.insert(case, stats);
    summary
}

/// Checks every coefficient with `j` in `{-1, ..., j_max}^2` for the net of `a`.
pub fn sweep_net(a: &AVector, j_max: i32, config: ClosedConfig) -> SweepSummary {
    let forms = ClosedForms::new(a, config);
    let net = net_from_a(a);
    let n = a.n() as u32;
    let lv = levels(j_max);
    par::map_reduce(
        lv.len(),
        SweepSummary::default(),
        |i| sweep_level(&forms, &net, n, lv[i].0, lv[i].1),
        SweepSummary::merge,
    )
}

/// One report per coefficient with `j` in `{-1, ..., j_max}^2`.
pub fn report(a: &AVector, j_max: i32, config: ClosedConfig) -> Vec<HaarCoefficientReport> {
    let forms = ClosedForms::new(a, config);
    let net = net_from_a(a);
    let lv = levels(j_max);
    let per_level = par::map_collect(lv.len(), |i| {
        let (j1, j2) = lv[i];
        let coeffs = oracle_level(&net, j1, j2).expect("nets have 2^n points");
        forms
            .eval_level(j1, j2)
            .into_iter()
            .map(|(idx, closed, label)| {
                HaarCoefficientReport::new(idx, coeffs.get(idx.m1, idx.m2), closed, label)
            })
            .collect::<Vec<_>>()
    });
    per_level.into_iter().flatten().collect()
}
