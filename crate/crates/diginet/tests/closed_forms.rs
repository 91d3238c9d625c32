use diginet::haar::{
    classify, corner_coefficient, haar_coeff_closed, haar_coeff_oracle, sweep_net, Case, ClosedConfig, ClosedForms,
    ClosedValue, HaarIndex, Transcription,
};
use diginet::netgen::{net_from_a, AVector};
use diginet::rational::{pow2, ratio};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn published() -> ClosedConfig {
    ClosedConfig { transcription: Transcription::Published, ..Default::default() }
}

fn random_a(rng: &mut ChaCha8Rng, n: usize) -> AVector {
    AVector::new((1..n).map(|_| rng.random_range(0..2u8)).collect()).unwrap()
}

#[test]
fn corrected_forms_match_oracle_exhaustively() {
    for n in 1..=7 {
        for a in AVector::all(n) {
            let s = sweep_net(&a, n as i32 + 2, ClosedConfig::default());
            assert!(s.passed(), "a = {a:?}: {:?}", s.failures.first());
        }
    }
}

#[test]
fn corrected_forms_match_oracle_beyond_fitted_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    for (n, count) in [(8, 12), (9, 4), (10, 2)] {
        for _ in 0..count {
            let a = random_a(&mut rng, n);
            let s = sweep_net(&a, n as i32 + 1, ClosedConfig::default());
            assert!(s.passed(), "a = {a}: {:?}", s.failures.first());
        }
    }
}

#[test]
fn published_forms_differ_only_in_corrected_classes() {
    let mut seen = std::collections::BTreeSet::new();
    for n in 1..=6 {
        for a in AVector::all(n) {
            let s = sweep_net(&a, n as i32 + 2, published());
            for case in [Case::J1, Case::J3, Case::J7, Case::J8, Case::J9] {
                assert_eq!(s.mismatched_in(&[case]), 0, "a = {a}, {case}");
            }
            for f in &s.failures {
                seen.insert(f.case.case);
            }
        }
    }
    assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![Case::J2, Case::J4, Case::J5, Case::J6]);
}

#[test]
fn published_j4_is_right_exactly_when_a_last_is_zero() {
    for n in 2..=7 {
        for a in AVector::all(n) {
            let forms = ClosedForms::new(&a, published());
            let idx = HaarIndex::new(0, -1, 0, 0).unwrap();
            let oracle = haar_coeff_oracle(&net_from_a(&a), &idx);
            let printed = forms.eval(&idx).0.exact().unwrap().to_rational();
            assert_eq!(printed == oracle, a.get(n - 1) == 0, "a = {a}");
        }
    }
}

#[test]
fn spec_examples() {
    let a = AVector::parse("010").unwrap();
    let corner = HaarIndex::new(-1, -1, 0, 0).unwrap();
    assert_eq!(haar_coeff_closed(&a, &corner).exact().unwrap().to_rational(), ratio(57, 1024));
    assert_eq!(corner_coefficient(&AVector::ones(3).unwrap()), ratio(21, 256));
    for n in 1..=6usize {
        let a = AVector::zeros(n).unwrap();
        for k in n as i32..n as i32 + 4 {
            let idx = HaarIndex::new(k, -1, 1, 0).unwrap();
            assert_eq!(haar_coeff_closed(&a, &idx), ClosedValue::Exact(diginet::Dyadic::pow2(-2 * k - 3)));
        }
    }
    assert_eq!(classify(1, 1, 5), Case::J6);
    assert_eq!(classify(5, 0, 5), Case::J9);
}

#[test]
fn bounded_classes_use_the_linear_part_for_empty_boxes() {
    let a = AVector::parse("1011").unwrap();
    let forms = ClosedForms::new(&a, ClosedConfig::default());
    let net = net_from_a(&a);
    let mut empty = 0;
    for j1 in 0..5 {
        for j2 in 0..5 {
            if classify(j1, j2, 5) != Case::J7 {
                continue;
            }
            for m1 in 0..1u64 << j1 {
                for m2 in 0..1u64 << j2 {
                    let idx = HaarIndex::new(j1, j2, m1, m2).unwrap();
                    if let ClosedValue::Bound { empty: Some(v), .. } = forms.eval(&idx).0 {
                        empty += 1;
                        assert_eq!(v.to_rational(), -pow2(-2 * (j1 + j2) as i64 - 4));
                        assert_eq!(haar_coeff_oracle(&net, &idx), v.to_rational());
                    }
                }
            }
        }
    }
    assert!(empty > 0);
}
