use diginet::discrepancy::{
    all_ones_l2_sq_formula, hammersley_l2_sq_formula, hammersley_linf_formula, l2_sq_exact, linf_exact,
    local_discrepancy, lp_norm, lp_norm_with, Anchor, LpOptions,
};
use diginet::netgen::{generate_net, net_from_a, symmetrize, AVector, DyadicPoint, GeneratorSpec, PointSet};
use diginet::rational::{ratio, to_f64};
use diginet::Error;

fn ham(n: usize) -> PointSet {
    generate_net(&GeneratorSpec::hammersley(n).unwrap()).unwrap()
}

#[test]
fn formulas_agree_with_pair_sum() {
    for n in 1..=12u32 {
        assert_eq!(l2_sq_exact(&ham(n as usize)), hammersley_l2_sq_formula(n), "n = {n}");
    }
    for n in 2..=12u32 {
        assert_eq!(l2_sq_exact(&net_from_a(&AVector::ones(n as usize).unwrap())), all_ones_l2_sq_formula(n));
    }
    assert_eq!(l2_sq_exact(&ham(1)), ratio(91, 576));
    assert_eq!(all_ones_l2_sq_formula(3), ratio(2663, 294912));
}

#[test]
fn star_discrepancy_formula_from_n_two() {
    for n in 2..=10u32 {
        assert_eq!(linf_exact(&ham(n as usize)), hammersley_linf_formula(n), "n = {n}");
    }
    assert_eq!(linf_exact(&ham(2)), ratio(1, 2));
    // the closed form overshoots at n = 1
    assert_eq!(linf_exact(&ham(1)), ratio(3, 4));
    assert_eq!(hammersley_linf_formula(1), ratio(1, 1));
}

#[test]
fn symmetrized_point_at_one_never_counts() {
    let sym = symmetrize(&ham(1)).unwrap();
    assert!(sym.points().iter().any(|q| q.y == 2));
    let t = Anchor::new(ratio(1, 1), ratio(1, 1)).unwrap();
    // 3 of the 4 points lie in [0,1)^2
    assert_eq!(local_discrepancy(&sym, &t), ratio(3, 4) - ratio(1, 1));
    assert!(linf_exact(&sym) >= ratio(1, 4));
}

#[test]
fn lp_agrees_with_exact_values() {
    for a in ["", "0", "1", "011", "10101"] {
        let net = net_from_a(&AVector::parse(a).unwrap());
        let exact = to_f64(&l2_sq_exact(&net)).sqrt();
        let r = lp_norm(&net, 2.0, 1e-12).unwrap();
        assert!((r.as_f64() - exact).abs() <= 1e-12 + r.error_bound(), "a = {a}");
    }
    let origin = PointSet::from_points(0, vec![DyadicPoint { x: 0, y: 0 }]).unwrap();
    assert!((lp_norm(&origin, 1.0, 1e-12).unwrap().as_f64() - 0.75).abs() < 1e-12);
}

#[test]
fn lp_rejects_bad_input() {
    let net = ham(3);
    assert!(matches!(lp_norm(&net, 0.5, 1e-8), Err(Error::InvalidArgument(_))));
    assert!(matches!(lp_norm(&net, f64::INFINITY, 1e-8), Err(Error::InvalidArgument(_))));
    assert!(matches!(lp_norm(&net, 2.0, 0.0), Err(Error::InvalidArgument(_))));
    let tiny = LpOptions { max_cells: 10, ..Default::default() };
    assert!(matches!(lp_norm_with(&net, 2.0, 1e-8, &tiny), Err(Error::Infeasible(_))));
    let shallow = LpOptions { max_depth: 0, order: 1, ..Default::default() };
    assert!(matches!(lp_norm_with(&net, 1.3, 1e-14, &shallow), Err(Error::NoConvergence { .. })));
}
