mod common;

use diginet::discrepancy::l2_sq_exact;
use diginet::haar::haar_coeff_oracle;

#[test]
fn pair_sum_matches_direct_integration() {
    for p in common::small_sets() {
        let grid = common::Grid::new(&p, p.scale().max(5));
        assert_eq!(l2_sq_exact(&p), grid.l2_sq(), "{:?}", p.points());
    }
}

#[test]
fn point_sums_match_direct_integration() {
    let indices = common::indices_up_to(4);
    for p in common::small_sets() {
        let grid = common::Grid::new(&p, p.scale().max(5));
        for idx in &indices {
            assert_eq!(haar_coeff_oracle(&p, idx), grid.haar(idx), "{idx} {:?}", p.points());
        }
    }
}
