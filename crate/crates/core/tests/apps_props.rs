mod common;

use common::*;
use persuasion_core::apps::{
    audit_closed_form, gen_audit_model, gen_auction_model, gen_grant_model, AuctionParams, AuditParams, FirmParams,
    GrantParams, OutsideOption,
};
use persuasion_core::ic::check_implementable;
use persuasion_core::model::{receiver_value, Allocation};
use persuasion_core::optimizer::constrained_optimum;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn audit_closed_form_matches_lp(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let firms: Vec<FirmParams> = (0..rng.gen_range(1..=2))
            .map(|_| FirmParams {
                c: rng.gen_range(0.1..5.0),
                eps: rng.gen_range(0.01..1.0),
                prior_pollute: rng.gen_range(0.05..0.95),
            })
            .collect();
        let near_boundary = firms
            .iter()
            .any(|f| (f.c / 2.0 - f.prior_pollute / (1.0 - f.prior_pollute)).abs() < 1e-6);
        prop_assume!(!near_boundary);
        let params = AuditParams { firms };
        let m = gen_audit_model(&params).unwrap();
        let closed = audit_closed_form(&params).unwrap();
        let opt = constrained_optimum(&m).unwrap();
        let closed_value = receiver_value(&m, &Allocation::constant(&m, closed.outcome).unwrap()).unwrap();
        prop_assert!((opt.value - closed_value).abs() <= 1e-6);
        for row in opt.allocation.rows() {
            for (r, &x) in row.iter().enumerate() {
                prop_assert_eq!(x > 1e-6, r == closed.outcome);
            }
        }
    }

    #[test]
    fn auction_epir_binds(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..=3);
        let types: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let params = AuctionParams {
            f: types.iter().map(|&m| (0..m).map(|_| rng.gen_range(0.1..10.0)).collect()).collect(),
            g: types.iter().map(|&m| table(&mut rng, n, m, 0.0, 5.0)).collect(),
            cap: None,
            prior: None,
            outside: if rng.gen_bool(0.5) { OutsideOption::Removed } else { OutsideOption::Displaced },
        };
        let inst = gen_auction_model(&params).unwrap();
        for (idx, res) in inst.epir_residuals.iter().enumerate() {
            let w = inst.winners[idx];
            prop_assert!(inst.transfers[idx][w] > 0.0);
            for (i, r) in res.iter().enumerate() {
                prop_assert!(r.abs() <= 1e-12);
                if n <= 2 || params.outside == OutsideOption::Displaced {
                    prop_assert!(i == w || inst.transfers[idx][i] <= 1e-12);
                }
            }
        }
        prop_assert!(check_implementable(&inst.model, &inst.allocation).unwrap().implementable);
        if n <= 2 || params.outside == OutsideOption::Displaced {
            prop_assert!(inst.sign_mismatches.is_empty());
        }
    }

    #[test]
    fn efficient_grants_are_implementable(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..=3);
        let types: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let g: Vec<Vec<f64>> = types.iter().map(|&m| (0..m).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
        let f: Vec<Vec<f64>> = g
            .iter()
            .map(|gi| {
                let mut steps: Vec<f64> = (0..gi.len()).map(|_| rng.gen_range(-5.0..5.0)).collect();
                steps.sort_by(f64::total_cmp);
                gi.iter().zip(steps).map(|(a, d)| a + d).collect()
            })
            .collect();
        let lambda = simplex(&mut rng, n);
        let inst = gen_grant_model(&GrantParams { lambda, f, g, prior: None }).unwrap();
        prop_assert!(inst.warnings.is_empty());
        prop_assert!(check_implementable(&inst.model, &inst.allocation).unwrap().implementable);
    }
}
