mod common;

use common::*;
use persuasion_core::ic::{
    check_implementable, check_sender_ic, deviation_payoff, experiment_implementable, IcChecker, Method,
};
use persuasion_core::model::{interim_payoff, Allocation};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn methods_agree(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = random_model(&mut rng, 2, 3, 4);
        let p = random_allocation(&mut rng, &m);
        for i in 0..m.num_senders() {
            let v = check_sender_ic(&m, &p, i, Method::Vertex).unwrap().deviation_gap;
            let pl = check_sender_ic(&m, &p, i, Method::PrimalLp).unwrap().deviation_gap;
            let dl = check_sender_ic(&m, &p, i, Method::DualLp).unwrap().deviation_gap;
            let g = check_sender_ic(&m, &p, i, Method::Grid { k: 40 }).unwrap().deviation_gap;
            prop_assert!((v - pl).abs() <= 1e-6, "vertex {} primal {}", v, pl);
            prop_assert!((pl - dl).abs() <= 1e-6, "primal {} dual {}", pl, dl);
            prop_assert!(g <= v + 1e-6);
            prop_assert!(g >= v - 0.5);
        }
    }

    #[test]
    fn verdict_ignores_own_prior(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = random_model(&mut rng, 2, 3, 4);
        let p = random_allocation(&mut rng, &m);
        for i in 0..m.num_senders() {
            let n = m.senders()[i].num_types();
            let other = m.with_prior(i, prior(&mut rng, n)).unwrap();
            let a = check_sender_ic(&m, &p, i, Method::Vertex).unwrap();
            let b = check_sender_ic(&other, &p, i, Method::Vertex).unwrap();
            prop_assert_eq!(a.implementable, b.implementable);
            prop_assert_eq!(a.deviation_gap, b.deviation_gap);
        }
    }

    #[test]
    fn deviation_distribution_is_valid(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = random_model(&mut rng, 2, 3, 4);
        let p = random_allocation(&mut rng, &m);
        for i in 0..m.num_senders() {
            let r = check_sender_ic(&m, &p, i, Method::Vertex).unwrap();
            let d = &r.deviation_distribution;
            let prior = &m.senders()[i].prior;
            prop_assert!(d.alpha > 0.0 && d.alpha <= 1.0);
            prop_assert!(d.residual.iter().all(|&x| x >= 0.0));
            for (a, b) in d.reconstruct().iter().zip(prior) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
            let interim = interim_payoff(&m, &p, i).unwrap();
            let truthful: f64 = interim.iter().zip(prior).map(|(u, q)| u * q).sum();
            let deviating = deviation_payoff(&m, &p, &r).unwrap();
            if r.worst_belief.degenerate_type(1e-9).is_some() {
                prop_assert!((deviating - truthful).abs() <= 1e-8);
            } else {
                prop_assert!((deviating - truthful - d.alpha * r.deviation_gap).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn implementable_allocations_pass_at_the_prior(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = random_model(&mut rng, 2, 3, 4);
        let k = m.num_outcomes();
        let base = Allocation::constant(&m, rng.gen_range(0..k)).unwrap();
        let p = base.mix(&random_allocation(&mut rng, &m), rng.gen_range(0.0..0.3));
        if check_implementable(&m, &p).unwrap().implementable {
            prop_assert!(experiment_implementable(&m, &p).unwrap().iter().all(|&b| b));
        }
    }

    #[test]
    fn implementable_set_is_convex(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = random_model(&mut rng, 2, 3, 4);
        let checker = IcChecker::new(&m).unwrap();
        let k = m.num_outcomes();
        let mut found = Vec::new();
        for _ in 0..200 {
            let base = Allocation::constant(&m, rng.gen_range(0..k)).unwrap();
            let p = base.mix(&random_allocation(&mut rng, &m), rng.gen::<f64>().powi(2));
            if checker.is_implementable(&p).unwrap() {
                found.push(p);
            }
            if found.len() == 2 {
                break;
            }
        }
        if let [p, q] = found.as_slice() {
            for _ in 0..5 {
                prop_assert!(checker.is_implementable(&p.mix(q, rng.gen())).unwrap());
            }
        }
    }
}
