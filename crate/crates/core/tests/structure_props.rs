mod common;

use common::*;
use persuasion_core::ic::{check_implementable, check_sender_ic, IcChecker, Method};
use persuasion_core::model::Allocation;
use persuasion_core::optimizer::constrained_optimum;
use persuasion_core::structure::{
    find_two_decomposition, hlf_check, monotone_certificate_check, no_fall_guys_check, product_compose, Certificate,
};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certificates_are_sound(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let inst = decomposable(&mut rng);
        let m = &inst.model;
        let mono: Vec<Vec<f64>> = inst.gap.iter().map(|g| monotone_targets(&mut rng, g)).collect();
        let mut anti = mono.clone();
        anti[0] = anti_monotone_targets(&mut rng, &inst.gap[0]);
        let candidates = [
            class_allocation(&mut rng, &inst, &mono),
            class_allocation(&mut rng, &inst, &anti),
            random_allocation(&mut rng, m),
        ];
        for (n, p) in candidates.iter().enumerate() {
            let report = check_implementable(m, p).unwrap();
            for c in monotone_certificate_check(m, p).unwrap() {
                let c = &c;
                let passes = report.senders[c.sender].implementable;
                match &c.certificate {
                    Certificate::CertifiedImplementable => prop_assert!(passes),
                    Certificate::CertifiedNot { .. } => prop_assert!(!passes),
                    Certificate::Inconclusive => {}
                }
                if n == 0 {
                    prop_assert_eq!(&c.certificate, &Certificate::CertifiedImplementable);
                }
                if n == 1 && c.sender == 0 {
                    let is_not = matches!(c.certificate, Certificate::CertifiedNot { .. });
                    prop_assert!(is_not);
                }
            }
        }
    }

    #[test]
    fn common_least_favorite_accepts_everything(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(2..=3);
        let k = rng.gen_range(2..=4);
        let others = rng.gen_range(1..=2);
        let payoffs = vec![hlf_payoff(&mut rng, n, k), table(&mut rng, k, others, -10.0, 10.0)];
        let m = model_from(&mut rng, &[n, others], k, payoffs);
        prop_assert!(hlf_check(&m, 0).unwrap().is_some());
        let checker = IcChecker::new(&m).unwrap();
        for _ in 0..10 {
            let p = random_allocation(&mut rng, &m);
            prop_assert!(checker.check_sender(&p, 0).unwrap().implementable);
        }
    }

    #[test]
    fn without_common_least_favorite_the_minimizer_fails(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = random_model(&mut rng, 2, 3, 4);
        for i in 0..m.num_senders() {
            if hlf_check(&m, i).unwrap().is_none() {
                let p = pointwise_minimizer(&m, i);
                prop_assert!(!check_sender_ic(&m, &p, i, Method::Vertex).unwrap().implementable);
                prop_assert!(no_fall_guys_check(&m, &p, i).unwrap().is_some());
            }
        }
    }

    #[test]
    fn fall_guy_witness_implies_failure(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = random_model(&mut rng, 1, 4, 4);
        let p = random_allocation(&mut rng, &m);
        if no_fall_guys_check(&m, &p, 0).unwrap().is_some() {
            prop_assert!(!check_implementable(&m, &p).unwrap().implementable);
        }
    }

    #[test]
    fn products_of_implementable_allocations_are_implementable(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let ns = rng.gen_range(1..=2);
        let component = |rng: &mut rand_chacha::ChaCha8Rng| {
            let types: Vec<usize> = (0..ns).map(|_| rng.gen_range(1..=2)).collect();
            let k = rng.gen_range(2..=3);
            let payoffs = types.iter().map(|&n| table(rng, k, n, -10.0, 10.0)).collect();
            let m = model_from(rng, &types, k, payoffs);
            let p = constrained_optimum(&m).unwrap().allocation;
            (m, p)
        };
        let (a, pa) = component(&mut rng);
        let (b, pb) = component(&mut rng);
        prop_assert!(check_implementable(&a, &pa).unwrap().implementable);
        prop_assert!(check_implementable(&b, &pb).unwrap().implementable);
        let (m, p) = product_compose(&[a, b], &[pa, pb]).unwrap();
        prop_assert!(check_implementable(&m, &p).unwrap().implementable);
    }

    #[test]
    fn binary_outcome_models_decompose(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let payoff = table(&mut rng, 2, 3, -5.0, 5.0);
        let m = model_from(&mut rng, &[3], 2, vec![payoff]);
        let cert = find_two_decomposition(&m, 0).unwrap().unwrap();
        prop_assert_eq!((cert.r1, cert.r2), (0, 1));
        let constant = Allocation::constant(&m, 1).unwrap();
        prop_assert_eq!(
            &monotone_certificate_check(&m, &constant).unwrap()[0].certificate,
            &Certificate::CertifiedImplementable
        );
    }
}
