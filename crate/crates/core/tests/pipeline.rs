use proptest::prelude::*;
use toda_core::bridge::{compare_def1_def2, lift, v};
use toda_core::chain::is_zero_on_homology;
use toda_core::gen::{random_cofibrant_cubical, random_recursive};
use toda_core::random::rng;
use toda_core::toda_recursive::RectifyOutcome;

fn primes() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 5])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn reduction_preserves_the_bracket_class(seed in any::<u64>(), p in primes(), order in 1usize..=2) {
        let s = random_cofibrant_cubical(&mut rng(seed), p, order, order + 2, 2);
        let rep = compare_def1_def2(&s).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep.failures());
        let tt = v(&s).unwrap().bracket_recursive().unwrap().map;
        prop_assert_eq!(rep.recursive.as_ref(), Some(&tt));
    }

    #[test]
    fn rectification_exactly_when_bracket_is_null(seed in any::<u64>(), p in primes(), order in 1usize..=2) {
        let s = v(&random_cofibrant_cubical(&mut rng(seed), p, order, order + 2, 2)).unwrap();
        let null = is_zero_on_homology(&s.bracket_recursive().unwrap().map);
        match s.rectify(None).unwrap() {
            RectifyOutcome::Rectified(d) => prop_assert!(null && d.verified()),
            RectifyOutcome::Obstructed(o) => prop_assert!(!null && !o.ranks.is_empty()),
        }
    }

    #[test]
    fn lifts_are_strongly_cofibrant(seed in any::<u64>(), p in primes(), order in 1usize..=2) {
        let s = random_recursive(&mut rng(seed), p, order, order + 2, 2);
        let l = lift(&s, 3).unwrap();
        prop_assert!(l.system.validate().ok());
        prop_assert!(l.system.is_strongly_cofibrant_system().unwrap().ok);
        prop_assert!(compare_def1_def2(&l.system).unwrap().passed());
    }
}
