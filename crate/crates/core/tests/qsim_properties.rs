use parsearch_core::qsim::{success_probability, MarkedPredicate, QueryLedger, StateVector};
use parsearch_core::seed;
use proptest::prelude::*;

fn mask(dim: usize, marked: &[usize]) -> MarkedPredicate {
    let mut m = vec![false; dim];
    for &i in marked {
        m[i % dim] = true;
    }
    MarkedPredicate::from_mask(m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iterations_preserve_norm(
        dim in 1usize..600,
        marks in proptest::collection::vec(0usize..600, 0..12),
        masks in proptest::collection::vec(proptest::collection::vec(0usize..600, 0..5), 1..40),
    ) {
        let mut state = StateVector::uniform(dim).unwrap();
        let mut ledger = QueryLedger::new(1);
        let first = mask(dim, &marks);
        state.grover_iterate(&first, &mut ledger, 0).unwrap();
        // Switching predicates between iterations leaves the uniform subspace.
        for m in &masks {
            state.grover_iterate(&mask(dim, m), &mut ledger, 0).unwrap();
            prop_assert!((state.norm_sqr() - 1.0).abs() <= 1e-9);
        }
        prop_assert_eq!(ledger.per_copy()[0], masks.len() as u64 + 1);
    }

    #[test]
    fn simulation_matches_closed_form(bits in 0u32..=14, marked_seed in any::<u64>(), j_raw in 1usize..64, r in 0u64..60) {
        let dim = 1usize << bits;
        let j = 1 + j_raw % dim;
        let mut rng = seed::rng(marked_seed);
        let chosen = rand::seq::index::sample(&mut rng, dim, j).into_vec();
        let pred = mask(dim, &chosen);
        let mut state = StateVector::uniform(dim).unwrap();
        let mut ledger = QueryLedger::new(1);
        for _ in 0..r {
            state.grover_iterate(&pred, &mut ledger, 0).unwrap();
        }
        let expected = success_probability(dim, j, r).unwrap();
        prop_assert!((state.marked_mass(&pred) - expected).abs() <= 1e-9);
    }

    #[test]
    fn ledger_counts_iterations_per_copy(copies in 1usize..6, calls in proptest::collection::vec(0usize..6, 0..30)) {
        let pred = mask(16, &[3]);
        let mut state = StateVector::uniform(16).unwrap();
        let mut ledger = QueryLedger::new(copies);
        let mut expected = vec![0u64; copies];
        for c in calls {
            let before = ledger.per_copy().to_vec();
            let res = state.grover_iterate(&pred, &mut ledger, c);
            if c < copies {
                prop_assert!(res.is_ok());
                expected[c] += 1;
            } else {
                prop_assert!(res.is_err());
            }
            prop_assert!(ledger.per_copy().iter().zip(&before).all(|(a, b)| a >= b));
        }
        prop_assert_eq!(ledger.per_copy(), expected.as_slice());
        prop_assert_eq!(ledger.parallel_rounds(), expected.iter().copied().max().unwrap_or(0));
    }

    #[test]
    fn measurement_is_deterministic(dim in 1usize..200, s in any::<u64>()) {
        let pred = mask(dim, &[dim / 2]);
        let mut state = StateVector::uniform(dim).unwrap();
        state.grover_iterate(&pred, &mut QueryLedger::new(1), 0).unwrap();
        let draws = |s| {
            let mut rng = seed::rng(s);
            (0..20).map(|_| state.measure(&mut rng).unwrap()).collect::<Vec<_>>()
        };
        prop_assert_eq!(draws(s), draws(s));
    }
}
