mod common;

use attriscore::circuit::{brute_force_count, model_count, validate_ddbc, ValidateOptions};
use attriscore::mlscore::{shap_ddbc, Distribution, Entity};
use attriscore::Rational;
use common::*;
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compiled_tree_agrees_with_tree(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let (t, d) = random_compiled_tree(&mut r, n);
        for x in 0u32..(1 << n) {
            let bits: Vec<bool> = (0..n).map(|i| x >> i & 1 == 1).collect();
            let idx: Vec<usize> = bits.iter().map(|&b| usize::from(b)).collect();
            prop_assert_eq!(d.evaluate(&bits), t.evaluate(&idx));
        }
    }

    #[test]
    fn count_matches_truth_table(seed in any::<u64>(), n in 1usize..=10) {
        let d = random_ddbc(&mut rng(seed), n);
        prop_assert_eq!(model_count(&d), brute_force_count(&d, 20).unwrap());
    }

    #[test]
    fn count_and_negation_partition(seed in any::<u64>(), n in 1usize..=10) {
        let d = random_ddbc(&mut rng(seed), n);
        let neg = validate_ddbc(&d.negated(), &ValidateOptions::default()).unwrap();
        prop_assert_eq!(model_count(&d) + model_count(&neg), BigUint::one() << n);
    }

    #[test]
    fn shap_sums_to_label_minus_mean(seed in any::<u64>(), n in 1usize..=10) {
        let mut r = rng(seed);
        let d = random_ddbc(&mut r, n);
        let e: Entity = random_bools(&mut r, n);
        let shap = shap_ddbc(&d, &Distribution::Uniform, &e).unwrap();
        let bits: Vec<bool> = e.0.iter().map(|&v| v == 1).collect();
        let label = Rational::from_integer(BigInt::from(u8::from(d.evaluate(&bits))));
        let mean = Rational::new(model_count(&d).into(), BigInt::one() << n);
        prop_assert_eq!(shap.iter().sum::<Rational>(), label - mean);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn responsibility_matches_definition(seed in any::<u64>()) {
        use attriscore::dbcause::{actual_causes, CauseError};
        let mut r = rng(seed);
        let d = random_instance(&mut r, 8);
        let q = random_query(&mut r, d.schema());
        match actual_causes(&d, &q, &caps()) {
            Err(CauseError::NothingToExplain) => prop_assert!(!attriscore::relcore::eval_bcq(&d, &q)),
            Err(e) => prop_assert!(false, "{e}"),
            Ok(causes) => {
                for t in 0..d.len() {
                    let got = causes.iter().find(|c| &c.tuple == d.id(t)).map(|c| c.contingency.clone());
                    prop_assert_eq!(got, brute_contingency(&d, &q, t));
                }
            }
        }
    }

    #[test]
    fn repairs_are_maximal_consistent_subsets(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_instance(&mut r, 8);
        let dcs = random_dcs(&mut r, d.schema());
        let got = attriscore::repair::s_repairs(&d, &dcs, &caps()).unwrap().repairs;
        prop_assert_eq!(got, brute_s_repairs(&d, &dcs));
    }
}
