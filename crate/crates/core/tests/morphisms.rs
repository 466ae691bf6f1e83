mod common;

use folpi::graph::{check_tree_morphism, MorphismError, MorphismVerdict, SimpleGraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{folding, locally_injective, random_tree};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn locally_injective_maps_embed(seed in any::<u64>(), n in 2usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = random_tree(&mut rng, n);
        let (src, map) = locally_injective(&mut rng, &target, 12);
        prop_assert!(src.is_tree());
        prop_assert_eq!(check_tree_morphism(&src, &target, &map).unwrap(), MorphismVerdict::InjectiveTree);
    }

    #[test]
    fn folds_are_certified(seed in any::<u64>(), n in 3usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = random_tree(&mut rng, n);
        let (src, map) = folding(&mut rng, &target, 12);
        let verdict = check_tree_morphism(&src, &target, &map).unwrap();
        let is_fold = matches!(verdict, MorphismVerdict::LocallyNonInjective { .. });
        prop_assert!(is_fold, "{:?}", verdict);
    }
}

#[test]
fn non_morphisms_are_rejected() {
    let path = SimpleGraph::new(3, vec![(0, 1), (1, 2)]);
    let src = SimpleGraph::new(2, vec![(0, 1)]);
    assert_eq!(check_tree_morphism(&src, &path, &[0, 2]), Err(MorphismError::NotAMorphism((0, 1))));
    assert_eq!(check_tree_morphism(&src, &path, &[0, 3]), Err(MorphismError::BadMap));
    let triangle = SimpleGraph::new(3, vec![(0, 1), (1, 2), (0, 2)]);
    assert_eq!(check_tree_morphism(&src, &triangle, &[0, 1]), Err(MorphismError::TargetNotTree));
}
