mod common;

use bfm_core::measure::enumerate_all;
use bfm_core::{
    generate_synthetic, load_dataset, objective, save_dataset, Bag, BagLabel, CandidateSet, Dataset,
    Instance, Measure,
};
use proptest::prelude::*;

fn dataset_strategy() -> impl Strategy<Value = Dataset> {
    (1usize..=4).prop_flat_map(|s| {
        let instance = prop::collection::vec(0.0f64..=1.0, s).prop_map(Instance::new);
        let set = prop::collection::vec(instance, 1..4).prop_map(CandidateSet::new);
        let bag = (any::<bool>(), prop::collection::vec(set, 1..4)).prop_map(|(pos, sets)| {
            Bag::new(if pos { BagLabel::Positive } else { BagLabel::Negative }, sets)
        });
        (Just(s), prop::collection::vec(bag, 1..6), any::<bool>())
    })
    .prop_map(|(s, bags, with_truth)| {
        let truth = with_truth.then(|| {
            bags.iter()
                .map(|b| b.candidate_sets.iter().map(|c| vec![0u8; c.instances().len()]).collect())
                .collect()
        });
        Dataset::new(s, bags, truth).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_then_load_is_identity(data in dataset_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.json");
        save_dataset(&data, &path).unwrap();
        prop_assert_eq!(load_dataset(&path).unwrap(), data);
    }
}

#[test]
fn synthetic_output_is_byte_stable() {
    let spec = common::synth_spec(3, common::learned_doc(), 0.05, 20, 99);
    let a = generate_synthetic(&spec).unwrap().to_json_string();
    let b = generate_synthetic(&spec).unwrap().to_json_string();
    assert_eq!(a, b);
    assert_eq!(Dataset::from_json_str(&a).unwrap().to_json_string(), a);
}

#[test]
fn exhaustive_optimum_sits_at_the_truth() {
    let truth = Measure::try_from(common::learned_doc()).unwrap();
    for seed in 0..10 {
        let data = generate_synthetic(&common::synth_spec(3, common::learned_doc(), 0.05, 20, seed)).unwrap();
        let scores: Vec<(f64, bfm_core::BinaryFuzzyMeasure)> = enumerate_all(3)
            .unwrap()
            .map(|g| (objective(&g, &data).unwrap().total, g))
            .collect();
        let best = scores.iter().map(|(j, _)| *j).fold(f64::INFINITY, f64::min);
        let argmins: Vec<_> = scores.iter().filter(|(j, _)| *j == best).collect();
        assert_eq!(argmins.len(), 1, "seed {seed}");
        assert_eq!(Measure::Binary(argmins[0].1.clone()), truth, "seed {seed}");
    }
}
