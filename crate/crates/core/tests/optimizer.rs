mod common;

use bfm_core::measure::sample_random;
use bfm_core::optimizer::train_exhaustive_with;
use bfm_core::{
    generate_synthetic, objective, train_bfm, train_exhaustive, train_real_fm, EaConfig, FuzzyMeasure,
    Measure, Termination,
};

#[test]
fn noiseless_recovery_of_learned_structure() {
    let data = generate_synthetic(&common::synth_spec(3, common::learned_doc(), 0.0, 20, 1)).unwrap();
    let r = train_bfm(&data, &EaConfig::default().with_seed(4)).unwrap();
    assert_eq!(r.best_objective, 0.0);
    assert_eq!(r.terminated_by, Termination::Converged);
    let mwc: Vec<String> = r
        .best_measure
        .as_binary()
        .unwrap()
        .minimal_winning_coalitions()
        .iter()
        .map(ToString::to_string)
        .collect();
    assert_eq!(mwc, ["{1,2}", "{1,3}"]);
    let e = train_exhaustive(&data).unwrap();
    assert_eq!(e.best_objective, 0.0);
}

#[test]
fn fixed_seed_is_deterministic() {
    let data = generate_synthetic(&common::synth_spec(5, Measure::Binary(sample_random(5, 0.3, 2).unwrap()).to_doc(), 0.05, 10, 2)).unwrap();
    let cfg = EaConfig::default().with_seed(12);
    let a = train_bfm(&data, &cfg).unwrap();
    let b = train_bfm(&data, &cfg).unwrap();
    assert_eq!(a.objective_trace, b.objective_trace);
    assert_eq!(a.best_measure, b.best_measure);
    let sequential = EaConfig { parallel: false, ..cfg.clone() };
    let c = train_bfm(&data, &sequential).unwrap();
    assert_eq!(a.objective_trace, c.objective_trace);
    let ra = train_real_fm(&data, &cfg).unwrap();
    let rb = train_real_fm(&data, &sequential).unwrap();
    assert_eq!(ra.objective_trace, rb.objective_trace);
    assert_eq!(ra.best_measure, rb.best_measure);
}

#[test]
fn traces_never_increase_and_end_at_best() {
    for seed in 0..5 {
        let truth = Measure::Binary(sample_random(4, 0.4, seed).unwrap()).to_doc();
        let data = generate_synthetic(&common::synth_spec(4, truth, 0.05, 10, seed)).unwrap();
        for r in [
            train_bfm(&data, &EaConfig::default().with_seed(seed)).unwrap(),
            train_real_fm(&data, &EaConfig { max_generations: 60, ..EaConfig::default().with_seed(seed) }).unwrap(),
            train_exhaustive(&data).unwrap(),
        ] {
            assert!(r.objective_trace.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(*r.objective_trace.last().unwrap(), r.best_objective);
            assert!(r.best_measure.validate().is_valid());
            assert_eq!(objective(&r.best_measure, &data).unwrap().total, r.best_objective);
        }
    }
}

#[test]
fn evolutionary_search_matches_exhaustive_optimum() {
    let mut hits = 0;
    for run in 0..40u64 {
        let s = 2 + (run as usize % 3);
        let truth = Measure::Binary(sample_random(s, 0.4, 1000 + run).unwrap()).to_doc();
        let noise = if run % 2 == 0 { 0.0 } else { 0.05 };
        let data = generate_synthetic(&common::synth_spec(s, truth, noise, 10, run)).unwrap();
        let exact = train_exhaustive(&data).unwrap();
        let ea = train_bfm(&data, &EaConfig::default().with_seed(run)).unwrap();
        assert!(ea.best_objective >= exact.best_objective);
        if ea.best_objective == exact.best_objective {
            hits += 1;
        }
    }
    assert!(hits >= 38, "{hits}/40");
}

#[test]
fn exhaustive_scans_whole_space() {
    let data = generate_synthetic(&common::synth_spec(2, Measure::Binary(sample_random(2, 0.5, 0).unwrap()).to_doc(), 0.0, 5, 0)).unwrap();
    let r = train_exhaustive(&data).unwrap();
    assert_eq!(r.evaluations, 4);
    assert_eq!(r.objective_trace.len(), 4);
    let seq = train_exhaustive_with(&data, 5, false).unwrap();
    assert_eq!(seq.best_measure, r.best_measure);
    assert_eq!(seq.objective_trace, r.objective_trace);
}

#[test]
fn real_baseline_approaches_zero() {
    let data = generate_synthetic(&common::synth_spec(3, common::learned_doc(), 0.0, 20, 3)).unwrap();
    let r = train_real_fm(&data, &EaConfig::default().with_seed(8)).unwrap();
    assert!(r.best_objective <= 0.05, "{}", r.best_objective);
    assert!(r.best_measure.as_binary().is_none());
}

#[test]
fn time_cap_stops_between_generations() {
    let truth = Measure::Binary(sample_random(10, 0.2, 0).unwrap()).to_doc();
    let data = generate_synthetic(&common::synth_spec(10, truth, 0.05, 10, 0)).unwrap();
    let cfg = EaConfig {
        time_cap_seconds: Some(1e-9),
        ..EaConfig::default()
    };
    let r = train_real_fm(&data, &cfg).unwrap();
    assert_eq!(r.terminated_by, Termination::TimeCap);
    assert_eq!(r.generations_run, 1);
}
