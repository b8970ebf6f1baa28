use herding::herding::{apply_transform_equivalence, default_initial_weights, learn_rates, moment_gap, RateSource};
use herding::synthetic::{prototype_dataset, random_enumerated_model};
use herding::{ChainConfig, Execution, FeatureModel, Herder, JointSearch, RateVector, RbmModel, TransformParams, Variant};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn chain_variants() -> Vec<Variant> {
    vec![Variant::Idealized, Variant::Local, Variant::Safe]
}

#[test]
fn telescoping_holds_at_every_step() {
    let m = RbmModel::new(8, 4).unwrap();
    let data = prototype_dataset(24, 8, 3, 0.1, 5).unwrap();
    for v in chain_variants() {
        let h = Herder::new(&m, data.cases(), ChainConfig::new(v.clone())).unwrap();
        let mut s = h.init(None).unwrap();
        let mut worst = 0.0f64;
        h.run_with(&mut s, 2000, |s| worst = worst.max(h.telescoping_residual(s).unwrap() / s.t() as f64));
        assert!(worst <= 1e-10, "{}: {worst}", v.name());
    }
}

#[test]
fn sequential_and_parallel_agree_bitwise() {
    let m = RbmModel::new(10, 5).unwrap();
    let data = prototype_dataset(40, 10, 4, 0.15, 9).unwrap();
    for v in chain_variants() {
        let run = |exec| {
            let h = Herder::new(&m, data.cases(), ChainConfig::new(v.clone()).with_execution(exec)).unwrap();
            let mut s = h.init(None).unwrap();
            let traj = h.run(&mut s, 300, 7).unwrap();
            (traj, s.weights().clone())
        };
        assert_eq!(run(Execution::Sequential), run(Execution::Parallel), "{}", v.name());
    }
}

#[test]
fn frozen_coordinates_never_move() {
    let m = RbmModel::new(6, 3).unwrap();
    let data = prototype_dataset(12, 6, 2, 0.1, 2).unwrap();
    let frozen: Vec<usize> = m.hidden_bias_range().collect();
    let h = Herder::new(&m, data.cases(), ChainConfig::new(Variant::Safe).with_frozen(frozen.clone())).unwrap();
    let mut s = h.init(None).unwrap();
    let w0 = s.weights().clone();
    h.run_with(&mut s, 500, |_| {});
    for a in frozen {
        assert_eq!(s.weights()[a], w0[a]);
    }
    assert!(h.telescoping_residual(&s).unwrap() <= 1e-10 * 500.0);
}

#[test]
fn decoupled_replays_fully_observed() {
    let m = random_enumerated_model(12, 1, 5, 3).unwrap();
    let data: Vec<usize> = vec![0, 2, 3, 3, 7, 11];
    let fo = Herder::new(&m, &data, ChainConfig::new(Variant::FullyObserved(JointSearch::Exhaustive))).unwrap();
    let mut fs = fo.init(None).unwrap();
    let moment = fs.driving().to_vec();
    let dec = Herder::new(
        &m,
        &[],
        ChainConfig::new(Variant::Decoupled {
            rates: RateVector::new(moment, 1),
            search: JointSearch::Exhaustive,
        }),
    )
    .unwrap();
    let mut ds = dec.init(None).unwrap();
    for _ in 0..2000 {
        fo.step(&mut fs);
        dec.step(&mut ds);
        assert_eq!(fs.sample(), ds.sample());
        assert_eq!(fs.weights(), ds.weights());
    }
}

#[test]
fn learned_rates_are_running_means() {
    let m = RbmModel::new(6, 3).unwrap();
    let data = prototype_dataset(16, 6, 2, 0.1, 4).unwrap();
    let h = Herder::new(&m, data.cases(), ChainConfig::new(Variant::Idealized)).unwrap();
    let mut s = h.init(None).unwrap();
    let mut direct = vec![0.0; m.n_features()];
    let mut probe = h.init(None).unwrap();
    h.run_with(&mut probe, 400, |s| direct.iter_mut().zip(s.driving()).for_each(|(d, g)| *d += g));
    let r = learn_rates(&h, &mut s, 400, RateSource::Driving).unwrap();
    assert_eq!(r.count(), 400);
    for (a, b) in r.values().iter().zip(&direct) {
        let b = b / 400.0;
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "{a} vs {b}");
    }
}

fn state_sequence<M: FeatureModel>(h: &Herder<'_, M>, w0: Vec<f64>, steps: usize) -> Vec<(herding::model::StateOf<M>, Vec<M::Hidden>)> {
    let mut s = h.init(Some(w0.into())).unwrap();
    (0..steps)
        .map(|_| {
            h.step(&mut s);
            (s.sample().clone(), s.hidden().to_vec())
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn transform_family_is_equivalent(seed in any::<u64>(), variant in 0usize..3) {
        let m = RbmModel::new(6, 3).unwrap();
        let data = prototype_dataset(12, 6, 3, 0.1, 8).unwrap();
        let f = m.n_features();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eta = 10f64.powf(rng.gen_range(-1.0..1.0));
        let gamma = 10f64.powf(rng.gen_range(-1.0..1.0));
        let offset: Vec<f64> = (0..f).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t = TransformParams::new(eta, gamma, offset).unwrap();
        let w0 = default_initial_weights(f, seed).into_inner();
        let v = chain_variants()[variant].clone();
        let transformed = Herder::new(&m, data.cases(), ChainConfig::new(v.clone()).with_transform(t.clone())).unwrap();
        let canonical = Herder::new(&m, data.cases(), ChainConfig::new(v)).unwrap();
        let v0 = apply_transform_equivalence(&w0, &t).unwrap().into_inner();
        prop_assert_eq!(state_sequence(&transformed, w0, 200), state_sequence(&canonical, v0, 200));
    }

    #[test]
    fn gap_is_weight_displacement(steps in 1u64..200) {
        let m = RbmModel::new(5, 2).unwrap();
        let data = prototype_dataset(10, 5, 2, 0.2, 1).unwrap();
        let t = TransformParams::new(0.5, 1.0, Vec::new()).unwrap();
        let h = Herder::new(&m, data.cases(), ChainConfig::new(Variant::Idealized).with_transform(t)).unwrap();
        let mut s = h.init(None).unwrap();
        h.run_with(&mut s, steps, |_| {});
        let gap = moment_gap(&s).unwrap();
        let w0 = default_initial_weights(m.n_features(), herding::herding::DEFAULT_WEIGHT_SEED);
        for a in 0..gap.len() {
            let expect = (s.weights()[a] - w0[a]) / (0.5 * steps as f64);
            prop_assert!((gap[a] - expect).abs() <= 1e-10 * steps as f64);
        }
    }
}
