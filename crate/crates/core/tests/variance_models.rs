mod common;

use common::{mean_se, rng};
use mogp_core::rng::tag;
use mogp_core::variance::{check_id_conditions, MODEL_NAMES};
use mogp_core::experiments::bundled_models;
use mogp_core::{make_model, Error, Measure, ModelSpec, RngStream, VarianceModel};
use proptest::prelude::*;
use serde_json::json;

fn sums(m: &VarianceModel, p: usize, p_next: Option<usize>, reps: usize, label: &str) -> Vec<f64> {
    let mut r = rng(label);
    (0..reps).map(|_| m.sample_variances(p, p_next, &mut r).unwrap().iter().sum()).collect()
}

#[test]
fn declared_limits() {
    let m = make_model("deterministic", json!({"c1": 1.5})).unwrap();
    assert_eq!(m.limit().location_a, 1.5);
    assert!(m.limit().measure.is_trivial());
    let m = make_model("bernoulli", json!({"c": 2.0})).unwrap();
    assert_eq!(m.limit().location_a, 0.0);
    assert_eq!(m.limit().measure, Measure::Atomic { atoms: vec![(1.0, 2.0)] });
    let m = make_model("group_lasso_gamma", json!({"c1": 3.0})).unwrap();
    assert_eq!(m.limit().location_a, 3.0);
    let m = make_model("inverse_gamma", json!({})).unwrap();
    assert_eq!(m.limit().location_a, 2.0);
    assert!(m.limit().measure.is_trivial());
    let m = make_model("horseshoe", json!({"c": 4.0})).unwrap();
    assert_eq!(m.limit().measure, Measure::horseshoe(4.0).unwrap());
    let m = make_model("generalized_bfry", json!({"eta": 1.0, "alpha": 0.3, "tau": 5.0})).unwrap();
    assert_eq!(m.limit().measure, Measure::gen_gamma_pareto(1.0, 0.3, 5.0).unwrap());
    assert_eq!(MODEL_NAMES.len(), bundled_models().len());
}

#[test]
fn factory_rejects_bad_input() {
    assert!(matches!(make_model("gaussian", json!({})), Err(Error::Unknown(_))));
    assert!(make_model("beta", json!({"eta": -1.0, "b": 1.0})).is_err());
    assert!(make_model("beta", json!({"eta": 1.0})).is_err());
    assert!(make_model("perman_generic", json!({"measure": {"kind": "atomic", "atoms": [[1.0, 1.0]]}})).is_err());
    let gl = make_model("group_lasso_gamma", json!({"c1": 1.0})).unwrap();
    assert!(gl.sample_variances(10, None, &mut rng("gl")).is_err());
}

#[test]
fn models_round_trip_through_json() {
    for m in bundled_models() {
        let s = serde_json::to_string(&m).unwrap();
        let back: VarianceModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back.spec(), m.spec());
        let spec: ModelSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(&spec, m.spec());
    }
}

#[test]
fn inverse_gamma_sum_converges_to_two() {
    let m = make_model("inverse_gamma", json!({})).unwrap();
    let (mean, _) = mean_se(&sums(&m, 2000, None, 1000, "ig sums"));
    assert!((mean - 2.0).abs() < 0.05, "mean {mean}");
}

#[test]
fn group_lasso_sum_concentrates() {
    let m = make_model("group_lasso_gamma", json!({"c1": 1.0})).unwrap();
    let s = sums(&m, 2000, Some(100), 1000, "gl sums");
    let (mean, _) = mean_se(&s);
    assert!((mean - 1.0).abs() < 0.05, "mean {mean}");
    // the sum converges in probability, not just in mean
    assert!(s.iter().all(|x| (x - 1.0).abs() < 0.05));
}

#[test]
fn bernoulli_count_of_ones() {
    let m = make_model("bernoulli", json!({"c": 2.0})).unwrap();
    let s = sums(&m, 2000, None, 10_000, "bernoulli sums");
    let (mean, se) = mean_se(&s);
    assert!((mean - 2.0).abs() < 0.05 && (mean - 2.0).abs() < 4.0 * se, "mean {mean}");
    assert!(s.iter().all(|x| x.fract() == 0.0));
}

#[test]
fn horseshoe_exceedance_rate() {
    // p P(λ > 1) → ρ̄(1) = √c
    let m = make_model("horseshoe", json!({"c": 4.0})).unwrap();
    let (p, reps) = (2000, 400);
    let mut r = rng("horseshoe tail");
    let hits: Vec<f64> = (0..reps)
        .map(|_| m.sample_variances(p, None, &mut r).unwrap().iter().filter(|&&x| x > 1.0).count() as f64)
        .collect();
    let (mean, se) = mean_se(&hits);
    assert!((mean - 2.0).abs() < 3.0 * se, "p P(λ > 1) = {mean} ± {se}");
    let exact = p as f64 * m.node_survival(p, 1.0).unwrap();
    assert!((exact - 2.0).abs() < 1e-3, "closed form {exact}");
}

#[test]
fn convergence_conditions_hold_for_bundled_models() {
    for m in bundled_models() {
        let stream = RngStream::new(11, 0).derive(tag(m.name()));
        let rep = check_id_conditions(&m, &[500, 4000], &[0.1, 0.5], &[0.1, 1.0], 20_000, stream).unwrap();
        let failed: Vec<_> = rep.checks.iter().filter(|c| !c.pass).map(|c| &c.label).collect();
        assert!(failed.is_empty(), "{}: {failed:?}", m.name());
        assert!(rep.flags_consistent());
    }
}

#[test]
fn samplers_are_deterministic_per_stream() {
    for m in bundled_models() {
        let a = m.sample_variances(300, Some(10), &mut RngStream::new(5, 9).rng()).unwrap();
        let b = m.sample_variances(300, Some(10), &mut RngStream::new(5, 9).rng()).unwrap();
        assert_eq!(a, b, "{}", m.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn variances_are_nonnegative_and_sized(idx in 0usize..11, p in 2usize..400, seed in any::<u64>()) {
        let m = &bundled_models()[idx];
        let lam = m.sample_variances(p, Some(7), &mut RngStream::new(seed, 0).rng()).unwrap();
        prop_assert_eq!(lam.len(), p);
        prop_assert!(lam.iter().all(|x| *x >= 0.0 && x.is_finite()));
    }

    #[test]
    fn closed_form_survival_is_a_probability(idx in 0usize..11, p in 2usize..5000, x in 1e-6f64..10.0) {
        let m = &bundled_models()[idx];
        if let Some(s) = m.node_survival(p, x) {
            prop_assert!((0.0..=1.0).contains(&s));
            if let Some(s2) = m.node_survival(p, 2.0 * x) {
                prop_assert!(s2 <= s + 1e-12);
            }
        }
    }
}
