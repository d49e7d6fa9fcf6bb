use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sopcast::harness::{mape, prepare, rmse, run_benchmark, BenchmarkConfig, Method};
use sopcast::neural::TrainConfig;
use sopcast::synth::{generate, SynthConfig, DAY};

fn rmse_loop(t: &[f64], p: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..t.len() {
        s += (t[i] - p[i]) * (t[i] - p[i]);
    }
    (s / t.len() as f64).sqrt()
}

fn mape_loop(t: &[f64], p: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..t.len() {
        s += ((t[i] - p[i]) / t[i]).abs();
    }
    100.0 * s / t.len() as f64
}

#[test]
fn metrics_match_loop_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let n = rng.random_range(1..1000);
        let t: Vec<f64> = (0..n).map(|_| rng.random_range(50.0..400.0)).collect();
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(50.0..400.0)).collect();
        assert!((rmse(&t, &p).unwrap() - rmse_loop(&t, &p)).abs() <= 1e-12);
        assert!((mape(&t, &p).unwrap() - mape_loop(&t, &p)).abs() <= 1e-12);
    }
}

proptest! {
    #[test]
    fn metrics_are_non_negative_and_zero_on_perfect(v in prop::collection::vec(1.0..500.0f64, 1..100), d in -10.0..10.0f64) {
        let shifted: Vec<f64> = v.iter().map(|x| x + d).collect();
        prop_assert!(rmse(&v, &shifted).unwrap() >= 0.0);
        prop_assert!((rmse(&v, &shifted).unwrap() - d.abs()).abs() <= 1e-9);
        prop_assert!(mape(&v, &shifted).unwrap() >= 0.0);
        prop_assert_eq!(rmse(&v, &v).unwrap(), 0.0);
        prop_assert_eq!(mape(&v, &v).unwrap(), 0.0);
    }
}

fn small_data() -> sopcast::synth::SynthData {
    let cfg = SynthConfig {
        duration_s: 4 * DAY,
        ..SynthConfig::default()
    };
    generate(&cfg, 5).unwrap()
}

#[test]
fn split_is_chronological_on_both_scales() {
    let data = small_data();
    let cfg = BenchmarkConfig {
        test_fraction: 0.4,
        ..BenchmarkConfig::default()
    };
    let p = prepare(&data.sop, &data.weather, &cfg).unwrap();
    for s in [&p.short, &p.long] {
        let last_train = (0..s.train.len()).map(|i| s.train.times(i).last_target).max().unwrap();
        let first_test = (0..s.test.len()).map(|i| s.test.times(i).first_forecast).min().unwrap();
        assert!(last_train < p.split_time && p.split_time <= first_test);
    }
    assert_eq!(p.long.sop.step, 1800);
    assert_eq!(p.short.test.horizon(), 12);
    assert_eq!(p.long.test.horizon(), 24);
}

#[test]
fn reports_are_deterministic_and_complete() {
    let data = small_data();
    let cfg = BenchmarkConfig {
        test_fraction: 0.4,
        short_train_stride: 200,
        short_test_stride: 600,
        train: TrainConfig {
            max_epochs: 3,
            ..TrainConfig::default()
        },
        ..BenchmarkConfig::default()
    };
    let a = run_benchmark(&data.sop, &data.weather, &cfg, "small").unwrap();
    let b = run_benchmark(&data.sop, &data.weather, &cfg, "small").unwrap();
    assert_eq!(a.short.to_json().unwrap(), b.short.to_json().unwrap());
    assert_eq!(a.long.to_json().unwrap(), b.long.to_json().unwrap());
    assert_eq!(a.predictions_csv(), b.predictions_csv());

    let names: Vec<&str> = a.short.rows.iter().map(|r| r.method.as_str()).collect();
    assert_eq!(names, ["windy", "calm", "ann", "moving_average"]);
    assert!(a.short.rows.iter().chain(&a.long.rows).all(|r| r.rmse >= 0.0 && r.mape >= 0.0));
    assert!(a.short.improvements.contains_key("windy_over_calm"));
    assert!(a.long.improvements.contains_key("long_term_over_ann_dwt"));
    assert!(a.long.rmse(Method::MovingAverage).is_finite());
    assert!(a.predictions_csv().starts_with("timestamp,truth,prediction,method\n"));
}
