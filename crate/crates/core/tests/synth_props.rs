use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sopcast::forecast::pearson;
use sopcast::series::{write_sop_to, write_weather_to, HUMIDITY, TEMPERATURE, WIND_GUST};
use sopcast::synth::{generate, summary_stats, SynthConfig, SynthData, DAY, WEATHER_STEP};

/// SOP sampled on the weather grid.
fn sop_on_weather_grid(d: &SynthData) -> Vec<f64> {
    (0..d.weather.len())
        .filter_map(|i| d.sop.index_of(d.weather.timestamp(i)).map(|j| d.sop.values()[j]))
        .collect()
}

fn corr(d: &SynthData, channel: &str) -> f64 {
    let s = sop_on_weather_grid(d);
    pearson(&s, &d.weather.channel(channel).unwrap()[..s.len()]).r
}

#[test]
fn default_config_matches_target_statistics() {
    let d = generate(&SynthConfig::default(), 42).unwrap();
    let s = summary_stats(d.sop.values()).unwrap();
    assert!((s.mean - 211.0).abs() <= 5.0, "mean {}", s.mean);
    assert!((s.std - 42.0).abs() <= 5.0, "std {}", s.std);
    assert_eq!(d.sop.len(), 10 * DAY as usize);
    assert_eq!(d.sop.step, 1);
    assert_eq!(d.weather.step, WEATHER_STEP);
}

#[test]
fn decoupled_sop_is_uncorrelated_with_weather() {
    let cfg = SynthConfig {
        wind_gain: 0.0,
        temperature_gain: 0.0,
        humidity_gain: 0.0,
        ..SynthConfig::default()
    };
    for seed in [1, 42] {
        let d = generate(&cfg, seed).unwrap();
        for ch in [WIND_GUST, TEMPERATURE, HUMIDITY] {
            let r = corr(&d, ch);
            assert!(r.abs() <= 0.1, "seed {seed} {ch}: r = {r}");
        }
    }
}

#[test]
fn wind_coupling_is_monotone() {
    let rs: Vec<f64> = [0.0, 0.5, 1.0]
        .iter()
        .map(|&g| {
            let cfg = SynthConfig {
                wind_gain: g,
                ..SynthConfig::default()
            };
            corr(&generate(&cfg, 7).unwrap(), WIND_GUST).abs()
        })
        .collect();
    assert!(rs[0] < rs[1] && rs[1] < rs[2], "{rs:?}");
}

#[test]
fn csv_output_is_byte_identical_per_seed() {
    let cfg = SynthConfig {
        duration_s: 2 * DAY,
        ..SynthConfig::default()
    };
    let bytes = |seed| {
        let d = generate(&cfg, seed).unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        write_sop_to(&mut a, &d.sop).unwrap();
        write_weather_to(&mut b, &d.weather).unwrap();
        (a, b)
    };
    assert_eq!(bytes(3), bytes(3));
    assert_ne!(bytes(3), bytes(4));
}

#[test]
fn summary_matches_two_pass_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let v: Vec<f64> = (0..5000).map(|_| rng.random_range(-50.0..300.0)).collect();
    let mut sum = 0.0;
    for x in &v {
        sum += x;
    }
    let m = sum / v.len() as f64;
    let mut ss = 0.0;
    for x in &v {
        ss += (x - m) * (x - m);
    }
    let s = summary_stats(&v).unwrap();
    assert!((s.mean - m).abs() <= 1e-12);
    assert!((s.std - (ss / v.len() as f64).sqrt()).abs() <= 1e-12);
}

#[test]
fn bursts_raise_the_gust_tail() {
    let d = generate(&SynthConfig::default(), 42).unwrap();
    let g = summary_stats(d.weather.channel(WIND_GUST).unwrap()).unwrap();
    assert!(g.min >= 0.0);
    assert!(g.max > g.mean + 2.0 * g.std);
}
