use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sopcast::wavelet::{coeff_lengths, dwt_step, wavedec, waverec, waverec_bands, CoefficientPyramid};

fn random_signal(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-100.0..100.0)).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reconstruction_is_perfect(seed in any::<u64>(), n in 2usize..2048, levels in 1usize..=8) {
        let x = random_signal(seed, n);
        let p = wavedec(&x, levels).unwrap();
        prop_assert!(max_abs_diff(&waverec(&p).unwrap(), &x) <= 1e-10);
    }

    #[test]
    fn decomposition_is_linear(seed in any::<u64>(), n in 2usize..600, a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let x = random_signal(seed, n);
        let y = random_signal(seed ^ 0x9e37, n);
        let mix: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let (px, py, pm) = (wavedec(&x, 5).unwrap(), wavedec(&y, 5).unwrap(), wavedec(&mix, 5).unwrap());
        for k in 0..6 {
            let expected: Vec<f64> = px.band(k).iter().zip(py.band(k)).map(|(u, v)| a * u + b * v).collect();
            prop_assert!(max_abs_diff(pm.band(k), &expected) <= 1e-10);
        }
    }

    #[test]
    fn band_lengths_match_rule(n in 2usize..5000, levels in 1usize..=10) {
        let p = wavedec(&vec![0.0; n], levels).unwrap();
        let lens: Vec<usize> = p.bands().iter().map(Vec::len).collect();
        prop_assert_eq!(lens, coeff_lengths(n, levels).unwrap());
    }

    #[test]
    fn energy_is_preserved_for_tapered_signals(seed in any::<u64>(), n in 256usize..1500) {
        // a Hann taper keeps boundary extension negligible
        let x: Vec<f64> = random_signal(seed, n)
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let w = (std::f64::consts::PI * i as f64 / (n - 1) as f64).sin().powi(2);
                v * w
            })
            .collect();
        let ex: f64 = x.iter().map(|v| v * v).sum();
        let ec: f64 = wavedec(&x, 3).unwrap().bands().iter().flatten().map(|v| v * v).sum();
        prop_assert!(((ec - ex) / ex).abs() <= 0.01, "ratio {}", ec / ex);
    }
}

#[test]
fn single_level_equals_dwt_step() {
    let x = random_signal(5, 37);
    let p = wavedec(&x, 1).unwrap();
    let (a, d) = dwt_step(&x).unwrap();
    assert_eq!(p.band(0), &a[..]);
    assert_eq!(p.band(1), &d[..]);
}

#[test]
fn zero_pyramid_reconstructs_zero_signal() {
    let lens = coeff_lengths(48, 5).unwrap();
    let bands: Vec<Vec<f64>> = lens.iter().map(|&l| vec![0.0; l]).collect();
    let y = waverec_bands(5, 48, &bands).unwrap();
    assert_eq!(y, vec![0.0; 48]);
}

#[test]
fn ramp_has_vanishing_interior_details() {
    let n = 256;
    let x: Vec<f64> = (0..n).map(|i| 7.0 + 0.5 * i as f64).collect();
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let p = wavedec(&x, 2).unwrap();
    // D1 coefficient o reads x[2o-8 ..= 2o+1]; D2 reads A1 whose interior spans
    // indices 4 ..= (n-2)/2
    let d1 = p.band(2);
    for (o, v) in d1.iter().enumerate() {
        if 2 * o >= 8 && 2 * o + 1 < n {
            assert!(v.abs() <= 1e-8 * scale, "D1[{o}] = {v}");
        }
    }
    let a1_hi = (n - 2) / 2;
    let d2 = p.band(1);
    for (o, v) in d2.iter().enumerate() {
        if 2 * o >= 12 && 2 * o + 1 <= a1_hi {
            assert!(v.abs() <= 1e-8 * scale, "D2[{o}] = {v}");
        }
    }
}

#[test]
fn zeroing_a_band_removes_exactly_its_contribution() {
    let x = random_signal(21, 48);
    let p = wavedec(&x, 5).unwrap();
    for k in 0..6 {
        let mut without = p.bands().to_vec();
        without[k].iter_mut().for_each(|v| *v = 0.0);
        let only: Vec<Vec<f64>> = p
            .bands()
            .iter()
            .enumerate()
            .map(|(j, b)| if j == k { b.clone() } else { vec![0.0; b.len()] })
            .collect();
        let y_without = waverec(&CoefficientPyramid::from_bands(5, 48, without).unwrap()).unwrap();
        let y_only = waverec_bands(5, 48, &only).unwrap();
        let sum: Vec<f64> = y_without.iter().zip(&y_only).map(|(a, b)| a + b).collect();
        assert!(max_abs_diff(&sum, &x) <= 1e-10);
    }
}

#[test]
fn round_trip_standard_lengths() {
    for (seed, n) in [(1u64, 36usize), (2, 48), (3, 257), (4, 1024)] {
        let x = random_signal(seed, n);
        let p = wavedec(&x, 5).unwrap();
        assert!(max_abs_diff(&waverec(&p).unwrap(), &x) <= 1e-10);
    }
}
