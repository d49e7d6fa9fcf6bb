//! Uniformly sampled series, exogenous weather tables and windowed datasets.
//!
//! Timestamps are whole UTC epoch seconds. A series stores only its start time
//! and step; sample `i` lives at `start + i * step`.

mod io;

use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{
    format_timestamp, parse_timestamp, read_sop_csv, read_sop_from, read_weather_csv, read_weather_from, repair_gaps, write_sop_csv,
    write_sop_to, write_weather_csv, write_weather_to, MAX_REPAIRABLE_GAP,
};

pub const WIND_GUST: &str = "wind_gust";
pub const TEMPERATURE: &str = "temperature";
pub const HUMIDITY: &str = "humidity";
pub const REQUIRED_CHANNELS: [&str; 3] = [WIND_GUST, TEMPERATURE, HUMIDITY];

pub const SOP_UNIT: &str = "rad/s";

/// Default EMA smoothing factor used for denoising.
pub const DEFAULT_EMA_ALPHA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformSeries {
    pub start: i64,
    pub step: i64,
    values: Vec<f64>,
    pub unit: String,
}

impl UniformSeries {
    pub fn new(start: i64, step: i64, values: Vec<f64>, unit: impl Into<String>) -> Result<Self> {
        if step <= 0 {
            return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
        }
        if values.is_empty() {
            return Err(Error::InsufficientData("series must hold at least one sample".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite value at index {i}")));
        }
        Ok(Self {
            start,
            step,
            values,
            unit: unit.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn timestamp(&self, i: usize) -> i64 {
        self.start + i as i64 * self.step
    }

    /// Timestamp of the last sample.
    pub fn end(&self) -> i64 {
        self.timestamp(self.len() - 1)
    }

    /// Index of `t` if it falls exactly on this grid.
    pub fn index_of(&self, t: i64) -> Option<usize> {
        let off = t - self.start;
        if off < 0 || off % self.step != 0 {
            return None;
        }
        let i = (off / self.step) as usize;
        (i < self.len()).then_some(i)
    }

    /// Samples `[from, to)` as a new series.
    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        if from >= to || to > self.len() {
            return Err(Error::InvalidParameter(format!(
                "slice {from}..{to} out of range for length {}",
                self.len()
            )));
        }
        Self::new(
            self.timestamp(from),
            self.step,
            self.values[from..to].to_vec(),
            self.unit.clone(),
        )
    }

    /// Every `factor`-th sample starting at `offset` (no averaging).
    pub fn subsample(&self, offset: usize, factor: usize) -> Result<Self> {
        if factor == 0 || offset >= self.len() {
            return Err(Error::InvalidParameter("invalid subsampling".into()));
        }
        let values: Vec<f64> = self.values[offset..].iter().step_by(factor).copied().collect();
        Self::new(
            self.timestamp(offset),
            self.step * factor as i64,
            values,
            self.unit.clone(),
        )
    }

    /// Linear interpolation at an arbitrary timestamp inside the covered range.
    pub fn interpolate_at(&self, t: i64) -> Option<f64> {
        if t < self.start || t > self.end() {
            return None;
        }
        let off = t - self.start;
        let i = (off / self.step) as usize;
        let rem = off - i as i64 * self.step;
        if rem == 0 {
            return Some(self.values[i]);
        }
        let frac = rem as f64 / self.step as f64;
        let (a, b) = (self.values[i], self.values[i + 1]);
        Some(a + frac * (b - a))
    }
}

/// Time-aligned multichannel weather table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherTable {
    pub start: i64,
    pub step: i64,
    channels: IndexMap<String, Vec<f64>>,
}

impl WeatherTable {
    pub fn new(start: i64, step: i64, channels: IndexMap<String, Vec<f64>>) -> Result<Self> {
        if step <= 0 {
            return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
        }
        for name in REQUIRED_CHANNELS {
            if !channels.contains_key(name) {
                return Err(Error::MissingChannel(name.to_string()));
            }
        }
        let len = channels[WIND_GUST].len();
        if len == 0 {
            return Err(Error::InsufficientData("weather table is empty".into()));
        }
        for (name, values) in &channels {
            if values.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    actual: values.len(),
                    context: "weather channel length",
                });
            }
            if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "non-finite value in channel `{name}` at index {i}"
                )));
            }
        }
        Ok(Self { start, step, channels })
    }

    pub fn len(&self) -> usize {
        self.channels[WIND_GUST].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn timestamp(&self, i: usize) -> i64 {
        self.start + i as i64 * self.step
    }

    pub fn end(&self) -> i64 {
        self.timestamp(self.len() - 1)
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.channels.keys().map(String::as_str)
    }

    pub fn channels(&self) -> &IndexMap<String, Vec<f64>> {
        &self.channels
    }

    pub fn channel(&self, name: &str) -> Result<&[f64]> {
        self.channels
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingChannel(name.to_string()))
    }

    pub fn series(&self, name: &str) -> Result<UniformSeries> {
        UniformSeries::new(self.start, self.step, self.channel(name)?.to_vec(), channel_unit(name))
    }

    fn map_channels(&self, start: i64, step: i64, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let channels = self
            .channels
            .iter()
            .map(|(k, v)| (k.clone(), f(v)))
            .collect();
        Self::new(start, step, channels)
    }

    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        if from >= to || to > self.len() {
            return Err(Error::InvalidParameter(format!(
                "slice {from}..{to} out of range for length {}",
                self.len()
            )));
        }
        self.map_channels(self.timestamp(from), self.step, |v| v[from..to].to_vec())
    }

    /// Every channel linearly resampled to `target_step`.
    pub fn resample_linear(&self, target_step: i64) -> Result<Self> {
        let mut channels = IndexMap::new();
        let mut start = self.start;
        for (name, values) in &self.channels {
            let s = UniformSeries::new(self.start, self.step, values.clone(), "")?;
            let r = resample_linear(&s, target_step)?;
            start = r.start;
            channels.insert(name.clone(), r.into_values());
        }
        Self::new(start, target_step, channels)
    }
}

pub fn channel_unit(name: &str) -> &'static str {
    match name {
        WIND_GUST => "m/s",
        TEMPERATURE => "degC",
        HUMIDITY => "%RH",
        _ => "",
    }
}

/// Exponential moving average: `y_0 = x_0`, `y_t = a x_t + (1 - a) y_{t-1}`.
pub fn ema_denoise(s: &UniformSeries, alpha: f64) -> Result<UniformSeries> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("EMA alpha must be in (0, 1], got {alpha}")));
    }
    let mut out = Vec::with_capacity(s.len());
    let mut prev = s.values[0];
    out.push(prev);
    for &x in &s.values[1..] {
        prev = alpha * x + (1.0 - alpha) * prev;
        out.push(prev);
    }
    UniformSeries::new(s.start, s.step, out, s.unit.clone())
}

/// Linear resampling onto `start + k * target_step` up to the last original timestamp.
pub fn resample_linear(s: &UniformSeries, target_step: i64) -> Result<UniformSeries> {
    if target_step <= 0 {
        return Err(Error::InvalidParameter(format!(
            "target step must be positive, got {target_step}"
        )));
    }
    if s.len() < 2 {
        return Err(Error::InsufficientData("resampling needs at least two samples".into()));
    }
    let span = s.end() - s.start;
    let count = (span / target_step) as usize + 1;
    let values = (0..count)
        .map(|k| {
            s.interpolate_at(s.start + k as i64 * target_step)
                .expect("grid point inside original range")
        })
        .collect();
    UniformSeries::new(s.start, target_step, values, s.unit.clone())
}

/// Brings SOP and weather onto one shared grid (the SOP grid).
///
/// Grids with the same step and phase are intersected directly; otherwise the
/// weather channels are linearly interpolated at the SOP timestamps covered by
/// the weather range.
pub fn align(sop: &UniformSeries, weather: &WeatherTable) -> Result<(UniformSeries, WeatherTable)> {
    let step = sop.step;
    let lo = sop.start.max(weather.start);
    let hi = sop.end().min(weather.end());
    if lo > hi {
        return Err(Error::NoOverlap);
    }
    // first and last SOP indices inside [lo, hi]
    let k0 = (lo - sop.start + step - 1).div_euclid(step);
    let k1 = (hi - sop.start).div_euclid(step);
    if k0 > k1 {
        return Err(Error::NoOverlap);
    }
    let (k0, k1) = (k0 as usize, k1 as usize);
    let sop_out = sop.slice(k0, k1 + 1)?;

    let same_grid = weather.step == step && (weather.start - sop.start).rem_euclid(step) == 0;
    let weather_out = if same_grid {
        let w0 = ((sop_out.start - weather.start) / step) as usize;
        weather.slice(w0, w0 + sop_out.len())?
    } else {
        let mut channels = IndexMap::new();
        for (name, values) in weather.channels() {
            let ch = UniformSeries::new(weather.start, weather.step, values.clone(), "")?;
            let v = (0..sop_out.len())
                .map(|i| {
                    ch.interpolate_at(sop_out.timestamp(i))
                        .ok_or(Error::NoOverlap)
                })
                .collect::<Result<Vec<_>>>()?;
            channels.insert(name.clone(), v);
        }
        WeatherTable::new(sop_out.start, step, channels)?
    };
    Ok((sop_out, weather_out))
}

/// Time bookkeeping for one windowed sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleTimes {
    /// Timestamp of the last input sample (forecast origin).
    pub origin: i64,
    /// Timestamp of the first forecast step.
    pub first_forecast: i64,
    /// Timestamp of the last target sample.
    pub last_target: i64,
}

/// Sliding-window view over a series.
///
/// Input `X` covers `[o, o + W)`; the target `Y` is the input span shifted by
/// `H`, so its last `H` values are the future and its first `W - H` values
/// repeat the tail of `X`. Exogenous windows share the input span.
#[derive(Debug, Clone)]
pub struct WindowedDataset {
    start: i64,
    step: i64,
    window: usize,
    horizon: usize,
    sop: Arc<Vec<f64>>,
    exo: Arc<IndexMap<String, Vec<f64>>>,
    offsets: Vec<usize>,
    insufficient: bool,
}

pub fn make_windows(
    sop: &UniformSeries,
    exo: Option<&WeatherTable>,
    window: usize,
    horizon: usize,
    stride: usize,
) -> Result<WindowedDataset> {
    if horizon == 0 || window <= horizon {
        return Err(Error::InvalidParameter(format!(
            "need window > horizon >= 1, got window={window} horizon={horizon}"
        )));
    }
    if stride == 0 {
        return Err(Error::InvalidParameter("stride must be >= 1".into()));
    }
    let exo_channels = match exo {
        Some(w) => {
            if w.start != sop.start || w.step != sop.step || w.len() != sop.len() {
                return Err(Error::InvalidParameter(
                    "exogenous table must share the SOP time grid (align first)".into(),
                ));
            }
            w.channels().clone()
        }
        None => IndexMap::new(),
    };
    let n = sop.len();
    let insufficient = n < window + horizon;
    let offsets = if insufficient {
        Vec::new()
    } else {
        (0..=(n - window - horizon)).step_by(stride).collect()
    };
    Ok(WindowedDataset {
        start: sop.start,
        step: sop.step,
        window,
        horizon,
        sop: Arc::new(sop.values().to_vec()),
        exo: Arc::new(exo_channels),
        offsets,
        insufficient,
    })
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// True when the source series was shorter than `W + H`.
    pub fn insufficient_history(&self) -> bool {
        self.insufficient
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn step(&self) -> i64 {
        self.step
    }

    pub fn has_channel(&self, name: &str) -> bool {
        self.exo.contains_key(name)
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.exo.keys().map(String::as_str)
    }

    pub fn input(&self, i: usize) -> &[f64] {
        let o = self.offsets[i];
        &self.sop[o..o + self.window]
    }

    pub fn target(&self, i: usize) -> &[f64] {
        let o = self.offsets[i] + self.horizon;
        &self.sop[o..o + self.window]
    }

    /// The `H` future values (tail of the target window).
    pub fn future(&self, i: usize) -> &[f64] {
        let o = self.offsets[i] + self.window;
        &self.sop[o..o + self.horizon]
    }

    pub fn exo(&self, channel: &str, i: usize) -> Result<&[f64]> {
        let v = self
            .exo
            .get(channel)
            .ok_or_else(|| Error::MissingChannel(channel.to_string()))?;
        let o = self.offsets[i];
        Ok(&v[o..o + self.window])
    }

    pub fn times(&self, i: usize) -> SampleTimes {
        let o = self.offsets[i] as i64;
        let origin = self.start + (o + self.window as i64 - 1) * self.step;
        SampleTimes {
            origin,
            first_forecast: origin + self.step,
            last_target: origin + self.horizon as i64 * self.step,
        }
    }

    /// Anchor timestamp of sample `i` (the forecast origin).
    pub fn anchor_time(&self, i: usize) -> i64 {
        self.times(i).origin
    }

    /// Keeps the samples whose times satisfy `keep`; data is shared, not copied.
    pub fn retain(&self, keep: impl Fn(&SampleTimes) -> bool) -> Self {
        let offsets = (0..self.len())
            .filter(|&i| keep(&self.times(i)))
            .map(|i| self.offsets[i])
            .collect();
        Self {
            offsets,
            ..self.clone()
        }
    }
}

/// Population mean and standard deviation used for z-scoring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZScore {
    pub mean: f64,
    pub std: f64,
}

impl ZScore {
    /// Below this the std is treated as 1 (degenerate band).
    pub const MIN_STD: f64 = 1e-12;

    pub fn fit(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("z-score of an empty list".into()));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Ok(Self { mean, std: var.sqrt() })
    }

    fn scale(&self) -> f64 {
        if self.std < Self::MIN_STD {
            1.0
        } else {
            self.std
        }
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let s = self.scale();
        values.iter().map(|v| (v - self.mean) / s).collect()
    }

    pub fn apply_into(&self, values: &[f64], out: &mut Vec<f64>) {
        let s = self.scale();
        out.extend(values.iter().map(|v| (v - self.mean) / s));
    }

    pub fn invert(&self, values: &[f64]) -> Vec<f64> {
        let s = self.scale();
        values.iter().map(|v| v * s + self.mean).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn series(values: Vec<f64>) -> UniformSeries {
        UniformSeries::new(0, 1, values, SOP_UNIT).unwrap()
    }

    fn weather(start: i64, step: i64, len: usize) -> WeatherTable {
        let mut ch = IndexMap::new();
        for (k, name) in REQUIRED_CHANNELS.iter().enumerate() {
            ch.insert(
                name.to_string(),
                (0..len).map(|i| (i * (k + 1)) as f64).collect(),
            );
        }
        WeatherTable::new(start, step, ch).unwrap()
    }

    #[test]
    fn series_rejects_bad_input() {
        assert!(UniformSeries::new(0, 0, vec![1.0], "").is_err());
        assert!(UniformSeries::new(0, 1, vec![], "").is_err());
        assert!(UniformSeries::new(0, 1, vec![f64::NAN], "").is_err());
    }

    #[test]
    fn ema_examples() {
        let y = ema_denoise(&series(vec![5.0, 5.0, 5.0]), 0.3).unwrap();
        assert_eq!(y.values(), &[5.0, 5.0, 5.0]);
        let y = ema_denoise(&series(vec![0.0, 1.0]), 0.5).unwrap();
        assert_eq!(y.values(), &[0.0, 0.5]);
        assert!(ema_denoise(&series(vec![1.0]), 0.0).is_err());
        assert!(ema_denoise(&series(vec![1.0]), 1.5).is_err());
    }

    #[test]
    fn ema_matches_recurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x: Vec<f64> = (0..1000).map(|_| rng.random_range(-50.0..50.0)).collect();
        let y = ema_denoise(&series(x.clone()), 0.1).unwrap();
        let mut expected = vec![x[0]];
        for t in 1..x.len() {
            let prev = expected[t - 1];
            expected.push(0.1 * x[t] + 0.9 * prev);
        }
        for (a, b) in y.values().iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn ema_alpha_one_is_identity() {
        let x = vec![3.0, -1.0, 7.5, 2.0];
        assert_eq!(ema_denoise(&series(x.clone()), 1.0).unwrap().values(), &x[..]);
    }

    #[test]
    fn resample_examples() {
        let s = UniformSeries::new(0, 1800, vec![10.0, 16.0], "").unwrap();
        let r = resample_linear(&s, 900).unwrap();
        assert_eq!(r.values(), &[10.0, 13.0, 16.0]);
        assert_eq!(resample_linear(&s, 1800).unwrap().values(), s.values());
        assert!(resample_linear(&UniformSeries::new(0, 1, vec![1.0], "").unwrap(), 1).is_err());
        assert!(resample_linear(&s, 0).is_err());
    }

    #[test]
    fn resample_matches_two_point_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..50).map(|_| rng.random_range(0.0..100.0)).collect();
        let s = UniformSeries::new(1_000, 1800, x.clone(), "").unwrap();
        let r = resample_linear(&s, 600).unwrap();
        assert_eq!(r.len(), 49 * 3 + 1);
        for (k, v) in r.values().iter().enumerate() {
            let t = 1_000 + 600 * k as i64;
            let i = ((t - 1_000) / 1800).min(48) as usize;
            let (t0, t1) = (1_000 + 1800 * i as i64, 1_000 + 1800 * (i as i64 + 1));
            let line = x[i] + (t - t0) as f64 * (x[i + 1] - x[i]) / (t1 - t0) as f64;
            assert!((v - line).abs() <= 1e-12);
        }
        // original grid points are reproduced exactly
        for (i, &xi) in x.iter().enumerate() {
            assert_eq!(r.values()[3 * i], xi);
        }
    }

    #[test]
    fn align_identity_and_intersection() {
        let sop = UniformSeries::new(0, 1, vec![1.0; 101], SOP_UNIT).unwrap();
        let w = weather(0, 1, 101);
        let (s2, w2) = align(&sop, &w).unwrap();
        assert_eq!(s2, sop);
        assert_eq!(w2, w);

        let w = weather(50, 1, 101);
        let (s2, w2) = align(&sop, &w).unwrap();
        assert_eq!((s2.start, s2.end()), (50, 100));
        assert_eq!((w2.start, w2.end(), w2.len()), (50, 100, 51));
        // idempotent
        let (s3, w3) = align(&s2, &w2).unwrap();
        assert_eq!((s3, w3), (s2, w2));

        let w = weather(500, 1, 10);
        assert!(matches!(align(&sop, &w), Err(Error::NoOverlap)));
    }

    #[test]
    fn align_staggered_grids_counts_shared_timestamps() {
        for (s0, sl, w0, wl) in [(0, 40, 7, 100), (13, 200, 2, 30), (5, 5, 0, 9)] {
            let sop = UniformSeries::new(s0, 3, vec![0.0; sl], "").unwrap();
            let w = weather(w0 * 3 + s0 % 3, 3, wl);
            let a: std::collections::BTreeSet<i64> = (0..sl).map(|i| sop.timestamp(i)).collect();
            let b: std::collections::BTreeSet<i64> = (0..wl).map(|i| w.timestamp(i)).collect();
            let shared = a.intersection(&b).count();
            match align(&sop, &w) {
                Ok((s, ww)) => {
                    assert_eq!(s.len(), shared);
                    assert_eq!(ww.len(), shared);
                    assert_eq!(s.start, ww.start);
                }
                Err(Error::NoOverlap) => assert_eq!(shared, 0),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn align_resamples_coarse_weather() {
        let sop = UniformSeries::new(0, 1, vec![0.0; 4000], "").unwrap();
        let w = weather(0, 1800, 3);
        let (s, ww) = align(&sop, &w).unwrap();
        assert_eq!(s.len(), 3601);
        assert_eq!(ww.step, 1);
        assert_eq!(ww.channel(WIND_GUST).unwrap()[900], 0.5);
    }

    #[test]
    fn window_counts() {
        let s = series((0..100).map(f64::from).collect());
        assert_eq!(make_windows(&s, None, 36, 12, 1).unwrap().len(), 53);
        let s48 = series((0..48).map(f64::from).collect());
        assert_eq!(make_windows(&s48, None, 36, 12, 1).unwrap().len(), 1);
        let s47 = series((0..47).map(f64::from).collect());
        let d = make_windows(&s47, None, 36, 12, 1).unwrap();
        assert!(d.is_empty() && d.insufficient_history());
        assert_eq!(make_windows(&s, None, 36, 12, 5).unwrap().len(), (100 - 48) / 5 + 1);
        assert!(make_windows(&s, None, 12, 12, 1).is_err());
        assert!(make_windows(&s, None, 36, 12, 0).is_err());
    }

    #[test]
    fn window_overlap_identity_and_times() {
        let s = UniformSeries::new(100, 2, (0..80).map(f64::from).collect(), "").unwrap();
        let w = weather(100, 2, 80);
        let d = make_windows(&s, Some(&w), 10, 4, 3).unwrap();
        for i in 0..d.len() {
            assert_eq!(&d.target(i)[..6], &d.input(i)[4..]);
            assert_eq!(&d.target(i)[6..], d.future(i));
            assert_eq!(d.exo(TEMPERATURE, i).unwrap().len(), 10);
            let t = d.times(i);
            assert_eq!(t.origin, 100 + 2 * (3 * i as i64 + 9));
            assert_eq!(t.last_target, t.origin + 8);
        }
    }

    #[test]
    fn zscore_examples() {
        let z = ZScore::fit(&[2.0, 2.0, 2.0]).unwrap();
        assert_eq!((z.mean, z.std), (2.0, 0.0));
        assert_eq!(z.apply(&[2.0, 2.0, 2.0]), vec![0.0; 3]);
        let z = ZScore::fit(&[-1.0, 1.0]).unwrap();
        assert_eq!((z.mean, z.std), (0.0, 1.0));
        assert_eq!(z.apply(&[-1.0, 1.0]), vec![-1.0, 1.0]);
        assert!(ZScore::fit(&[]).is_err());
    }

    #[test]
    fn zscore_normalizes_and_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..500).map(|_| rng.random_range(100.0..300.0)).collect();
        let z = ZScore::fit(&x).unwrap();
        let y = z.apply(&x);
        let back = ZScore::fit(&y).unwrap();
        assert!(back.mean.abs() <= 1e-10);
        assert!((back.std - 1.0).abs() <= 1e-10);
        for (a, b) in z.invert(&y).iter().zip(&x) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}
